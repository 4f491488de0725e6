"""Exception types shared across the package."""


class CovestError(Exception):
    """Base class for all errors raised by covest."""


class DimensionMismatch(CovestError):
    """Operands have incompatible shapes."""


class NegativeEigenvalue(CovestError):
    """Input has an eigenvalue below the negative-roundoff tolerance."""


class NotPositiveDefinite(CovestError):
    """Operation requires a strictly positive definite matrix."""


class SingularModel(CovestError):
    """A matrix that must be inverted is singular."""


class SingularData(CovestError):
    """The data covariance is singular and the problem is undefined for it."""


class PerturbationTooLarge(CovestError):
    """Perturbation violates the contraction hypothesis of the quadratic form."""


class NotToeplitz(CovestError):
    """Matrix is not Toeplitz within tolerance."""


class DegenerateSignal(CovestError):
    """Signal leaves no residual energy for the lattice recursion."""


class InitInfeasible(CovestError):
    """Supplied starting point is not strictly positive definite."""
