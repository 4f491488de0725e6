"""Dense symmetric linear algebra: eigendecompositions, matrix functions, cone projections.

Every fractional power, log, and PSD projection in the package routes through
:func:`sym_eig` so that the various closed forms stay mutually consistent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NegativeEigenvalue, NotPositiveDefinite, SingularModel

# Eigenvalues above -TOL_NEG * ||A||_F are treated as roundoff from a PSD input;
# anything below signals a genuinely indefinite matrix.
TOL_NEG = 1e-10
# Strict positive-definiteness threshold, relative to ||A||_F.
TOL_PD = 1e-12


def symmetrize(a) -> np.ndarray:
    """Return the symmetric part (A + A') / 2 as a float array.

    Raises DimensionMismatch unless `a` is a square 2-d array with n >= 1.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


def frobenius(a) -> float:
    return float(np.linalg.norm(a, ord="fro"))


@dataclass(frozen=True)
class EigDecomp:
    """Spectral decomposition A = V diag(w) V' with w sorted descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def sym_eig(a) -> EigDecomp:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.

    Deterministic for a fixed input. Non-convergence of the underlying QR
    iteration (essentially impossible for symmetric input) is re-raised as a
    hard fault.
    """
    a = symmetrize(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise RuntimeError(f"symmetric eigensolver failed to converge: {exc}") from exc
    order = np.argsort(w)[::-1]
    return EigDecomp(eigenvalues=w[order], eigenvectors=v[:, order])


def _apply_spectral(a, fn) -> np.ndarray:
    dec = sym_eig(a)
    w = fn(dec.eigenvalues, frobenius(a))
    return symmetrize((dec.eigenvectors * w) @ dec.eigenvectors.T)


def sqrtm_psd(a, clip_floor: float = 0.0) -> np.ndarray:
    """Principal square root of a PSD matrix.

    Eigenvalues in (-tol, 0) with tol = 1e-10 * ||A||_F are treated as roundoff
    and clipped to `clip_floor`; anything below tol raises NegativeEigenvalue.
    """

    def fn(w, scale):
        tol = TOL_NEG * scale
        if w[-1] < -tol:
            raise NegativeEigenvalue(
                f"matrix has eigenvalue {w[-1]:.3e} below -{tol:.3e}; not a covariance"
            )
        return np.sqrt(np.maximum(w, clip_floor))

    return _apply_spectral(a, fn)


def invsqrtm_spd(a) -> np.ndarray:
    """Inverse square root A^{-1/2} of a strictly positive definite matrix."""

    def fn(w, scale):
        if w[-1] <= TOL_PD * scale:
            raise SingularModel(
                f"matrix is singular to working precision (min eigenvalue {w[-1]:.3e})"
            )
        return 1.0 / np.sqrt(w)

    return _apply_spectral(a, fn)


def invm_spd(a) -> np.ndarray:
    """Inverse of a strictly positive definite matrix via its eigendecomposition."""

    def fn(w, scale):
        if w[-1] <= TOL_PD * scale:
            raise SingularModel(
                f"matrix is singular to working precision (min eigenvalue {w[-1]:.3e})"
            )
        return 1.0 / w

    return _apply_spectral(a, fn)


def logm_spd(a) -> np.ndarray:
    """Matrix logarithm of a strictly positive definite matrix."""

    def fn(w, scale):
        if w[-1] <= TOL_PD * scale:
            raise NotPositiveDefinite(
                f"matrix log undefined: min eigenvalue {w[-1]:.3e} is not strictly positive"
            )
        return np.log(w)

    return _apply_spectral(a, fn)


def logdet_spd(a) -> float:
    """log det(A) for strictly positive definite A."""
    dec = sym_eig(a)
    w = dec.eigenvalues
    if w[-1] <= TOL_PD * frobenius(a):
        raise SingularModel(
            f"log-determinant undefined: min eigenvalue {w[-1]:.3e} is not strictly positive"
        )
    return float(np.sum(np.log(w)))


def project_psd(a) -> np.ndarray:
    """Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero."""
    return _apply_spectral(a, lambda w, scale: np.maximum(w, 0.0))


def min_eigenvalue(a) -> float:
    return float(sym_eig(a).eigenvalues[-1])


def norms(a) -> dict:
    """Frobenius, trace, and nuclear norms of a symmetric matrix.

    For symmetric input the nuclear norm is the sum of absolute eigenvalues.
    """
    a = symmetrize(a)
    w = sym_eig(a).eigenvalues
    return {
        "frobenius": frobenius(a),
        "trace": float(np.trace(a)),
        "nuclear": float(np.sum(np.abs(w))),
    }
