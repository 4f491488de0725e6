"""Linear matrix structures: the symmetric-Toeplitz subspace and a generic basis hook.

A structure is an orthonormal family of symmetric matrices under the trace
inner product; projection onto its span is then a plain expansion. For the
Toeplitz family this projection coincides with per-diagonal averaging.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotToeplitz
from .matops import frobenius, min_eigenvalue, symmetrize

# Gram-Schmidt drop tolerance for user-supplied spanning sets.
GS_DROP_TOL = 1e-10


@dataclass(frozen=True)
class LinearStructure:
    """Orthonormal basis of a subspace of symmetric n x n matrices.

    basis is stored stacked, shape (k, n, n), with trace(Q_i Q_j) = delta_ij.
    """

    n: int
    basis: np.ndarray

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    def coefficients(self, a) -> np.ndarray:
        """Trace inner products <A, Q_k> for all basis elements."""
        a = np.asarray(a, dtype=float)
        if a.shape != (self.n, self.n):
            raise DimensionMismatch(f"expected {(self.n, self.n)}, got {a.shape}")
        return np.tensordot(self.basis, a, axes=([1, 2], [0, 1]))

    def combine(self, coeffs) -> np.ndarray:
        """Linear combination sum_k c_k Q_k."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.k,):
            raise DimensionMismatch(f"expected {self.k} coefficients, got {coeffs.shape}")
        return np.tensordot(coeffs, self.basis, axes=(0, 0))

    def project(self, a) -> np.ndarray:
        """Orthogonal projection of A onto span(Q_1..Q_k)."""
        return self.combine(self.coefficients(symmetrize(a)))


def from_spanning_set(mats, drop_tol: float = GS_DROP_TOL) -> LinearStructure:
    """Build a LinearStructure from an arbitrary spanning set of symmetric matrices.

    Applies modified Gram-Schmidt in the trace inner product, dropping
    directions whose residual norm falls below drop_tol (relative to the
    largest input norm).
    """
    mats = [symmetrize(m) for m in mats]
    if not mats:
        raise DimensionMismatch("spanning set is empty")
    n = mats[0].shape[0]
    scale = max(frobenius(m) for m in mats)
    if scale == 0.0:
        raise DimensionMismatch("spanning set contains only zero matrices")
    kept: list[np.ndarray] = []
    for m in mats:
        if m.shape != (n, n):
            raise DimensionMismatch("spanning set matrices differ in shape")
        q = m.copy()
        for _ in range(2):  # second pass for orthogonality at working precision
            for b in kept:
                q -= np.tensordot(q, b, axes=2) * b
        nrm = frobenius(q)
        if nrm > drop_tol * scale:
            kept.append(q / nrm)
    return LinearStructure(n=n, basis=np.stack(kept))


def toeplitz_structure(n: int) -> LinearStructure:
    """Orthonormal basis of the symmetric Toeplitz matrices of size n.

    Element k has ones on the +k and -k diagonals, normalized to unit
    Frobenius norm; the span is exactly the symmetric Toeplitz family.
    """
    if n < 1:
        raise DimensionMismatch("dimension must be >= 1")
    basis = np.zeros((n, n, n))
    basis[0] = np.eye(n) / np.sqrt(n)
    for k in range(1, n):
        q = np.eye(n, k=k) + np.eye(n, k=-k)
        basis[k] = q / np.sqrt(2.0 * (n - k))
    return LinearStructure(n=n, basis=basis)


def project_structure(a, structure: LinearStructure) -> np.ndarray:
    """Frobenius-nearest matrix to A inside the structure's span."""
    return structure.project(a)


def params_to_matrix(r) -> np.ndarray:
    """Symmetric Toeplitz matrix with first row r = (r_0, ..., r_{n-1})."""
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size < 1:
        raise DimensionMismatch("parameter vector must be 1-d and nonempty")
    idx = np.arange(r.size)
    return r[np.abs(idx[:, None] - idx[None, :])]


def matrix_to_params(t, tol: float = 1e-10) -> np.ndarray:
    """First-row parameters of a (numerically exactly) Toeplitz matrix.

    The per-diagonal means are returned; if the matrix deviates from its
    Toeplitz projection by more than tol * max(||T||_F, 1), raises NotToeplitz.
    """
    t = symmetrize(t)
    n = t.shape[0]
    r = np.array([np.mean(np.diagonal(t, k)) for k in range(n)])
    defect = frobenius(t - params_to_matrix(r))
    if defect > tol * max(frobenius(t), 1.0):
        raise NotToeplitz(f"Toeplitz defect {defect:.3e} exceeds tolerance")
    return r


@dataclass(frozen=True)
class AdmissibilityCheck:
    toeplitz_defect: float
    min_eig: float
    admissible: bool


def is_admissible(t, tol: float = 1e-8) -> AdmissibilityCheck:
    """Distance from the PSD-Toeplitz set: structure defect and minimum eigenvalue.

    Admissible iff the Toeplitz defect is at most tol * scale and the minimum
    eigenvalue is at least -tol * scale, with scale = max(||T||_F, 1).
    """
    t = symmetrize(t)
    scale = max(frobenius(t), 1.0)
    structure = toeplitz_structure(t.shape[0])
    defect = frobenius(t - structure.project(t))
    w_min = min_eigenvalue(t)
    return AdmissibilityCheck(
        toeplitz_defect=defect,
        min_eig=w_min,
        admissible=bool(defect <= tol * scale and w_min >= -tol * scale),
    )
