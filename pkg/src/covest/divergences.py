"""Closed-form distances and divergences between zero-mean Gaussian covariances.

Covers the likelihood divergence, both Kullback-Leibler directions, the Rao
and Fisher quadratic forms, the geodesic log-deviation, the Bures/Hellinger
distance, its optimizing orthogonal alignment, and the optimal transport
coupling between two Gaussians (whose cost equals the squared
Bures/Hellinger distance).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PerturbationTooLarge, SingularModel
from .matops import (
    TOL_PD,
    frobenius,
    invm_spd,
    invsqrtm_spd,
    logdet_spd,
    logm_spd,
    sqrtm_psd,
    sym_eig,
    symmetrize,
)

VALID_KINDS = (
    "likelihood",
    "kl",
    "log_deviation",
    "hellinger",
    "wasserstein2",
    "rao_quadratic",
    "fisher_quadratic",
)


@dataclass(frozen=True)
class MetricValue:
    """A computed dissimilarity.

    value is nonnegative and finite, except that `shifted=True` marks a
    likelihood objective evaluated against a singular data covariance, where
    the (infinite) -log|data| constant has been dropped and the remaining
    value may take any sign.
    """

    value: float
    kind: str
    shifted: bool = False


@dataclass(frozen=True)
class CouplingSolution:
    """Optimal cross-correlation S and the achieved squared transport cost."""

    S: np.ndarray
    cost: float


@dataclass(frozen=True)
class ProcrustesResult:
    distance: float
    U: np.ndarray


def _is_singular(a) -> bool:
    w = sym_eig(a).eigenvalues
    return bool(w[-1] <= TOL_PD * frobenius(a))


def likelihood_divergence(t, t_hat) -> MetricValue:
    """Likelihood divergence d(model T || data T_hat).

    Equals (log|T| - log|T_hat| + trace(T_hat T^{-1}) - n) / 2. The model T
    must be nonsingular. For singular T_hat the -log|T_hat| term is dropped
    and the result is flagged `shifted`; it is then an optimization objective,
    not a divergence.
    """
    t = symmetrize(t)
    t_hat = symmetrize(t_hat)
    n = t.shape[0]
    core = logdet_spd(t) + float(np.trace(t_hat @ invm_spd(t))) - n
    if _is_singular(t_hat):
        return MetricValue(value=0.5 * core, kind="likelihood", shifted=True)
    return MetricValue(value=0.5 * (core - logdet_spd(t_hat)), kind="likelihood")


def kl_gaussian(t_a, t_b, direction: str = "a||b") -> MetricValue:
    """Kullback-Leibler divergence between N(0, T_a) and N(0, T_b).

    direction "a||b" computes d(p_a || p_b) = (log|T_b| - log|T_a|
    + trace(T_a T_b^{-1}) - n) / 2; "b||a" swaps the roles. Both covariances
    must be strictly positive definite.
    """
    if direction == "a||b":
        first, second = symmetrize(t_a), symmetrize(t_b)
    elif direction == "b||a":
        first, second = symmetrize(t_b), symmetrize(t_a)
    else:
        raise ValueError(f"direction must be 'a||b' or 'b||a', got {direction!r}")
    n = first.shape[0]
    value = 0.5 * (
        logdet_spd(second)
        - logdet_spd(first)
        + float(np.trace(first @ invm_spd(second)))
        - n
    )
    return MetricValue(value=value, kind="kl")


def rao_quadratic(t, delta) -> MetricValue:
    """Rao metric quadratic form ||T^{-1/2} D T^{-1/2}||_F^2."""
    w = invsqrtm_spd(t)
    delta_t = w @ symmetrize(delta) @ w
    return MetricValue(value=frobenius(delta_t) ** 2, kind="rao_quadratic")


def fisher_quadratic_gaussian(t, delta, eps: float) -> MetricValue:
    """Fisher information quadratic form of the density perturbation p_eps - p.

    Closed form det(I - eps^2 D_T^2)^{-1/2} - 1 with D_T = T^{-1/2} D T^{-1/2},
    valid when ||eps D_T||_F < 1 (PerturbationTooLarge otherwise).
    """
    w = invsqrtm_spd(t)
    delta_t = w @ symmetrize(delta) @ w
    if abs(eps) * frobenius(delta_t) >= 1.0:
        raise PerturbationTooLarge(
            f"||eps * D_T||_F = {abs(eps) * frobenius(delta_t):.3e} must be < 1"
        )
    lam = sym_eig(delta_t).eigenvalues
    # det(I - e^2 L^2)^{-1/2} - 1 evaluated stably for small eps
    value = float(np.expm1(-0.5 * np.sum(np.log1p(-(eps * lam) ** 2))))
    return MetricValue(value=value, kind="fisher_quadratic")


def log_deviation(t, t_hat) -> MetricValue:
    """Geodesic distance ||log(T_hat^{-1/2} T T_hat^{-1/2})||_F; needs both SPD."""
    w = invsqrtm_spd(t_hat)
    return MetricValue(value=frobenius(logm_spd(w @ symmetrize(t) @ w)), kind="log_deviation")


def _cross_sqrt(t, t_hat) -> np.ndarray:
    """(T_hat^{1/2} T T_hat^{1/2})^{1/2} for PSD arguments."""
    rh = sqrtm_psd(t_hat)
    return sqrtm_psd(rh @ symmetrize(t) @ rh)


def bures_hellinger(t, t_hat) -> MetricValue:
    """Bures/Hellinger distance; defined for PSD (possibly singular) inputs.

    sqrt(trace(T + T_hat - 2 (T_hat^{1/2} T T_hat^{1/2})^{1/2})).
    """
    t = symmetrize(t)
    t_hat = symmetrize(t_hat)
    gap = float(np.trace(t) + np.trace(t_hat) - 2.0 * np.trace(_cross_sqrt(t, t_hat)))
    return MetricValue(value=float(np.sqrt(max(gap, 0.0))), kind="hellinger")


def hellinger_procrustes(t, t_hat) -> ProcrustesResult:
    """Orthogonal U minimizing ||T^{1/2} U - T_hat^{1/2}||_F, plus that minimum.

    U = T^{-1/2} T_hat^{-1/2} (T_hat^{1/2} T T_hat^{1/2})^{1/2}; the attained
    value equals the Bures/Hellinger distance. Both inputs must be SPD.
    """
    t = symmetrize(t)
    t_hat = symmetrize(t_hat)
    u = invsqrtm_spd(t) @ invsqrtm_spd(t_hat) @ _cross_sqrt(t, t_hat)
    distance = frobenius(sqrtm_psd(t) @ u - sqrtm_psd(t_hat))
    return ProcrustesResult(distance=distance, U=u)


def optimal_coupling(t, t_hat) -> CouplingSolution:
    """Optimal cross-correlation between N(0, T) and N(0, T_hat).

    S = T_hat^{-1/2} (T_hat^{1/2} T T_hat^{1/2})^{1/2} T_hat^{1/2}; the cost
    trace(T + T_hat - S - S') is the squared Wasserstein-2 distance and equals
    the squared Bures/Hellinger distance. T_hat must be SPD (callers with a
    singular T_hat solve the semidefinite formulation instead); T may be
    singular.
    """
    t = symmetrize(t)
    t_hat = symmetrize(t_hat)
    if _is_singular(t_hat):
        raise SingularModel("coupling closed form needs a nonsingular second marginal")
    rh = sqrtm_psd(t_hat)
    s = invsqrtm_spd(t_hat) @ sqrtm_psd(rh @ t @ rh) @ rh
    cost = float(np.trace(t) + np.trace(t_hat) - np.trace(s) - np.trace(s.T))
    return CouplingSolution(S=s, cost=max(cost, 0.0))
