"""Structured covariance approximation under the distances of the toolkit.

The transportation problem (nearest PSD-Toeplitz matrix in the Wasserstein-2 /
Bures-Hellinger sense) is a semidefinite program solved by an operator-split
ADMM: an affine step pins the data block and keeps the estimate inside the
linear structure, a cone step projects the 2n x 2n block matrix onto the PSD
cone, and scaled duals tie the two copies together. The trace-gap and
nuclear-norm problems reuse the same splitting on n x n blocks, the linearized
log problem adds a structured least-squares step, and the likelihood / KL
problems run a damped Newton descent on the structure parameters.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InitInfeasible, SingularData
from .matops import frobenius, invm_spd, invsqrtm_spd, project_psd, sym_eig, symmetrize
from .structure import LinearStructure

DEFAULT_RIDGES = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)


class SolveStatus(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERS = "MaxIters"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class AdmmOptions:
    """ADMM controls; eps thresholds are relative to max(||T_hat||_F, 1)."""

    rho: float = 1.0
    eps_primal: float = 1e-8
    eps_dual: float = 1e-8
    max_iters: int = 50000


@dataclass(frozen=True)
class DescentOptions:
    """Newton-descent controls; grad_tol and pd_floor are scale-relative."""

    grad_tol: float = 1e-7
    max_iters: int = 2000
    armijo: float = 1e-4
    shrink: float = 0.5
    max_backtracks: int = 60
    pd_floor: float = 1e-10


@dataclass
class SolveReport:
    T_star: np.ndarray
    objective: float
    iterations: int
    primal_residual: float
    dual_residual: float
    status: SolveStatus
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TransportResult:
    report: SolveReport
    S_star: np.ndarray
    distance: float


def _scale_of(t_hat) -> float:
    return max(frobenius(t_hat), 1.0)


def _check_structure(t_hat, structure: LinearStructure):
    if t_hat.shape[0] != structure.n:
        raise DimensionMismatch(
            f"structure dimension {structure.n} does not match matrix size {t_hat.shape[0]}"
        )


# ---------------------------------------------------------------------------
# Transportation SDP (block LMI) and its inner coupling problem
# ---------------------------------------------------------------------------


def _transport_admm(t_hat, structure, opts, fixed_t):
    """Shared ADMM loop; with fixed_t the estimate block is pinned instead of
    projected onto the structure (the pure coupling problem).

    The data is normalized to unit scale before iterating, which makes the
    solve exactly equivariant under positive rescaling of the inputs; the
    stopping tolerances then act as scale-relative thresholds. Residuals are
    reported in the original data units.
    """
    t_hat = symmetrize(t_hat)
    n = t_hat.shape[0]
    scale = _scale_of(t_hat)
    th = t_hat / scale
    rho = opts.rho

    if fixed_t is None:
        proj_eye = structure.project(np.eye(n))
    else:
        fixed_t = symmetrize(fixed_t)
        if fixed_t.shape != t_hat.shape:
            raise DimensionMismatch("marginals must have equal dimensions")
        ft = fixed_t / scale

    x = np.zeros((2 * n, 2 * n))
    z = np.zeros((2 * n, 2 * n))
    u = np.zeros((2 * n, 2 * n))
    r_primal = np.inf
    r_dual = np.inf
    status = SolveStatus.MAX_ITERS
    iters = opts.max_iters
    for it in range(1, opts.max_iters + 1):
        b = z - u
        if fixed_t is None:
            x[:n, :n] = structure.project(b[:n, :n]) - proj_eye / rho
        else:
            x[:n, :n] = ft
        x12 = b[:n, n:]
        x12 = x12 + np.eye(n) / rho
        x[:n, n:] = x12
        x[n:, :n] = x12.T
        x[n:, n:] = th

        m = x + u
        z_new = project_psd(m)
        u = m - z_new
        r_primal = frobenius(x - z_new)
        r_dual = rho * frobenius(z_new - z)
        z = z_new
        if r_primal <= opts.eps_primal and r_dual <= opts.eps_dual:
            status = SolveStatus.CONVERGED
            iters = it
            break

    t_star = scale * x[:n, :n]
    s_star = scale * x[:n, n:]
    objective = float(np.trace(t_star) + np.trace(t_hat) - 2.0 * np.trace(s_star))
    report = SolveReport(
        T_star=t_star,
        objective=objective,
        iterations=iters,
        primal_residual=scale * r_primal,
        dual_residual=scale * r_dual,
        status=status,
    )
    return TransportResult(
        report=report, S_star=s_star, distance=float(np.sqrt(max(objective, 0.0)))
    )


def solve_transport(t_hat, structure: LinearStructure, opts: AdmmOptions | None = None) -> TransportResult:
    """Nearest structured PSD matrix to t_hat in transportation distance.

    Minimizes trace(T + T_hat - S - S') subject to [[T, S], [S', T_hat]] >= 0
    with T in the structure's span. Handles singular t_hat (the motivating
    case); the returned T lies in the span exactly and in the PSD cone up to
    the primal residual.
    """
    t_hat = symmetrize(t_hat)
    _check_structure(t_hat, structure)
    return _transport_admm(t_hat, structure, opts or AdmmOptions(), fixed_t=None)


def solve_coupling(t, t_hat, opts: AdmmOptions | None = None) -> TransportResult:
    """Optimal coupling cost between two fixed covariances, by the same ADMM.

    Both marginals are pinned; only the cross-correlation block is free. This
    is the semidefinite route to the quantity optimal_coupling() computes in
    closed form (which needs t_hat nonsingular; this solver does not).
    """
    return _transport_admm(t_hat, None, opts or AdmmOptions(), fixed_t=t)


# ---------------------------------------------------------------------------
# Trace-gap (independent-noise) and nuclear-norm (symmetric-noise) problems
# ---------------------------------------------------------------------------


def _eig_soft_threshold(a, tau):
    dec = sym_eig(a)
    w = np.sign(dec.eigenvalues) * np.maximum(np.abs(dec.eigenvalues) - tau, 0.0)
    return symmetrize((dec.eigenvectors * w) @ dec.eigenvectors.T)


def _two_block_admm(t_hat, structure, opts, linear_shift, second_update, objective_of):
    """ADMM skeleton shared by the trace-gap and nuclear problems.

    Splitting: T in span(structure) with cone copy Z1 ~ T and a second copy
    Z2 ~ T_hat - T, updated by `second_update` (PSD projection or eigenvalue
    soft-thresholding). `linear_shift` is the gradient of the linear part of
    the objective in T, absorbed into the T-step. Data is normalized to unit
    scale internally (tolerances are scale-relative, the solve is rescaling
    equivariant); residuals are reported in data units.
    """
    t_hat = symmetrize(t_hat)
    _check_structure(t_hat, structure)
    n = t_hat.shape[0]
    scale = _scale_of(t_hat)
    th = t_hat / scale
    rho = opts.rho
    shift = structure.project(linear_shift(n)) / (2.0 * rho)

    t = np.zeros((n, n))
    z1 = np.zeros((n, n))
    z2 = np.zeros((n, n))
    u1 = np.zeros((n, n))
    u2 = np.zeros((n, n))
    r_primal = np.inf
    r_dual = np.inf
    status = SolveStatus.MAX_ITERS
    iters = opts.max_iters
    for it in range(1, opts.max_iters + 1):
        a1 = z1 - u1
        a2 = th - z2 + u2
        t = structure.project(0.5 * (a1 + a2)) - shift

        m1 = t + u1
        z1_new = project_psd(m1)
        u1 = m1 - z1_new

        gap = th - t
        z2_new = second_update(gap + u2, rho)
        u2 = u2 + gap - z2_new

        r_primal = float(np.sqrt(frobenius(t - z1_new) ** 2 + frobenius(gap - z2_new) ** 2))
        r_dual = rho * float(np.sqrt(frobenius(z1_new - z1) ** 2 + frobenius(z2_new - z2) ** 2))
        z1, z2 = z1_new, z2_new
        if r_primal <= opts.eps_primal and r_dual <= opts.eps_dual:
            status = SolveStatus.CONVERGED
            iters = it
            break

    t_star = scale * t
    return SolveReport(
        T_star=t_star,
        objective=objective_of(t_hat, t_star),
        iterations=iters,
        primal_residual=scale * r_primal,
        dual_residual=scale * r_dual,
        status=status,
    )


def solve_stoica(t_hat, structure: LinearStructure, opts: AdmmOptions | None = None) -> SolveReport:
    """Largest structured PSD matrix below t_hat in the PSD order.

    Minimizes the residual noise energy trace(T_hat - T) subject to
    T_hat - T >= 0, T >= 0, T structured. Always feasible (T = 0).
    """
    return _two_block_admm(
        t_hat,
        structure,
        opts or AdmmOptions(),
        # objective -trace(T): gradient -I
        linear_shift=lambda n: -np.eye(n),
        second_update=lambda m, rho: project_psd(m),
        objective_of=lambda th, t: float(np.trace(th) - np.trace(t)),
    )


def solve_nuclear(t_hat, structure: LinearStructure, opts: AdmmOptions | None = None) -> SolveReport:
    """Structured PSD matrix minimizing the nuclear norm of T_hat - T.

    Equivalent to explaining T_hat and T by symmetric additive noise of
    minimum combined energy; the gap block is updated by eigenvalue
    soft-thresholding.
    """

    def nuclear_of(th, t):
        w = sym_eig(th - t).eigenvalues
        return float(np.sum(np.abs(w)))

    return _two_block_admm(
        t_hat,
        structure,
        opts or AdmmOptions(),
        linear_shift=lambda n: np.zeros((n, n)),
        second_update=_eig_soft_threshold,
        objective_of=nuclear_of,
    )


def verify_nuclear_identity(t_hat, t) -> dict:
    """Split T_hat - T into PSD parts Q, Q_hat with T_hat + Q_hat = T + Q.

    Q collects the positive eigenvalue part of the gap and Q_hat the negative
    one, so trace(Q + Q_hat) equals the nuclear norm of the gap; this is the
    minimum combined noise energy.
    """
    gap = symmetrize(t_hat) - symmetrize(t)
    dec = sym_eig(gap)
    w = dec.eigenvalues
    v = dec.eigenvectors
    q = symmetrize((v * np.maximum(w, 0.0)) @ v.T)
    q_hat = symmetrize((v * np.maximum(-w, 0.0)) @ v.T)
    return {
        "Q": q,
        "Q_hat": q_hat,
        "total_noise": float(np.trace(q) + np.trace(q_hat)),
        "nuclear": float(np.sum(np.abs(w))),
    }


# ---------------------------------------------------------------------------
# Linearized log-deviation problem
# ---------------------------------------------------------------------------


def solve_log_linear(t_hat, structure: LinearStructure, opts: AdmmOptions | None = None) -> SolveReport:
    """Structured PSD minimizer of ||T_hat^{-1/2} T T_hat^{-1/2} - I||_F.

    ADMM with a closed-form structured least-squares step: the normal
    equations use the Gram matrix G_kl = trace(T_hat^{-1} Q_k T_hat^{-1} Q_l)
    over the structure basis, and the cone copy is a PSD projection.
    """
    opts = opts or AdmmOptions()
    t_hat = symmetrize(t_hat)
    _check_structure(t_hat, structure)
    n = t_hat.shape[0]
    scale = _scale_of(t_hat)
    w_min = sym_eig(t_hat).eigenvalues[-1]
    if w_min <= 1e-12 * scale:
        raise SingularData("linearized log problem needs a strictly positive definite data matrix")
    th = t_hat / scale
    rho = opts.rho

    whit = invsqrtm_spd(th)
    wqw = np.einsum("ij,kjl,lm->kim", whit, structure.basis, whit)
    gram = np.tensordot(wqw, wqw, axes=([1, 2], [1, 2]))
    lin = np.trace(wqw, axis1=1, axis2=2)
    chol = np.linalg.cholesky(gram + rho * np.eye(structure.k))

    z = np.zeros((n, n))
    u = np.zeros((n, n))
    coeffs = np.zeros(structure.k)
    r_primal = np.inf
    r_dual = np.inf
    status = SolveStatus.MAX_ITERS
    iters = opts.max_iters
    for it in range(1, opts.max_iters + 1):
        b = structure.coefficients(z - u)
        rhs = lin + rho * b
        coeffs = np.linalg.solve(chol.T, np.linalg.solve(chol, rhs))
        t = structure.combine(coeffs)

        m = t + u
        z_new = project_psd(m)
        u = m - z_new
        r_primal = frobenius(t - z_new)
        r_dual = rho * frobenius(z_new - z)
        z = z_new
        if r_primal <= opts.eps_primal and r_dual <= opts.eps_dual:
            status = SolveStatus.CONVERGED
            iters = it
            break

    t_star = scale * structure.combine(coeffs)
    objective = float(frobenius(whit @ (t_star / scale) @ whit - np.eye(n)))
    return SolveReport(
        T_star=t_star,
        objective=objective,
        iterations=iters,
        primal_residual=scale * r_primal,
        dual_residual=scale * r_dual,
        status=status,
    )


# ---------------------------------------------------------------------------
# Likelihood and KL problems: damped Newton descent on structure parameters
# ---------------------------------------------------------------------------


def _descend(structure, r0, fgh, scale, opts):
    """Levenberg-damped Newton descent with Armijo backtracking and a PD floor.

    fgh(coeffs) -> (f, grad, hess). The Newton system is shifted by an
    adaptive multiple of the identity (grown on rejected steps, shrunk on
    accepted ones) so each step is a descent direction even where the
    objective is nonconvex. Steps whose implied matrix drops to the floor are
    rejected. Returns (coeffs, f, grad_norm, iterations, status, stalled).
    """
    floor = opts.pd_floor * scale
    grad_tol = opts.grad_tol * scale

    def feasible(coeffs):
        w = sym_eig(structure.combine(coeffs)).eigenvalues
        return w[-1] > floor

    if not feasible(r0):
        raise InitInfeasible("starting point is not strictly positive definite")

    coeffs = np.asarray(r0, dtype=float).copy()
    f, g, h = fgh(coeffs)
    damping = 1e-3
    status = SolveStatus.MAX_ITERS
    iters = opts.max_iters
    stalled = False
    eye = np.eye(coeffs.size)
    for it in range(1, opts.max_iters + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= grad_tol:
            status = SolveStatus.CONVERGED
            iters = it - 1
            break

        accepted = False
        for _ in range(opts.max_backtracks):
            try:
                step = np.linalg.solve(h + damping * eye, -g)
            except np.linalg.LinAlgError:
                damping = max(damping * 10.0, 1e-12)
                continue
            slope = float(np.dot(g, step))
            if slope >= 0.0:
                damping = max(damping * 10.0, 1e-12)
                continue
            trial = coeffs + step
            if feasible(trial):
                f_try, g_try, h_try = fgh(trial)
                if f_try <= f + opts.armijo * slope:
                    coeffs, f, g, h = trial, f_try, g_try, h_try
                    damping = max(damping * opts.shrink, 1e-14)
                    accepted = True
                    break
            damping = max(damping * 10.0, 1e-12)
        if not accepted:
            # no acceptable damped step: wedged against the PD floor
            iters = it
            stalled = True
            break

    return coeffs, f, float(np.linalg.norm(g)), iters, status, stalled


def ml_objective_parts(t_hat, structure, coeffs):
    """Objective log|T| + trace(T_hat T^{-1}), gradient, and Hessian at T(coeffs).

    Gradient component k is trace((T^{-1} - T^{-1} T_hat T^{-1}) Q_k); a zero
    gradient is exactly the stationarity condition of the likelihood problem.
    """
    t = structure.combine(coeffs)
    dec = sym_eig(t)
    w, v = dec.eigenvalues, dec.eigenvectors
    t_inv = symmetrize((v / w) @ v.T)
    b = symmetrize(t_inv @ t_hat @ t_inv)
    f = float(np.sum(np.log(w)) + np.trace(t_hat @ t_inv))
    g = structure.coefficients(t_inv - b)
    aq = np.einsum("ij,kjl->kil", t_inv, structure.basis)
    aqa = np.einsum("kij,jl->kil", aq, t_inv)
    aqb = np.einsum("kij,jl->kil", aq, b)
    h1 = np.tensordot(aqa, structure.basis, axes=([1, 2], [1, 2]))
    h2 = np.tensordot(aqb, structure.basis, axes=([1, 2], [1, 2]))
    h = -h1 + h2 + h2.T
    return f, g, symmetrize(h)


def solve_ml(
    t_hat,
    structure: LinearStructure,
    init=None,
    opts: DescentOptions | None = None,
) -> SolveReport:
    """Structured covariance maximizing the Gaussian likelihood of the data.

    Descends log|T| + trace(T_hat T^{-1}) over the structure parameters,
    keeping T strictly positive definite. The problem is not convex; without
    an explicit init, five ridge levels of the projected data matrix are tried
    and the best converged run is kept (per-start results in extras).
    """
    opts = opts or DescentOptions()
    t_hat = symmetrize(t_hat)
    _check_structure(t_hat, structure)
    scale = _scale_of(t_hat)
    n = t_hat.shape[0]

    def fgh(coeffs):
        return ml_objective_parts(t_hat, structure, coeffs)

    base = structure.coefficients(t_hat)
    eye_coeffs = structure.coefficients(np.eye(n))
    if init is not None:
        starts = [("init", structure.coefficients(symmetrize(init)))]
    else:
        level = float(np.trace(t_hat)) / n
        starts = [(f"ridge={lam:g}", base + lam * level * eye_coeffs) for lam in DEFAULT_RIDGES]

    runs = []
    infeasible = 0
    for label, r0 in starts:
        try:
            coeffs, f, gnorm, iters, status, stalled = _descend(structure, r0, fgh, scale, opts)
        except InitInfeasible:
            if init is not None:
                raise
            infeasible += 1
            continue
        runs.append((label, coeffs, f, gnorm, iters, status, stalled))
    if not runs:
        raise InitInfeasible("no ridge level produced a positive definite start")

    converged = [r for r in runs if r[5] is SolveStatus.CONVERGED]
    pool = converged if converged else runs
    best = min(pool, key=lambda r: r[2])
    label, coeffs, f, gnorm, iters, status, stalled = best
    conv_objectives = [r[2] for r in converged]
    extras = {
        "start": label,
        "grad_norm": gnorm,
        "stalled": stalled,
        "starts": [
            {"start": r[0], "objective": r[2], "grad_norm": r[3], "status": r[5].value, "stalled": r[6]}
            for r in runs
        ],
        "infeasible_starts": infeasible,
        "multistart_spread": (max(conv_objectives) - min(conv_objectives)) if conv_objectives else float("nan"),
    }
    return SolveReport(
        T_star=structure.combine(coeffs),
        objective=f,
        iterations=iters,
        primal_residual=gnorm,
        dual_residual=0.0,
        status=status,
        extras=extras,
    )


def solve_kl(t_hat, structure: LinearStructure, opts: DescentOptions | None = None) -> SolveReport:
    """Structured covariance minimizing -log|T| + trace(T T_hat^{-1}).

    Convex for strictly positive definite data; raises SingularData otherwise
    (the problem is vacuous for singular data).
    """
    opts = opts or DescentOptions()
    t_hat = symmetrize(t_hat)
    _check_structure(t_hat, structure)
    scale = _scale_of(t_hat)
    n = t_hat.shape[0]
    w_min = sym_eig(t_hat).eigenvalues[-1]
    if w_min <= 1e-12 * scale:
        raise SingularData("KL problem is vacuous for a singular data covariance")
    t_hat_inv = invm_spd(t_hat)

    def fgh(coeffs):
        t = structure.combine(coeffs)
        dec = sym_eig(t)
        w, v = dec.eigenvalues, dec.eigenvectors
        t_inv = symmetrize((v / w) @ v.T)
        f = float(-np.sum(np.log(w)) + np.trace(t @ t_hat_inv))
        g = structure.coefficients(t_hat_inv - t_inv)
        aq = np.einsum("ij,kjl->kil", t_inv, structure.basis)
        aqa = np.einsum("kij,jl->kil", aq, t_inv)
        h = np.tensordot(aqa, structure.basis, axes=([1, 2], [1, 2]))
        return f, g, symmetrize(h)

    level = float(np.trace(t_hat)) / n
    r0 = structure.coefficients(t_hat) + 1e-3 * level * structure.coefficients(np.eye(n))
    coeffs, f, gnorm, iters, status, stalled = _descend(structure, r0, fgh, scale, opts)
    return SolveReport(
        T_star=structure.combine(coeffs),
        objective=f,
        iterations=iters,
        primal_residual=gnorm,
        dual_residual=0.0,
        status=status,
        extras={"grad_norm": gnorm, "stalled": stalled},
    )
