"""The spectral-line benchmark: data generation, estimation runs, and reports.

A single 11-sample record of a unit sinusoid at frequency pi/4 plus a fixed
low-level noise vector yields a rank-1 sample covariance. Each configured
method produces a maximum-entropy spectrum from it; results are written as one
CSV per spectrum, a combined SVG figure, and a summary CSV with peak locations,
solver residuals, and distances to the sample covariance.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import divergences
from .dataio import write_matrix, write_table
from .errors import CovestError, DimensionMismatch
from .matops import frobenius, project_psd, symmetrize
from .solvers import (
    AdmmOptions,
    DescentOptions,
    SolveReport,
    solve_kl,
    solve_log_linear,
    solve_ml,
    solve_nuclear,
    solve_stoica,
    solve_transport,
)
from .spectral import ARModel, SpectrumGrid, ar_from_covariance, burg_ar, me_spectrum
from .structure import toeplitz_structure

# Frequency of the benchmark sinusoid.
LINE_FREQ = np.pi / 4.0

# The fixed zero-mean noise record (variance 1e-4) used by the benchmark.
NOISE_VECTOR = np.array(
    [
        0.000562,
        -0.019127,
        0.007377,
        -0.000149,
        -0.007479,
        -0.013960,
        0.003510,
        0.012380,
        0.006979,
        0.003092,
        0.010053,
    ]
)

PHASE_LABELS = {"pi4": np.pi / 4.0, "pi2": np.pi / 2.0, "3pi4": 3.0 * np.pi / 4.0}

ALL_METHODS = ("burg", "kl", "loglin", "ml", "nuclear", "stoica", "transport")
DEFAULT_METHODS = ("burg", "ml", "transport")


@dataclass(frozen=True)
class ObservationSet:
    """m independent records of length n, stacked as rows."""

    records: np.ndarray

    def __post_init__(self):
        records = np.atleast_2d(np.asarray(self.records, dtype=float))
        if records.ndim != 2 or records.shape[0] < 1 or records.shape[1] < 1:
            raise DimensionMismatch(f"records must form an (m, n) table, got {records.shape}")
        object.__setattr__(self, "records", records)

    @property
    def m(self) -> int:
        return self.records.shape[0]

    @property
    def n(self) -> int:
        return self.records.shape[1]


def sample_covariance(obs: ObservationSet) -> np.ndarray:
    """(1/m) sum of outer products of the records; PSD with rank <= m."""
    return symmetrize(obs.records.T @ obs.records / obs.m)


def spectral_line_record(phase: float) -> ObservationSet:
    """The benchmark record cos(pi/4 * t + phase) + noise, t = 0..10."""
    t = np.arange(NOISE_VECTOR.size)
    return ObservationSet(records=(np.cos(LINE_FREQ * t + phase) + NOISE_VECTOR)[None, :])


@dataclass(frozen=True)
class ExperimentConfig:
    phase: float
    label: str = ""
    grid: int = 200
    ar_order: int = 10
    methods: tuple = DEFAULT_METHODS
    admm: AdmmOptions = field(default_factory=AdmmOptions)
    descent: DescentOptions = field(default_factory=DescentOptions)


@dataclass
class MethodOutcome:
    method: str
    error: str | None = None
    estimate: np.ndarray | None = None
    report: SolveReport | None = None
    model: ARModel | None = None
    spectrum: SpectrumGrid | None = None
    distances: dict = field(default_factory=dict)
    r0: float | None = None
    energy_proxy: float | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def top_peak(self):
        if self.spectrum is None or not self.spectrum.peaks:
            return None
        return self.spectrum.peaks[0]


@dataclass
class ExperimentBundle:
    config: ExperimentConfig
    observations: ObservationSet
    t_hat: np.ndarray
    outcomes: dict

    @property
    def any_errors(self) -> bool:
        return any(not o.ok for o in self.outcomes.values())


def _estimate(method, t_hat, structure, cfg):
    if method == "ml":
        return solve_ml(t_hat, structure, opts=cfg.descent)
    if method == "kl":
        return solve_kl(t_hat, structure, opts=cfg.descent)
    if method == "transport":
        return solve_transport(t_hat, structure, opts=cfg.admm).report
    if method == "loglin":
        return solve_log_linear(t_hat, structure, opts=cfg.admm)
    if method == "stoica":
        return solve_stoica(t_hat, structure, opts=cfg.admm)
    if method == "nuclear":
        return solve_nuclear(t_hat, structure, opts=cfg.admm)
    raise ValueError(f"unknown method {method!r}")


def _distances_to_data(estimate, t_hat) -> dict:
    """Every implemented distance between the estimate and the data covariance
    that is defined for the pair; undefined ones are reported as None.

    The estimate is first projected onto the PSD cone: solver output can sit a
    solver-tolerance below it, which the square-root forms reject.
    """
    est = project_psd(estimate)
    out = {}

    def attempt(key, fn):
        try:
            out[key] = fn()
        except CovestError:
            out[key] = None

    attempt("hellinger", lambda: divergences.bures_hellinger(est, t_hat).value)
    attempt("wasserstein2_sq", lambda: divergences.optimal_coupling(est, t_hat).cost)
    attempt("log_deviation", lambda: divergences.log_deviation(est, t_hat).value)
    attempt("kl_estimate_data", lambda: divergences.kl_gaussian(est, t_hat, "a||b").value)

    def likelihood():
        m = divergences.likelihood_divergence(est, t_hat)
        out["likelihood_shifted"] = m.shifted
        return m.value

    attempt("likelihood", likelihood)
    out.setdefault("likelihood_shifted", None)
    return out


def run_method(method, obs: ObservationSet, t_hat, cfg: ExperimentConfig) -> MethodOutcome:
    outcome = MethodOutcome(method=method)
    structure = toeplitz_structure(t_hat.shape[0])
    try:
        if method == "burg":
            outcome.model = burg_ar(obs.records[0], cfg.ar_order)
        else:
            report = _estimate(method, t_hat, structure, cfg)
            outcome.report = report
            outcome.estimate = report.T_star
            outcome.distances = _distances_to_data(report.T_star, t_hat)
            outcome.r0 = float(np.trace(report.T_star)) / t_hat.shape[0]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                outcome.model = ar_from_covariance(report.T_star, cfg.ar_order)
            outcome.energy_proxy = outcome.r0 - outcome.model.noise_var
        outcome.spectrum = me_spectrum(outcome.model, cfg.grid)
    except CovestError as exc:
        outcome.error = f"{type(exc).__name__}: {exc}"
    return outcome


def run_experiment(cfg: ExperimentConfig, outdir=None) -> ExperimentBundle:
    """Run every configured method on the benchmark record for cfg.phase.

    Method failures are recorded per method and do not abort the rest. With
    outdir set, emits one spectrum CSV per method, a combined SVG figure, the
    sample covariance, and a summary CSV; repeated runs produce identical bytes.
    """
    obs = spectral_line_record(cfg.phase)
    t_hat = sample_covariance(obs)
    outcomes = {}
    for method in sorted(cfg.methods):
        if method not in ALL_METHODS:
            raise ValueError(f"unknown method {method!r}")
        outcomes[method] = run_method(method, obs, t_hat, cfg)
    bundle = ExperimentBundle(config=cfg, observations=obs, t_hat=t_hat, outcomes=outcomes)
    if outdir is not None:
        emit_bundle(bundle, outdir)
    return bundle


SUMMARY_HEADER = (
    "method",
    "status",
    "iterations",
    "primal_residual",
    "dual_residual",
    "objective",
    "ar_order",
    "noise_var",
    "r0",
    "energy_proxy",
    "top_peak_freq",
    "top_peak_value",
    "interior_peaks",
    "hellinger",
    "wasserstein2_sq",
    "log_deviation",
    "kl_estimate_data",
    "likelihood",
    "likelihood_shifted",
    "error",
)


def _summary_row(outcome: MethodOutcome, grid: int):
    rep = outcome.report
    spec = outcome.spectrum
    model = outcome.model
    peak = outcome.top_peak
    interior = None
    if spec is not None:
        interior = sum(1 for f, _ in spec.peaks if 0.0 < f < np.pi)
    d = outcome.distances
    return (
        outcome.method,
        rep.status.value if rep is not None else None,
        rep.iterations if rep is not None else None,
        rep.primal_residual if rep is not None else None,
        rep.dual_residual if rep is not None else None,
        rep.objective if rep is not None else None,
        model.order if model is not None else None,
        model.noise_var if model is not None else None,
        outcome.r0,
        outcome.energy_proxy,
        peak[0] if peak is not None else None,
        peak[1] if peak is not None else None,
        interior,
        d.get("hellinger"),
        d.get("wasserstein2_sq"),
        d.get("log_deviation"),
        d.get("kl_estimate_data"),
        d.get("likelihood"),
        d.get("likelihood_shifted"),
        outcome.error,
    )


def emit_bundle(bundle: ExperimentBundle, outdir) -> list:
    """Write the bundle's CSVs and figure; returns the created paths."""
    from .plotting import render_spectra  # deferred: keeps matplotlib optional at import

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    label = bundle.config.label or f"psi_{bundle.config.phase:.6f}".replace(".", "_")
    created = []

    path = outdir / f"sample_covariance_{label}.csv"
    write_matrix(path, bundle.t_hat)
    created.append(path)

    rows = []
    entries = []
    for method, outcome in bundle.outcomes.items():
        rows.append(_summary_row(outcome, bundle.config.grid))
        if outcome.spectrum is not None:
            spath = outdir / f"spectrum_{label}_{method}.csv"
            write_table(
                spath,
                ("freq", "psd", "log10_psd"),
                [
                    (float(f), float(p), float(np.log10(p)))
                    for f, p in zip(outcome.spectrum.freqs, outcome.spectrum.psd)
                ],
            )
            created.append(spath)
            entries.append((method, outcome.spectrum))
        if outcome.estimate is not None:
            epath = outdir / f"estimate_{label}_{method}.csv"
            write_matrix(epath, outcome.estimate)
            created.append(epath)

    spath = outdir / f"summary_{label}.csv"
    write_table(spath, SUMMARY_HEADER, rows)
    created.append(spath)

    if entries:
        fpath = outdir / f"figure_{label}.svg"
        render_spectra(entries, LINE_FREQ, fpath, title=f"maximum-entropy spectra ({label})")
        created.append(fpath)
    return created
