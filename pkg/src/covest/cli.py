"""Command-line interface.

Subcommands: estimate (structured covariance from data), distance (metric
between two covariance files), spectrum (maximum-entropy PSD from a record or
a Toeplitz covariance), and repro-paper (the bundled spectral-line benchmark).

Exit codes: 0 on success, 2 if any estimation/metric computation failed, 1 on
usage or I/O errors. Diagnostics go to stderr; only results go to stdout.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import divergences
from .dataio import DataFormatError, format_float, read_matrix, write_matrix
from .errors import CovestError
from .experiment import PHASE_LABELS, ExperimentConfig, run_experiment
from .matops import frobenius
from .solvers import AdmmOptions, DescentOptions
from .spectral import ar_from_covariance, burg_ar, me_spectrum
from .structure import toeplitz_structure

ESTIMATORS = ("ml", "transport", "kl", "loglin", "stoica", "nuclear")
METRICS = ("likelihood", "kl", "log_deviation", "hellinger", "wasserstein2")

# Seed for randomized helper utilities (reserved; the benchmark itself is
# deterministic and ignores it).
_rng_seed = None


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="covest", description=__doc__)
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized helpers")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_est = sub.add_parser("estimate", help="fit a structured covariance to data")
    p_est.add_argument("--input", required=True, help="observation CSV (one record per row); a square symmetric CSV is taken as the sample covariance itself")
    p_est.add_argument("--method", required=True, choices=ESTIMATORS)
    p_est.add_argument("--structure", default="toeplitz", choices=("toeplitz",))
    p_est.add_argument("--out", required=True, help="output CSV for the estimate")
    _add_solver_flags(p_est)

    p_dist = sub.add_parser("distance", help="distance between two covariance CSVs")
    p_dist.add_argument("--a", required=True)
    p_dist.add_argument("--b", required=True)
    p_dist.add_argument("--metric", required=True, choices=METRICS)

    p_spec = sub.add_parser("spectrum", help="maximum-entropy spectrum of a record or covariance")
    p_spec.add_argument("--input", required=True, help="single-row/column record CSV, or a square Toeplitz covariance CSV")
    p_spec.add_argument("--order", type=int, default=10)
    p_spec.add_argument("--grid", type=int, default=200)
    p_spec.add_argument("--out", required=True)
    p_spec.add_argument("--svg", default=None, help="also render the spectrum to this SVG file")

    p_repro = sub.add_parser("repro-paper", help="run the bundled spectral-line benchmark")
    p_repro.add_argument("--phase", required=True, choices=(*PHASE_LABELS, "all"))
    p_repro.add_argument("--outdir", required=True)
    _add_solver_flags(p_repro)

    return parser


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=None, help="solver stopping tolerance (scale-relative)")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--rho", type=float, default=None, help="ADMM penalty parameter")


def _solver_options(args):
    admm = AdmmOptions()
    descent = DescentOptions()
    if args.rho is not None:
        admm = AdmmOptions(rho=args.rho, eps_primal=admm.eps_primal, eps_dual=admm.eps_dual, max_iters=admm.max_iters)
    if args.tol is not None:
        admm = AdmmOptions(rho=admm.rho, eps_primal=args.tol, eps_dual=args.tol, max_iters=admm.max_iters)
        descent = DescentOptions(grad_tol=args.tol, max_iters=descent.max_iters)
    if args.max_iters is not None:
        admm = AdmmOptions(rho=admm.rho, eps_primal=admm.eps_primal, eps_dual=admm.eps_dual, max_iters=args.max_iters)
        descent = DescentOptions(grad_tol=descent.grad_tol, max_iters=args.max_iters)
    return admm, descent


def _looks_like_covariance(a: np.ndarray) -> bool:
    if a.shape[0] != a.shape[1] or a.shape[0] < 2:
        return False
    return frobenius(a - a.T) <= 1e-8 * max(frobenius(a), 1.0)


def _cmd_estimate(args) -> int:
    from .experiment import ObservationSet, sample_covariance
    from .solvers import solve_kl, solve_log_linear, solve_ml, solve_nuclear, solve_stoica, solve_transport

    table = read_matrix(args.input)
    if _looks_like_covariance(table):
        t_hat = 0.5 * (table + table.T)
        print(f"covest: input read as a {table.shape[0]}x{table.shape[0]} covariance", file=sys.stderr)
    else:
        t_hat = sample_covariance(ObservationSet(records=table))
        print(f"covest: sample covariance from {table.shape[0]} record(s) of length {table.shape[1]}", file=sys.stderr)
    structure = toeplitz_structure(t_hat.shape[0])
    admm, descent = _solver_options(args)
    try:
        if args.method == "ml":
            report = solve_ml(t_hat, structure, opts=descent)
        elif args.method == "kl":
            report = solve_kl(t_hat, structure, opts=descent)
        elif args.method == "transport":
            report = solve_transport(t_hat, structure, opts=admm).report
        elif args.method == "loglin":
            report = solve_log_linear(t_hat, structure, opts=admm)
        elif args.method == "stoica":
            report = solve_stoica(t_hat, structure, opts=admm)
        else:
            report = solve_nuclear(t_hat, structure, opts=admm)
    except CovestError as exc:
        print(f"covest: estimate failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    write_matrix(args.out, report.T_star)
    print(
        f"covest: {args.method}: status={report.status.value} iterations={report.iterations} "
        f"objective={report.objective:.6g} residuals=({report.primal_residual:.3g}, {report.dual_residual:.3g})",
        file=sys.stderr,
    )
    return 0


def _cmd_distance(args) -> int:
    a = read_matrix(args.a)
    b = read_matrix(args.b)
    try:
        if args.metric == "likelihood":
            value = divergences.likelihood_divergence(a, b).value
        elif args.metric == "kl":
            value = divergences.kl_gaussian(a, b, "a||b").value
        elif args.metric == "log_deviation":
            value = divergences.log_deviation(a, b).value
        elif args.metric == "hellinger":
            value = divergences.bures_hellinger(a, b).value
        else:
            value = float(np.sqrt(divergences.optimal_coupling(a, b).cost))
    except CovestError as exc:
        print(f"covest: distance failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(format_float(value))
    return 0


def _cmd_spectrum(args) -> int:
    table = read_matrix(args.input)
    try:
        if 1 in table.shape:
            model = burg_ar(table.ravel(), args.order)
            source = f"record of length {table.size} (Burg, order {args.order})"
        elif table.shape[0] == table.shape[1]:
            model = ar_from_covariance(table, args.order)
            source = f"{table.shape[0]}x{table.shape[0]} covariance (order {model.order})"
        else:
            print("covest: spectrum input must be a single record or a square covariance", file=sys.stderr)
            return 1
        grid = me_spectrum(model, args.grid)
    except CovestError as exc:
        print(f"covest: spectrum failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    from .dataio import write_table

    write_table(
        args.out,
        ("freq", "psd", "log10_psd"),
        [(float(f), float(p), float(np.log10(p))) for f, p in zip(grid.freqs, grid.psd)],
    )
    print(f"covest: spectrum from {source}; {len(grid.peaks)} peak(s)", file=sys.stderr)
    if args.svg:
        from .experiment import LINE_FREQ
        from .plotting import render_spectra

        render_spectra([("psd", grid)], LINE_FREQ, args.svg)
    return 0


def _cmd_repro(args) -> int:
    admm, descent = _solver_options(args)
    phases = list(PHASE_LABELS) if args.phase == "all" else [args.phase]
    failed = False
    for label in phases:
        cfg = ExperimentConfig(phase=PHASE_LABELS[label], label=label, admm=admm, descent=descent)
        bundle = run_experiment(cfg, outdir=args.outdir)
        for method, outcome in bundle.outcomes.items():
            if outcome.ok:
                peak = outcome.top_peak
                loc = f"top peak at {peak[0]:.6f}" if peak else "no peaks"
                print(f"covest: [{label}] {method}: {loc}", file=sys.stderr)
            else:
                failed = True
                print(f"covest: [{label}] {method}: FAILED ({outcome.error})", file=sys.stderr)
    return 2 if failed else 0


def main(argv=None) -> int:
    global _rng_seed
    parser = _build_parser()
    args = parser.parse_args(argv)
    _rng_seed = args.seed
    try:
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "distance":
            return _cmd_distance(args)
        if args.command == "spectrum":
            return _cmd_spectrum(args)
        return _cmd_repro(args)
    except (OSError, DataFormatError) as exc:
        print(f"covest: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
