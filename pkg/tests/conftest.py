import time

import numpy as np
import pytest

from covest.experiment import PHASE_LABELS, ExperimentConfig, run_experiment


def rand_spd(rng, n, lo=0.5, hi=2.0):
    """Random SPD matrix with eigenvalues in [lo, hi]."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    w = rng.uniform(lo, hi, size=n)
    return (q * w) @ q.T


def rand_sym(rng, n):
    a = rng.standard_normal((n, n))
    return 0.5 * (a + a.T)


def rand_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def peak_index(grid, freq=None):
    """Grid index of the top spectral peak (or of a given frequency)."""
    step = np.pi / (len(grid.freqs) - 1)
    if freq is None:
        if not grid.peaks:
            return None
        freq = grid.peaks[0][0]
    return int(round(freq / step))


@pytest.fixture(scope="session")
def benchmark_bundles():
    """The three-phase benchmark with the paper's three methods, run once.

    Returns {label: (bundle, elapsed_seconds)}.
    """
    out = {}
    for label, phase in PHASE_LABELS.items():
        cfg = ExperimentConfig(phase=phase, label=label, methods=("burg", "ml", "transport"))
        start = time.perf_counter()
        bundle = run_experiment(cfg)
        out[label] = (bundle, time.perf_counter() - start)
    return out
