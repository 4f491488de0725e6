import numpy as np
import pytest

from covest.errors import DegenerateSignal, DimensionMismatch, NotPositiveDefinite
from covest.spectral import (
    ARModel,
    ar_from_covariance,
    burg_ar,
    find_peaks,
    levinson,
    me_spectrum,
)
from covest.structure import params_to_matrix

from conftest import peak_index


def ar_autocovariances(model: ARModel, nlags: int) -> np.ndarray:
    """Autocovariances of a stable AR model: reflection step-down, then the
    Levinson recursion run forward (inverse direction of levinson())."""
    p = model.order
    stages = [np.asarray(model.coeffs, dtype=float)]
    for _ in range(p - 1):
        cur = stages[-1]
        k = cur[-1]
        stages.append((cur[:-1] - k * cur[:-1][::-1]) / (1.0 - k * k))
    stages = stages[::-1]
    ks = [stages[m][-1] for m in range(p)]
    e0 = model.noise_var
    for k in reversed(ks):
        e0 /= 1.0 - k * k
    r = np.zeros(nlags)
    r[0] = e0
    coeffs = np.zeros(0)
    err = e0
    for m in range(1, nlags):
        if m <= p:
            k = ks[m - 1]
            r[m] = -k * err - float(np.dot(coeffs, r[m - 1:0:-1]))
            coeffs = np.concatenate([coeffs + k * coeffs[::-1], [k]])
            err *= 1.0 - k * k
        else:
            r[m] = -float(np.dot(coeffs, r[m - 1:0:-1]))
    return r


def simulate_ar(coeffs, n, seed, burn=500):
    rng = np.random.default_rng(seed)
    p = len(coeffs)
    x = np.zeros(n + burn)
    e = rng.standard_normal(n + burn)
    for t in range(n + burn):
        acc = e[t]
        for j, a in enumerate(coeffs, start=1):
            if t - j >= 0:
                acc -= a * x[t - j]
        x[t] = acc
    return x[burn:]


# --- Burg ---------------------------------------------------------------------


def test_burg_recovers_known_ar2():
    true = [-1.2, 0.8]
    x = simulate_ar(true, 10000, seed=0)
    model = burg_ar(x, 2)
    assert np.max(np.abs(model.coeffs - np.array(true))) <= 0.05
    assert model.noise_var == pytest.approx(1.0, rel=0.1)


def test_burg_constant_record_boundary_reflection():
    model = burg_ar(np.full(32, 3.0), 1)
    assert abs(model.coeffs[0]) <= 1.0
    assert model.coeffs[0] == pytest.approx(-1.0)
    assert model.noise_var > 0.0


def test_burg_rejects_zero_record_and_bad_order():
    with pytest.raises(DegenerateSignal):
        burg_ar(np.zeros(16), 2)
    with pytest.raises(DimensionMismatch):
        burg_ar(np.arange(4.0), 4)
    with pytest.raises(DimensionMismatch):
        burg_ar(np.arange(4.0), 0)


def test_burg_reflections_bounded_and_min_phase():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.standard_normal(64)
        model = burg_ar(x, 6)
        poly = np.concatenate([[1.0], model.coeffs])
        roots = np.roots(poly)
        assert np.max(np.abs(roots)) < 1.0 + 1e-9


# --- Levinson ------------------------------------------------------------------


def test_levinson_examples():
    white = levinson([1.0, 0.0, 0.0])
    assert white.order == 2
    assert np.allclose(white.coeffs, 0.0)
    assert white.noise_var == pytest.approx(1.0)

    ar1 = levinson([1.0, 0.5])
    assert ar1.coeffs[0] == pytest.approx(-0.5)
    assert ar1.noise_var == pytest.approx(0.75)


def test_levinson_inverse_recursion_roundtrip():
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = int(rng.integers(1, 6))
        # stable model from random reflections in (-0.9, 0.9)
        ks = rng.uniform(-0.9, 0.9, size=p)
        coeffs = np.zeros(0)
        for k in ks:
            coeffs = np.concatenate([coeffs + k * coeffs[::-1], [k]])
        model = ARModel(order=p, coeffs=coeffs, noise_var=float(rng.uniform(0.5, 2.0)))
        r = ar_autocovariances(model, p + 1)
        back = levinson(r)
        assert np.max(np.abs(back.coeffs - model.coeffs)) <= 1e-8
        assert back.noise_var == pytest.approx(model.noise_var, rel=1e-8)


def test_levinson_rejects_singular():
    with pytest.raises(NotPositiveDefinite):
        levinson([1.0, 1.0])
    with pytest.raises(NotPositiveDefinite):
        levinson([0.0, 0.0])


# --- maximum-entropy spectrum ----------------------------------------------------


def test_me_spectrum_white_flat():
    grid = me_spectrum(ARModel(order=0, coeffs=(), noise_var=2.5), 100)
    assert np.allclose(grid.psd, 2.5)
    assert find_peaks(grid) == []


def test_me_spectrum_ar1_low_pass():
    grid = me_spectrum(ARModel(order=1, coeffs=[-0.9], noise_var=1.0), 200)
    assert np.all(np.diff(grid.psd) < 0)
    assert peak_index(grid) == 0  # endpoint peak at zero frequency


def test_me_spectrum_grid_spacing():
    grid = me_spectrum(ARModel(order=0, coeffs=(), noise_var=1.0), 200)
    assert grid.freqs.size == 201
    assert np.allclose(grid.freqs, np.arange(201) * (np.pi / 200))


def test_me_spectrum_parseval():
    model = levinson([1.0, 0.5])  # r0 = 1 by construction
    for grid_count in (200, 400):
        grid = me_spectrum(model, grid_count)
        r0 = np.trapezoid(grid.psd, grid.freqs) / np.pi
        assert r0 == pytest.approx(1.0, rel=0.01)


def test_me_spectrum_positive_for_min_phase_models():
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = rng.standard_normal(128)
        grid = me_spectrum(burg_ar(x, 5), 64)
        assert np.all(grid.psd > 0)


# --- peaks ------------------------------------------------------------------------


def test_find_peaks_single_mode_ar2():
    w0 = np.pi / 3
    rho = 0.99
    model = ARModel(order=2, coeffs=[-2 * rho * np.cos(w0), rho * rho], noise_var=1.0)
    grid = me_spectrum(model, 200)
    peaks = find_peaks(grid)
    assert len(peaks) >= 1
    assert abs(peak_index(grid) - round(w0 / (np.pi / 200))) <= 1


def test_find_peaks_sorted_descending():
    rng = np.random.default_rng(4)
    grid = me_spectrum(burg_ar(rng.standard_normal(256), 8), 300)
    vals = [v for _, v in find_peaks(grid)]
    assert vals == sorted(vals, reverse=True)


# --- covariance-to-spectrum path ----------------------------------------------------


def test_ar_from_covariance_matches_levinson_on_pd_input():
    r = np.array([2.0, 0.7, 0.2, -0.1])
    model = ar_from_covariance(params_to_matrix(r))
    direct = levinson(r)
    assert np.allclose(model.coeffs, direct.coeffs, atol=1e-12)
    assert model.noise_var == pytest.approx(direct.noise_var)


def test_ar_from_covariance_order_truncation_argument():
    r = np.array([2.0, 0.7, 0.2, -0.1])
    model = ar_from_covariance(params_to_matrix(r), order=2)
    direct = levinson(r[:3])
    assert np.allclose(model.coeffs, direct.coeffs, atol=1e-12)
    with pytest.raises(DimensionMismatch):
        ar_from_covariance(params_to_matrix(r), order=4)


def test_ar_from_covariance_singular_keeps_boundary_stage():
    # pure spectral line: the Toeplitz matrix is rank 2, the prediction error
    # collapses at lag 2, and the boundary stage carries the line location
    k = np.arange(8)
    t = params_to_matrix(0.5 * np.cos(np.pi / 4 * k))
    with pytest.warns(RuntimeWarning, match="singular at lag"):
        model = ar_from_covariance(t)
    assert model.order == 2
    assert model.noise_var > 0
    grid = me_spectrum(model, 200)
    assert peak_index(grid) == 50
