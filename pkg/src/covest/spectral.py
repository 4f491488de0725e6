"""Maximum-entropy power spectra from records or Toeplitz autocovariances.

Burg's lattice recursion estimates an AR model straight from a time series;
the Levinson-Durbin recursion turns autocovariance lags into the AR model of
the maximum-entropy extension. Either model is then evaluated on a uniform
frequency grid over [0, pi].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSignal, DimensionMismatch, NotPositiveDefinite
from .structure import matrix_to_params

# Prediction-error floor, relative to r0, at which the Toeplitz matrix is
# declared singular during the Levinson recursion.
PRED_ERROR_FLOOR = 1e-12


@dataclass(frozen=True)
class ARModel:
    """Autoregressive model with prediction polynomial 1 + sum a_k z^{-k}."""

    order: int
    coeffs: np.ndarray
    noise_var: float

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        object.__setattr__(self, "coeffs", coeffs.reshape(self.order))
        if not self.noise_var > 0.0:
            raise ValueError(f"innovation variance must be positive, got {self.noise_var}")


@dataclass(frozen=True)
class SpectrumGrid:
    """PSD sampled on the uniform grid freqs[i] = i * pi / M, i = 0..M."""

    freqs: np.ndarray
    psd: np.ndarray
    peaks: tuple


def burg_ar(x, order: int) -> ARModel:
    """Fit an AR model to a record with Burg's forward-backward lattice.

    Reflection coefficients minimize the summed forward and backward
    prediction error power at each stage; their magnitude never exceeds one.
    Requires len(x) > order >= 1.
    """
    x = np.asarray(x, dtype=float).ravel()
    n = x.size
    if order < 1:
        raise DimensionMismatch(f"order must be >= 1, got {order}")
    if n <= order:
        raise DimensionMismatch(f"need more than {order} samples, got {n}")

    fwd = x[1:].copy()
    bwd = x[:-1].copy()
    coeffs = np.zeros(0)
    energy = float(np.dot(x, x)) / n
    for _ in range(order):
        den = float(np.dot(fwd, fwd) + np.dot(bwd, bwd))
        if den < 1e-300:
            raise DegenerateSignal("prediction residuals vanished; record is degenerate")
        k = -2.0 * float(np.dot(fwd, bwd)) / den
        coeffs = np.concatenate([coeffs + k * coeffs[::-1], [k]])
        fwd, bwd = fwd + k * bwd, bwd + k * fwd
        fwd = fwd[1:]
        bwd = bwd[:-1]
        # |k| = 1 exactly for perfectly predictable records; keep the variance
        # positive so the model stays valid
        energy = max(energy * (1.0 - k * k), 1e-300)
    return ARModel(order=order, coeffs=coeffs, noise_var=energy)


def _levinson_steps(r):
    """Run the Levinson-Durbin recursion, stopping at a vanishing prediction error.

    Returns (coeffs, error, failed_lag) where failed_lag is None on full
    success, or the lag whose update would drive the prediction error to (or
    below) the floor; coeffs/error then describe the last healthy stage.
    """
    r = np.asarray(r, dtype=float).ravel()
    r0 = r[0]
    if not r0 > 0.0:
        raise NotPositiveDefinite(f"lag-0 autocovariance must be positive, got {r0}")
    coeffs = np.zeros(0)
    err = r0
    for m in range(1, r.size):
        acc = r[m] + float(np.dot(coeffs, r[m - 1:0:-1]))
        k = -acc / err
        new_err = err * (1.0 - k * k)
        if new_err <= PRED_ERROR_FLOOR * r0:
            return coeffs, err, m
        coeffs = np.concatenate([coeffs + k * coeffs[::-1], [k]])
        err = new_err
    return coeffs, err, None


def levinson(r) -> ARModel:
    """Maximum-entropy AR model matching autocovariance lags r = (r_0..r_{n-1}).

    The returned order-(n-1) model reproduces the given lags exactly. Raises
    NotPositiveDefinite if the implied Toeplitz matrix is singular (a
    prediction error falls to 1e-12 * r_0 or below).
    """
    coeffs, err, failed = _levinson_steps(r)
    if failed is not None:
        raise NotPositiveDefinite(
            f"prediction error vanished at lag {failed}; autocovariance not strictly admissible"
        )
    return ARModel(order=coeffs.size, coeffs=coeffs, noise_var=err)


def ar_from_covariance(t, order: int | None = None) -> ARModel:
    """AR model of a (numerically exact) Toeplitz covariance matrix.

    Uses the first order+1 lags (all n by default). A rank-deficient matrix
    drives the prediction error to zero early; the model is then truncated at
    the failing lag, keeping that boundary stage with the prediction error
    floored (its near-unit reflection is what encodes the line spectrum of a
    singular covariance), and a warning is issued.
    """
    r = matrix_to_params(t)
    if order is not None:
        if not 1 <= order <= r.size - 1:
            raise DimensionMismatch(f"order must be in [1, {r.size - 1}], got {order}")
        r = r[: order + 1]
    coeffs, err, failed = _levinson_steps(r)
    if failed is not None:
        acc = r[failed] + float(np.dot(coeffs, r[failed - 1:0:-1]))
        k = float(np.clip(-acc / err, -1.0 + 1e-10, 1.0 - 1e-10))
        coeffs = np.concatenate([coeffs + k * coeffs[::-1], [k]])
        err = max(err * (1.0 - k * k), PRED_ERROR_FLOOR * r[0])
        warnings.warn(
            f"covariance is singular at lag {failed}; truncating AR order to {failed}"
            " with floored innovation variance",
            RuntimeWarning,
            stacklevel=2,
        )
    return ARModel(order=coeffs.size, coeffs=coeffs, noise_var=err)


def _detect_peaks(freqs, psd):
    interior = [
        (freqs[i], psd[i])
        for i in range(1, psd.size - 1)
        if psd[i] > psd[i - 1] and psd[i] > psd[i + 1]
    ]
    if psd.size >= 2 and psd[0] > psd[1]:
        interior.append((freqs[0], psd[0]))
    if psd.size >= 2 and psd[-1] > psd[-2]:
        interior.append((freqs[-1], psd[-1]))
    interior.sort(key=lambda p: (-p[1], p[0]))
    return tuple(interior)


def me_spectrum(model: ARModel, grid_count: int = 200) -> SpectrumGrid:
    """Evaluate sigma^2 / |1 + sum a_k e^{-ik w}|^2 on w = 0, pi/M, ..., pi."""
    if grid_count < 1:
        raise DimensionMismatch(f"grid count must be >= 1, got {grid_count}")
    freqs = np.arange(grid_count + 1) * (np.pi / grid_count)
    lags = np.arange(1, model.order + 1)
    transfer = 1.0 + np.exp(-1j * np.outer(freqs, lags)) @ model.coeffs
    psd = model.noise_var / np.abs(transfer) ** 2
    return SpectrumGrid(freqs=freqs, psd=psd, peaks=_detect_peaks(freqs, psd))


def find_peaks(grid: SpectrumGrid):
    """Local maxima of the sampled PSD as (freq, value), largest value first.

    Interior points must strictly exceed both neighbors; an endpoint counts
    if it strictly exceeds its single neighbor.
    """
    return list(_detect_peaks(np.asarray(grid.freqs), np.asarray(grid.psd)))
