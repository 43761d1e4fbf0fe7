"""
Synthetic stillness movement: a phase-randomized 1/f tremor plus an optional
slow, asymmetric drift.
"""

import dataclasses
import math

import numpy as np
import scipy.signal

from stillness import constants
from stillness.exceptions import ModelError
from stillness.spectral import OneOverFModel

# tolerance for bin frequencies lying on a band edge
_BAND_TOLERANCE_HZ = 1e-9


@dataclasses.dataclass(eq=True, frozen=True)
class DriftModel:
    """
    A Gaussian walk low-passed twice (mean reverting, so softly bounded),
    then squashed by tanh with a different bound on each side.
    """

    sigma_mm: float = 0.15
    slow_time_s: float = 1.0
    smooth_time_s: float = 0.1
    upper_bound_mm: float = 0.45
    lower_bound_mm: float = 0.15

    def __post_init__(self) -> None:
        if self.sigma_mm < 0:
            raise ModelError(f"drift sigma must not be negative: {self.sigma_mm}")
        if self.slow_time_s <= 0 or self.smooth_time_s <= 0:
            raise ModelError("drift time constants must be positive")
        if self.upper_bound_mm <= 0 or self.lower_bound_mm <= 0:
            raise ModelError("drift bounds must be positive")


def _one_pole(x: np.ndarray, time_constant_s: float, rate_Hz: float) -> np.ndarray:
    decay = math.exp(-1.0 / (time_constant_s * rate_Hz))
    # start in the filter's steady state for the first sample
    zi = scipy.signal.lfiltic([1.0 - decay], [1.0, -decay], y=[x[0]])
    filtered, _ = scipy.signal.lfilter([1.0 - decay], [1.0, -decay], x, zi=zi)
    return filtered


def generate_drift(
    rng: np.random.Generator, n: int, rate_Hz: float, drift: DriftModel
) -> np.ndarray:
    if drift.sigma_mm == 0 or n == 0:
        return np.zeros(n)

    walk = rng.standard_normal(n)
    walk = _one_pole(walk, drift.slow_time_s, rate_Hz)
    walk = _one_pole(walk, drift.smooth_time_s, rate_Hz)
    spread = walk.std()
    if spread == 0:
        return np.zeros(n)
    walk *= drift.sigma_mm / spread

    # which way the drift leans is part of the seed
    if rng.random() < 0.5:
        walk = -walk
        upper, lower = drift.lower_bound_mm, drift.upper_bound_mm
    else:
        upper, lower = drift.upper_bound_mm, drift.lower_bound_mm
    bounded = np.where(
        walk >= 0,
        upper * np.tanh(walk / upper),
        lower * np.tanh(walk / lower),
    )
    return bounded - bounded.mean()


def band_bins(model: OneOverFModel, n: int, rate_Hz: float) -> np.ndarray:
    """DFT bin indices k (1 <= k < n / 2) whose frequencies lie in the model band."""

    df = rate_Hz / n
    k = np.arange(1, n // 2)
    f = k * df
    mask = (f >= model.band_lo_Hz - _BAND_TOLERANCE_HZ) & (
        f <= model.band_hi_Hz + _BAND_TOLERANCE_HZ
    )
    return k[mask]


def generate_tremor(
    model: OneOverFModel = OneOverFModel(),
    seed: int = 0,
    duration_s: float = constants.RUN_DURATION_S,
    rate_Hz: float = constants.POSITION_RATE_HZ,
    drift_enabled: bool = False,
    drift: DriftModel = DriftModel(),
) -> np.ndarray:
    """
    Sum of bin-aligned cosines with peak-to-peak amplitude c / f and uniform
    random phases over the model band, centered on 0 (mm).
    """

    if duration_s <= 0 or rate_Hz <= 0:
        raise ModelError(
            f"duration and rate must be positive (got {duration_s} s, {rate_Hz} Hz)"
        )
    n = int(round(duration_s * rate_Hz))
    rng = np.random.default_rng(seed)

    k = band_bins(model, n, rate_Hz)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=k.size)
    peak = 0.5 * model.c_mm_Hz / (k * rate_Hz / n)

    # irfft turns X_k = A * n / 2 * e^(i phase) into A * cos(2 pi f t + phase)
    coefficients = np.zeros(n // 2 + 1, dtype=np.complex128)
    coefficients[k] = peak * (n / 2.0) * np.exp(1j * phases)
    tremor = np.fft.irfft(coefficients, n=n)

    if drift_enabled:
        tremor = tremor + generate_drift(rng, n, rate_Hz, drift)
    return tremor
