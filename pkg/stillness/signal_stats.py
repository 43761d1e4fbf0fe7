import dataclasses
import logging
from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt
import scipy.stats

from stillness import constants
from stillness.exceptions import DegenerateSampleError, SampleSizeError
from stillness.run_record import RunRecord
from stillness.spectral import Spectrum, dft_pp, threshold_maxfreq

logger = logging.getLogger(__name__)

# values closer than this to a window edge count as inside it
_EDGE_TOLERANCE_MM = 1e-9


class LinearFit(NamedTuple):
    slope_mm_s: float
    adj_r2_pct: float


@dataclasses.dataclass(eq=False, frozen=True)
class Histogram:
    """counts[i] is the number of samples in [edges[i], edges[i + 1])."""

    bin_mm: float
    first_bin: int
    counts: np.ndarray

    @property
    def edges_mm(self) -> np.ndarray:
        last = self.first_bin + len(self.counts)
        return self.bin_mm * np.arange(self.first_bin, last + 1)

    def as_dict(self) -> dict[int, int]:
        """Nonzero bins keyed by bin index k (bin k covers [k * bin, (k + 1) * bin))."""
        return {
            self.first_bin + i: int(count)
            for i, count in enumerate(self.counts)
            if count > 0
        }


@dataclasses.dataclass(eq=False, frozen=True)
class PerRunStats:
    z_min_mm: float
    z_max_mm: float
    z_travel_amplitude_mm: float
    avg_abs_z_travel_mm_s: float
    # None when z is constant (the test statistic is undefined)
    jb_stat: Optional[float]
    jb_p: Optional[float]
    lin_slope_mm_s: float
    lin_adj_r2_pct: float
    poly40_adj_r2_pct: float
    dft_ampl_thresh_mm: float
    threshold_maxfreq_Hz: float
    histogram: Histogram
    spectrum: Spectrum


def _as_series(z: npt.ArrayLike) -> np.ndarray:
    return np.asarray(z, dtype=np.float64)


def travel_amplitude(z: npt.ArrayLike) -> float:
    z = _as_series(z)
    if z.size == 0:
        raise SampleSizeError.too_few("travel_amplitude", 1, 0)
    return float(np.ptp(z))


def avg_abs_travel(
    z: npt.ArrayLike, rate_Hz: float = constants.POSITION_RATE_HZ
) -> float:
    """Mean absolute speed derived from z alone (not from the recorded v channel)."""

    z = _as_series(z)
    if z.size < 2:
        raise SampleSizeError.too_few("avg_abs_travel", 2, z.size)
    return float(np.mean(np.abs(np.diff(z))) * rate_Hz)


def jb_p_value(jb: float) -> float:
    return float(scipy.stats.chi2.sf(jb, df=2))


def jarque_bera(z: npt.ArrayLike) -> tuple[float, float]:
    """Jarque-Bera with population moments; p from the chi-square(2) tail."""

    z = _as_series(z)
    if z.size < 4:
        raise SampleSizeError.too_few("jarque_bera", 4, z.size)
    if np.ptp(z) == 0:
        raise DegenerateSampleError("zero variance")

    result = scipy.stats.jarque_bera(z)
    jb = float(result.statistic)
    return jb, jb_p_value(jb)


def _adjusted_r2_pct(z: np.ndarray, fitted: np.ndarray, n_params: int) -> float:
    n = len(z)
    ss_tot = float(np.sum((z - z.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0
    ss_res = float(np.sum((z - fitted) ** 2))
    r2 = 1.0 - ss_res / ss_tot
    return 100.0 * (1.0 - (1.0 - r2) * (n - 1) / (n - n_params))


def _r2_pct(z: np.ndarray, fitted: np.ndarray) -> float:
    ss_tot = float(np.sum((z - z.mean()) ** 2))
    if ss_tot == 0.0:
        return 0.0
    return 100.0 * (1.0 - float(np.sum((z - fitted) ** 2)) / ss_tot)


def _linear_fitted(z: np.ndarray, rate_Hz: float) -> tuple[float, np.ndarray]:
    t = np.arange(len(z)) / rate_Hz
    design = np.column_stack([np.ones_like(t), t])
    coefficients, *_ = np.linalg.lstsq(design, z, rcond=None)
    return float(coefficients[1]), design @ coefficients


def _poly_fitted(z: np.ndarray, degree: int) -> np.ndarray:
    # Legendre basis over [-1, 1], projected through QR
    x = np.linspace(-1.0, 1.0, len(z))
    q, _ = np.linalg.qr(np.polynomial.legendre.legvander(x, degree))
    return q @ (q.T @ z)


def linear_fit(
    z: npt.ArrayLike, rate_Hz: float = constants.POSITION_RATE_HZ
) -> LinearFit:
    z = _as_series(z)
    if z.size < 3:
        raise SampleSizeError.too_few("linear_fit", 3, z.size)
    slope, fitted = _linear_fitted(z, rate_Hz)
    return LinearFit(slope, _adjusted_r2_pct(z, fitted, n_params=2))


def linear_r2_pct(
    z: npt.ArrayLike, rate_Hz: float = constants.POSITION_RATE_HZ
) -> float:
    """Unadjusted R² of the linear model, in percent."""
    z = _as_series(z)
    if z.size < 3:
        raise SampleSizeError.too_few("linear_r2_pct", 3, z.size)
    return _r2_pct(z, _linear_fitted(z, rate_Hz)[1])


def poly40_adj_r2(z: npt.ArrayLike, degree: int = constants.POLY_FIT_DEGREE) -> float:
    z = _as_series(z)
    if z.size <= degree + 1:
        raise SampleSizeError.too_few(f"a degree-{degree} fit", degree + 2, z.size)
    return _adjusted_r2_pct(z, _poly_fitted(z, degree), n_params=degree + 1)


def poly40_r2(z: npt.ArrayLike, degree: int = constants.POLY_FIT_DEGREE) -> float:
    """Unadjusted R² of the polynomial model, in percent."""
    z = _as_series(z)
    if z.size <= degree + 1:
        raise SampleSizeError.too_few(f"a degree-{degree} fit", degree + 2, z.size)
    return _r2_pct(z, _poly_fitted(z, degree))


def amplitude_histogram(
    z: npt.ArrayLike, bin_mm: float = constants.HISTOGRAM_BIN_MM
) -> Histogram:
    if bin_mm <= 0:
        raise ValueError(f"histogram bin width must be positive (got {bin_mm})")
    z = _as_series(z)
    if z.size == 0:
        raise SampleSizeError.too_few("amplitude_histogram", 1, 0)

    index = np.floor(z / bin_mm).astype(np.int64)
    first = int(index.min())
    return Histogram(bin_mm=bin_mm, first_bin=first, counts=np.bincount(index - first))


def densest_window(
    values: npt.ArrayLike,
    width_mm: float = 1.0,
    step_mm: float = constants.HISTOGRAM_BIN_MM,
) -> tuple[float, float, int]:
    """
    The closed window [lo, lo + width] holding the most values, with lo on
    the step grid. Ties go to the lowest window.
    """

    values = _as_series(values)
    if values.size == 0:
        raise SampleSizeError.too_few("densest_window", 1, 0)

    first = int(np.floor(values.min() / step_mm)) - int(np.ceil(width_mm / step_mm))
    last = int(np.floor(values.max() / step_mm))
    best = (0.0, 0.0, -1)
    for k in range(first, last + 1):
        lo = k * step_mm
        hi = lo + width_mm
        count = int(
            np.count_nonzero(
                (values >= lo - _EDGE_TOLERANCE_MM) & (values <= hi + _EDGE_TOLERANCE_MM)
            )
        )
        if count > best[2]:
            best = (lo, hi, count)
    return best


def per_run_stats(
    run: RunRecord,
    thresh_mm: float = constants.DFT_AMPL_THRESH_MM,
    bin_mm: float = constants.HISTOGRAM_BIN_MM,
) -> PerRunStats:
    z = run.z_mm
    spectrum = dft_pp(z, run.rate_Hz)

    try:
        jb_stat: Optional[float]
        jb_p: Optional[float]
        jb_stat, jb_p = jarque_bera(z)
    except DegenerateSampleError:
        logger.info("constant z series, Jarque-Bera left undefined")
        jb_stat, jb_p = None, None

    lin = linear_fit(z, run.rate_Hz)
    return PerRunStats(
        z_min_mm=float(z.min()),
        z_max_mm=float(z.max()),
        z_travel_amplitude_mm=travel_amplitude(z),
        avg_abs_z_travel_mm_s=avg_abs_travel(z, run.rate_Hz),
        jb_stat=jb_stat,
        jb_p=jb_p,
        lin_slope_mm_s=lin.slope_mm_s,
        lin_adj_r2_pct=lin.adj_r2_pct,
        poly40_adj_r2_pct=poly40_adj_r2(z),
        dft_ampl_thresh_mm=thresh_mm,
        threshold_maxfreq_Hz=threshold_maxfreq(spectrum, thresh_mm),
        histogram=amplitude_histogram(z, bin_mm),
        spectrum=spectrum,
    )
