"""
Linear-axis DFT of z in real-world units.

Bin 0 carries the mean position; every other bin carries an estimated
peak-to-peak amplitude in mm, so a bin-aligned cosine of peak amplitude A
reads as 2A. No window, no zero padding: leakage of off-bin content is kept.
"""

import dataclasses
import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import numpy.typing as npt

from stillness import constants
from stillness.exceptions import ModelError, SampleSizeError, SpectrumMismatchError

logger = logging.getLogger(__name__)

# frequencies closer than this are the same bin
_FREQ_TOLERANCE_HZ = 1e-9


@dataclasses.dataclass(eq=False, frozen=True)
class Spectrum:
    """pp_mm[k - 1] is the peak-to-peak amplitude at frequency k * df_Hz."""

    df_Hz: float
    mean_mm: float
    pp_mm: np.ndarray

    def __post_init__(self) -> None:
        pp = np.array(self.pp_mm, dtype=np.float64)
        pp.setflags(write=False)
        object.__setattr__(self, "pp_mm", pp)

    def __len__(self) -> int:
        return len(self.pp_mm)

    @property
    def frequencies_Hz(self) -> np.ndarray:
        return self.df_Hz * np.arange(1, len(self.pp_mm) + 1)

    def band_mask(self, lo_Hz: float, hi_Hz: float) -> np.ndarray:
        f = self.frequencies_Hz
        return (f >= lo_Hz - _FREQ_TOLERANCE_HZ) & (f <= hi_Hz + _FREQ_TOLERANCE_HZ)

    def band(self, lo_Hz: float, hi_Hz: float) -> tuple[np.ndarray, np.ndarray]:
        mask = self.band_mask(lo_Hz, hi_Hz)
        return self.frequencies_Hz[mask], self.pp_mm[mask]

    def to_csv_text(self, max_freq_Hz: float = float("inf")) -> str:
        lines = [constants.SPECTRUM_CSV_HEADER, f"0,{self.mean_mm!r}"]
        for f, pp in zip(self.frequencies_Hz.tolist(), self.pp_mm.tolist()):
            if f > max_freq_Hz + _FREQ_TOLERANCE_HZ:
                break
            lines.append(f"{f!r},{pp!r}")
        return "\n".join(lines) + "\n"

    def to_csv(self, file: Path, max_freq_Hz: float = float("inf")) -> None:
        file.write_text(self.to_csv_text(max_freq_Hz), encoding="utf-8")


@dataclasses.dataclass(eq=True, frozen=True)
class OneOverFModel:
    c_mm_Hz: float = constants.ONE_OVER_F_COEFF_MM_HZ
    band_lo_Hz: float = constants.ONE_OVER_F_BAND_HZ[0]
    band_hi_Hz: float = constants.ONE_OVER_F_BAND_HZ[1]
    hf_floor_mm: float = constants.HF_FLOOR_MM

    def __post_init__(self) -> None:
        # c = 0 is allowed so that generators can be switched off
        if self.c_mm_Hz < 0:
            raise ModelError(f"1/f coefficient must not be negative: {self.c_mm_Hz}")
        if not self.band_lo_Hz < self.band_hi_Hz:
            raise ModelError(
                f"band must satisfy lo < hi (got {self.band_lo_Hz}..{self.band_hi_Hz} Hz)"
            )


def dft_pp(z: npt.ArrayLike, rate_Hz: float = constants.POSITION_RATE_HZ) -> Spectrum:
    z = np.asarray(z, dtype=np.float64)
    n = len(z)
    if n < 2:
        raise SampleSizeError.too_few("dft_pp", 2, n)
    if n % 2 != 0:
        raise SampleSizeError(f"dft_pp needs an even number of samples (got {n})")

    # rfft gives X_k for k = 0..n/2, the same sums as the direct definition
    coefficients = np.fft.rfft(z)
    pp = (4.0 / n) * np.abs(coefficients[1:])
    return Spectrum(df_Hz=rate_Hz / n, mean_mm=float(np.mean(z)), pp_mm=pp)


def threshold_maxfreq(
    spectrum: Spectrum, thresh_mm: float = constants.DFT_AMPL_THRESH_MM
) -> float:
    above = np.flatnonzero(spectrum.pp_mm >= thresh_mm)
    if above.size == 0:
        return 0.0
    return float((above[-1] + 1) * spectrum.df_Hz)


def max_amplitude_above(
    spectrum: Spectrum, f_Hz: float = constants.ONE_OVER_F_BAND_HZ[1]
) -> float:
    mask = spectrum.frequencies_Hz > f_Hz + _FREQ_TOLERANCE_HZ
    if not np.any(mask):
        return 0.0
    return float(spectrum.pp_mm[mask].max())


def average_spectra(spectra: Sequence[Spectrum]) -> Spectrum:
    if len(spectra) == 0:
        raise SpectrumMismatchError("cannot average an empty list of spectra")

    first = spectra[0]
    for i, spectrum in enumerate(spectra[1:], start=1):
        if len(spectrum) != len(first) or not np.isclose(spectrum.df_Hz, first.df_Hz):
            raise SpectrumMismatchError(
                f"spectrum {i} has {len(spectrum)} bins of {spectrum.df_Hz} Hz, "
                f"expected {len(first)} bins of {first.df_Hz} Hz"
            )

    return Spectrum(
        df_Hz=first.df_Hz,
        mean_mm=float(np.mean([s.mean_mm for s in spectra])),
        pp_mm=np.mean(np.stack([s.pp_mm for s in spectra]), axis=0),
    )


def eval_model(
    model: OneOverFModel, f_Hz: Union[float, npt.ArrayLike]
) -> Union[float, np.ndarray]:
    f = np.asarray(f_Hz, dtype=np.float64)
    if np.any(f <= 0):
        raise ModelError("the 1/f model is defined for f > 0 only (0 Hz is the mean)")
    result = model.c_mm_Hz / f
    return float(result) if result.ndim == 0 else result


def fit_one_over_f(
    spectrum: Spectrum, band_Hz: tuple[float, float] = constants.ONE_OVER_F_BAND_HZ
) -> float:
    """
    Least-squares c for pp(f) = c / f on linear amplitude axes over the
    band (inclusive).
    """

    lo, hi = band_Hz
    f, pp = spectrum.band(lo, hi)
    if len(f) < 3:
        raise ModelError(
            f"fit band {lo}..{hi} Hz holds {len(f)} bins, at least 3 are needed"
        )

    design = (1.0 / f)[:, np.newaxis]
    (c,), *_ = np.linalg.lstsq(design, pp, rcond=None)
    logger.debug("1/f fit over %s bins in %s..%s Hz: c = %s", len(f), lo, hi, c)
    return float(c)
