import dataclasses

from stillness import constants


@dataclasses.dataclass(eq=True, frozen=True)
class HapticParams:
    """
    Every force and pitch constant of the twelve conditions.

    Forces in N, viscosities in N / (mm / s), lengths in mm, frequencies in Hz.
    The noise band of the m=0 audio is kept as metadata only.
    """

    pos_force_N: float = 0.25
    neg_force_N: float = -0.25
    viscosity_N_per_mm_per_s: float = -0.0030
    anti_viscosity_N_per_mm_per_s: float = 0.0008
    marker_ampl_N: float = 0.022
    marker_interval_mm: float = 0.2
    marker_gap_mm: float = 0.001
    stim_base_mm: float = constants.Z_MIN_MM
    stim_height_mm: float = constants.Z_MAX_MM - constants.Z_MIN_MM
    tone_base_Hz: float = 440.0
    tone_cap_Hz: float = 8000.0
    semitones_per_mm: float = 4.0
    noise_center_Hz: float = 220.0
    noise_width_Hz: float = 1000.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.marker_gap_mm < self.marker_interval_mm:
            raise ValueError(
                f"marker gap {self.marker_gap_mm} mm must be smaller than "
                f"the marker interval {self.marker_interval_mm} mm"
            )

    @property
    def marker_height_mm(self) -> float:
        return self.marker_interval_mm - self.marker_gap_mm

    @property
    def marker_count(self) -> int:
        return int(round(self.stim_height_mm / self.marker_interval_mm))


@dataclasses.dataclass(eq=True, frozen=True)
class SamplingSpec:
    position_rate_Hz: int = constants.POSITION_RATE_HZ
    force_rate_Hz: int = constants.FORCE_RATE_HZ
    run_duration_s: float = constants.RUN_DURATION_S
    transducer_mass_kg: float = 0.010
    latency_s: float = 0.004
    force_resolution_N: float = 0.003
    sensor_noise_pp_mm: float = 0.2

    def __post_init__(self) -> None:
        if self.position_rate_Hz % self.force_rate_Hz != 0:
            raise ValueError(
                f"position rate {self.position_rate_Hz} Hz is not a multiple "
                f"of the force rate {self.force_rate_Hz} Hz"
            )
        if self.run_duration_s <= 0:
            raise ValueError(f"run duration must be positive: {self.run_duration_s}")

    @property
    def samples_per_run(self) -> int:
        return int(round(self.position_rate_Hz * self.run_duration_s))

    @property
    def hold_factor(self) -> int:
        """Position samples per force command."""
        return self.position_rate_Hz // self.force_rate_Hz


HAPTIC_PARAMS = HapticParams()
SAMPLING = SamplingSpec()
