"""
Fingertip dynamics under one haptic condition.

The fingerpad transducer is a point mass driven by three forces: the
device's condition force, a PD "hold still" controller of the subject toward
target_z, and the subject's tremor entering as force through that same
stiffness and damping. Integration is semi-implicit Euler at the position
rate (optionally sub-stepped); the device renders its force at the force
rate with a zero-order hold.
"""

import dataclasses
import logging
import math
from collections import deque
from typing import Optional

import numpy as np

from stillness import constants
from stillness.condition import ConditionId
from stillness.exceptions import SimulationConfigError, UnstableSimulationError
from stillness.haptics import condition_force
from stillness.params import HAPTIC_PARAMS, SAMPLING, HapticParams, SamplingSpec
from stillness.run_record import RunRecord
from stillness.spectral import OneOverFModel
from stillness.tremor import DriftModel, generate_tremor

logger = logging.getLogger(__name__)

# the sensor-noise stream is drawn from a generator offset from the tremor's
_SENSOR_NOISE_STREAM = 1
_GAIN_STREAM = 2


@dataclasses.dataclass(eq=True, frozen=True)
class SimConfig:
    condition: ConditionId
    seed: int = 0
    target_z_mm: float = constants.DEFAULT_TARGET_Z_MM
    controller_kp_N_per_mm: float = constants.DEFAULT_KP_N_PER_MM
    controller_kd_N_per_mm_per_s: float = constants.DEFAULT_KD_N_PER_MM_PER_S
    noise_scale: float = 1.0
    # sigma of the mean-one lognormal gain drawn per seed; 0 disables it
    gain_spread: float = constants.DEFAULT_GAIN_SPREAD
    drift_enabled: bool = True
    model: OneOverFModel = OneOverFModel()
    emulate_latency: bool = False
    emulate_force_quantization: bool = False
    emulate_sensor_noise: bool = False
    # None starts on the tremor trajectory (target plus its first sample and slope)
    initial_z_mm: Optional[float] = None
    initial_v_mm_s: Optional[float] = None
    substeps: int = 1
    force_rate_Hz: Optional[float] = None
    drift: DriftModel = DriftModel()
    sampling: SamplingSpec = SAMPLING
    params: HapticParams = HAPTIC_PARAMS
    subject: Optional[int] = None
    run_index: Optional[int] = None

    def __post_init__(self) -> None:
        if not constants.Z_MIN_MM < self.target_z_mm < constants.Z_MAX_MM:
            raise SimulationConfigError(
                f"target z must lie inside ({constants.Z_MIN_MM}, {constants.Z_MAX_MM}) mm "
                f"(got {self.target_z_mm})"
            )
        if self.controller_kp_N_per_mm < 0 or self.controller_kd_N_per_mm_per_s < 0:
            raise SimulationConfigError("controller gains must not be negative")
        if (
            self.condition.n == 4
            and self.controller_kd_N_per_mm_per_s
            <= self.params.anti_viscosity_N_per_mm_per_s
        ):
            raise SimulationConfigError(
                f"kd = {self.controller_kd_N_per_mm_per_s} N/(mm/s) does not exceed the "
                f"anti-viscosity {self.params.anti_viscosity_N_per_mm_per_s} N/(mm/s)"
            )
        if self.noise_scale < 0:
            raise SimulationConfigError(f"noise scale must not be negative: {self.noise_scale}")
        if self.gain_spread < 0:
            raise SimulationConfigError(f"gain spread must not be negative: {self.gain_spread}")
        if self.initial_z_mm is not None and not (
            constants.Z_MIN_MM <= self.initial_z_mm <= constants.Z_MAX_MM
        ):
            raise SimulationConfigError(f"initial z {self.initial_z_mm} mm is out of range")
        if self.substeps < 1:
            raise SimulationConfigError(f"substeps must be at least 1 (got {self.substeps})")

        ratio = self.substep_rate_Hz / self.effective_force_rate_Hz
        if ratio < 1 or not math.isclose(ratio, round(ratio)):
            raise SimulationConfigError(
                f"the integration rate {self.substep_rate_Hz} Hz must be a multiple of "
                f"the force rate {self.effective_force_rate_Hz} Hz"
            )

    @property
    def substep_rate_Hz(self) -> float:
        return self.sampling.position_rate_Hz * self.substeps

    @property
    def effective_force_rate_Hz(self) -> float:
        if self.force_rate_Hz is None:
            return float(self.sampling.force_rate_Hz)
        return float(self.force_rate_Hz)

    @property
    def substeps_per_command(self) -> int:
        return int(round(self.substep_rate_Hz / self.effective_force_rate_Hz))

    @property
    def latency_commands(self) -> int:
        if not self.emulate_latency:
            return 0
        return int(round(self.sampling.latency_s * self.effective_force_rate_Hz))


def _quantize(force_N: float, resolution_N: float) -> float:
    return round(force_N / resolution_N) * resolution_N


def run_gain(cfg: SimConfig) -> float:
    """Tremor gain of this seed: exp(s * N(0, 1) - s^2 / 2), so its mean is 1."""

    if cfg.gain_spread == 0:
        return 1.0
    rng = np.random.default_rng([cfg.seed, _GAIN_STREAM])
    s = cfg.gain_spread
    return float(np.exp(s * rng.standard_normal() - 0.5 * s * s))


def simulate_run(cfg: SimConfig) -> RunRecord:
    sampling = cfg.sampling
    n = sampling.samples_per_run
    rate = sampling.position_rate_Hz
    h = 1.0 / cfg.substep_rate_Hz
    # F (N) on m (kg) in mm/s^2
    accel_per_N = 1000.0 / sampling.transducer_mass_kg
    kp = cfg.controller_kp_N_per_mm
    kd = cfg.controller_kd_N_per_mm_per_s
    target = cfg.target_z_mm
    haptic_n = cfg.condition.n

    logger.debug("simulating condition %s, seed %s", cfg.condition, cfg.seed)

    tremor = cfg.noise_scale * run_gain(cfg) * generate_tremor(
        cfg.model,
        seed=cfg.seed,
        duration_s=sampling.run_duration_s,
        rate_Hz=rate,
        drift_enabled=cfg.drift_enabled,
        drift=cfg.drift,
    )
    tremor_v = np.gradient(tremor, 1.0 / rate) if n > 1 else np.zeros(n)
    # the tremor acts as force through the subject's own stiffness and damping
    noise_force = (kp * tremor + kd * tremor_v).tolist()

    sensor_noise = None
    if cfg.emulate_sensor_noise:
        half = 0.5 * sampling.sensor_noise_pp_mm
        sensor_rng = np.random.default_rng([cfg.seed, _SENSOR_NOISE_STREAM])
        sensor_noise = sensor_rng.uniform(-half, half, size=n).tolist()

    z = cfg.initial_z_mm if cfg.initial_z_mm is not None else target + tremor[0]
    z = min(max(z, constants.Z_MIN_MM), constants.Z_MAX_MM)
    v = cfg.initial_v_mm_s if cfg.initial_v_mm_s is not None else float(tremor_v[0])

    pending: deque[float] = deque([0.0] * cfg.latency_commands)
    applied = 0.0
    issued = 0.0
    substep = 0
    per_command = cfg.substeps_per_command

    z_out = np.empty(n)
    v_out = np.empty(n)
    f_out = np.empty(n)
    outside = 0
    clamped_samples = 0

    for i in range(n):
        z_out[i] = z
        v_out[i] = v
        was_clamped = False

        for j in range(cfg.substeps):
            if substep % per_command == 0:
                sensed_z = z
                if sensor_noise is not None:
                    sensed_z = min(
                        max(z + sensor_noise[i], constants.Z_MIN_MM), constants.Z_MAX_MM
                    )
                issued = condition_force(haptic_n, sensed_z, v, cfg.params)
                if cfg.emulate_force_quantization:
                    issued = _quantize(issued, sampling.force_resolution_N)
                pending.append(issued)
                applied = pending.popleft()
            if j == 0:
                f_out[i] = issued
            substep += 1

            human = noise_force[i] - kp * (z - target) - kd * v
            v += (applied + human) * accel_per_N * h
            z += v * h

            if not constants.Z_MIN_MM <= z <= constants.Z_MAX_MM:
                if not math.isfinite(z):
                    raise UnstableSimulationError(substep, n * cfg.substeps)
                # inelastic stop at the range edge
                z = min(max(z, constants.Z_MIN_MM), constants.Z_MAX_MM)
                v = 0.0
                outside += 1
                was_clamped = True

        clamped_samples += was_clamped

    if outside > constants.UNSTABLE_FRACTION * n * cfg.substeps:
        raise UnstableSimulationError(outside, n * cfg.substeps)
    if clamped_samples:
        logger.info("run clamped at the range boundary in %d samples", clamped_samples)

    if sensor_noise is not None:
        z_out = np.clip(
            z_out + np.asarray(sensor_noise), constants.Z_MIN_MM, constants.Z_MAX_MM
        )

    return RunRecord(
        condition=cfg.condition,
        z_mm=z_out,
        v_mm_s=v_out,
        f_target_N=f_out,
        subject=cfg.subject,
        run_index=cfg.run_index,
        seed=cfg.seed,
        clamped_samples=clamped_samples,
        rate_Hz=rate,
    )
