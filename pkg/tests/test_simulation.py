import numpy as np
import pytest

from stillness.condition import ConditionId
from stillness.exceptions import SimulationConfigError, UnstableSimulationError
from stillness.params import SamplingSpec
from stillness.signal_stats import jarque_bera, travel_amplitude
from stillness.simulation import SimConfig, run_gain, simulate_run
from stillness.spectral import average_spectra, dft_pp

# semi-implicit Euler at 64 kHz with the force re-rendered every step
FINE = dict(substeps=16, force_rate_Hz=64000)
QUIET = dict(
    controller_kp_N_per_mm=0.0,
    controller_kd_N_per_mm_per_s=0.0,
    noise_scale=0.0,
    drift_enabled=False,
    initial_z_mm=5.0,
    initial_v_mm_s=0.0,
)


def test_equilibrium():
    cfg = SimConfig(ConditionId(0, 0), noise_scale=0.0, drift_enabled=False)
    run = simulate_run(cfg)
    assert len(run) == 16000
    assert np.all(run.z_mm == 5.0)
    assert travel_amplitude(run.z_mm) == 0.0
    assert run.clamped_samples == 0


def test_constant_force_parabola():
    cfg = SimConfig(
        ConditionId(1, 0), sampling=SamplingSpec(run_duration_s=0.018), **QUIET, **FINE
    )
    run = simulate_run(cfg)
    # 0.25 N on 10 g is 25000 mm/s^2
    expected = 5.0 + 0.5 * 25000.0 * run.time_s**2
    np.testing.assert_allclose(run.z_mm, expected, rtol=1e-3)
    assert run.z_mm.max() < 10.0
    assert np.all(run.f_target_N == 0.25)


def test_viscous_time_constant():
    cfg = SimConfig(
        ConditionId(3, 0),
        sampling=SamplingSpec(run_duration_s=0.01),
        **{**QUIET, "initial_v_mm_s": 100.0},
        **FINE,
    )
    run = simulate_run(cfg)
    slope, _ = np.polyfit(run.time_s, np.log(run.v_mm_s), 1)
    # m / b = 0.010 kg / 3.0 N s/m
    assert -1.0 / slope == pytest.approx(0.010 / 3.0, rel=0.01)
    assert np.all(np.diff(np.abs(run.v_mm_s)) <= 0.0)


def test_same_seed_same_run():
    cfg = SimConfig(ConditionId(3, 1), seed=42)
    a, b = simulate_run(cfg), simulate_run(cfg)
    assert np.array_equal(a.z_mm, b.z_mm)
    assert np.array_equal(a.f_target_N, b.f_target_N)
    assert a.seed == 42
    assert a.condition == ConditionId(3, 1)


def test_force_is_held_between_commands():
    run = simulate_run(SimConfig(ConditionId(3, 0), seed=2))
    blocks = run.f_target_N.reshape(-1, 4)
    assert np.all(blocks == blocks[:, :1])
    assert len(np.unique(blocks[:, 0])) > 1
    assert np.array_equal(run.force_commands(), blocks[:, 0])


def test_force_quantization():
    run = simulate_run(SimConfig(ConditionId(3, 0), seed=2, emulate_force_quantization=True))
    steps = run.f_target_N / 0.003
    np.testing.assert_allclose(steps, np.round(steps), atol=1e-9)


def test_latency_delays_the_force():
    cfg = SimConfig(
        ConditionId(1, 0),
        sampling=SamplingSpec(run_duration_s=0.01),
        emulate_latency=True,
        **QUIET,
    )
    assert cfg.latency_commands == 4
    run = simulate_run(cfg)
    # four commands of 4 samples each pass before the first one lands
    assert np.all(run.z_mm[:17] == 5.0)
    assert run.z_mm[18] > 5.0


def test_sensor_noise_is_bounded():
    clean = simulate_run(SimConfig(ConditionId(0, 0), seed=4))
    noisy = simulate_run(SimConfig(ConditionId(0, 0), seed=4, emulate_sensor_noise=True))
    difference = np.abs(noisy.z_mm - clean.z_mm)
    assert difference.max() <= 0.1 + 1e-12
    assert difference.max() > 0.0


def test_unstable_run():
    cfg = SimConfig(ConditionId(1, 0), **QUIET)
    with pytest.raises(UnstableSimulationError):
        simulate_run(cfg)


def test_config_validation():
    with pytest.raises(SimulationConfigError):
        SimConfig(ConditionId(4, 0), controller_kd_N_per_mm_per_s=0.0005)
    with pytest.raises(SimulationConfigError):
        SimConfig(ConditionId(0, 0), target_z_mm=10.0)
    with pytest.raises(SimulationConfigError):
        SimConfig(ConditionId(0, 0), controller_kp_N_per_mm=-1.0)
    with pytest.raises(SimulationConfigError):
        SimConfig(ConditionId(0, 0), noise_scale=-0.5)
    with pytest.raises(SimulationConfigError):
        SimConfig(ConditionId(0, 0), gain_spread=-0.1)
    with pytest.raises(SimulationConfigError):
        SimConfig(ConditionId(0, 0), substeps=0)
    with pytest.raises(SimulationConfigError):
        SimConfig(ConditionId(0, 0), force_rate_Hz=3000)


def test_anti_viscosity_with_enough_damping_is_stable():
    run = simulate_run(SimConfig(ConditionId(4, 0), seed=1))
    assert np.all(np.isfinite(run.z_mm))
    assert run.clamped_samples == 0


def test_zero_force_calibration():
    travels = []
    rejected = 0
    for seed in range(100):
        run = simulate_run(SimConfig(ConditionId(0, 0), seed=seed))
        travels.append(travel_amplitude(run.z_mm))
        _, p = jarque_bera(run.z_mm)
        rejected += p < 0.005

    travels = np.array(travels)
    assert np.count_nonzero((travels >= 0.2) & (travels <= 3.6)) >= 95
    assert rejected >= 80
    assert travels.max() / travels.min() > 3.0


def test_averaged_spectrum_is_smoother():
    spectra = [
        dft_pp(simulate_run(SimConfig(ConditionId(0, 0), seed=seed)).z_mm)
        for seed in range(24)
    ]
    average = average_spectra(spectra)

    def max_jump(spectrum):
        return np.abs(np.diff(spectrum.pp_mm)).max()

    assert max_jump(average) < max(max_jump(s) for s in spectra)


def test_viscosity_and_controller_settle_monotonically():
    cfg = SimConfig(
        ConditionId(3, 0),
        noise_scale=0.0,
        drift_enabled=False,
        initial_z_mm=6.0,
        initial_v_mm_s=0.0,
    )
    run = simulate_run(cfg)
    error = np.abs(run.z_mm - cfg.target_z_mm)
    window = int(0.1 * run.rate_Hz)

    slow = np.abs(run.v_mm_s) < 0.01
    start = int(np.argmax(np.abs(run.v_mm_s)))
    start += int(np.argmax(slow[start:]))
    assert slow[start]
    assert np.all(error[start + window :] <= error[start:-window] + 1e-12)
    assert error[-1] < 1e-6


def test_gain_scales_the_whole_run():
    plain = simulate_run(SimConfig(ConditionId(0, 0), seed=7, gain_spread=0.0))
    cfg = SimConfig(ConditionId(0, 0), seed=7)
    spread = simulate_run(cfg)
    gain = run_gain(cfg)
    assert gain != 1.0
    np.testing.assert_allclose(
        spread.z_mm - cfg.target_z_mm,
        gain * (plain.z_mm - cfg.target_z_mm),
        rtol=1e-9,
        atol=1e-9,
    )
    # Jarque-Bera does not see the scale
    assert jarque_bera(spread.z_mm)[0] == pytest.approx(jarque_bera(plain.z_mm)[0], rel=1e-6)


def test_gains_vary_around_one():
    gains = np.array([run_gain(SimConfig(ConditionId(0, 0), seed=seed)) for seed in range(50)])
    assert np.all(gains > 0.0)
    assert gains.std() > 0.2
    assert 0.8 < gains.mean() < 1.2
    assert run_gain(SimConfig(ConditionId(0, 0), seed=3, gain_spread=0.0)) == 1.0
