"""Tests for the 1+1 dimensional leapfrog integrator and its diagnostics."""
from __future__ import annotations

import math

import numpy as np
import pytest

from phi4waves import (
    DivergenceError,
    GridSpec,
    GridState,
    complete_k,
    energy,
    energy_drift,
    evaluate,
    make_massive,
    make_massless,
    make_ssb,
    mass_spectrum,
    measure_frequency,
    profile,
    run,
    seed_from_spec,
    step,
)
from phi4waves.simulator import (
    physics_from_spec,
    predicted_frequency,
    spatial_period,
    temporal_period,
)

DRIFT_TOL = 1e-6
FREQUENCY_RTOL = 1e-4
SHAPE_RTOL = 1e-3

STEPS_PER_PERIOD = 4096
PERIODS = 10


def _rest_setup(spec):
    grid = GridSpec(nx=16, length=1.0, dt=temporal_period(spec) / STEPS_PER_PERIOD)
    return grid, seed_from_spec(spec, grid), physics_from_spec(spec)


def _rest_run(spec):
    grid, state, physics = _rest_setup(spec)
    result = run(state, grid, physics, PERIODS * STEPS_PER_PERIOD, sample_stride=4)
    return spec, grid, result


@pytest.fixture(scope="module")
def massless_rest():
    return _rest_run(make_massless(2.0, 1.0, spatial=(0.0,)))


@pytest.fixture(scope="module")
def ssb_rest():
    return _rest_run(make_ssb(math.sqrt(3.0), 2.0, spatial=(0.0,)))


@pytest.fixture(scope="module")
def travelling():
    spec = make_massless(2.0, 1.0, spatial=(1.0,))
    wavelength = spatial_period(spec)
    nx = 1024
    grid = GridSpec(nx=nx, length=wavelength, dt=0.5 * wavelength / nx)
    state = seed_from_spec(spec, grid)
    n_steps = math.ceil(PERIODS * temporal_period(spec) / grid.dt)
    result = run(state, grid, physics_from_spec(spec), n_steps, sample_stride=8)
    return spec, grid, result


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(nx=12, length=1.0, dt=1e-3)
    with pytest.raises(ValueError):
        GridSpec(nx=1, length=1.0, dt=1e-3)
    with pytest.raises(ValueError):
        GridSpec(nx=16, length=0.0, dt=1e-3)
    with pytest.raises(ValueError):
        GridSpec(nx=16, length=1.0, dt=-1e-3)
    with pytest.raises(ValueError, match="cfl"):
        GridSpec(nx=16, length=1.0, dt=0.1)


def test_grid_derived_quantities():
    grid = GridSpec(nx=8, length=2.0, dt=0.01)
    assert grid.dx == 0.25
    assert grid.cfl == pytest.approx(0.04)
    assert np.array_equal(grid.positions(), 0.25 * np.arange(8))


def test_rest_seed_is_uniform():
    spec = make_massless(2.0, 1.0, spatial=(0.0,))
    grid = GridSpec(nx=16, length=1.0, dt=1e-3)
    state = seed_from_spec(spec, grid)
    # theta = 0 starts at the zero crossing: all field in the momentum.
    assert np.array_equal(state.phi, np.zeros(16))
    assert np.allclose(state.pi, spec.momentum.energy * spec.amplitude, rtol=1e-13)


def test_displaced_vacuum_seed_sits_at_the_profile_top():
    spec = make_ssb(math.sqrt(3.0), 2.0, spatial=(0.0,))
    grid = GridSpec(nx=16, length=1.0, dt=1e-3)
    state = seed_from_spec(spec, grid)
    assert np.allclose(state.phi, spec.amplitude, rtol=1e-13)
    assert np.max(np.abs(state.pi)) < 1e-12


def test_travelling_seed_matches_exact_field():
    spec = make_massless(2.0, 1.0, spatial=(1.0,))
    wavelength = spatial_period(spec)
    grid = GridSpec(nx=64, length=wavelength, dt=1e-3)
    state = seed_from_spec(spec, grid)
    exact = np.array([evaluate(spec, 0.0, np.array([x])) for x in grid.positions()])
    assert np.max(np.abs(state.phi - exact)) < 1e-12


def test_seed_rejects_incommensurate_domain():
    spec = make_massless(2.0, 1.0, spatial=(1.0,))
    grid = GridSpec(nx=64, length=1.0, dt=1e-3)
    with pytest.raises(ValueError, match="smallest compatible length"):
        seed_from_spec(spec, grid)


def test_seed_rejects_higher_dimensions():
    spec = make_massless(2.0, 1.0)  # default 3+1
    grid = GridSpec(nx=16, length=1.0, dt=1e-3)
    with pytest.raises(ValueError):
        seed_from_spec(spec, grid)


def test_zero_data_is_a_fixed_point():
    grid = GridSpec(nx=16, length=1.0, dt=1e-3)
    physics = physics_from_spec(make_massless(2.0, 1.0, spatial=(0.0,)))
    state = GridState(phi=np.zeros(16), pi=np.zeros(16), time=0.0,
                      family=physics.family)
    result = run(state, grid, physics, 100)
    assert np.array_equal(result.state.phi, np.zeros(16))
    assert np.array_equal(result.state.pi, np.zeros(16))
    assert result.energies[-1] == 0.0


def test_energy_of_uniform_seed_is_exact():
    # theta a quarter period in: phi = A everywhere, pi = 0, no gradient,
    # so the energy is length * lam * A^4 / 4 exactly.
    spec = make_massless(2.0, 1.0, theta=complete_k(-1.0), spatial=(0.0,))
    grid = GridSpec(nx=32, length=1.0, dt=1e-3)
    state = seed_from_spec(spec, grid)
    expected = grid.length * 0.25 * spec.lam * spec.amplitude**4
    assert energy(state, grid, physics_from_spec(spec)) == pytest.approx(
        expected, rel=1e-12
    )


def test_linear_limit_recovers_plane_wave_dispersion():
    # lam = 0 makes the lattice linear; a single sine mode should oscillate
    # at sqrt(mu0^2 + px^2) up to second-order discretization error.
    spec = make_massive(1.0, 0.0, 1.0, spatial=(1.0,))
    grid = GridSpec(nx=64, length=spatial_period(spec), dt=temporal_period(spec) / 512)
    state = seed_from_spec(spec, grid)
    n_steps = math.ceil(10.0 * temporal_period(spec) / grid.dt)
    result = run(state, grid, physics_from_spec(spec), n_steps)
    measured = measure_frequency(result.times, result.probe)
    assert measured == pytest.approx(math.sqrt(2.0), rel=1e-3)
    assert spec.momentum.energy == pytest.approx(math.sqrt(2.0), rel=1e-13)


def test_massless_rest_energy_drift(massless_rest):
    _, _, result = massless_rest
    assert energy_drift(result) < DRIFT_TOL


def test_massless_rest_frequency(massless_rest):
    spec, _, result = massless_rest
    measured = measure_frequency(result.times, result.probe)
    assert measured == pytest.approx(predicted_frequency(spec), rel=FREQUENCY_RTOL)
    # The probe frequency is the ground spectral line.
    line = mass_spectrum(spec, 0)[0]
    assert measured == pytest.approx(line.energy, rel=FREQUENCY_RTOL)


def test_massless_rest_spectral_purity(massless_rest):
    # Sampled over exactly ten periods, so harmonics fall on exact bins and
    # no window is needed; even multiples of the fundamental must be absent.
    _, _, result = massless_rest
    probe = result.probe[:-1]
    spectrum = np.abs(np.fft.rfft(probe - np.mean(probe))) ** 2
    fundamental = spectrum[PERIODS]
    even_power = spectrum[2 * PERIODS] + spectrum[4 * PERIODS]
    assert even_power < 1e-6 * fundamental


def test_ssb_rest_energy_drift(ssb_rest):
    _, _, result = ssb_rest
    assert energy_drift(result) < DRIFT_TOL


def test_ssb_rest_frequency(ssb_rest):
    spec, _, result = ssb_rest
    measured = measure_frequency(result.times, result.probe)
    assert measured == pytest.approx(predicted_frequency(spec), rel=FREQUENCY_RTOL)
    assert predicted_frequency(spec) == pytest.approx(
        math.pi / complete_k(-1.0) * spec.mu0 / math.sqrt(3.0), rel=1e-12
    )


def test_ssb_probe_stays_on_one_side(ssb_rest):
    # The displaced-vacuum lattice run must never cross phi = 0.
    _, _, result = ssb_rest
    assert np.min(result.probe) > 0.0


def test_travelling_wave_shape_preserved(travelling):
    spec, grid, result = travelling
    state = result.state
    u = spec.theta + spec.momentum.energy * state.time - spec.momentum.spatial[0] * grid.positions()
    exact = np.asarray(profile(spec, u))
    l2 = math.sqrt(float(np.mean((state.phi - exact) ** 2)))
    scale = math.sqrt(float(np.mean(exact**2)))
    assert l2 / scale < SHAPE_RTOL


def test_travelling_wave_energy_drift(travelling):
    _, _, result = travelling
    assert energy_drift(result) < DRIFT_TOL


def test_reversibility():
    spec = make_massless(2.0, 1.0, spatial=(0.0,))
    grid, state, physics = _rest_setup(spec)
    start = state
    for _ in range(200):
        state = step(state, grid, physics)
    state = GridState(phi=state.phi, pi=-state.pi, time=0.0, family=state.family)
    for _ in range(200):
        state = step(state, grid, physics)
    scale = float(np.max(np.abs(start.pi)))
    assert np.max(np.abs(state.phi - start.phi)) < 1e-10 * scale
    assert np.max(np.abs(state.pi + start.pi)) < 1e-10 * scale


def test_second_order_convergence():
    # Fixed Courant number, doubling resolution: the final-time L2 error
    # against the exact travelling wave should fall by about 4 per doubling.
    spec = make_massless(2.0, 1.0, spatial=(1.0,))
    wavelength = spatial_period(spec)
    errors = []
    for nx in (256, 512, 1024):
        grid = GridSpec(nx=nx, length=wavelength, dt=0.5 * wavelength / nx)
        state = seed_from_spec(spec, grid)
        n_steps = math.ceil(temporal_period(spec) / grid.dt)
        result = run(state, grid, physics_from_spec(spec), n_steps,
                     sample_stride=n_steps)
        final = result.state
        u = (
            spec.theta
            + spec.momentum.energy * final.time
            - spec.momentum.spatial[0] * grid.positions()
        )
        exact = np.asarray(profile(spec, u))
        errors.append(math.sqrt(float(np.mean((final.phi - exact) ** 2))))
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.5 < coarse / fine < 4.5


def test_amplitude_guard_reports_divergence():
    # Large amplitude and marginal resolution: the cubic term blows up within
    # a handful of steps and the guard must catch it.
    spec = make_massless(2.0, 20.0, spatial=(0.0,))
    grid = GridSpec(nx=16, length=1.0, dt=0.89 / 16)
    state = seed_from_spec(spec, grid)
    with pytest.raises(DivergenceError) as info:
        run(state, grid, physics_from_spec(spec), 10_000)
    assert info.value.steps >= 1


def test_non_finite_fields_raise():
    grid = GridSpec(nx=16, length=1.0, dt=1e-3)
    physics = physics_from_spec(make_massless(2.0, 1.0, spatial=(0.0,)))
    state = GridState(phi=np.full(16, 1e200), pi=np.zeros(16), time=0.0,
                      family=physics.family)
    with np.errstate(all="ignore"):
        with pytest.raises(DivergenceError):
            step(state, grid, physics)


def test_run_argument_validation():
    grid = GridSpec(nx=16, length=1.0, dt=1e-3)
    physics = physics_from_spec(make_massless(2.0, 1.0, spatial=(0.0,)))
    state = GridState(phi=np.zeros(16), pi=np.zeros(16), time=0.0,
                      family=physics.family)
    with pytest.raises(ValueError):
        run(state, grid, physics, 0)
    with pytest.raises(ValueError):
        run(state, grid, physics, 10, probe_index=16)
    with pytest.raises(ValueError):
        run(state, grid, physics, 10, sample_stride=0)


def test_run_records_requested_samples():
    grid = GridSpec(nx=16, length=1.0, dt=1e-3)
    spec = make_massless(2.0, 1.0, spatial=(0.0,))
    state = seed_from_spec(spec, grid)
    result = run(state, grid, physics_from_spec(spec), 100, sample_stride=10)
    assert result.times.shape == (11,)
    assert result.probe.shape == (11,)
    assert result.energies.shape == (11,)
    assert result.state.steps == 100
    assert result.times[0] == 0.0
    assert result.times[-1] == pytest.approx(0.1, rel=1e-12)


def test_measure_frequency_pure_tone():
    t = 0.1 * np.arange(1024)
    assert measure_frequency(t, np.sin(1.5 * t)) == pytest.approx(1.5, abs=0.01)


def test_measure_frequency_rejects_bad_input():
    t = 0.1 * np.arange(1024)
    with pytest.raises(ValueError):
        measure_frequency(t[:16], np.sin(t[:16]))
    with pytest.raises(ValueError, match="uniform"):
        measure_frequency(t**1.01, np.sin(1.5 * t))
    # Fewer than 8 cycles in the window.
    short = 0.01 * np.arange(256)
    with pytest.raises(ValueError, match="cycles"):
        measure_frequency(short, np.sin(1.5 * short))
    # Broadband noise has no line to report.
    noise = np.random.default_rng(0).normal(size=512)
    with pytest.raises(ValueError):
        measure_frequency(0.1 * np.arange(512), noise)
