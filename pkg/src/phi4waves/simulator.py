"""1+1D lattice integration of the nonlinear field equations.

The evolution never touches the closed-form solutions: it advances
d_t^2 phi = d_x^2 phi -+ mu0^2 phi - lambda phi^3 with an explicit
kick-drift-kick leapfrog on a periodic grid (3-point stencil), which is
symplectic, time-reversible and second order.  Exact solutions seed the grid
and the run is compared back against them, so agreement is evidence about the
solutions, not about the scheme being fed its own answer.

Divergence is detected two ways: non-finite values after a step, and the
amplitude guard max|phi| > 1e6 * initial amplitude during a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import phase_period
from .solutions import Family, SolutionSpec, profile, profile_derivative

AMPLITUDE_GUARD = 1.0e6
MAX_CFL = 0.9


class DivergenceError(RuntimeError):
    """Field blew up; .steps records how many steps completed first."""

    def __init__(self, message: str, steps: int):
        super().__init__(message)
        self.steps = steps


@dataclass(frozen=True)
class GridSpec:
    """Periodic spatial grid and time step.  nx must be a power of two; the
    Courant number dt*nx/length is capped at MAX_CFL for stability."""

    nx: int
    length: float
    dt: float

    def __post_init__(self):
        if self.nx < 2 or self.nx & (self.nx - 1) != 0:
            raise ValueError(f"nx must be a power of two >= 2, got {self.nx}")
        if not (math.isfinite(self.length) and self.length > 0.0):
            raise ValueError(f"length must be positive, got {self.length}")
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.cfl > MAX_CFL:
            raise ValueError(
                f"cfl = dt*nx/length = {self.cfl:.6g} exceeds the stability "
                f"margin {MAX_CFL}"
            )

    @property
    def cfl(self) -> float:
        return self.dt * self.nx / self.length

    @property
    def dx(self) -> float:
        return self.length / self.nx

    def positions(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx


@dataclass(frozen=True)
class Physics:
    """Which equation the lattice evolves; mu is irrelevant here."""

    family: Family
    mu0: float
    lam: float

    @property
    def mass_sign(self) -> float:
        return -1.0 if self.family is Family.SSB else 1.0


@dataclass(frozen=True)
class GridState:
    phi: np.ndarray
    pi: np.ndarray
    time: float
    family: Family
    steps: int = 0


def physics_from_spec(spec: SolutionSpec) -> Physics:
    return Physics(family=spec.family, mu0=spec.mu0, lam=spec.lam)


def spatial_period(spec: SolutionSpec) -> float:
    """Spatial wavelength of the seeded profile; infinite in the rest frame."""
    px = spec.momentum.spatial[0]
    if px == 0.0:
        return math.inf
    return phase_period(spec) / abs(px)


def temporal_period(spec: SolutionSpec) -> float:
    return phase_period(spec) / spec.momentum.energy


def seed_from_spec(spec: SolutionSpec, grid: GridSpec) -> GridState:
    """Initial data phi(0, x), d_t phi(0, x) from the exact solution.

    The spec must be 1+1 dimensional.  A travelling seed requires the domain
    to hold a whole number of spatial wavelengths, otherwise the periodic
    boundary would introduce a defect; the error names the smallest length
    that works.
    """
    if spec.momentum.dimension != 2:
        raise ValueError(
            f"lattice seeding needs a 1+1 dimensional spec, got D={spec.momentum.dimension}"
        )
    px = spec.momentum.spatial[0]
    if px != 0.0:
        wavelength = spatial_period(spec)
        cycles = grid.length / wavelength
        if abs(cycles - round(cycles)) > 1.0e-9 * max(1.0, cycles) or round(cycles) < 1:
            raise ValueError(
                f"domain length {grid.length} does not hold a whole number of "
                f"spatial wavelengths; smallest compatible length is {wavelength}"
            )
    u = spec.theta - px * grid.positions()
    phi = profile(spec, u)
    pi = spec.momentum.energy * profile_derivative(spec, u)
    return GridState(
        phi=np.asarray(phi, dtype=float),
        pi=np.asarray(pi, dtype=float),
        time=0.0,
        family=spec.family,
        steps=0,
    )


def _force(phi: np.ndarray, dx: float, physics: Physics) -> np.ndarray:
    lap = (np.roll(phi, -1) + np.roll(phi, 1) - 2.0 * phi) / (dx * dx)
    return lap - physics.mass_sign * physics.mu0**2 * phi - physics.lam * phi**3


def step(state: GridState, grid: GridSpec, physics: Physics,
         dt: float | None = None) -> GridState:
    """One kick-drift-kick update.  dt defaults to the grid step; passing
    -grid.dt steps backward (the reversibility tests rely on this)."""
    h = grid.dt if dt is None else dt
    pi_half = state.pi + 0.5 * h * _force(state.phi, grid.dx, physics)
    phi_new = state.phi + h * pi_half
    pi_new = pi_half + 0.5 * h * _force(phi_new, grid.dx, physics)
    steps = state.steps + 1
    if not (np.all(np.isfinite(phi_new)) and np.all(np.isfinite(pi_new))):
        raise DivergenceError(
            f"non-finite field after step {steps} (t = {state.time + h:.6g})", steps
        )
    return GridState(phi=phi_new, pi=pi_new, time=state.time + h,
                     family=state.family, steps=steps)


def energy(state: GridState, grid: GridSpec, physics: Physics) -> float:
    """Conserved functional: integral of
    pi^2/2 + (d_x phi)^2/2 +- mu0^2 phi^2/2 + lambda phi^4/4.

    On a periodic uniform grid the trapezoid weights collapse to dx; the
    gradient uses the forward difference so the discrete energy is the one the
    leapfrog conserves to scheme order."""
    grad = (np.roll(state.phi, -1) - state.phi) / grid.dx
    density = (
        0.5 * state.pi**2
        + 0.5 * grad**2
        + physics.mass_sign * 0.5 * physics.mu0**2 * state.phi**2
        + 0.25 * physics.lam * state.phi**4
    )
    return float(grid.dx * np.sum(density))


@dataclass(frozen=True)
class RunResult:
    times: np.ndarray
    probe: np.ndarray
    energies: np.ndarray
    state: GridState
    probe_index: int


def run(state: GridState, grid: GridSpec, physics: Physics, n_steps: int,
        probe_index: int = 0, sample_stride: int = 1) -> RunResult:
    """Advance n_steps, recording the probe point and total energy every
    sample_stride steps (plus the initial instant)."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    if not 0 <= probe_index < grid.nx:
        raise ValueError(f"probe index {probe_index} outside the grid")
    if sample_stride < 1:
        raise ValueError(f"sample_stride must be positive, got {sample_stride}")
    # The seed can start at a zero crossing of phi, so the guard scale looks
    # at both fields; exactly-zero data never trips it (zero is a fixed point).
    seed_scale = max(float(np.max(np.abs(state.phi))),
                     float(np.max(np.abs(state.pi))), 1.0e-300)
    guard = AMPLITUDE_GUARD * seed_scale
    times = [state.time]
    probe = [float(state.phi[probe_index])]
    energies = [energy(state, grid, physics)]
    for k in range(1, n_steps + 1):
        state = step(state, grid, physics)
        if float(np.max(np.abs(state.phi))) > guard:
            raise DivergenceError(
                f"amplitude guard tripped after step {state.steps}: "
                f"max|phi| exceeds {AMPLITUDE_GUARD:.0e} times the seed amplitude",
                state.steps,
            )
        if k % sample_stride == 0:
            times.append(state.time)
            probe.append(float(state.phi[probe_index]))
            energies.append(energy(state, grid, physics))
    return RunResult(
        times=np.asarray(times),
        probe=np.asarray(probe),
        energies=np.asarray(energies),
        state=state,
        probe_index=probe_index,
    )


def energy_drift(result: RunResult) -> float:
    """Max relative deviation of the energy series from its initial value."""
    e0 = result.energies[0]
    scale = abs(e0) if e0 != 0.0 else 1.0
    return float(np.max(np.abs(result.energies - e0)) / scale)


def measure_frequency(times, values) -> float:
    """Dominant angular frequency of a uniformly sampled series.

    Hann-windowed FFT with parabolic interpolation of the log magnitude around
    the peak.  The series must be uniform, span at least 8 cycles of the peak
    it finds, and have a peak that actually dominates; violations raise
    ValueError rather than returning a junk frequency.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.ndim != 1 or times.shape != values.shape or times.size < 32:
        raise ValueError("need matching 1-d series of at least 32 samples")
    steps = np.diff(times)
    dt = float(steps[0])
    if dt <= 0.0 or np.max(np.abs(steps - dt)) > 1.0e-9 * dt:
        raise ValueError("sampling must be uniform and increasing")
    n = values.size
    window = np.hanning(n)
    spectrum = np.abs(np.fft.rfft((values - np.mean(values)) * window))
    spectrum[0] = 0.0
    peak = int(np.argmax(spectrum))
    if peak < 8:
        raise ValueError(
            f"dominant peak at bin {peak}: series spans fewer than 8 cycles"
        )
    if peak >= spectrum.size - 1:
        raise ValueError("dominant peak at the Nyquist edge; sample faster")
    floor = float(np.median(spectrum[1:]))
    if spectrum[peak] < 10.0 * max(floor, 1.0e-300):
        raise ValueError("no dominant spectral peak in the series")
    # Parabolic refinement on log magnitude; exact for a windowed pure tone
    # to well below one bin.
    a, b, c = np.log(spectrum[peak - 1 : peak + 2])
    denom = a - 2.0 * b + c
    shift = 0.0 if denom == 0.0 else 0.5 * (a - c) / denom
    return 2.0 * math.pi * (peak + shift) / (n * dt)


def predicted_frequency(spec: SolutionSpec) -> float:
    """Angular frequency a fixed probe point sees: 2*pi over the phase period
    times the lab-frame energy.  Reduces to the first spectrum line in the
    rest frame (the n = 1 line for the dn family)."""
    return (2.0 * math.pi / phase_period(spec)) * spec.momentum.energy
