"""First-order Green function of the massless theory and its checks.

The retarded temporal factor is

    T(t) = -N * cn(w*t + theta_n | -1) * dn(w*t + theta_n | -1),   t > 0,

with N = 1/(mu*(8*lambda)^(1/4)), w = (lambda/2)^(1/4)*mu and phase offset
theta_n = (4n+1)*K(-1).  Since 4n*K is a whole number of periods, every member
of the phase family is the same function; the offset is reduced to K before
any numerics, so equality across n is exact, not approximate.

T solves the fluctuation equation T'' + 3*lambda*phi_c^2*T = 0 around the
classical solution phi_c carrying the same phase, with unit jump T'(0+) = 1
supplying the delta source.  The accompanying spatial delta factor is a
bookkeeping flag, never sampled.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .analysis import SpectrumLine, mass_spectrum
from .elliptic import complete_k, jacobi
from .solutions import SolutionSpec, Family, make_massless, rest_energy

_PROJECTION_SAMPLES = 4096
_PROJECTION_ATOL = 1.0e-10
_PROJECTION_MAX = 1 << 17


@dataclass(frozen=True)
class GreenTimePart:
    """Temporal Green factor parameters; build with make_green_time_part."""

    n: int
    mu: float
    lam: float
    normalization: float
    omega: float


@dataclass(frozen=True)
class GreenSpectrum:
    lines: tuple[SpectrumLine, ...]
    phases: tuple[float, ...]
    phase_index: int


def make_green_time_part(mu: float, lam: float, n: int = 0) -> GreenTimePart:
    if not (math.isfinite(mu) and mu > 0.0):
        raise ValueError(f"mu must be positive and finite, got {mu}")
    if not (math.isfinite(lam) and lam > 0.0):
        raise ValueError(f"lam must be positive and finite, got {lam}")
    if n < 0:
        raise ValueError(f"phase index must be non-negative, got {n}")
    return GreenTimePart(
        n=int(n),
        mu=float(mu),
        lam=float(lam),
        normalization=1.0 / (mu * (8.0 * lam) ** 0.25),
        omega=(lam / 2.0) ** 0.25 * mu,
    )


def _reduced_phase() -> float:
    # theta_n mod 4K; the 4nK part is dropped exactly, not numerically.
    return complete_k(-1.0)


def green_time_part(g: GreenTimePart, t):
    """T(t) for scalar or array t; the retarded factor zeroes t < 0."""
    t = np.asarray(t, dtype=float)
    u = g.omega * t + _reduced_phase()
    sn, cn, dn = jacobi(u, -1.0)
    value = np.where(t < 0.0, 0.0, -g.normalization * cn * dn)
    if value.ndim == 0:
        return float(value)
    return value


def _require_positive_times(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("residual checks are defined for t > 0 only")
    return t


def greens_equation_residual(g: GreenTimePart, t):
    """T'' + 3*lambda*phi_c^2*T at t > 0, with both pieces built independently.

    T'' uses the analytic second derivative of cn*dn (generic parameter-m
    composition, specialized to m = -1 only by substitution); the potential
    term uses the classical amplitude (2/lambda)^(1/4)*mu.  Exact inputs make
    the two cancel to rounding; a detuned omega breaks the cancellation.
    """
    t = _require_positive_times(t)
    m = -1.0
    u = g.omega * t + _reduced_phase()
    sn, cn, dn = jacobi(u, m)
    cndn_dd = cn * dn * ((m + 1.0) - 2.0 * m * cn**2 + 2.0 * m * sn**2 - 2.0 * dn**2)
    t_second = -g.normalization * g.omega**2 * cndn_dd
    amplitude = (2.0 / g.lam) ** 0.25 * g.mu
    t_value = -g.normalization * cn * dn
    result = t_second + 3.0 * g.lam * (amplitude * sn) ** 2 * t_value
    if result.ndim == 0:
        return float(result)
    return result


def green_derivative_identity(g: GreenTimePart, t):
    """Discrepancy T(t) - [-(1/(2 mu^2)) d(phi_c)/du] at u = w*t + theta_n.

    Both sides are -const*cn*dn; the constants agree algebraically, so the
    discrepancy is pure rounding.
    """
    t = _require_positive_times(t)
    u = g.omega * t + _reduced_phase()
    sn, cn, dn = jacobi(u, -1.0)
    amplitude = (2.0 / g.lam) ** 0.25 * g.mu
    from_solution = -(amplitude / (2.0 * g.mu**2)) * cn * dn
    result = -g.normalization * cn * dn - from_solution
    if result.ndim == 0:
        return float(result)
    return result


def jump_slope(g: GreenTimePart, h: float | None = None) -> float:
    """One-sided second-order finite-difference slope of T at t = 0+.

    The delta source fixes this to exactly 1; the step defaults to a small
    fraction of the oscillation time so the estimate is resolution-robust.
    """
    if h is None:
        h = 1.0e-5 / g.omega
    t0 = green_time_part(g, 0.0)
    t1 = green_time_part(g, h)
    t2 = green_time_part(g, 2.0 * h)
    return (-3.0 * t0 + 4.0 * t1 - t2) / (2.0 * h)


def _classical_spec(g: GreenTimePart) -> SolutionSpec:
    return make_massless(g.lam, g.mu, spatial=(0.0,))


def green_spectrum(g: GreenTimePart, n_max: int) -> GreenSpectrum:
    """Spectral lines of T: energies shared bit-for-bit with the classical
    mass spectrum, magnitudes and phases from projecting T onto
    cos(e_n t + phase) over one full period."""
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    classical = mass_spectrum(_classical_spec(g), n_max)
    period = 4.0 * complete_k(-1.0) / g.omega
    samples = _PROJECTION_SAMPLES
    prev = None
    while True:
        t = np.arange(samples) * (period / samples)
        spectrum = np.fft.rfft(green_time_part(g, t))
        # Line n sits at e_n = (2n+1)*(pi/2K)*omega, exactly bin 2n+1 of the
        # 4K/omega window.
        bins = spectrum[1 : 2 * n_max + 2 : 2]
        cos_part = 2.0 * bins.real / samples
        sin_part = -2.0 * bins.imag / samples
        if prev is not None:
            gap = float(np.max(np.hypot(cos_part - prev[0], sin_part - prev[1])))
            if gap <= _PROJECTION_ATOL:
                break
        prev = (cos_part, sin_part)
        samples *= 2
        if samples > _PROJECTION_MAX:
            raise ArithmeticError(
                f"spectral projection failed to stabilize below {_PROJECTION_MAX} samples"
            )
    lines = tuple(
        SpectrumLine(n=line.n, energy=line.energy,
                     amplitude=float(np.hypot(cos_part[i], sin_part[i])))
        for i, line in enumerate(classical)
    )
    phases = tuple(
        float(math.atan2(-sin_part[i], cos_part[i])) for i in range(len(lines))
    )
    return GreenSpectrum(lines=lines, phases=phases, phase_index=g.n)


def partial_sum_time(spectrum: GreenSpectrum, t):
    """Reconstruction sum B_n cos(e_n t + phase_n) at time t."""
    t = np.asarray(t, dtype=float)
    total = np.zeros(t.shape)
    for line, ph in zip(spectrum.lines, spectrum.phases):
        total = total + line.amplitude * np.cos(line.energy * t + ph)
    if total.ndim == 0:
        return float(total)
    return total


def zero_mode_residual(spec: SolutionSpec, t):
    """Fluctuation-operator residual of the translational mode chi = d(phi_c)/dt.

    chi'' + 3*lambda*phi_c^2*chi vanishes for exact specs because chi is the
    epsilon = 0 eigenmode the time translation generates.  Rest-frame form;
    the spec must be massless.
    """
    if spec.family is not Family.MASSLESS:
        raise ValueError(f"zero mode is defined for the massless family, got {spec.family.value}")
    w = rest_energy(spec)
    t = np.asarray(t, dtype=float)
    u = w * t + spec.theta
    m = spec.parameter
    sn, cn, dn = jacobi(u, m)
    a = spec.sign.factor * spec.amplitude
    chi = a * w * cn * dn
    cndn_dd = cn * dn * ((m + 1.0) - 2.0 * m * cn**2 + 2.0 * m * sn**2 - 2.0 * dn**2)
    chi_second = a * w**3 * cndn_dd
    result = chi_second + 3.0 * spec.lam * (a * sn) ** 2 * chi
    if result.ndim == 0:
        return float(result)
    return result


def zero_mode_scale(spec: SolutionSpec) -> float:
    """Natural magnitude of either zero-mode term, for scaled tolerances."""
    return spec.lam * spec.amplitude**3 * rest_energy(spec)


def detune(g: GreenTimePart, target: str, factor: float) -> GreenTimePart:
    """Copy with normalization or omega scaled, for the verification guards."""
    if target not in ("normalization", "omega"):
        raise ValueError(f"unknown detuning target {target!r} (use normalization, omega)")
    return dataclasses.replace(g, **{target: getattr(g, target) * factor})
