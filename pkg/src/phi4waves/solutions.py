"""Exact travelling-wave solutions of the quartic scalar field equations.

Three families, each a Jacobi elliptic profile riding on a plane-wave phase
u = E*t - p.x + theta (metric signature fixed so the d'Alembertian is
-d_t^2 + laplacian, hence p^2 = E^2 - |p|^2):

  massive   phi = +-A * sn(u|m),  m in (-1, 0], coupling-shifted dispersion
  massless  phi = +-A * sn(u|-1)
  broken    phi = +-v * dn(u|-1), oscillating around a displaced vacuum

Amplitude, parameter and p^2 are locked together by the field equation; the
factories below solve those constraints and evaluation never re-derives them.
Energies are always on the positive branch.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .elliptic import jacobi

DISPERSION_RTOL = 1.0e-12


class Family(str, Enum):
    MASSIVE = "massive"
    MASSLESS = "massless"
    SSB = "ssb"


class Sign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def factor(self) -> float:
        return 1.0 if self is Sign.PLUS else -1.0


@dataclass(frozen=True)
class Momentum:
    """Energy-momentum vector in D spacetime dimensions, spatial part length D-1."""

    energy: float
    spatial: tuple[float, ...]
    dimension: int

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        if len(self.spatial) != self.dimension - 1:
            raise ValueError(
                f"spatial momentum has {len(self.spatial)} components, "
                f"expected {self.dimension - 1}"
            )
        if not all(math.isfinite(c) for c in (self.energy, *self.spatial)):
            raise ValueError("momentum components must be finite")

    @property
    def minkowski_square(self) -> float:
        return self.energy**2 - sum(c * c for c in self.spatial)


@dataclass(frozen=True)
class SolutionSpec:
    """Fully determined solution: family parameters plus derived amplitude,
    elliptic parameter and on-shell momentum.  Built by the make_* factories,
    which enforce the dispersion relation; direct construction skips checks."""

    family: Family
    mu0: float
    lam: float
    mu: float
    theta: float
    sign: Sign
    momentum: Momentum
    amplitude: float
    parameter: float

    @property
    def equilibrium(self) -> float | None:
        """Displaced vacuum +-sqrt(3/2)*v the broken-symmetry solution circles;
        None for the sn families."""
        if self.family is not Family.SSB:
            return None
        return self.sign.factor * math.sqrt(1.5) * self.amplitude

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "mu0": self.mu0,
            "lambda": self.lam,
            "mu": self.mu,
            "theta": self.theta,
            "sign": self.sign.value,
            "momentum": {
                "energy": self.momentum.energy,
                "spatial": list(self.momentum.spatial),
                "dimension": self.momentum.dimension,
            },
            "amplitude": self.amplitude,
            "parameter": {"m": self.parameter},
        }


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0.0):
            raise ValueError(f"{name} must be positive and finite, got {value}")


def _momentum(p_squared: float, spatial, energy_hint: float | None = None) -> Momentum:
    spatial = tuple(float(c) for c in spatial)
    if energy_hint is not None and energy_hint < 0.0:
        raise ValueError(
            f"negative-energy branch requested (energy_hint={energy_hint}); "
            "only the positive root is supported"
        )
    energy = math.sqrt(p_squared + sum(c * c for c in spatial))
    return Momentum(energy=energy, spatial=spatial, dimension=len(spatial) + 1)


def make_massive(mu0, lam, mu, theta=0.0, sign=Sign.PLUS, energy_hint=None,
                 spatial=(0.0, 0.0, 0.0)) -> SolutionSpec:
    """Oscillating solution of the massive equation, A*sn(u|m).

    The coupling shifts the dispersion to
    p^2 = mu0^2 + lam*mu^4/(mu0^2 + sqrt(mu0^4 + 2*lam*mu^4)); lam = 0 is
    accepted and degenerates to the linear plane wave (m = 0, p^2 = mu0^2).
    """
    _require_positive(mu0=mu0, mu=mu)
    if not (math.isfinite(lam) and lam >= 0.0):
        raise ValueError(f"lam must be non-negative and finite, got {lam}")
    root = math.sqrt(mu0**4 + 2.0 * lam * mu**4)
    p_squared = mu0**2 + lam * mu**4 / (mu0**2 + root)
    amplitude = math.sqrt(2.0 * mu**4 / (mu0**2 + root))
    parameter = (-(mu0**2) + root) / (-(mu0**2) - root)
    return SolutionSpec(
        family=Family.MASSIVE, mu0=float(mu0), lam=float(lam), mu=float(mu),
        theta=float(theta), sign=Sign(sign),
        momentum=_momentum(p_squared, spatial, energy_hint),
        amplitude=amplitude, parameter=parameter,
    )


def make_massless(lam, mu, theta=0.0, sign=Sign.PLUS,
                  spatial=(0.0, 0.0, 0.0)) -> SolutionSpec:
    """Massless-equation solution A*sn(u|-1) with p^2 = mu^2*sqrt(lam/2)."""
    _require_positive(lam=lam, mu=mu)
    p_squared = mu**2 * math.sqrt(lam / 2.0)
    amplitude = mu * (2.0 / lam) ** 0.25
    return SolutionSpec(
        family=Family.MASSLESS, mu0=0.0, lam=float(lam), mu=float(mu),
        theta=float(theta), sign=Sign(sign),
        momentum=_momentum(p_squared, spatial),
        amplitude=amplitude, parameter=-1.0,
    )


def make_ssb(mu0, lam, theta=0.0, sign=Sign.PLUS,
             spatial=(0.0, 0.0, 0.0)) -> SolutionSpec:
    """Wrong-sign-mass solution v*dn(u|-1), v = sqrt(2*mu0^2/(3*lam)),
    p^2 = lam*v^2/2 = mu0^2/3.  The mu scale plays no role here."""
    _require_positive(mu0=mu0, lam=lam)
    v = math.sqrt(2.0 * mu0**2 / (3.0 * lam))
    p_squared = mu0**2 / 3.0
    return SolutionSpec(
        family=Family.SSB, mu0=float(mu0), lam=float(lam), mu=0.0,
        theta=float(theta), sign=Sign(sign),
        momentum=_momentum(p_squared, spatial),
        amplitude=v, parameter=-1.0,
    )


def profile(spec: SolutionSpec, u):
    """Solution value at total phase u (sign and amplitude included)."""
    sn, cn, dn = jacobi(u, spec.parameter)
    if spec.family is Family.SSB:
        return spec.sign.factor * spec.amplitude * dn
    return spec.sign.factor * spec.amplitude * sn


def profile_derivative(spec: SolutionSpec, u):
    """d(phi)/du at total phase u, from the closed-form derivatives."""
    sn, cn, dn = jacobi(u, spec.parameter)
    if spec.family is Family.SSB:
        return spec.sign.factor * spec.amplitude * (-spec.parameter) * sn * cn
    return spec.sign.factor * spec.amplitude * cn * dn


def phase(spec: SolutionSpec, t, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (spec.momentum.dimension - 1,):
        raise ValueError(
            f"position has shape {x.shape}, expected ({spec.momentum.dimension - 1},)"
        )
    return spec.momentum.energy * t - float(np.dot(spec.momentum.spatial, x)) + spec.theta


def evaluate(spec: SolutionSpec, t, x):
    """Field value phi(t, x); x must have length D-1.  t may be an array."""
    return profile(spec, phase(spec, t, x))


def evaluate_time_derivative(spec: SolutionSpec, t, x):
    """Analytic d(phi)/dt, used for seeding the lattice integrator."""
    return spec.momentum.energy * profile_derivative(spec, phase(spec, t, x))


def renormalized_mass(mu0: float, mu: float, lam: float) -> float:
    """Effective rest-frame mass sqrt(mu0^2 + lam*mu^4/(mu0^2 + sqrt(mu0^4 + 2*lam*mu^4))).

    Reduces to mu0 at lam = 0 and to (lam/2)^(1/4)*mu at mu0 = 0.
    """
    if mu0 < 0.0 or mu < 0.0 or lam < 0.0:
        raise ValueError(
            f"arguments must be non-negative, got mu0={mu0}, mu={mu}, lam={lam}"
        )
    if mu0 == 0.0:
        if mu == 0.0:
            raise ValueError("renormalized mass undefined at mu0 = mu = 0")
        return (lam / 2.0) ** 0.25 * mu
    root = math.sqrt(mu0**4 + 2.0 * lam * mu**4)
    return math.sqrt(mu0**2 + lam * mu**4 / (mu0**2 + root))


def rest_energy(spec: SolutionSpec) -> float:
    """Invariant sqrt(p^2): the energy scale of the rest-frame oscillation."""
    return math.sqrt(spec.momentum.minkowski_square)


def corrupt(spec: SolutionSpec, target: str, factor: float) -> SolutionSpec:
    """Return a copy with one derived quantity scaled, deliberately breaking
    the dispersion lock.  Used by the verification guards; corrupted specs
    must fail the residual checks, never silently pass."""
    if target == "energy":
        momentum = dataclasses.replace(spec.momentum, energy=spec.momentum.energy * factor)
        return dataclasses.replace(spec, momentum=momentum)
    if target == "amplitude":
        return dataclasses.replace(spec, amplitude=spec.amplitude * factor)
    if target == "parameter":
        return dataclasses.replace(spec, parameter=spec.parameter * factor)
    raise ValueError(f"unknown corruption target {target!r} (use energy, amplitude, parameter)")


_FACTORIES = {
    Family.MASSIVE: lambda d, spatial: make_massive(
        d["mu0"], d["lambda"], d["mu"], d["theta"], Sign(d["sign"]), None, spatial),
    Family.MASSLESS: lambda d, spatial: make_massless(
        d["lambda"], d["mu"], d["theta"], Sign(d["sign"]), spatial),
    Family.SSB: lambda d, spatial: make_ssb(
        d["mu0"], d["lambda"], d["theta"], Sign(d["sign"]), spatial),
}


def from_dict(data: dict) -> SolutionSpec:
    """Rebuild a spec from its to_dict() form, re-deriving the locked
    quantities and checking the stored ones against them."""
    try:
        family = Family(data["family"])
        spatial = tuple(float(c) for c in data["momentum"]["spatial"])
        spec = _FACTORIES[family](data, spatial)
        stored = (
            float(data["momentum"]["energy"]),
            float(data["amplitude"]),
            float(data["parameter"]["m"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed solution record: {exc}") from exc
    derived = (spec.momentum.energy, spec.amplitude, spec.parameter)
    for name, got, want in zip(("energy", "amplitude", "parameter"), stored, derived):
        if abs(got - want) > DISPERSION_RTOL * max(1.0, abs(want)):
            raise ValueError(
                f"stored {name}={got} violates the dispersion lock (expected {want})"
            )
    return spec
