"""Tests for residual checks, harmonic expansions, and mass spectra."""
from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import quad

from phi4waves import (
    Family,
    complete_k,
    corrupt,
    fourier_series,
    make_massive,
    make_massless,
    make_ssb,
    mass_spectrum,
    nome,
    partial_sum,
    phase_period,
    profile,
    residual,
    residual_max,
    rest_energy,
)
from phi4waves.analysis import SeriesKind, mean_square

RESIDUAL_TOL = 1e-9
SERIES_TOL = 1e-7
CLOSED_FORM_TOL = 1e-8

# Leading sn coefficient for lambda = 2, mu = 1, frozen from the spectral
# projection and confirmed against adaptive quadrature of phi(u) sin(nu u).
MASSLESS_C0 = 0.9550059869606198
MASSLESS_RATIO = 0.04507772324496128
EPSILON_0 = 1.1981402347355923

FAMILY_BUILDERS = {
    Family.MASSIVE: lambda lam, s: make_massive(s, lam, s, spatial=(0.0,)),
    Family.MASSLESS: lambda lam, s: make_massless(lam, s, spatial=(0.0,)),
    Family.SSB: lambda lam, s: make_ssb(s, lam, spatial=(0.0,)),
}


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("scale", [0.5, 1.0, 2.0])
def test_residual_vanishes_across_families(family, lam, scale):
    spec = FAMILY_BUILDERS[family](lam, scale)
    assert residual_max(spec) < RESIDUAL_TOL


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("target", ["energy", "amplitude", "parameter"])
def test_residual_detects_corruption(family, target):
    spec = FAMILY_BUILDERS[family](2.0, 1.0)
    assert residual_max(corrupt(spec, target, 1.01)) > 1e-3


def test_residual_with_boosted_momentum():
    spec = make_massless(2.0, 1.0, spatial=(1.0,))
    assert residual_max(spec) < RESIDUAL_TOL


def test_residual_pointwise_linear_limit():
    # lambda = 0 removes the cubic term, so the raw residual is roundoff only.
    spec = make_massive(1.3, 0.0, 0.7, spatial=(0.0,))
    for t, x in [(0.0, 0.0), (0.4, 1.1), (2.2, -0.6)]:
        assert abs(residual(spec, t, np.array([x]))) < 1e-12


def test_residual_max_requires_enough_samples():
    spec = make_massless(2.0, 1.0, spatial=(0.0,))
    with pytest.raises(ValueError):
        residual_max(spec, samples=7)


def test_phase_period_by_kind():
    k = complete_k(-1.0)
    assert phase_period(make_massless(2.0, 1.0)) == pytest.approx(4.0 * k, rel=1e-13)
    assert phase_period(make_ssb(1.0, 2.0)) == pytest.approx(2.0 * k, rel=1e-13)


def _sn_closed_coefficients(spec, count):
    # c_n = A (2 pi / (K sqrt(-m))) (-1)^n q^(n + 1/2) / (1 + q^(2n+1)) for
    # the odd harmonics of A sn(u|m), m < 0; exponents grow by one per
    # harmonic, and the sqrt(-m) drops out at m = -1.
    m = spec.parameter
    k = complete_k(m)
    q = nome(m)
    out = []
    for n in range(count):
        out.append(
            spec.amplitude
            * (2.0 * math.pi / (k * math.sqrt(-m)))
            * (-1.0) ** n
            * q ** (n + 0.5)
            / (1.0 + q ** (2 * n + 1))
        )
    return out


def _dn_closed_coefficients(spec, count):
    # Constant pi/(2K) plus c_n = (2 pi / K) (-1)^n q^n / (1 + q^(2n)),
    # all scaled by the amplitude.
    k = complete_k(spec.parameter)
    q = nome(spec.parameter)
    const = spec.amplitude * math.pi / (2.0 * k)
    out = []
    for n in range(1, count + 1):
        out.append(
            spec.amplitude
            * (2.0 * math.pi / k)
            * (-1.0) ** n
            * q**n
            / (1.0 + q ** (2 * n))
        )
    return const, out


def test_sn_projection_matches_closed_form_modulus_i():
    spec = make_massless(2.0, 1.0)
    series = fourier_series(spec, 6)
    assert series.kind is SeriesKind.SN
    assert series.fundamental == pytest.approx(
        math.pi / (2.0 * complete_k(-1.0)), rel=1e-13
    )
    expected = _sn_closed_coefficients(spec, 6)
    for got, want in zip(series.coefficients, expected):
        assert got == pytest.approx(want, abs=CLOSED_FORM_TOL * spec.amplitude)
    assert series.coefficients[0] == pytest.approx(MASSLESS_C0, rel=1e-12)


def test_sn_projection_matches_closed_form_generic_modulus():
    spec = make_massive(1.0, 2.0, 1.0)
    series = fourier_series(spec, 6)
    expected = _sn_closed_coefficients(spec, 6)
    for got, want in zip(series.coefficients, expected):
        assert got == pytest.approx(want, abs=CLOSED_FORM_TOL * spec.amplitude)


def test_dn_projection_matches_closed_form():
    spec = make_ssb(math.sqrt(3.0), 2.0)
    series = fourier_series(spec, 6)
    assert series.kind is SeriesKind.DN
    assert series.fundamental == pytest.approx(math.pi / complete_k(-1.0), rel=1e-13)
    const, expected = _dn_closed_coefficients(spec, 6)
    assert series.constant_term == pytest.approx(const, abs=CLOSED_FORM_TOL)
    for got, want in zip(series.coefficients, expected):
        assert got == pytest.approx(want, abs=CLOSED_FORM_TOL * spec.amplitude)


@pytest.mark.parametrize("family", list(Family))
def test_partial_sum_converges_to_profile(family):
    spec = FAMILY_BUILDERS[family](2.0, 1.0)
    u = np.linspace(0.0, phase_period(spec), 513)
    exact = profile(spec, u)
    series = fourier_series(spec, 8)
    deviation = np.max(np.abs(partial_sum(series, u) - exact))
    assert deviation < SERIES_TOL * spec.amplitude


def test_single_term_truncation_error_bounded_by_next_coefficient():
    spec = make_massless(2.0, 1.0)
    wide = fourier_series(spec, 8)
    series = fourier_series(spec, 1)
    u = np.linspace(0.0, phase_period(spec), 513)
    deviation = np.max(np.abs(partial_sum(series, u) - profile(spec, u)))
    assert deviation < 2.0 * abs(wide.coefficients[1])


def test_partial_sum_odd_symmetry():
    spec = make_massless(2.0, 1.0)
    series = fourier_series(spec, 4)
    assert partial_sum(series, 0.0) == 0.0
    u = np.linspace(0.1, 2.0, 9)
    assert np.max(np.abs(partial_sum(series, u) + partial_sum(series, -u))) < 1e-15


@pytest.mark.parametrize("family", list(Family))
def test_parseval_against_quadrature(family):
    spec = FAMILY_BUILDERS[family](2.0, 1.0)
    period = phase_period(spec)
    integral, abserr = quad(
        lambda u: float(profile(spec, u)) ** 2, 0.0, period, epsabs=1e-13, limit=200
    )
    assert abserr < 1e-10
    series = fourier_series(spec, 24)
    assert mean_square(series) == pytest.approx(integral / period, rel=1e-8)


def test_decay_ratio_tracks_the_nome():
    # Successive odd-harmonic amplitudes shrink geometrically, with ratio set
    # by the nome of the parameter (about 0.02 here, 0.045 at m = -1).
    massive = fourier_series(make_massive(1.0, 2.0, 1.0), 5)
    q = nome(-0.38196601125010515)
    ratios = [
        abs(massive.coefficients[i + 1] / massive.coefficients[i]) for i in range(4)
    ]
    assert all(0.5 * q < r < 2.0 * q for r in ratios)
    massless = fourier_series(make_massless(2.0, 1.0), 3)
    assert abs(massless.coefficients[1] / massless.coefficients[0]) == pytest.approx(
        MASSLESS_RATIO, rel=1e-10
    )


def test_fourier_series_requires_positive_truncation():
    with pytest.raises(ValueError):
        fourier_series(make_massless(2.0, 1.0), 0)


def test_ground_mass_frozen_value():
    lines = mass_spectrum(make_massless(2.0, 1.0), 3)
    assert lines[0].energy == pytest.approx(EPSILON_0, abs=1e-6)
    assert lines[0].energy == pytest.approx(
        math.pi / (2.0 * complete_k(-1.0)) * (2.0 / 2.0) ** 0.25, rel=1e-12
    )


def test_level_spacing_is_exactly_odd_integer():
    lines = mass_spectrum(make_massless(0.7, 1.3), 6)
    for n, line in enumerate(lines):
        assert line.n == n
        # Stored as the literal product (2n+1) * scale, so equality is exact.
        assert line.energy == (2 * n + 1) * lines[0].energy
    amplitudes = [abs(line.amplitude) for line in lines]
    assert all(b < a for a, b in zip(amplitudes, amplitudes[1:]))


def test_displaced_vacuum_spectrum():
    spec = make_ssb(math.sqrt(3.0), 2.0)
    lines = mass_spectrum(spec, 3)
    assert lines[0].energy == 0.0
    series = fourier_series(spec, 3)
    assert lines[0].amplitude == series.constant_term
    assert lines[1].energy == pytest.approx(math.pi / complete_k(-1.0), rel=1e-12)
    for n, line in enumerate(lines):
        assert line.energy == n * lines[1].energy


def test_ground_mass_grows_with_coupling():
    masses = [
        mass_spectrum(make_massless(lam, 1.0), 1)[0].energy
        for lam in (0.5, 1.0, 2.0, 4.0)
    ]
    assert all(a < b for a, b in zip(masses, masses[1:]))


def test_spectrum_scale_is_fundamental_times_rest_energy():
    for spec in (make_massive(1.0, 2.0, 1.0), make_massless(3.0, 0.8)):
        series = fourier_series(spec, 2)
        lines = mass_spectrum(spec, 2)
        assert lines[0].energy == pytest.approx(
            series.fundamental * rest_energy(spec), rel=1e-10
        )


def test_mass_spectrum_rejects_negative_count():
    with pytest.raises(ValueError):
        mass_spectrum(make_massless(2.0, 1.0), -1)
