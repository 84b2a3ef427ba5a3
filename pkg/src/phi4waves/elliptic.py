"""Complete elliptic integrals and Jacobi elliptic functions for real parameter m <= 1.

Everything is built on the arithmetic-geometric mean.  The quarter period K(m)
is pi/(2*agm(1, sqrt(1-m))), and sn/cn/dn come from the descending Landen
recursion on the AGM scale sequence (Bulirsch's function-value form, see
https://dlmf.nist.gov/22.20, which stays accurate at the quarter periods where
the amplitude recursion degenerates to 0/0).

Negative parameter, which is how the imaginary modulus k = i enters, is mapped
onto (0, 1) by the imaginary-modulus transformation

    m_t = -m/(1-m),   sn(u|m) = sn(u*s|m_t) / (s*dn(u*s|m_t)),  s = sqrt(1-m),

with cn(u|m) = cn/dn and dn(u|m) = 1/dn of the transformed argument
(https://dlmf.nist.gov/22.17).  All arithmetic stays real.

Arguments may be scalars or numpy arrays; the parameter m is always scalar.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

# Exclusion band below the logarithmic singularity at m = 1.  Inputs inside
# the band are rejected, never extrapolated.
SINGULAR_BAND = 1.0e-10

_EPS = float(np.finfo(float).eps)
_AGM_TOL = math.sqrt(_EPS)
_MAX_ITER = 16


class JacobiTriple(NamedTuple):
    sn: float | np.ndarray
    cn: float | np.ndarray
    dn: float | np.ndarray


def _check_parameter(m: float) -> float:
    m = float(m)
    if not math.isfinite(m):
        raise ValueError(f"elliptic parameter must be finite, got m={m}")
    if m > 1.0 - SINGULAR_BAND:
        raise ValueError(
            f"elliptic parameter m={m} is inside the excluded band above "
            f"{1.0 - SINGULAR_BAND} (singular limit m=1)"
        )
    return m


def complete_k(m: float) -> float:
    """Complete elliptic integral of the first kind K(m), real quarter period.

    K(m) = integral of (1 - m sin^2 t)^(-1/2) over t in [0, pi/2], evaluated
    as pi/(2*agm(1, sqrt(1-m))).  Valid for any m <= 1 - SINGULAR_BAND,
    negative parameter included.
    """
    m = _check_parameter(m)
    a, b = 1.0, math.sqrt(1.0 - m)
    while abs(a - b) > _EPS * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def complete_k_complement(m: float) -> float:
    """Complementary integral K'(m) = K(1-m), defined only for 0 < m < 1.

    Outside that range the complement leaves the real domain (m <= 0 gives
    K(>=1)); the nome for negative parameter goes through the transformed
    modulus instead, see nome().
    """
    m = float(m)
    if not 0.0 < m < 1.0:
        raise ValueError(
            f"complementary integral needs 0 < m < 1, got m={m}"
        )
    return complete_k(1.0 - m)


def nome(m: float) -> float:
    """Nome q = exp(-pi*K'(m)/K(m)).

    For m < 0 the nome of the transformed parameter m_t = -m/(1-m) is
    returned; the direct definition has no real value there.  q(0) = 0.
    """
    m = _check_parameter(m)
    if m < 0.0:
        m = -m / (1.0 - m)
    if m == 0.0:
        return 0.0
    return math.exp(-math.pi * complete_k_complement(m) / complete_k(m))


def _jacobi_agm(u: np.ndarray, m: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Descending Landen evaluation for 0 < m < 1; u already period-reduced."""
    scale_a: list[float] = []
    scale_g: list[float] = []
    a, emc = 1.0, 1.0 - m
    c = a
    for _ in range(_MAX_ITER):
        g = math.sqrt(emc)
        scale_a.append(a)
        scale_g.append(g)
        c = 0.5 * (a + g)
        if abs(a - g) <= _AGM_TOL * a:
            break
        emc = a * g
        a = c
    w = u * c
    sin_w = np.sin(w)
    cos_w = np.cos(w)
    dn = np.ones_like(w)
    # Back-recursion on function-value ratios; sin(w) = 0 rows carry a dummy
    # ratio and are patched afterwards (sn=0, cn=+-1, dn=1 hold exactly there).
    zero = sin_w == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(zero, 0.0, cos_w / sin_w)
        cc = c * r
        for a_i, g_i in zip(reversed(scale_a), reversed(scale_g)):
            r = cc * r
            cc = cc * dn
            dn = (g_i + r) / (a_i + r)
            r = cc / a_i
        amp = 1.0 / np.sqrt(cc * cc + 1.0)
        sn = np.where(sin_w >= 0.0, amp, -amp)
        cn = cc * sn
    sn = np.where(zero, 0.0, sn)
    cn = np.where(zero, cos_w, cn)
    dn = np.where(zero, 1.0, dn)
    return sn, cn, dn


def jacobi(u, m: float) -> JacobiTriple:
    """Jacobi elliptic functions sn, cn, dn at argument u and parameter m.

    Parameters
    ----------
    u : array_like
        Real argument, finite.
    m : float
        Parameter m = k^2, any value <= 1 - SINGULAR_BAND.

    Returns
    -------
    JacobiTriple
        (sn, cn, dn) with the shape of u; scalars in give floats out.
    """
    m = _check_parameter(m)
    scalar = np.isscalar(u) or np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("jacobi argument must be finite")
    if m == 0.0:
        sn, cn, dn = np.sin(u), np.cos(u), np.ones_like(u)
    elif m < 0.0:
        m_t = -m / (1.0 - m)
        s = math.sqrt(1.0 - m)
        sn1, cn1, dn1 = _reduced(u * s, m_t)
        sn, cn, dn = sn1 / (s * dn1), cn1 / dn1, 1.0 / dn1
    else:
        sn, cn, dn = _reduced(u, m)
    if scalar:
        return JacobiTriple(float(sn), float(cn), float(dn))
    return JacobiTriple(sn, cn, dn)


def _reduced(u: np.ndarray, m: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    period = 4.0 * complete_k(m)
    u = u - period * np.floor(u / period)
    return _jacobi_agm(u, m)


def jacobi_derivatives(u, m: float) -> JacobiTriple:
    """du-derivatives (sn', cn', dn') = (cn*dn, -sn*dn, -m*sn*cn)."""
    sn, cn, dn = jacobi(u, m)
    return JacobiTriple(cn * dn, -sn * dn, -m * sn * cn)
