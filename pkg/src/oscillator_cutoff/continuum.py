"""The naive omega_h -> infinity limit and its tachyon.

Removing the cutoff while holding (omega_r, r0r) fixed leaves

    1/G_r(omega^2 + i eps) = omega^2 - omega_r^2 + i (2/3) r0r omega^3,
    1/G_r(-k^2)            = -k^2 - omega_r^2 + (2/3) r0r k^3,

and the second form has a zero at k_t ~ 3/(2 r0r) + (2/3) r0r omega_r^2:
a pole at negative omega^2 whose residue is negative.

Residue convention: every residue below is the magnitude R of the true
residue of G_r in the omega^2 variable, G_r ~ -R / (omega^2 + k_t^2).  R
is the quantity plotted as ``pi r_t`` in the usual presentation of this
result, so it tends to 2 as c = (2/3) r0r omega_r -> 0+ and equals 1 at
c = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoBracketError
from .model import ModelParams, extended_params
from .numerics import DEFAULT_REL_TOL, find_root, integrate_to_infinity
from .sharp import integrate_spectrum


@dataclass(frozen=True)
class TachyonReport:
    """Tachyon pole at omega^2 = -k_t^2.

    ``r_t_derivative`` comes from the slope of 1/G_r(-k^2) at k_t,
    ``r_t_integral`` from the spectral sum rule.  Both are residue
    magnitudes R (see module docstring); the residue itself is ``-R``.
    """

    k_t: float
    r_t_derivative: float
    r_t_integral: float
    c: float

    @property
    def location(self) -> float:
        return -self.k_t**2

    @property
    def residue(self) -> float:
        return -self.r_t_derivative

    @property
    def residue_mismatch(self) -> float:
        return abs(self.r_t_integral / self.r_t_derivative - 1.0)


def naive_inverse_g_r(omega: float, p: ModelParams) -> complex:
    if not omega > 0.0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    return complex(omega * omega - p.omega_r**2, 2.0 / 3.0 * p.r0r * omega**3)


def naive_negative_axis(k: float, p: ModelParams) -> float:
    """1/G_r(-k^2) = -k^2 - omega_r^2 + (2/3) r0r k^3 in the naive limit."""
    if not k > 0.0:
        raise DomainError(f"k must be positive, got {k!r}")
    return -(k * k) - p.omega_r**2 + 2.0 / 3.0 * p.r0r * k**3


def naive_spectral_density(s: float, p: ModelParams) -> float:
    """rho(s) = (4 r0r / 3 pi) s^4 / ((s^2 - omega_r^2)^2 + (2/3 r0r)^2 s^6)."""
    r = p.r0r
    d = s * s - p.omega_r**2
    return 4.0 * r / (3.0 * math.pi) * s**4 / (d * d + (2.0 / 3.0 * r) ** 2 * s**6)


def k_t_asymptote(r0r: float, omega_r: float) -> float:
    return 1.5 / r0r + 2.0 / 3.0 * r0r * omega_r**2


def _rescaled_integrand(c: float):
    c2 = c * c

    def f(x: float) -> float:
        d = x * x - c2
        x2 = x * x
        return x2 * x2 / (d * d + x2 * x2 * x2)

    return f


def residue_from_sum_rule(c: float, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """R(c) = (2/pi) * integral_0^inf x^4 / ((x^2 - c^2)^2 + x^6) dx.

    For small c the integrand has a Lorentzian spike at x ~ c with half
    width ~ c^2 / 2 carrying weight pi/2; the domain is split around it,
    and [1, inf) goes through the tail map.
    """
    if c < 0.0 or not math.isfinite(c):
        raise DomainError(f"c must be finite and non-negative, got {c!r}")
    f = _rescaled_integrand(c)
    pts = [1.0]
    if c > 0.0:
        half = 0.5 * c * c
        pts += [c + k * half for k in (-100.0, -10.0, -1.0, 0.0, 1.0, 10.0, 100.0) if 0.0 < c + k * half]
        pts += [0.5 * c, 2.0 * c]
    pts = sorted({x for x in pts if x <= 1.0})
    q = integrate_to_infinity(f, 0.0, rel_tol, points=pts)
    return 2.0 / math.pi * q.value


def tachyon_pole_naive(p: ModelParams, rel_tol: float = DEFAULT_REL_TOL) -> TachyonReport:
    """Locate the naive-limit tachyon and compute its residue both ways."""
    r = p.r0r
    f = lambda k: naive_negative_axis(k, p)  # noqa: E731
    k_guess = k_t_asymptote(r, p.omega_r)
    # the cubic is negative below its positive root and positive above it
    lo, hi = 0.5 * k_guess, 2.0 * k_guess
    while f(hi) <= 0.0:
        hi *= 2.0
    k_t = find_root(f, lo, hi, tol=1e-15 * k_guess).root
    slope = -2.0 * k_t + 2.0 * r * k_t * k_t
    c = 2.0 / 3.0 * r * p.omega_r
    return TachyonReport(
        k_t=k_t,
        r_t_derivative=2.0 * k_t / slope,
        r_t_integral=residue_from_sum_rule(c, rel_tol),
        c=c,
    )


def finite_negative_axis(k: float, p: ModelParams) -> float:
    """1/G_r(-k^2) with the sharp cutoff; valid for any a > 0."""
    return -(k * k) - p.omega_r**2 + k**3 * (p.a / p.omega_h) * math.atan(p.omega_h / k)


def finite_tachyon_asymptotes(a: float, b: float) -> tuple[float, float]:
    """(k_t / omega_h, R) for a slightly above 1."""
    return math.sqrt((a / 3.0 + b * b) / (a - 1.0)), 1.0 / (a - 1.0)


def tachyon_pole_finite(a: float, b: float, omega_h: float = 1.0,
                        rel_tol: float = DEFAULT_REL_TOL) -> TachyonReport:
    """Tachyon of the sharp-cutoff propagator continued to a > 1.

    The sum-rule residue uses G_r ~ 1/((1 - a) omega^2) at large omega^2,
    so R = integral_0^omega_h rho + 1/(a - 1).  For a <= 1 there is no
    zero of 1/G_r(-k^2) and NoBracketError is raised.
    """
    if a <= 1.0:
        raise NoBracketError(f"1/G_r(-k^2) < 0 for all k when a={a!r} <= 1: no tachyon")
    p = extended_params(a, b, omega_h)
    f = lambda k: finite_negative_axis(k, p)  # noqa: E731
    scale, _ = finite_tachyon_asymptotes(a, b)
    lo, hi = 1e-3 * omega_h, 10.0 * scale * omega_h
    while f(hi) <= 0.0:
        hi *= 2.0
    k_t = find_root(f, lo, hi, tol=1e-15 * hi).root
    x = omega_h / k_t
    slope = -2.0 * k_t + (a / omega_h) * (3.0 * k_t**2 * math.atan(x) - k_t**3 * omega_h / (k_t**2 + omega_h**2))
    continuum = integrate_spectrum(p, rel_tol=rel_tol).value
    return TachyonReport(
        k_t=k_t,
        r_t_derivative=2.0 * k_t / slope,
        r_t_integral=continuum + 1.0 / (a - 1.0),
        c=2.0 / 3.0 * p.r0r * p.omega_r,
    )


def tachyon_residue_curve(c_values, rel_tol: float = DEFAULT_REL_TOL) -> list[tuple[float, float]]:
    """(c, R) pairs; R is the residue magnitude, i.e. ``pi r_t``."""
    out = []
    for c in c_values:
        c = float(c)
        if not 0.0 < c <= 1.0:
            raise DomainError(f"c must lie in (0, 1], got {c!r}")
        out.append((c, residue_from_sum_rule(c, rel_tol)))
    return out


def params_for_c(c: float, b: float = 0.01) -> ModelParams:
    """Parameter set with (2/3) r0r omega_r = c at omega_h = 1 (may have a > 1)."""
    r = 1.5 * c / b
    return extended_params(4.0 * r / (3.0 * math.pi), b)

