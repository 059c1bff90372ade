"""Smooth cutoff functions K(omega) and the propagator they define.

With K in place of the sharp edge the renormalized inverse propagator is

    1/G_r(omega^2 + i eps) = b_omega + i (2/3) r0r omega^3 K(omega),
    b_omega = omega^2 - omega_r^2
              - omega^4 (4/3 pi) r0r PV integral_0^inf K(w) / (omega^2 - w^2) dw.

Each family below is exactly 1 on [0, flat_end] (TanhStep to within
1e-13), so the principal value splits into a closed-form logarithm over
the flat part plus a numerical tail.

Cutoff strings, as accepted on the command line::

    sharp:OMEGA_H
    exptail:FLAT_END,WIDTH      K = exp(-(w - FLAT_END) / WIDTH) beyond FLAT_END
    gausstail:FLAT_END,WIDTH    K = exp(-((w - FLAT_END) / WIDTH)^2) beyond FLAT_END
    tanhstep:CENTER,WIDTH       K = (1 - tanh((w - CENTER) / WIDTH)) / 2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .model import COUPLING, ModelParams
from .numerics import DEFAULT_REL_TOL, QuadratureResult, find_root, integrate, principal_value
from . import sharp

FAMILIES = ("sharp", "exptail", "gausstail", "tanhstep")

# TanhStep: 1 - K(center - 15 width) = 1/(1 + e^30) ~ 9e-14
_TANH_FLAT_WIDTHS = 15.0
# K below exp(-70) ~ 4e-31 is treated as zero
_TAIL_EXPONENT = 70.0
_PV_REL_TOL = 1e-12


@dataclass(frozen=True)
class CutoffFunction:
    """A named cutoff shape.  ``scale`` is omega_h for ``sharp``, the flat-region
    end for the tail families and the midpoint for ``tanhstep``."""

    family: str
    scale: float
    width: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown cutoff family {self.family!r}; choose from {FAMILIES}")
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError(f"cutoff scale must be positive, got {self.scale!r}")
        if self.family != "sharp" and not (math.isfinite(self.width) and self.width > 0.0):
            raise DomainError(f"{self.family} needs a positive width, got {self.width!r}")
        if self.family == "tanhstep" and self.flat_end <= 0.0:
            raise DomainError("tanhstep needs center > 15 * width to have a flat region")

    @classmethod
    def parse(cls, text: str) -> "CutoffFunction":
        """Parse ``family:param1[,param2]``."""
        family, sep, rest = text.strip().partition(":")
        family = family.lower()
        if not sep or not rest:
            raise DomainError(f"cutoff spec {text!r} is not of the form family:p1[,p2]")
        try:
            params = [float(x) for x in rest.split(",")]
        except ValueError as exc:
            raise DomainError(f"bad number in cutoff spec {text!r}") from exc
        expected = 1 if family == "sharp" else 2
        if len(params) != expected:
            raise DomainError(f"{family} takes {expected} parameter(s), got {len(params)}")
        return cls(family, *params)

    def __str__(self) -> str:
        if self.family == "sharp":
            return f"sharp:{self.scale!r}"
        return f"{self.family}:{self.scale!r},{self.width!r}"

    def __call__(self, omega: float) -> float:
        return self.value(omega)

    def value(self, omega: float) -> float:
        if omega < 0.0:
            raise DomainError(f"omega must be non-negative, got {omega!r}")
        f = self.family
        if f == "sharp":
            return 1.0 if omega <= self.scale else 0.0
        if f == "tanhstep":
            # (1 - tanh(u)) / 2 = 1 / (1 + exp(2u)), written to avoid overflow
            u = 2.0 * (omega - self.scale) / self.width
            if u > 0.0:
                e = math.exp(-u)
                return e / (1.0 + e)
            return 1.0 / (1.0 + math.exp(u))
        if omega <= self.scale:
            return 1.0
        u = (omega - self.scale) / self.width
        if f == "exptail":
            return math.exp(-u)
        return math.exp(-u * u)

    @property
    def flat_end(self) -> float:
        """Largest omega'_h with K = 1 on [0, omega'_h]."""
        if self.family == "tanhstep":
            return self.scale - _TANH_FLAT_WIDTHS * self.width
        return self.scale

    @property
    def support_end(self) -> float:
        """Beyond this point K < 1e-30."""
        f = self.family
        if f == "sharp":
            return self.scale
        if f == "exptail":
            return self.scale + _TAIL_EXPONENT * self.width
        if f == "gausstail":
            return self.scale + math.sqrt(_TAIL_EXPONENT) * self.width
        return self.scale + 0.5 * _TAIL_EXPONENT * self.width

    @property
    def break_points(self) -> list[float]:
        """Points where K or its low derivatives are non-smooth or change fast."""
        if self.family == "sharp":
            return [self.scale]
        if self.family == "tanhstep":
            return [self.scale + k * self.width for k in (-5.0, -2.0, 0.0, 2.0, 5.0)]
        return [self.scale + k * self.width for k in (0.0, 1.0, 3.0)]

    def integral(self) -> float:
        """integral_0^inf K, in closed form."""
        f = self.family
        if f == "sharp":
            return self.scale
        if f == "exptail":
            return self.scale + self.width
        if f == "gausstail":
            return self.scale + 0.5 * math.sqrt(math.pi) * self.width
        # (w/2) ln(1 + exp(2 c / w))
        return 0.5 * self.width * float(np.logaddexp(0.0, 2.0 * self.scale / self.width))

    def scaled(self, factor: float) -> "CutoffFunction":
        """Same shape stretched along the frequency axis."""
        return replace(self, scale=self.scale * factor, width=self.width * factor)


@dataclass(frozen=True)
class SmoothScheme:
    k: CutoffFunction
    r0r: float
    delta_z: float
    a_k: float
    omega_h_eff: float


def k_value(k: CutoffFunction, omega: float) -> float:
    return k.value(omega)


def effective_omega_h(k: CutoffFunction | SmoothScheme, omega_prime_h: float | None = None,
                      rel_tol: float = 1e-13) -> float:
    """Sharp-cutoff frequency equivalent to K at low frequency.

    1/omega_h = 1/omega'_h - integral_{omega'_h}^inf K(w) / w^2 dw for any
    omega'_h inside the flat region of K.
    """
    if isinstance(k, SmoothScheme):
        k = k.k
    flat = k.flat_end
    if omega_prime_h is None:
        omega_prime_h = flat
    if not 0.0 < omega_prime_h <= flat * (1.0 + 1e-15):
        raise DomainError(
            f"omega'_h={omega_prime_h!r} lies outside the flat region (0, {flat!r}] of {k}"
        )
    end = k.support_end
    if end <= omega_prime_h:
        return omega_prime_h
    pts = [x for x in [flat] + k.break_points if omega_prime_h < x < end]
    tail = integrate(lambda w: k.value(w) / (w * w), omega_prime_h, end, rel_tol, points=pts, limit=200)
    return 1.0 / (1.0 / omega_prime_h - tail.value)


def build_scheme(k: CutoffFunction, r0r: float) -> SmoothScheme:
    """Renormalization data induced by K for a given renormalized r0r."""
    if not r0r > 0.0:
        raise DomainError(f"r0r must be positive, got {r0r!r}")
    a_k = COUPLING * r0r * k.integral()
    if not a_k < 1.0:
        raise DomainError(f"a_K = {a_k!r} >= 1: no bare theory has this r0r and cutoff")
    return SmoothScheme(k, r0r, a_k / (1.0 - a_k), a_k, effective_omega_h(k))


def normalized_cutoff(family: str, width: float, omega_h: float = 1.0) -> CutoffFunction:
    """Cutoff of the given family and width whose effective omega_h is ``omega_h``.

    Stretching K by a factor stretches its effective omega_h by the same
    factor, so the shape is fixed by width/scale and the scale is found by
    a one-dimensional root search.
    """
    if family == "sharp":
        return CutoffFunction("sharp", omega_h)

    def mismatch(scale):
        return effective_omega_h(CutoffFunction(family, scale, width)) - omega_h

    lo = width * (_TANH_FLAT_WIDTHS + 1.0) if family == "tanhstep" else 1e-3 * omega_h
    lo = max(lo, 1e-3 * omega_h)
    hi = omega_h * 1.5 + 100.0 * width
    scale = find_root(mismatch, lo, hi, tol=1e-14 * omega_h).root
    return CutoffFunction(family, scale, width)


def scheme_for(p: ModelParams, k: CutoffFunction) -> SmoothScheme:
    return build_scheme(k, p.r0r)


# -- propagator --------------------------------------------------------------


def pv_kernel(omega: float, k: CutoffFunction, rel_tol: float = _PV_REL_TOL) -> float:
    """PV integral_0^inf K(w) / (omega^2 - w^2) dw."""
    if not omega > 0.0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    flat = k.flat_end
    if k.family == "sharp":
        if omega == flat:
            raise DomainError("principal value diverges at the sharp edge")
        return math.log(abs((flat + omega) / (flat - omega))) / (2.0 * omega)
    end = k.support_end
    if omega < 0.9 * flat:
        head = math.log((flat + omega) / (flat - omega)) / (2.0 * omega)
        pts = [x for x in k.break_points if flat < x < end]
        tail = integrate(lambda w: k.value(w) / (omega * omega - w * w), flat, end, rel_tol,
                         abs_tol=1e-300, points=pts, limit=200)
        return head + tail.value
    split = 0.8 * flat
    head = math.log((omega + split) / (omega - split)) / (2.0 * omega)
    hi = max(end, 2.0 * omega)
    pts = [x for x in [flat] + k.break_points if split < x < hi]
    # K / (omega^2 - w^2) = g(w) / (w - omega) with g = -K / (w + omega)
    tail = principal_value(lambda w: -k.value(w) / (w + omega), omega, split, hi, rel_tol,
                           abs_tol=1e-300, points=pts)
    return head + tail.value


def b_omega(omega: float, p: ModelParams, s: SmoothScheme) -> float:
    """Real part of 1/G_r(omega^2 + i eps) for the smooth scheme."""
    return omega * omega - p.omega_r**2 - omega**4 * COUPLING * s.r0r * pv_kernel(omega, s.k)


def inverse_g_r_smooth(omega: float, p: ModelParams, s: SmoothScheme) -> complex:
    imag = 2.0 / 3.0 * s.r0r * omega**3 * s.k.value(omega)
    return complex(b_omega(omega, p, s), imag)


def spectral_density_smooth(sv: float, p: ModelParams, s: SmoothScheme) -> float:
    """rho(s) = (4/3 pi) r0r s^4 K(s) / (b_s^2 + ((2/3) r0r s^3 K(s))^2)."""
    if not sv > 0.0:
        raise DomainError(f"s must be positive, got {sv!r}")
    kv = s.k.value(sv)
    if kv == 0.0:
        return 0.0
    if s.k.family == "sharp":
        if sv >= s.k.scale:
            return 0.0
        return sharp.spectral_density(sv, replace_omega_h(p, s))
    b = b_omega(sv, p, s)
    imag = 2.0 / 3.0 * s.r0r * sv**3 * kv
    return COUPLING * s.r0r * sv**4 * kv / (b * b + imag * imag)


def replace_omega_h(p: ModelParams, s: SmoothScheme) -> ModelParams:
    """Sharp parameter set matching a sharp-family scheme (same r0r, omega_r)."""
    wh = s.k.scale
    return ModelParams(COUPLING * s.r0r * wh, p.omega_r / wh, wh)


def negative_axis_smooth(k: float, p: ModelParams, s: SmoothScheme, rel_tol: float = 1e-12) -> float:
    """1/G_r(-k^2) = -k^2 (1 - (4/3 pi) r0r int K k^2/(k^2 + w^2)) - omega_r^2."""
    kk = k * k
    cut = s.k
    end = cut.support_end
    pts = [x for x in [cut.flat_end] + cut.break_points if 0.0 < x < end]
    # for small k the integrand is a Lorentzian of width k at the origin
    pts += [k * 10.0**j for j in range(0, 16, 2) if k * 10.0**j < end]
    q = integrate(lambda w: cut.value(w) * kk / (kk + w * w), 0.0, end, rel_tol, points=pts, limit=200)
    return -kk * (1.0 - COUPLING * s.r0r * q.value) - p.omega_r**2


# -- sum rule ----------------------------------------------------------------


# Peaks wider than this fraction of their frequency are resolved by break
# points.  Narrower ones lose digits to roundoff in b_omega near its zero
# (about 1e-16 / (b' gamma) relative), so a symmetric window of half-width
# max(_WINDOW_REL * omega, 3 gamma) is cut out of the quadrature and replaced
# by its Lorentzian weight.  Odd corrections cancel across the window; the
# even ones are O(gamma delta / w^2) with w the scale on which K varies.
_RESOLVED_REL_WIDTH = 1e-6
_WINDOW_REL = 2e-6


@dataclass(frozen=True)
class EdgePeak:
    """Zero of b_omega above the resonance, where rho has a narrow peak.

    ``weight`` = 2 omega / b'(omega) is the integral of rho across the peak
    in the zero-width limit (the residue of G_r in omega^2), and
    ``half_width`` = Im(1/G_r) / b'(omega).  Once K has decayed the peak is
    a bound state in all but name.
    """

    location: float
    weight: float
    half_width: float

    @property
    def resolvable(self) -> bool:
        return self.half_width > _RESOLVED_REL_WIDTH * self.location

    @property
    def window(self) -> float:
        return max(_WINDOW_REL * self.location, 3.0 * self.half_width)

    def window_weight(self) -> float:
        """Weight of rho inside the excised window."""
        return self.weight * 2.0 / math.pi * math.atan2(self.window, self.half_width)


def _b_slope(w: float, p: ModelParams, s: SmoothScheme) -> float:
    h = 1e-4 * w
    f = [b_omega(w + j * h, p, s) for j in (-2.0, -1.0, 1.0, 2.0)]
    return (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)


def edge_peaks(p: ModelParams, s: SmoothScheme, n: int = 120) -> list[EdgePeak]:
    """All zeros of b_omega between 0.8 flat_end and the point past which b > 0."""
    cut = s.k
    lo, end = 0.8 * cut.flat_end, cut.support_end
    far = 2.0 * end
    while b_omega(far, p, s) <= 0.0:
        far *= 2.0
    xs = np.concatenate([np.linspace(lo, end, n), np.geomspace(end, far, n // 2)[1:]])
    vals = [b_omega(float(x), p, s) for x in xs]
    peaks = []
    for (x0, v0), (x1, v1) in zip(zip(xs, vals), zip(xs[1:], vals[1:])):
        if (v0 < 0.0) != (v1 < 0.0):
            w = find_root(lambda x: b_omega(x, p, s), float(x0), float(x1), tol=1e-14 * float(x1)).root
            slope = _b_slope(w, p, s)
            imag = 2.0 / 3.0 * s.r0r * w**3 * cut.value(w)
            peaks.append(EdgePeak(w, 2.0 * w / slope, abs(imag / slope)))
    return peaks


def integrate_spectrum_smooth(p: ModelParams, s: SmoothScheme, rel_tol: float = DEFAULT_REL_TOL,
                              density=None, peaks: list[EdgePeak] | None = None) -> QuadratureResult:
    """Integral over (0, inf) of ``density(omega)`` (default rho).

    Windows around unresolvable peaks (see :class:`EdgePeak`) are left out;
    :func:`unresolved_peak_weight` supplies what they hold.
    """
    if density is None:
        def density(w):
            return spectral_density_smooth(w, p, s)
    cut = s.k
    flat = cut.flat_end
    end = cut.support_end
    pts = sharp.resonance_break_points(p, end)
    pts += [x for x in [flat] + cut.break_points if 0.0 < x < end]
    pts += [0.9 * flat, 0.5 * flat]
    if peaks is None:
        peaks = edge_peaks(p, s)
    windows = []
    for pk in peaks:
        if pk.resolvable:
            offsets = [0.0] + [sign * 3.0 * 10.0**j for j in range(8) for sign in (-1.0, 1.0)]
            pts += [pk.location + j * pk.half_width for j in offsets]
        elif pk.location < end:
            windows.append((pk.location - pk.window, pk.location + pk.window))
            pts += [pk.location + sign * pk.window * 10.0**j for j in range(5) for sign in (-1.0, 1.0)]
    pts = sorted({x for x in pts if 0.0 < x < end and not any(lo < x < hi for lo, hi in windows)})
    edges = [0.0] + pts + [end]
    total = QuadratureResult(0.0, 0.0, 0)
    for left, right in zip(edges[:-1], edges[1:]):
        if any(lo <= left and right <= hi for lo, hi in windows):
            continue
        total = total + integrate(density, left, right, rel_tol, limit=200)
    return total


def unresolved_peak_weight(peaks: list[EdgePeak], end: float = math.inf) -> float:
    """Weight of rho in the peaks that quadrature leaves out.

    Peaks past ``end`` (where quadrature stops) count in full.
    """
    total = 0.0
    for pk in peaks:
        if not pk.resolvable:
            total += pk.window_weight() if pk.location < end else pk.weight
    return total


def spectral_sum_rule_smooth(p: ModelParams, s: SmoothScheme, rel_tol: float = DEFAULT_REL_TOL):
    """integral_0^inf rho = 1/(1 - a_K), narrow edge peaks counted by weight."""
    peaks = edge_peaks(p, s)
    q = integrate_spectrum_smooth(p, s, rel_tol, peaks=peaks)
    return sharp.SumRuleReport(
        integral=q.value,
        integral_error=q.error_estimate,
        pole_weight=unresolved_peak_weight(peaks, s.k.support_end),
        target=1.0 / (1.0 - s.a_k),
        normalization=1.0 - s.a_k,
        evaluations=q.evaluations,
    )
