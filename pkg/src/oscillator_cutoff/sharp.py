"""Renormalized propagator with a sharp frequency cutoff.

For 0 < omega < omega_h the inverse propagator on the physical side of the
cut is

    1/G_r = omega^2 - omega_r^2 + (a/2)(omega^3/omega_h)(ln((omega_h - omega)/(omega_h + omega)) + i pi)

and above the cutoff it is real,

    1/G_r = omega^2 - omega_r^2 - (a/2)(omega^3/omega_h) ln((omega + omega_h)/(omega - omega_h)).

Both artifacts of the sharp edge, the spectral peak just below omega_h and
the bound-state pole just above it, sit at a relative distance of roughly
2 exp(-2/a) from the edge.  Near the edge everything here is therefore
parameterized by the offset eta = |1 - omega/omega_h|, or by its logarithm,
so that offsets far below double-precision resolution of omega stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, NoRootError
from .model import COUPLING, ModelParams, resonance_info
from .numerics import DEFAULT_REL_TOL, QuadratureResult, find_root, integrate

#: Above this value of a the near-edge artifact is no longer a separate peak.
ARTIFACT_MERGE_A = 8.0 / math.pi**2

_LOG_TINY = -700.0  # exp() of this is still a normal double


class PoleKind(Enum):
    BOUND_STATE = "bound_state"
    TACHYON = "tachyon"


@dataclass(frozen=True)
class PoleInfo:
    """A real pole of G_r.

    ``location`` is omega_b for a bound state and the omega^2 value
    ``-k_t^2`` for a tachyon.  ``residue`` is taken in the omega^2
    variable, G_r ~ residue / (omega^2 - pole).  ``log_offset`` is
    ln(omega_b/omega_h - 1) for bound states, kept because the offset
    underflows for small a.
    """

    location: float
    residue: float
    kind: PoleKind
    log_offset: float | None = None

    @property
    def offset(self) -> float:
        return math.exp(self.log_offset) if self.log_offset is not None else float("nan")


@dataclass(frozen=True)
class SpectralSample:
    s: float
    rho: float


@dataclass(frozen=True)
class SumRuleReport:
    """Continuum integral plus discrete pole weight against an analytic target."""

    integral: float
    integral_error: float
    pole_weight: float
    target: float
    normalization: float
    evaluations: int = 0

    @property
    def total(self) -> float:
        return self.integral + self.pole_weight

    @property
    def deviation(self) -> float:
        """Relative deviation of the measured total from the target."""
        return self.total / self.target - 1.0

    @property
    def probability(self) -> float:
        """Total weight rescaled by ``normalization``; should be 1."""
        return self.normalization * self.total

    def as_dict(self) -> dict:
        return {
            "integral": self.integral,
            "integral_error": self.integral_error,
            "pole_weight": self.pole_weight,
            "total": self.total,
            "target": self.target,
            "deviation": self.deviation,
            "probability": self.probability,
            "evaluations": self.evaluations,
        }


# -- inverse propagator ------------------------------------------------------


def _edge_log_below(eta: float) -> float:
    """ln((omega_h - omega)/(omega_h + omega)) at omega = omega_h (1 - eta)."""
    return math.log(eta / (2.0 - eta))


def inverse_g_r(omega: float, p: ModelParams) -> complex:
    """1/G_r(omega^2 + i eps) for omega > 0, omega != omega_h."""
    if not omega > 0.0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    wh = p.omega_h
    x = omega / wh
    if x < 1.0:
        # ln((1-x)/(1+x)) = -2 artanh(x), accurate for small x as well
        log_term = -2.0 * math.atanh(x)
        cubic = 0.5 * p.a * omega**3 / wh
        return complex(omega**2 - p.omega_r**2 + cubic * log_term, cubic * math.pi)
    if x > 1.0:
        log_term = 2.0 * math.atanh(1.0 / x)
        return complex(omega**2 - p.omega_r**2 - 0.5 * p.a * omega**3 / wh * log_term, 0.0)
    raise DomainError("1/G_r diverges logarithmically at omega = omega_h")


def inverse_g_r_below_edge(eta: float, p: ModelParams) -> complex:
    """1/G_r at omega = omega_h (1 - eta), 0 < eta <= 1."""
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"eta must lie in (0, 1], got {eta!r}")
    wh = p.omega_h
    x = 1.0 - eta
    cubic = 0.5 * p.a * wh**2 * x**3
    return complex(wh**2 * x * x - p.omega_r**2 + cubic * _edge_log_below(eta), cubic * math.pi)


def _above_edge_log(t: float, p: ModelParams) -> float:
    """(1/G_r)/omega_h^2 at omega = omega_h (1 + e^t), as a function of t."""
    eta = math.exp(t)
    log_term = math.log(2.0 + eta) - t  # ln((omega + omega_h)/(omega - omega_h))
    return (1.0 + eta) ** 2 - p.b**2 - 0.5 * p.a * (1.0 + eta) ** 3 * log_term


def _below_edge_log_real(t: float, p: ModelParams) -> float:
    """Re(1/G_r)/omega_h^2 at omega = omega_h (1 - e^t), t < 0."""
    eta = math.exp(t)
    log_term = t - math.log(2.0 - eta)
    return (1.0 - eta) ** 2 - p.b**2 + 0.5 * p.a * (1.0 - eta) ** 3 * log_term


def g_r(omega: float, p: ModelParams) -> complex:
    """G_r(omega^2 + i eps); zero at omega = omega_h."""
    if omega == p.omega_h:
        return 0j
    return 1.0 / inverse_g_r(omega, p)


def inverse_g_r_negative_axis(k: float, p: ModelParams) -> float:
    """1/G_r(-k^2) = -k^2 - omega_r^2 + k^3 (4 r0r / 3 pi) arctan(omega_h / k)."""
    if not k > 0.0:
        raise DomainError(f"k must be positive, got {k!r}")
    return -(k * k) - p.omega_r**2 + k**3 * (p.a / p.omega_h) * math.atan(p.omega_h / k)


# -- spectral density --------------------------------------------------------


def spectral_density(s: float, p: ModelParams) -> float:
    """rho(s) = (2 s / pi)(-Im G_r(s^2 + i eps)) for 0 < s < omega_h, closed form."""
    if not 0.0 < s < p.omega_h:
        raise DomainError(f"s must lie in (0, omega_h), got {s!r}")
    wh = p.omega_h
    real = s * s - p.omega_r**2 - p.a * s**3 / wh * math.atanh(s / wh)
    imag = 0.5 * math.pi * p.a * s**3 / wh
    return p.a * s**4 / wh / (real * real + imag * imag)


def spectral_density_below_edge(eta: float, p: ModelParams) -> float:
    """rho at s = omega_h (1 - eta)."""
    inv = inverse_g_r_below_edge(eta, p)
    s = p.omega_h * (1.0 - eta)
    return p.a * s**4 / p.omega_h / (inv.real**2 + inv.imag**2)


def spectral_density_approx(s: float, p: ModelParams) -> float:
    """Small-s approximation of rho, valid up to O((s/omega_h)^2) corrections."""
    r = p.r0r
    x = s / p.omega_h
    d = s * s - p.omega_r**2
    denom = d * d + x * x * (-2.0 * p.a * s * s * d + (0.5 * math.pi * p.a) ** 2 * s**4)
    return COUPLING * r * s**4 / denom


def spectral_samples(grid, p: ModelParams) -> list[SpectralSample]:
    return [SpectralSample(float(s), spectral_density(float(s), p)) for s in grid]


# -- artifacts near the edge -------------------------------------------------


def _first_sign_change(f: Callable[[float], float], lo: float, hi: float, n: int = 400):
    """First sub-interval of a uniform scan of [lo, hi] where f changes sign."""
    xs = np.linspace(lo, hi, n)
    prev = f(xs[0])
    for left, right in zip(xs[:-1], xs[1:]):
        cur = f(right)
        if prev == 0.0:
            return left, left
        if (prev < 0.0) != (cur < 0.0):
            return left, right
        prev = cur
    return None


def _log_edge_lower(p: ModelParams) -> float:
    # no clamp: the edge formulas stay finite in t even where e^t underflows
    return -2.0 / p.a + math.log(2.0) - 30.0


def second_peak_log_offset(p: ModelParams) -> float:
    """ln(1 - omega_peak/omega_h) for the artifact peak just below the cutoff."""
    if p.a >= ARTIFACT_MERGE_A:
        raise NoRootError(
            f"a={p.a!r} >= 8/pi^2: the edge artifact is not separated from the plateau"
        )
    f = lambda t: _below_edge_log_real(t, p)  # noqa: E731
    lo, hi = _log_edge_lower(p), math.log(0.5)
    bracket = _first_sign_change(f, lo, hi)
    if bracket is None:
        raise NoRootError(f"Re(1/G_r) has no zero in (omega_h/2, omega_h) for a={p.a!r}")
    if bracket[0] == bracket[1]:
        return bracket[0]
    return find_root(f, *bracket, tol=1e-14).root


def second_peak(p: ModelParams) -> float:
    """Frequency of the artifact peak just below omega_h."""
    return p.omega_h * (1.0 - math.exp(second_peak_log_offset(p)))


def resonance_zero(p: ModelParams) -> float:
    """Zero of Re(1/G_r) nearest the nominal resonance omega_r."""
    wh = p.omega_h

    def f(w):
        return inverse_g_r(w, p).real

    hi = min(2.0 * p.omega_r, wh * (1.0 - 1e-12))
    return find_root(f, 0.5 * p.omega_r, hi, tol=1e-15 * wh).root


def bound_state_pole(p: ModelParams) -> PoleInfo:
    """Pole omega_b > omega_h of G_r and its residue in the omega^2 variable."""
    f = lambda t: _above_edge_log(t, p)  # noqa: E731
    lo = -2.0 / p.a + math.log(2.0) - 10.0
    hi = math.log(2.0 * max(1.0, 1.0 / p.b))
    while f(hi) <= 0.0:
        hi += 5.0
        if hi > 700.0:
            raise NoRootError(f"no bound-state pole found for a={p.a!r}")
    t = find_root(f, lo, hi, tol=1e-14).root
    wh = p.omega_h
    eta = math.exp(t)
    omega_b = wh * (1.0 + eta)
    log_term = math.log(2.0 + eta) - t
    # d(1/G_r)/d omega; the last term dominates near the edge
    slope = 2.0 * omega_b - 1.5 * p.a * omega_b**2 / wh * log_term
    edge = eta * (2.0 + eta)
    slope += p.a * omega_b**3 / (wh * wh * edge) if edge > 0.0 else math.inf
    residue = 2.0 * omega_b / slope
    return PoleInfo(omega_b, residue, PoleKind.BOUND_STATE, log_offset=t)


# -- spectral integrals ------------------------------------------------------


def resonance_break_points(p: ModelParams, hi: float) -> list[float]:
    """omega_r plus geometric multiples of Gamma on both sides, inside (0, hi).

    The steps reach out to the plateau so that quadrature never has to
    discover the Lorentzian tails on its own.
    """
    res = resonance_info(p)
    steps = [1.0, 5.0] + [25.0 * 10.0**j for j in range(12)]
    offsets = [0.0] + [sign * k for k in steps for sign in (-1.0, 1.0)]
    pts = (res.omega_peak + k * res.gamma for k in offsets)
    return sorted(x for x in pts if 0.0 < x < hi)


def integrate_spectrum(
    p: ModelParams,
    weight: Callable[[float], float] | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    density: Callable[[float], float] | None = None,
    density_below_edge: Callable[[float], float] | None = None,
) -> QuadratureResult:
    """Integral of rho(s) * weight(s) over (0, omega_h).

    The resonance is resolved by break points at omega_r +- multiples of
    its width, spaced geometrically away from it.  The last stretch (omega_h/2, omega_h) is integrated in
    t = ln(1 - s/omega_h), which spreads the exponentially thin edge peak
    over an O(1) range of t.

    ``density`` and ``density_below_edge`` (a function of eta) replace rho
    when another spectral quantity, e.g. the cross section, is integrated.
    """
    wh = p.omega_h
    w = weight or (lambda s: 1.0)
    if density is None:
        density = lambda s: spectral_density(s, p)  # noqa: E731
        density_below_edge = lambda eta: spectral_density_below_edge(eta, p)  # noqa: E731
    elif density_below_edge is None:
        density_below_edge = lambda eta: density(wh * (1.0 - eta))  # noqa: E731
    split = 0.5 * wh
    # below the split, plain s-quadrature with resonance break points
    pts_s = []
    pts_t = []
    for s in resonance_break_points(p, wh):
        if 0.0 < s < split:
            pts_s.append(s)
        elif split <= s < wh:
            pts_t.append(math.log(1.0 - s / wh))

    def body(s: float) -> float:
        return density(s) * w(s)

    result = integrate(body, 0.0, split, rel_tol, points=pts_s, limit=200)

    t_hi = math.log(0.5)
    t_lo = -2.0 / p.a + math.log(2.0) - 60.0
    if p.a < ARTIFACT_MERGE_A:
        try:
            t_peak = second_peak_log_offset(p)
        except NoRootError:
            pass
        else:
            pts_t += [t_peak - 3.0, t_peak, t_peak + 3.0]
            t_lo = min(t_lo, t_peak - 60.0)
    t_lo = max(t_lo, _LOG_TINY)

    def edge(t: float) -> float:
        eta = math.exp(t)
        return density_below_edge(eta) * w(wh * (1.0 - eta)) * wh * eta

    scale = abs(result.value) if result.value else 1.0
    result = result + integrate(
        edge, t_lo, t_hi, rel_tol,
        abs_tol=rel_tol * scale,
        points=[t for t in pts_t if t_lo < t < t_hi], limit=200,
    )
    return result


def spectral_sum_rule(p: ModelParams, rel_tol: float = DEFAULT_REL_TOL) -> SumRuleReport:
    """Check that the continuum weight plus r_b equals 1/(1 - a)."""
    q = integrate_spectrum(p, rel_tol=rel_tol)
    pole = bound_state_pole(p)
    return SumRuleReport(
        integral=q.value,
        integral_error=q.error_estimate,
        pole_weight=pole.residue,
        target=1.0 / (1.0 - p.a),
        normalization=1.0 - p.a,
        evaluations=q.evaluations,
    )


def g_r_negative_axis(k: float, p: ModelParams) -> float:
    """G_r(-k^2) from the closed arctan form."""
    return 1.0 / inverse_g_r_negative_axis(k, p)


def g_r_negative_axis_spectral(k: float, p: ModelParams, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """G_r(-k^2) rebuilt from rho and the bound-state pole."""
    kk = k * k
    q = integrate_spectrum(p, lambda s: 1.0 / (-kk - s * s), rel_tol)
    pole = bound_state_pole(p)
    return q.value + pole.residue / (-kk - pole.location**2)


def spectral_density_from_propagator(s: float, p: ModelParams) -> float:
    """rho(s) via (2 s / pi)(-Im G_r); an independent route to the closed form."""
    g = 1.0 / inverse_g_r(s, p)
    return 2.0 * s / math.pi * (-g.imag)

