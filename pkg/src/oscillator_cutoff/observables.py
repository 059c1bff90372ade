"""Photon scattering cross section and its cutoff-scheme dependence.

    sigma(omega) = (8 pi / 3) r0r^2 omega^4 |G_r(omega^2 + i eps)|^2 = 2 pi^2 r0r rho(omega)

The two forms agree identically wherever Im(1/G_r) = (2/3) r0r omega^3 K.
For a smooth cutoff the first form carries the factor K(omega), which is 1
below the cutoff region.

A scheme argument is one of ``None`` or ``"sharp"`` (sharp cutoff at
``p.omega_h``), ``"naive"`` (the omega_h -> infinity limit), a
:class:`~oscillator_cutoff.smooth.CutoffFunction`, or a prebuilt
:class:`~oscillator_cutoff.smooth.SmoothScheme`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from . import continuum, sharp, smooth
from .errors import DomainError, OscillatorError
from .model import ModelParams
from .numerics import DEFAULT_REL_TOL
from .sharp import SumRuleReport
from .smooth import CutoffFunction, SmoothScheme

Scheme = Union[None, str, CutoffFunction, SmoothScheme]

_IDENTITY_TOL = 1e-10


@dataclass(frozen=True)
class CrossSectionSample:
    """sigma in canonical units (1/omega_h^2) and relative to sigma_T."""

    omega: float
    sigma: float
    sigma_over_thomson: float


def resolve_scheme(scheme: Scheme, p: ModelParams):
    """Normalize a scheme argument to "sharp", "naive" or a SmoothScheme."""
    if scheme is None:
        return "sharp"
    if isinstance(scheme, str):
        key = scheme.strip().lower()
        if key in ("sharp", "naive"):
            return key
        scheme = CutoffFunction.parse(scheme)
    if isinstance(scheme, CutoffFunction):
        if scheme.family == "sharp" and scheme.scale == p.omega_h:
            return "sharp"
        return smooth.build_scheme(scheme, p.r0r)
    if isinstance(scheme, SmoothScheme):
        return scheme
    raise DomainError(f"unrecognized cutoff scheme {scheme!r}")


def scheme_label(scheme: Scheme, p: ModelParams) -> str:
    s = resolve_scheme(scheme, p)
    return s if isinstance(s, str) else str(s.k)


def _sample(omega: float, sigma: float, p: ModelParams) -> CrossSectionSample:
    return CrossSectionSample(omega, sigma, sigma / p.sigma_thomson)


def _check_identity(first: float, second: float, omega: float) -> None:
    if abs(first - second) > _IDENTITY_TOL * max(abs(first), abs(second), 1e-300):
        raise OscillatorError(
            f"cross-section forms disagree at omega={omega!r}: {first!r} vs {second!r}"
        )


def cross_section(omega: float, p: ModelParams, scheme: Scheme = None) -> CrossSectionSample:
    """Photon cross section at frequency ``omega``, computed in both forms."""
    if not omega > 0.0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    s = resolve_scheme(scheme, p)
    r = p.r0r
    pref = 8.0 * math.pi / 3.0 * r * r * omega**4
    if s == "sharp":
        if omega > p.omega_h:
            raise DomainError("the sharp-cutoff cross section is defined only for omega <= omega_h")
        if omega == p.omega_h:
            return _sample(omega, 0.0, p)
        inv = sharp.inverse_g_r(omega, p)
        first = pref / (inv.real**2 + inv.imag**2)
        second = 2.0 * math.pi**2 * r * sharp.spectral_density(omega, p)
    elif s == "naive":
        inv = continuum.naive_inverse_g_r(omega, p)
        first = pref / (inv.real**2 + inv.imag**2)
        second = 2.0 * math.pi**2 * r * continuum.naive_spectral_density(omega, p)
    else:
        if s.k.family == "sharp":
            return cross_section(omega, smooth.replace_omega_h(p, s), None) if omega <= s.k.scale \
                else _sample(omega, 0.0, p)
        kv = s.k.value(omega)
        if kv == 0.0:
            return _sample(omega, 0.0, p)
        b = smooth.b_omega(omega, p, s)
        imag = 2.0 / 3.0 * s.r0r * omega**3 * kv
        mod2 = b * b + imag * imag
        first = pref * kv / mod2
        rho = smooth.COUPLING * s.r0r * omega**4 * kv / mod2
        second = 2.0 * math.pi**2 * r * rho
    _check_identity(first, second, omega)
    return _sample(omega, first, p)


def sigma_identity_forms(omega: float, p: ModelParams) -> tuple[float, float, float]:
    """Sharp-cutoff sigma as (|G|^2 form, -Im G form, 2 pi^2 r rho form)."""
    r = p.r0r
    inv = sharp.inverse_g_r(omega, p)
    g = 1.0 / inv
    first = 8.0 * math.pi / 3.0 * r * r * omega**4 * abs(g) ** 2
    second = 4.0 * math.pi / omega * r * omega**2 * (-g.imag)
    third = 2.0 * math.pi**2 * r * sharp.spectral_density(omega, p)
    return first, second, third


def sigma_sum_rule(p: ModelParams, scheme: Scheme = None, rel_tol: float = DEFAULT_REL_TOL) -> SumRuleReport:
    """integral of sigma against 2 pi^2 r0r (1/(1-a) - r_b), or 2 pi^2 r0r / (1 - a_K).

    sigma is integrated through its |G_r|^2 form, so this is not merely a
    rescaled copy of the spectral sum rule.  For a smooth cutoff, peaks of
    sigma too narrow for quadrature enter through their exact weight.
    """
    s = resolve_scheme(scheme, p)
    r = p.r0r
    pref = 8.0 * math.pi / 3.0 * r * r
    if s == "naive":
        raise DomainError("the naive limit has no cross-section sum rule with a finite target")
    if s == "sharp" or s.k.family == "sharp":
        q = p if s == "sharp" else smooth.replace_omega_h(p, s)

        def sigma(w):
            inv = sharp.inverse_g_r(w, q)
            return pref * w**4 / (inv.real**2 + inv.imag**2)

        def sigma_edge(eta):
            inv = sharp.inverse_g_r_below_edge(eta, q)
            return pref * (q.omega_h * (1.0 - eta)) ** 4 / (inv.real**2 + inv.imag**2)

        res = sharp.integrate_spectrum(q, rel_tol=rel_tol, density=sigma, density_below_edge=sigma_edge)
        r_b = sharp.bound_state_pole(q).residue
        target = 2.0 * math.pi**2 * r * (1.0 / (1.0 - q.a) - r_b)
        pole_weight = 0.0
    else:
        def sigma(w):
            return cross_section(w, p, s).sigma

        peaks = smooth.edge_peaks(p, s)
        res = smooth.integrate_spectrum_smooth(p, s, rel_tol, density=sigma, peaks=peaks)
        pole_weight = 2.0 * math.pi**2 * r * smooth.unresolved_peak_weight(peaks, s.k.support_end)
        target = 2.0 * math.pi**2 * r / (1.0 - s.a_k)
    return SumRuleReport(
        integral=res.value,
        integral_error=res.error_estimate,
        pole_weight=pole_weight,
        target=target,
        normalization=1.0 / target,
        evaluations=res.evaluations,
    )


def spectral_sum_rule(p: ModelParams, scheme: Scheme = None, rel_tol: float = DEFAULT_REL_TOL) -> SumRuleReport:
    s = resolve_scheme(scheme, p)
    if s == "naive":
        raise DomainError("use continuum.tachyon_pole_naive for the naive-limit sum rule")
    if s == "sharp":
        return sharp.spectral_sum_rule(p, rel_tol)
    if s.k.family == "sharp":
        return sharp.spectral_sum_rule(smooth.replace_omega_h(p, s), rel_tol)
    return smooth.spectral_sum_rule_smooth(p, s, rel_tol)


def plateau_correction(omega: float, p: ModelParams) -> float:
    """Approximate sigma/sigma_T for omega_r << omega << omega_h.

    1 + omega^2 (2 r0r/3)^2 (6/(pi r0r omega_h) - 1); the slope changes sign
    at a = 8/pi^2.
    """
    if not 10.0 * p.omega_r < omega < 0.1 * p.omega_h:
        warnings.warn(
            f"omega={omega!r} is outside the plateau window (10 omega_r, omega_h/10)",
            stacklevel=2,
        )
    r = p.r0r
    return 1.0 + omega**2 * (2.0 * r / 3.0) ** 2 * (6.0 / (math.pi * r * p.omega_h) - 1.0)


def plateau_slope_sign(p: ModelParams) -> int:
    return int(np.sign(8.0 / math.pi**2 - p.a))


# -- universality ------------------------------------------------------------


def _sigma_or_zero(omega: float, p: ModelParams, s) -> float:
    if s == "sharp" and omega >= p.omega_h:
        return 0.0
    return cross_section(omega, p, s).sigma


@dataclass(frozen=True)
class UniversalityReport:
    """Cross sections of several schemes on a common frequency grid.

    ``deviation[i]`` is (max sigma - min sigma) / min sigma over the schemes
    at ``omega[i]``; ``agreement_boundary`` is the first grid frequency
    where it exceeds ``threshold`` (None if it never does).
    """

    schemes: list[str]
    omega: np.ndarray
    sigma: np.ndarray = field(repr=False)
    deviation: np.ndarray = field(repr=False)
    threshold: float
    agreement_boundary: float | None

    def max_rel_deviation(self, omega_max: float, omega_min: float = 0.0) -> float:
        mask = (self.omega >= omega_min) & (self.omega <= omega_max)
        if not mask.any():
            return 0.0
        return float(np.max(self.deviation[mask]))


def universality_compare(
    p: ModelParams,
    schemes: Sequence[Scheme],
    omega_grid: Sequence[float],
    threshold: float = 0.01,
    *,
    omega_h_rel_tol: float = 1e-9,
) -> UniversalityReport:
    """Compare sigma(omega) across schemes sharing the effective omega_h of ``p``.

    The naive limit has no cutoff and is exempt from the omega_h check.
    """
    resolved = [resolve_scheme(s, p) for s in schemes]
    for s in resolved:
        if isinstance(s, SmoothScheme):
            eff = s.omega_h_eff
            if abs(eff / p.omega_h - 1.0) > omega_h_rel_tol:
                raise DomainError(
                    f"scheme {s.k} has effective omega_h {eff!r}, expected {p.omega_h!r}"
                )
    grid = np.asarray(omega_grid, dtype=float)
    sig = np.array([[_sigma_or_zero(float(w), p, s) for w in grid] for s in resolved])
    if len(resolved) < 2:
        dev = np.zeros(len(grid))
    else:
        lo, hi = sig.min(axis=0), sig.max(axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            dev = np.where(hi == lo, 0.0, (hi - lo) / lo)
    over = np.nonzero(dev > threshold)[0]
    boundary = float(grid[over[0]]) if over.size else None
    labels = [s if isinstance(s, str) else str(s.k) for s in resolved]
    return UniversalityReport(labels, grid, sig, dev, threshold, boundary)
