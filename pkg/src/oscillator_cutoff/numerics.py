"""Quadrature, principal-value integrals and bracketed root finding.

Adaptive quadrature and root bracketing are delegated to QUADPACK and
Brent's method through scipy; this module wraps them with the error
conventions of the package and adds the pieces scipy does not provide in
the needed form: the semi-infinite tail map and a principal value by
singular-part subtraction.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate as _integrate
from scipy import optimize as _optimize

from .errors import ConvergenceError, DomainError, NoBracketError

DEFAULT_REL_TOL = 1e-10
MAX_SUBDIVISIONS = 60
# QUADPACK refuses relative tolerances below 50 machine epsilons
MIN_REL_TOL = 50.0 * 2.220446049250313e-16

Func = Callable[[float], float]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
        )

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class RootResult:
    root: float
    residual: float
    iterations: int


def _quad_once(f: Func, lo: float, hi: float, rel_tol: float, abs_tol: float,
               points: Sequence[float] | None, limit: int):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", _integrate.IntegrationWarning)
        out = _integrate.quad(
            f, lo, hi, epsrel=rel_tol, epsabs=abs_tol, limit=limit,
            points=points, full_output=1,
        )
    value, err, info = out[0], out[1], out[2]
    return value, err, info["neval"]


def integrate(
    f: Func,
    lo: float,
    hi: float,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    abs_tol: float = 0.0,
    points: Sequence[float] | None = None,
    limit: int = MAX_SUBDIVISIONS,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[lo, hi]``.

    ``points`` are interior break points (known peaks, kinks); they are
    sorted and clipped to the open interval.  Each sub-interval gets its own
    budget of ``limit`` bisections.

    Raises ConvergenceError when the error estimate stays above
    ``max(rel_tol * |value|, abs_tol)``.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo!r}, {hi!r}]")
    if not MIN_REL_TOL <= rel_tol < 1.0:
        raise DomainError(f"rel_tol must lie in [{MIN_REL_TOL!r}, 1), got {rel_tol!r}")
    if math.isinf(hi):
        return integrate_to_infinity(f, lo, rel_tol, abs_tol=abs_tol, points=points, limit=limit)
    edges = [lo]
    if points:
        edges += sorted({float(x) for x in points if lo < x < hi})
    edges.append(hi)
    total = QuadratureResult(0.0, 0.0, 0)
    for left, right in zip(edges[:-1], edges[1:]):
        if right <= left:
            continue
        value, err, neval = _quad_once(f, left, right, rel_tol, abs_tol / len(edges), None, limit)
        total = total + QuadratureResult(value, err, neval)
    tol = max(rel_tol * abs(total.value), abs_tol)
    # QUADPACK error estimates are pessimistic by orders of magnitude for
    # smooth integrands; allow a factor of 10 before declaring failure.
    if not math.isfinite(total.value) or total.error_estimate > 10.0 * tol + 1e-300:
        raise ConvergenceError(
            f"quadrature on [{lo!r}, {hi!r}] reached error {total.error_estimate:.3g}"
            f" > tolerance {tol:.3g} (value {total.value!r})"
        )
    return total


def integrate_to_infinity(
    f: Func,
    lo: float,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    abs_tol: float = 0.0,
    points: Sequence[float] | None = None,
    limit: int = MAX_SUBDIVISIONS,
) -> QuadratureResult:
    """Integral of ``f`` over ``[lo, inf)``.

    The range up to the last break point is integrated directly; the rest,
    ``[A, inf)`` with ``A > 0``, is mapped onto ``(0, 1]`` by ``x = A / t``.
    The caller must make sure ``f`` decays at least like ``1 / x^(1+eps)``.
    """
    pts = sorted(x for x in (points or ()) if x > lo)
    anchor = pts[-1] if pts else (lo if lo > 0.0 else 1.0)
    if anchor <= 0.0:
        raise DomainError("tail map needs a positive anchor point")
    head = QuadratureResult(0.0, 0.0, 0)
    if anchor > lo:
        head = integrate(f, lo, anchor, rel_tol, abs_tol=abs_tol, points=pts[:-1], limit=limit)

    def mapped(t: float) -> float:
        if t <= 0.0:
            return 0.0
        x = anchor / t
        return f(x) * anchor / (t * t)

    tail = integrate(mapped, 0.0, 1.0, rel_tol, abs_tol=abs_tol, limit=limit)
    return head + tail


def principal_value(
    f: Func,
    s0: float,
    lo: float,
    hi: float,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    half_width: float | None = None,
    abs_tol: float = 0.0,
    points: Sequence[float] | None = None,
) -> QuadratureResult:
    """Cauchy principal value of ``integral f(x) / (x - s0) dx`` over ``[lo, hi]``.

    A symmetric window ``|x - s0| < half_width`` is integrated with the
    pole subtracted, ``(f(x) - f(s0)) / (x - s0)``; the subtracted term
    integrates to zero over a symmetric window.  Outside the window the
    integrand is regular.  ``hi`` may be ``inf``.
    """
    if not lo < s0 < hi:
        raise DomainError(f"pole {s0!r} is not inside ({lo!r}, {hi!r})")
    room = min(s0 - lo, hi - s0)
    if half_width is None:
        half_width = 0.5 * room
    if not 0.0 < half_width <= room:
        raise DomainError(f"half_width {half_width!r} must lie in (0, {room!r}]")
    f0 = f(s0)

    def subtracted(x: float) -> float:
        d = x - s0
        if d == 0.0:
            return 0.0
        return (f(x) - f0) / d

    def plain(x: float) -> float:
        return f(x) / (x - s0)

    left_w, right_w = s0 - half_width, s0 + half_width
    pts = list(points or ())
    # the window is split at s0 so no node sits on the removable singularity
    result = integrate(subtracted, left_w, right_w, rel_tol, abs_tol=abs_tol,
                       points=[s0] + [x for x in pts if left_w < x < right_w])
    if left_w > lo:
        result = result + integrate(plain, lo, left_w, rel_tol, abs_tol=abs_tol,
                                    points=[x for x in pts if lo < x < left_w])
    if right_w < hi:
        result = result + integrate(plain, right_w, hi, rel_tol, abs_tol=abs_tol,
                                    points=[x for x in pts if x > right_w])
    return result


def find_root(f: Func, lo: float, hi: float, tol: float = 1e-14, *, maxiter: int = 200) -> RootResult:
    """Bracketed root of ``f`` on ``[lo, hi]`` (Brent's method).

    ``tol`` bounds the final bracket width, absolute plus 4 ulp relative.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return RootResult(lo, 0.0, 0)
    if fhi == 0.0:
        return RootResult(hi, 0.0, 0)
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise NoBracketError(f"f has the same sign at {lo!r} ({flo:.3g}) and {hi!r} ({fhi:.3g})")
    root, info = _optimize.brentq(f, lo, hi, xtol=tol, maxiter=maxiter, full_output=True, disp=False)
    if not info.converged:
        raise ConvergenceError(f"root search on [{lo!r}, {hi!r}] did not converge")
    return RootResult(root, f(root), info.iterations)
