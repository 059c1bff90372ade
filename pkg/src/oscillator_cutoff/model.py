"""Model parameters and the bare <-> renormalized maps.

Units are hbar = c = 1.  Frequencies and inverse lengths share a unit, and
for sharp-cutoff work the canonical choice is omega_h = 1, so a physical
parameter set is fixed by the two dimensionless numbers

    a = (4 / 3 pi) * r0r * omega_h      (0 < a < 1)
    b = omega_r / omega_h               (0 < b < 1)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError

#: (4 / 3 pi), the coupling prefactor that appears in every self-energy term.
COUPLING = 4.0 / (3.0 * math.pi)


def _check_finite_positive(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v) or v <= 0.0:
            raise DomainError(f"{name} must be finite and positive, got {v!r}")


@dataclass(frozen=True)
class BareParams:
    """Bare oscillator frequency, bare length r0 = e^2 / (4 pi m), and cutoff."""

    omega0: float
    r0: float
    omega_h: float

    def __post_init__(self):
        _check_finite_positive(omega0=self.omega0, r0=self.r0, omega_h=self.omega_h)

    @property
    def z(self) -> float:
        """Wave-function renormalization shift (4 / 3 pi) r0 omega_h."""
        return COUPLING * self.r0 * self.omega_h


@dataclass(frozen=True)
class ModelParams:
    """Renormalized parameters in terms of (a, b, omega_h).

    Use :func:`make_params` for physical parameter sets; it enforces
    ``0 < a < 1``.  :func:`extended_params` skips that check and exists
    only for the a > 1 tachyon study.
    """

    a: float
    b: float
    omega_h: float = 1.0

    @property
    def omega_r(self) -> float:
        return self.b * self.omega_h

    @property
    def r0r(self) -> float:
        return self.a / (COUPLING * self.omega_h)

    @property
    def sigma_thomson(self) -> float:
        """Thomson cross section (8 pi / 3) r0r^2."""
        return 8.0 * math.pi / 3.0 * self.r0r**2

    @property
    def physical(self) -> bool:
        return 0.0 < self.a < 1.0


@dataclass(frozen=True)
class ResonanceInfo:
    omega_peak: float
    gamma: float


def make_params(a: float, b: float, omega_h: float = 1.0) -> ModelParams:
    """Build a physical parameter set, rejecting a or b outside (0, 1)."""
    for name, v in (("a", a), ("b", b)):
        if not math.isfinite(v) or not 0.0 < v < 1.0:
            raise DomainError(f"{name} must lie in the open interval (0, 1), got {v!r}")
    _check_finite_positive(omega_h=omega_h)
    p = ModelParams(float(a), float(b), float(omega_h))
    if p.r0r * p.omega_r > 0.1:
        warnings.warn(
            f"r0r * omega_r = {p.r0r * p.omega_r:.3g} is not small; the resonance is broad",
            stacklevel=2,
        )
    return p


def extended_params(a: float, b: float, omega_h: float = 1.0) -> ModelParams:
    """Parameter set without the a < 1 guard (unphysical, a > 1 allowed)."""
    _check_finite_positive(a=a, b=b, omega_h=omega_h)
    return ModelParams(float(a), float(b), float(omega_h))


def params_from_physical(r0r: float, omega_r: float, omega_h: float) -> ModelParams:
    """Physical parameter set from (r0r, omega_r, omega_h) in any common unit."""
    _check_finite_positive(r0r=r0r, omega_r=omega_r, omega_h=omega_h)
    return make_params(COUPLING * r0r * omega_h, omega_r / omega_h, omega_h)


def renormalize(bare: BareParams) -> ModelParams:
    """Absorb the cutoff-dependent factor 1 + z into omega and r0.

    omega_r^2 = omega0^2 / (1 + z), r0r = r0 / (1 + z), hence a = z / (1 + z).
    """
    z = bare.z
    omega_r = bare.omega0 / math.sqrt(1.0 + z)
    a = z / (1.0 + z)
    b = omega_r / bare.omega_h
    if not 0.0 < a < 1.0 or not b > 0.0:
        raise DomainError(f"bare parameters give a={a!r}, b={b!r}")
    return ModelParams(a, b, bare.omega_h)


def bare_from_renormalized(p: ModelParams) -> BareParams:
    """Invert :func:`renormalize`; requires a < 1."""
    if not 0.0 < p.a < 1.0:
        raise DomainError(f"no bare theory exists for a={p.a!r}")
    z = p.a / (1.0 - p.a)
    omega0 = p.omega_r * math.sqrt(1.0 + z)
    r0 = p.r0r * (1.0 + z)
    return BareParams(omega0, r0, p.omega_h)


def omega_h_max(r0r: float) -> float:
    """Largest admissible cutoff for a given r0r, where a reaches 1."""
    _check_finite_positive(r0r=r0r)
    return 3.0 * math.pi / (4.0 * r0r)


def resonance_info(p: ModelParams) -> ResonanceInfo:
    """Approximate resonance position and full width (2/3) r0r omega_r^2."""
    return ResonanceInfo(p.omega_r, 2.0 / 3.0 * p.r0r * p.omega_r**2)
