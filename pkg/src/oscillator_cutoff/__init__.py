"""Photon scattering off a charged harmonic oscillator with a UV frequency cutoff."""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, NoBracketError, NoRootError, OscillatorError  # noqa: E402
from .model import (  # noqa: E402
    BareParams,
    ModelParams,
    ResonanceInfo,
    bare_from_renormalized,
    extended_params,
    make_params,
    renormalize,
    resonance_info,
)
