"""Command-line front end.

Every command prints to stdout unless ``--output`` names a file.  Frequencies
are written as omega/omega_h, cross sections as sigma/sigma_T and spectral
densities as rho * omega_h.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 convergence failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import __version__, continuum, observables, sharp, smooth
from .errors import ConvergenceError, DomainError, NoBracketError, NoRootError, OscillatorError
from .model import ModelParams, extended_params, make_params, resonance_info

COMMANDS = (
    "scan-sigma", "scan-rho", "poles", "sum-rules",
    "tachyon", "tachyon-curve", "universality", "report",
)
TACHYON_COMMANDS = ("tachyon", "tachyon-curve")
SPACINGS = ("linear", "log", "resonance-aware")

DEFAULT_UNIVERSALITY_SCHEMES = ("sharp", "exptail:1,0.1", "gausstail:1,0.1", "tanhstep:1,0.05")

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int
    spacing: str

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 4:
            raise UsageError(f"grid {text!r} is not min:max:count:spacing")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise UsageError(f"bad number in grid {text!r}") from exc
        if parts[3] not in SPACINGS:
            raise UsageError(f"grid spacing must be one of {SPACINGS}, got {parts[3]!r}")
        if count < 2:
            raise UsageError("grid count must be at least 2")
        if not 0.0 < lo < hi:
            raise UsageError(f"grid needs 0 < min < max, got {lo!r}, {hi!r}")
        return cls(lo, hi, count, parts[3])

    def __str__(self) -> str:
        return f"{self.lo!r}:{self.hi!r}:{self.count}:{self.spacing}"


@dataclass
class RunConfig:
    command: str
    a: float = 0.1
    b: float = 0.01
    schemes: list[str] = field(default_factory=list)
    grid: GridSpec | None = None
    output: str | None = None
    fmt: str = "csv"
    rel_tol: float = 1e-10
    threshold: float = 0.01
    include_naive: bool = False
    c_min: float = 1e-3
    c_max: float = 1.0
    points: int = 50
    c_spacing: str = "log"

    def params(self) -> ModelParams:
        if self.command in TACHYON_COMMANDS:
            return extended_params(self.a, self.b)
        return make_params(self.a, self.b)


# -- grids -------------------------------------------------------------------


def resonance_aware_grid(p: ModelParams, lo: float, hi: float, count: int) -> np.ndarray:
    """Grid that resolves the resonance and the near-edge artifact.

    Roughly a quarter of the points are log spaced below 10 omega_r, 30%
    cover omega_r +- 10 Gamma linearly, 15% are log spaced in the distance
    to omega_h around the edge peak, and the rest fill the plateau.
    """
    res = resonance_info(p)
    wh = p.omega_h
    pieces = []
    n_low = max(2, int(0.25 * count))
    n_res = max(2, int(0.30 * count))
    n_edge = max(2, int(0.15 * count))
    knee = min(10.0 * p.omega_r, hi)
    if lo < knee:
        pieces.append(np.geomspace(lo, knee, n_low))
    pieces.append(np.linspace(res.omega_peak - 10.0 * res.gamma, res.omega_peak + 10.0 * res.gamma, n_res))
    if hi >= wh * 0.5:
        try:
            eta_p = math.exp(sharp.second_peak_log_offset(p))
        except NoRootError:
            eta_p = 0.0
        if eta_p > 0.0:
            etas = np.geomspace(eta_p * 1e-2, min(eta_p * 1e3, 0.5), n_edge)
            pieces.append(wh * (1.0 - etas))
    used = sum(len(x) for x in pieces)
    pieces.append(np.linspace(max(lo, knee), hi, max(2, count - used)))
    pieces.append(np.array([lo, hi]))
    grid = np.unique(np.concatenate(pieces))
    return grid[(grid >= lo) & (grid <= hi)]


def build_grid(spec: GridSpec, p: ModelParams) -> np.ndarray:
    if spec.spacing == "linear":
        return np.linspace(spec.lo, spec.hi, spec.count)
    if spec.spacing == "log":
        return np.geomspace(spec.lo, spec.hi, spec.count)
    return resonance_aware_grid(p, spec.lo, spec.hi, spec.count)


# -- output ------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def render_csv(header: Sequence[str], columns: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write(f"# oscillator-cutoff {__version__}\n")
    for line in header:
        buf.write(f"# {line}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(float(v)) for v in row) + "\n")
    return buf.getvalue()


def render_json(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _param_header(p: ModelParams) -> list[str]:
    return [
        f"a = {p.a!r}  (4/(3 pi)) r0r omega_h",
        f"b = {p.b!r}  omega_r/omega_h",
        f"r0r*omega_h = {p.r0r * p.omega_h!r}",
    ]


# -- commands ----------------------------------------------------------------


def _scheme(cfg: RunConfig) -> str:
    return cfg.schemes[0] if cfg.schemes else "sharp"


def _resolve_for(cfg: RunConfig, p: ModelParams, spec: str):
    """Smooth families are rescaled to the effective omega_h of p."""
    if spec in ("sharp", "naive"):
        return spec
    k = smooth.CutoffFunction.parse(spec)
    if cfg.command == "universality":
        k = smooth.normalized_cutoff(k.family, k.width, p.omega_h) if k.family != "sharp" else k
    return k


def cmd_scan_sigma(cfg: RunConfig) -> str:
    p = cfg.params()
    grid = build_grid(cfg.grid or GridSpec(1e-3, 1.0, 2000, "resonance-aware"), p)
    scheme = _resolve_for(cfg, p, _scheme(cfg))
    rows = [(w, observables.cross_section(float(w) * p.omega_h, p, scheme).sigma_over_thomson) for w in grid]
    if cfg.fmt == "json":
        return render_json({"a": p.a, "b": p.b, "scheme": _scheme(cfg),
                            "omega": [r[0] for r in rows], "sigma_over_thomson": [r[1] for r in rows]})
    header = _param_header(p) + [
        f"scheme = {observables.scheme_label(scheme, p)}",
        "omega: frequency / omega_h",
        "sigma_over_thomson: cross section / ((8 pi/3) r0r^2)",
    ]
    return render_csv(header, ["omega", "sigma_over_thomson"], rows)


def cmd_scan_rho(cfg: RunConfig) -> str:
    p = cfg.params()
    grid = build_grid(cfg.grid or GridSpec(1e-3, 1.0, 2000, "resonance-aware"), p)
    scheme = observables.resolve_scheme(_resolve_for(cfg, p, _scheme(cfg)), p)
    rows = []
    for w in grid:
        omega = float(w) * p.omega_h
        if scheme == "sharp":
            rho = 0.0 if omega >= p.omega_h else sharp.spectral_density(omega, p)
        elif scheme == "naive":
            rho = continuum.naive_spectral_density(omega, p)
        else:
            rho = smooth.spectral_density_smooth(omega, p, scheme)
        rows.append((w, rho * p.omega_h))
    if cfg.fmt == "json":
        return render_json({"a": p.a, "b": p.b, "scheme": _scheme(cfg),
                            "omega": [r[0] for r in rows], "rho": [r[1] for r in rows]})
    header = _param_header(p) + [
        f"scheme = {_scheme(cfg)}",
        "omega: frequency / omega_h",
        "rho: spectral density * omega_h",
    ]
    return render_csv(header, ["omega", "rho"], rows)


def poles_summary(p: ModelParams) -> dict:
    res = resonance_info(p)
    pole = sharp.bound_state_pole(p)
    asym = 2.0 * math.exp(-2.0 / p.a)
    out = {
        "a": p.a,
        "b": p.b,
        "resonance_omega": res.omega_peak / p.omega_h,
        "resonance_gamma": res.gamma / p.omega_h,
        "bound_state_omega": pole.location / p.omega_h,
        "bound_state_log_offset": pole.log_offset,
        "bound_state_offset": pole.offset,
        "bound_state_residue": pole.residue,
        "small_a_offset": asym,
        "small_a_residue": 4.0 * asym / p.a,
    }
    try:
        t = sharp.second_peak_log_offset(p)
    except NoRootError:
        out["second_peak_omega"] = None
        out["second_peak_offset"] = None
    else:
        out["second_peak_omega"] = 1.0 - math.exp(t)
        out["second_peak_offset"] = math.exp(t)
    return out


def cmd_poles(cfg: RunConfig) -> str:
    return render_json(poles_summary(cfg.params()))


def sum_rule_summary(p: ModelParams, specs: Sequence[str], rel_tol: float, cfg: RunConfig) -> dict:
    out = {"a": p.a, "b": p.b, "rel_tol": rel_tol}
    for spec in specs:
        scheme = observables.resolve_scheme(_resolve_for(cfg, p, spec), p)
        label = observables.scheme_label(scheme, p)
        rho = observables.spectral_sum_rule(p, scheme, rel_tol)
        sig = observables.sigma_sum_rule(p, scheme, rel_tol)
        key = spec.split(":")[0]
        out[f"{key}_scheme"] = label
        out[f"{key}_a_k"] = scheme.a_k if isinstance(scheme, smooth.SmoothScheme) else p.a
        for name, rep in (("rho", rho), ("sigma", sig)):
            for k, v in rep.as_dict().items():
                out[f"{key}_{name}_{k}"] = v
    return out


def cmd_sum_rules(cfg: RunConfig) -> str:
    p = cfg.params()
    return render_json(sum_rule_summary(p, cfg.schemes or ["sharp"], cfg.rel_tol, cfg))


def tachyon_summary(p: ModelParams, rel_tol: float) -> dict:
    naive = continuum.tachyon_pole_naive(p, rel_tol)
    out = {
        "a": p.a,
        "b": p.b,
        "r0r_omega_h": p.r0r * p.omega_h,
        "c": naive.c,
        "naive_k_t": naive.k_t / p.omega_h,
        "naive_k_t_asymptote": continuum.k_t_asymptote(p.r0r, p.omega_r) / p.omega_h,
        "naive_residue_slope": naive.r_t_derivative,
        "naive_residue_sum_rule": naive.r_t_integral,
    }
    if p.a > 1.0:
        fin = continuum.tachyon_pole_finite(p.a, p.b, p.omega_h, rel_tol)
        k_asym, r_asym = continuum.finite_tachyon_asymptotes(p.a, p.b)
        out.update({
            "finite_k_t": fin.k_t / p.omega_h,
            "finite_k_t_asymptote": k_asym,
            "finite_residue_slope": fin.r_t_derivative,
            "finite_residue_sum_rule": fin.r_t_integral,
            "finite_residue_asymptote": r_asym,
        })
    else:
        out.update({"finite_k_t": None, "finite_residue_slope": None,
                    "finite_note": "no tachyon for a <= 1"})
    return out


def cmd_tachyon(cfg: RunConfig) -> str:
    return render_json(tachyon_summary(cfg.params(), cfg.rel_tol))


def cmd_tachyon_curve(cfg: RunConfig) -> str:
    if not 0.0 < cfg.c_min < cfg.c_max <= 1.0:
        raise DomainError(f"need 0 < c-min < c-max <= 1, got {cfg.c_min!r}, {cfg.c_max!r}")
    if cfg.c_spacing == "log":
        cs = np.geomspace(cfg.c_min, cfg.c_max, cfg.points)
    else:
        cs = np.linspace(cfg.c_min, cfg.c_max, cfg.points)
    rows = continuum.tachyon_residue_curve(cs, cfg.rel_tol)
    if cfg.fmt == "json":
        return render_json({"c": [r[0] for r in rows], "pi_r_t": [r[1] for r in rows]})
    header = [
        "c: (2/3) r0r omega_r",
        "pi_r_t: magnitude of the tachyon residue of G_r in omega^2",
    ]
    return render_csv(header, ["c", "pi_r_t"], rows)


def cmd_universality(cfg: RunConfig) -> str:
    p = cfg.params()
    specs = list(cfg.schemes or DEFAULT_UNIVERSALITY_SCHEMES)
    if cfg.include_naive and "naive" not in specs:
        specs.append("naive")
    schemes = [_resolve_for(cfg, p, s) for s in specs]
    grid = build_grid(cfg.grid or GridSpec(0.1, 1.2, 221, "linear"), p) * p.omega_h
    rep = observables.universality_compare(p, schemes, grid, cfg.threshold)
    sig = rep.sigma / p.sigma_thomson
    if cfg.fmt == "json":
        return render_json({
            "a": p.a, "b": p.b, "schemes": rep.schemes, "threshold": rep.threshold,
            "agreement_boundary": None if rep.agreement_boundary is None else rep.agreement_boundary / p.omega_h,
            "omega": list(rep.omega / p.omega_h),
            "sigma_over_thomson": [list(row) for row in sig],
            "deviation": list(rep.deviation),
        })
    boundary = "none" if rep.agreement_boundary is None else repr(rep.agreement_boundary / p.omega_h)
    header = _param_header(p) + [f"scheme_{i} = {s}" for i, s in enumerate(rep.schemes)] + [
        "omega: frequency / omega_h",
        "scheme_i: sigma / sigma_T for scheme i (0 beyond a sharp cutoff)",
        "deviation: (max - min) / min of sigma across schemes",
        f"threshold = {rep.threshold!r}",
        f"agreement_boundary = {boundary}",
    ]
    cols = ["omega"] + [f"scheme_{i}" for i in range(len(rep.schemes))] + ["deviation"]
    rows = [[rep.omega[j] / p.omega_h, *sig[:, j], rep.deviation[j]] for j in range(len(rep.omega))]
    return render_csv(header, cols, rows)


def cmd_report(cfg: RunConfig) -> str:
    p = cfg.params()
    out = {"version": __version__}
    out.update({f"poles_{k}": v for k, v in poles_summary(p).items()})
    out.update({f"sum_{k}": v for k, v in sum_rule_summary(p, cfg.schemes or ["sharp"], cfg.rel_tol, cfg).items()})
    out.update({f"tachyon_{k}": v for k, v in tachyon_summary(p, cfg.rel_tol).items()})
    # geometric middle of the plateau window (10 omega_r, omega_h / 10)
    lo, hi = 10.0 * p.omega_r, 0.1 * p.omega_h
    mid = math.sqrt(lo * hi)
    out["plateau_omega"] = mid / p.omega_h
    out["plateau_window_nonempty"] = lo < hi
    out["plateau_sigma_over_thomson"] = observables.cross_section(mid, p).sigma_over_thomson
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out["plateau_approximation"] = observables.plateau_correction(mid, p)
    out["plateau_slope_sign"] = observables.plateau_slope_sign(p)
    return render_json(out)


HANDLERS = {
    "scan-sigma": cmd_scan_sigma,
    "scan-rho": cmd_scan_rho,
    "poles": cmd_poles,
    "sum-rules": cmd_sum_rules,
    "tachyon": cmd_tachyon,
    "tachyon-curve": cmd_tachyon_curve,
    "universality": cmd_universality,
    "report": cmd_report,
}


# -- parsing -----------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="oscillator-cutoff",
        description="Charged harmonic oscillator with a UV frequency cutoff.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--a", type=float, default=0.1, help="(4/(3 pi)) r0r omega_h")
    parser.add_argument("--b", type=float, default=0.01, help="omega_r / omega_h")
    parser.add_argument("--scheme", action="append", default=[],
                        help="sharp, naive, or family:scale,width; repeatable; empty means sharp")
    parser.add_argument("--grid", default=None, help="min:max:count:{linear,log,resonance-aware} in units of omega_h; "
                        "None means a per-command grid")
    parser.add_argument("--output", "-o", default=None, help="output file; None means stdout; nothing is written on failure")
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv",
                        help="format of tabular commands; summaries are always JSON")
    parser.add_argument("--rel-tol", type=float, default=1e-10,
                        help="quadrature relative tolerance, in [1e-13, 1e-2)")
    parser.add_argument("--threshold", type=float, default=0.01, help="universality threshold")
    parser.add_argument("--naive", action="store_true", help="add the naive limit to universality")
    parser.add_argument("--c-min", type=float, default=1e-3, help="tachyon-curve: smallest c")
    parser.add_argument("--c-max", type=float, default=1.0, help="tachyon-curve: largest c")
    parser.add_argument("--points", type=int, default=50, help="tachyon-curve: number of c values")
    parser.add_argument("--spacing", choices=("linear", "log"), default="log",
                        help="tachyon-curve: spacing of c values")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Parse and validate command-line arguments.

    Raises UsageError for malformed input and DomainError for parameters
    outside the physical region.
    """
    ns = _build_parser().parse_args(list(argv))
    for spec in ns.scheme:
        if spec not in ("sharp", "naive"):
            try:
                smooth.CutoffFunction.parse(spec)
            except DomainError as exc:
                raise UsageError(str(exc)) from exc
    if ns.points < 1:
        raise UsageError("--points must be positive")
    if not 1e-13 <= ns.rel_tol < 1e-2:
        raise UsageError("--rel-tol must lie in [1e-13, 1e-2)")
    cfg = RunConfig(
        command=ns.command,
        a=ns.a,
        b=ns.b,
        schemes=list(ns.scheme),
        grid=GridSpec.parse(ns.grid) if ns.grid else None,
        output=ns.output,
        fmt=ns.fmt,
        rel_tol=ns.rel_tol,
        threshold=ns.threshold,
        include_naive=ns.naive,
        c_min=ns.c_min,
        c_max=ns.c_max,
        points=ns.points,
        c_spacing=ns.spacing,
    )
    cfg.params()
    return cfg


def run(cfg: RunConfig) -> str:
    """Execute a parsed configuration; returns the rendered output."""
    text = HANDLERS[cfg.command](cfg)
    _emit(text, cfg)
    return text


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        run(cfg)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DomainError, NoBracketError, NoRootError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OscillatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
