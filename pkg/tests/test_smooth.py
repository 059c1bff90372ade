import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sci_integrate

from oscillator_cutoff import sharp, smooth
from oscillator_cutoff.errors import DomainError
from oscillator_cutoff.model import COUPLING, make_params
from oscillator_cutoff.numerics import find_root
from oscillator_cutoff.smooth import CutoffFunction

EXP = CutoffFunction("exptail", 1.0, 0.1)
GAUSS = CutoffFunction("gausstail", 1.0, 0.1)
TANH = CutoffFunction("tanhstep", 1.0, 0.05)
SMOOTH = [EXP, GAUSS, TANH]

family = st.sampled_from(["exptail", "gausstail", "tanhstep"])
width = st.floats(0.01, 0.06)


def mp_cutoff(k):
    c, w = mpmath.mpf(k.scale), mpmath.mpf(k.width)
    if k.family == "exptail":
        return lambda x: 1 if x <= c else mpmath.exp(-(x - c) / w)
    if k.family == "gausstail":
        return lambda x: 1 if x <= c else mpmath.exp(-(((x - c) / w) ** 2))
    return lambda x: (1 - mpmath.tanh((x - c) / w)) / 2


# -- cutoff functions --------------------------------------------------------------


def test_k_value_examples():
    sh = CutoffFunction("sharp", 1.0)
    assert smooth.k_value(sh, 0.5) == 1.0 and smooth.k_value(sh, 1.5) == 0.0
    assert smooth.k_value(EXP, 1.0) == 1.0
    assert smooth.k_value(EXP, 1.2) == pytest.approx(math.exp(-2), rel=1e-15)
    assert smooth.k_value(EXP, 1.2) == pytest.approx(0.13534, abs=1e-5)
    assert smooth.k_value(TANH, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_tanh_flat_region():
    assert 1.0 - TANH.value(TANH.flat_end) < 1e-12
    # five widths below the center K is still visibly below 1
    assert 1.0 - TANH.value(1.0 - 5 * 0.05) > 1e-5


@given(family, width, st.floats(0.0, 5.0))
def test_k_in_unit_interval(fam, w, x):
    k = CutoffFunction(fam, 1.0, w)
    v = k.value(x)
    assert 0.0 <= v <= 1.0
    if x <= k.flat_end:
        assert v >= 1.0 - 1e-13


@pytest.mark.parametrize("k", SMOOTH)
def test_integral_closed_form(k):
    f = mp_cutoff(k)
    with mpmath.workdps(30):
        ref = mpmath.quad(f, [0, k.flat_end, k.scale, k.scale + 10 * k.width, mpmath.inf])
    assert k.integral() == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("k", SMOOTH)
def test_second_moment_finite(k):
    q = sci_integrate.quad(lambda x: x * x * k.value(x), 0, k.support_end, points=k.break_points, limit=200)
    assert math.isfinite(q[0])


def test_parse_round_trip():
    k = CutoffFunction.parse("exptail:1.0,0.1")
    assert k == EXP
    assert CutoffFunction.parse(str(k)) == k
    assert CutoffFunction.parse("sharp:2") == CutoffFunction("sharp", 2.0)


@pytest.mark.parametrize("text", ["exptail", "exptail:1", "foo:1,2", "gausstail:1,x", "exptail:1,-0.1", "tanhstep:0.5,0.1"])
def test_parse_errors(text):
    with pytest.raises(DomainError):
        CutoffFunction.parse(text)


# -- scheme construction -------------------------------------------------------------


def test_build_scheme_examples():
    p = make_params(0.3, 0.01)
    sh = smooth.build_scheme(CutoffFunction("sharp", 1.0), p.r0r)
    assert sh.a_k == pytest.approx(p.a, rel=1e-15)
    ex = smooth.build_scheme(EXP, p.r0r)
    assert ex.a_k == pytest.approx(COUPLING * p.r0r * 1.1, rel=1e-15)
    assert ex.a_k == pytest.approx(ex.delta_z / (1 + ex.delta_z), rel=1e-15)
    tiny = smooth.build_scheme(EXP, 1e-12)
    assert tiny.a_k < 1e-11


def test_build_scheme_rejects_unphysical():
    with pytest.raises(DomainError):
        smooth.build_scheme(EXP, 3 * math.pi / 4 / 1.05)


@given(family, width, st.floats(0.01, 0.99))
def test_a_k_below_one_from_bare_data(fam, w, a_bare_frac):
    # any bare coupling delta_z > 0 gives a_K = delta_z / (1 + delta_z) < 1
    k = CutoffFunction(fam, 1.0, w)
    delta_z = a_bare_frac / (1 - a_bare_frac)
    r0 = delta_z / (COUPLING * k.integral())
    r0r = r0 / (1 + delta_z)
    s = smooth.build_scheme(k, r0r)
    assert 0.0 < s.a_k < 1.0
    assert s.delta_z == pytest.approx(delta_z, rel=1e-12)


# -- effective omega_h --------------------------------------------------------------


def test_effective_omega_h_sharp():
    sh = CutoffFunction("sharp", 1.3)
    for wp in (0.2, 1.0, 1.3):
        assert smooth.effective_omega_h(sh, wp) == pytest.approx(1.3, rel=1e-15)


def test_effective_omega_h_exptail_oracle():
    with mpmath.workdps(30):
        tail = mpmath.quad(lambda x: mpmath.exp(-(x - 1) / mpmath.mpf("0.1")) / x**2, [1, 2, mpmath.inf])
        ref = 1 / (1 - tail)
    assert smooth.effective_omega_h(EXP) == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("k", SMOOTH)
def test_effective_omega_h_independent_of_matching_point(k):
    w1 = smooth.effective_omega_h(k, k.flat_end)
    w2 = smooth.effective_omega_h(k, 0.9 * k.flat_end)
    assert abs(w1 / w2 - 1) <= 1e-10


def test_effective_omega_h_sharp_limit():
    k = CutoffFunction("exptail", 1.0, 1e-6)
    assert smooth.effective_omega_h(k) == pytest.approx(1.0, rel=2e-6)


def test_effective_omega_h_outside_flat_region():
    with pytest.raises(DomainError):
        smooth.effective_omega_h(EXP, 1.1)


@pytest.mark.parametrize("fam,w", [("exptail", 0.1), ("gausstail", 0.1), ("tanhstep", 0.05), ("sharp", 0.0)])
def test_normalized_cutoff(fam, w):
    k = smooth.normalized_cutoff(fam, w, 1.0)
    assert k.width == w
    assert smooth.effective_omega_h(k) == pytest.approx(1.0, rel=1e-12)


# -- principal value and propagator ---------------------------------------------------


def mp_pv(omega, k):
    f = mp_cutoff(k)
    w = mpmath.mpf(omega)
    g = lambda x: f(x) / (w**2 - x**2)  # noqa: E731
    eps = mpmath.mpf("1e-25")
    nodes = sorted({0, k.flat_end, k.scale, float(omega)})
    parts = []
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        lo = mpmath.mpf(lo) + (eps if lo == omega else 0)
        hi = mpmath.mpf(hi) - (eps if hi == omega else 0)
        parts.append(mpmath.quad(g, [lo, hi]))
    start = max(nodes[-1], k.scale) + (eps if nodes[-1] == omega else 0)
    parts.append(mpmath.quad(g, [start, k.scale + 20 * k.width, mpmath.inf]))
    return mpmath.fsum(parts)


@pytest.mark.parametrize("k", SMOOTH)
@pytest.mark.parametrize("omega", [0.3, 0.95, 1.02, 1.2])
def test_pv_kernel_against_mpmath(k, omega):
    with mpmath.workdps(30):
        ref = float(mp_pv(omega, k))
    assert smooth.pv_kernel(omega, k) == pytest.approx(ref, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("omega", [0.5, 1.05])
def test_pv_kernel_against_qawc(omega):
    k = GAUSS
    g = lambda x: -k.value(x) / (x + omega)  # noqa: E731
    oracle = sci_integrate.quad(g, 0.0, k.support_end, weight="cauchy", wvar=omega, epsrel=1e-13, limit=400)[0]
    assert smooth.pv_kernel(omega, k) == pytest.approx(oracle, rel=1e-9)


def test_sharp_scheme_matches_sharp_module():
    p = make_params(0.3, 0.02)
    s = smooth.build_scheme(CutoffFunction("sharp", 1.0), p.r0r)
    for w in (1e-3, 0.02, 0.4, 0.99, 1.5):
        assert smooth.b_omega(w, p, s) == pytest.approx(sharp.inverse_g_r(w, p).real, rel=1e-12)
    for w in (1e-3, 0.02, 0.4, 0.99):
        assert smooth.spectral_density_smooth(w, p, s) == pytest.approx(sharp.spectral_density(w, p), rel=1e-12)


@given(st.floats(0.01, 0.9), st.floats(1e-3, 0.3), st.floats(1e-4, 0.999))
def test_sharp_scheme_reduction_property(a, b, w):
    p = make_params(a, b)
    s = smooth.build_scheme(CutoffFunction("sharp", 1.0), p.r0r)
    assert smooth.b_omega(w, p, s) == pytest.approx(sharp.inverse_g_r(w, p).real, rel=1e-12, abs=1e-15)


def test_b_omega_limits():
    p = make_params(0.1, 0.01)
    s = smooth.scheme_for(p, EXP)
    assert smooth.b_omega(1e-7, p, s) == pytest.approx(-p.omega_r**2, rel=1e-9)
    for w in (0.02, 0.05):
        approx = w * w - p.omega_r**2 - w**4 * COUPLING * p.r0r / s.omega_h_eff
        exact = smooth.b_omega(w, p, s)
        assert abs(exact - approx) <= 2 * w * w * w**4 * COUPLING * p.r0r


def test_inverse_smooth_imaginary_part():
    p = make_params(0.1, 0.01)
    s = smooth.scheme_for(p, EXP)
    assert smooth.inverse_g_r_smooth(0.5, p, s).imag == pytest.approx(2 / 3 * p.r0r * 0.125, rel=1e-15)
    assert smooth.inverse_g_r_smooth(20.0, p, s).imag < 1e-70
    assert smooth.inverse_g_r_smooth(500.0, p, s).imag == 0.0


def test_large_omega_limit_smooth():
    p = make_params(0.3, 0.01)
    s = smooth.scheme_for(p, EXP)
    w = 1e4
    assert w * w / smooth.b_omega(w, p, s) == pytest.approx(1 / (1 - s.a_k), rel=1e-6)


@given(family, width, st.floats(0.01, 0.5), st.floats(-6, 6))
def test_no_negative_axis_pole_smooth(fam, w, a, logk):
    p = make_params(a, 0.01)
    k = smooth.normalized_cutoff(fam, w)
    s = smooth.scheme_for(p, k)
    assert smooth.negative_axis_smooth(10.0**logk, p, s) < 0.0


# -- spectral density and sum rule ----------------------------------------------------


@pytest.mark.parametrize("k", SMOOTH)
def test_rho_smooth_nonnegative_and_vanishes(k):
    p = make_params(0.1, 0.01)
    s = smooth.scheme_for(p, k)
    for w in np.linspace(0.001, k.support_end * 1.2, 200):
        assert smooth.spectral_density_smooth(float(w), p, s) >= 0.0
    assert smooth.spectral_density_smooth(k.support_end * 1.5, p, s) < 1e-40
    far = 1e3
    assert k.value(far) == 0.0
    assert smooth.spectral_density_smooth(far, p, s) == 0.0


def test_rho_smooth_at_resonance():
    p = make_params(0.1, 0.01)
    s = smooth.scheme_for(p, EXP)
    # at the zero of b_s near omega_r, rho = (4/3 pi) r0r s^4 / ((2/3) r0r s^3)^2
    w = find_root(lambda x: smooth.b_omega(x, p, s), 0.5 * p.omega_r, 2 * p.omega_r).root
    expected = COUPLING * p.r0r * w**4 / (2 / 3 * p.r0r * w**3) ** 2
    assert smooth.spectral_density_smooth(w, p, s) == pytest.approx(expected, rel=1e-9)
    # the sharp peak sits at a zero shifted by O(omega_r^3) through 1/omega_h
    w_sharp = sharp.resonance_zero(p)
    assert expected == pytest.approx(sharp.spectral_density(w_sharp, p), rel=1e-5)


@pytest.mark.parametrize("k", SMOOTH)
@pytest.mark.parametrize("a,b", [(0.1, 0.01), (0.5, 0.05)])
def test_smooth_sum_rule(k, a, b):
    p = make_params(a, b)
    rep = smooth.spectral_sum_rule_smooth(p, smooth.scheme_for(p, k))
    assert abs(rep.deviation) < 1e-8


@pytest.mark.parametrize("spec", ["gausstail:1,0.1", "tanhstep:1,0.05"])
def test_sum_rule_with_quasi_bound_peak(spec):
    # large a_K: b_omega has a zero where K is tiny, and rho a needle-thin peak there
    p = make_params(0.8368, 0.158)
    s = smooth.scheme_for(p, CutoffFunction.parse(spec))
    peaks = smooth.edge_peaks(p, s)
    needles = [pk for pk in peaks if not pk.resolvable]
    assert len(needles) == 1
    pk = needles[0]
    assert pk.location > s.k.scale and pk.weight > 0.0
    rep = smooth.spectral_sum_rule_smooth(p, s)
    assert rep.pole_weight > rep.integral
    assert abs(rep.deviation) < 1e-8


def test_edge_peak_weight_matches_resolved_integral():
    # a peak just wide enough to resolve: direct quadrature over it equals 2 w / b'
    p = make_params(0.8368, 0.158)
    s = smooth.scheme_for(p, CutoffFunction.parse("exptail:1,0.1"))
    pk = [x for x in smooth.edge_peaks(p, s) if x.weight > 0][0]
    assert pk.resolvable
    g = pk.half_width
    pts = [pk.location + j * g for j in (-30, -3, 0, 3, 30)]
    q = sci_integrate.quad(lambda w: smooth.spectral_density_smooth(w, p, s), pts[0], pts[-1], points=pts[1:-1], limit=400, epsrel=1e-11)[0]
    lorentz_fraction = 2 / math.pi * math.atan(30)
    assert q == pytest.approx(pk.weight * lorentz_fraction, rel=1e-5)
