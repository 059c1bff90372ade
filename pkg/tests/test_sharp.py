import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oscillator_cutoff import sharp
from oscillator_cutoff.errors import DomainError, NoRootError
from oscillator_cutoff.model import make_params
from oscillator_cutoff.sharp import PoleKind

mpmath.mp.dps = 50

a_phys = st.floats(0.01, 0.99)
b_phys = st.floats(1e-3, 0.5)


def mp_inverse(omega, a, b):
    """Independent high-precision 1/G_r from the logarithmic closed form."""
    w = mpmath.mpf(omega)
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    if w < 1:
        return w**2 - b**2 + a / 2 * w**3 * (mpmath.log((1 - w) / (1 + w)) + 1j * mpmath.pi)
    return w**2 - b**2 - a / 2 * w**3 * mpmath.log((w + 1) / (w - 1))


def mp_bound_state(a, b):
    a, b = mpmath.mpf(a), mpmath.mpf(b)

    def f(eta):
        w = 1 + eta
        return w**2 - b**2 - a / 2 * w**3 * mpmath.log((2 + eta) / eta)

    guess = 2 * mpmath.exp(-2 / a)
    eta = mpmath.findroot(f, (guess / 50, guess * 50), solver="anderson")
    w = 1 + eta
    slope = mpmath.diff(lambda x: mpmath.re(mp_inverse(x, a, b)), w)
    return w, 2 * w / slope


# -- inverse propagator -------------------------------------------------------


@pytest.mark.parametrize("omega", [1e-4, 0.01, 0.3, 0.9, 0.999, 1.001, 1.5, 20.0])
def test_inverse_matches_mpmath(omega):
    p = make_params(0.3, 0.02)
    ours = sharp.inverse_g_r(omega, p)
    ref = complex(mp_inverse(omega, 0.3, 0.02))
    assert abs(ours - ref) <= 1e-13 * abs(ref)


def test_static_limit():
    p = make_params(0.4, 0.05)
    assert sharp.inverse_g_r(1e-9, p).real == pytest.approx(-p.omega_r**2, rel=1e-10)


def test_vanishes_at_cutoff():
    p = make_params(0.2, 0.01)
    with pytest.raises(DomainError):
        sharp.inverse_g_r(1.0, p)
    assert sharp.g_r(1.0, p) == 0
    # logarithmic approach: |G_r| falls like 1/|ln eta|
    mags = [abs(1.0 / sharp.inverse_g_r_below_edge(eta, p)) for eta in (1e-10, 1e-100, 1e-300)]
    assert mags[0] > mags[1] > mags[2]
    assert mags[2] < 0.1


def test_large_omega_limit():
    p = make_params(0.6, 0.01)
    w = 1e5
    assert (w * w / sharp.inverse_g_r(w, p)).real == pytest.approx(1 / (1 - p.a), rel=1e-8)


def test_edge_form_matches_direct_form():
    p = make_params(0.3, 0.01)
    for eta in (0.5, 0.1, 1e-3):
        assert sharp.inverse_g_r_below_edge(eta, p) == pytest.approx(sharp.inverse_g_r(1 - eta, p), rel=1e-12)


# -- negative axis -------------------------------------------------------------


def test_negative_axis_example_value():
    p = make_params(0.5, 0.01)
    with mpmath.workdps(40):
        ref = -1 - mpmath.mpf("1e-4") + mpmath.mpf("0.5") * mpmath.atan(1)
    assert sharp.inverse_g_r_negative_axis(1.0, p) == pytest.approx(float(ref), rel=1e-14)
    assert sharp.inverse_g_r_negative_axis(1.0, p) == pytest.approx(-0.607401, abs=1e-6)


def test_negative_axis_static_limit():
    p = make_params(0.5, 0.01)
    assert sharp.inverse_g_r_negative_axis(1e-8, p) == pytest.approx(-1e-4, rel=1e-6)


@given(a_phys, b_phys)
def test_no_negative_axis_pole(a, b):
    p = make_params(a, b)
    for k in np.geomspace(1e-6, 1e6, 241):
        assert sharp.inverse_g_r_negative_axis(float(k), p) < 0.0


# -- spectral density ------------------------------------------------------------


@given(a_phys, b_phys, st.floats(1e-6, 1 - 1e-9))
def test_rho_positive_and_consistent(a, b, s):
    p = make_params(a, b)
    rho = sharp.spectral_density(s, p)
    assert rho > 0.0
    assert sharp.spectral_density_from_propagator(s, p) == pytest.approx(rho, rel=1e-12)


def test_rho_domain():
    p = make_params(0.1, 0.01)
    for s in (0.0, 1.0, 1.5):
        with pytest.raises(DomainError):
            sharp.spectral_density(s, p)


def test_rho_at_resonance():
    p = make_params(0.1, 0.01)
    s = sharp.resonance_zero(p)
    assert s == pytest.approx(p.omega_r, rel=1e-3)
    assert sharp.spectral_density(s, p) == pytest.approx(4 / (math.pi**2 * p.a * s * s), rel=1e-9)
    assert sharp.spectral_density(p.omega_r, p) == pytest.approx(3 / (math.pi * p.r0r * p.omega_r**2), rel=1e-3)


def test_rho_small_s():
    p = make_params(0.1, 0.01)
    s = 1e-5
    rayleigh = 4 * p.r0r / (3 * math.pi) * s**4 / p.omega_r**4
    assert sharp.spectral_density(s, p) == pytest.approx(rayleigh, rel=1e-5)


@pytest.mark.parametrize("s", [0.003, 0.05, 0.1])
def test_rho_approximation_error_scales_quadratically(s):
    p = make_params(0.1, 0.01)
    exact = sharp.spectral_density(s, p)
    approx = sharp.spectral_density_approx(s, p)
    assert abs(approx / exact - 1) < 2.0 * s * s


# -- edge artifacts --------------------------------------------------------------------


@pytest.mark.parametrize("a,b", [(0.1, 0.01), (0.3, 0.01), (0.5, 0.05)])
def test_bound_state_against_mpmath(a, b):
    p = make_params(a, b)
    pole = sharp.bound_state_pole(p)
    w_ref, r_ref = mp_bound_state(a, b)
    assert pole.kind is PoleKind.BOUND_STATE
    assert pole.location > p.omega_h
    assert pole.offset == pytest.approx(float(w_ref - 1), rel=1e-9)
    assert pole.residue == pytest.approx(float(r_ref), rel=1e-8)


def test_bound_state_small_a_formulas():
    # at a=0.5 the small-a offset is off by about 22%, still inside 25%
    p = make_params(0.5, 0.05)
    assert sharp.bound_state_pole(p).offset == pytest.approx(2 * math.exp(-4), rel=0.25)
    p = make_params(0.1, 0.01)
    rb = sharp.bound_state_pole(p).residue
    asym = 8 / 0.1 * math.exp(-20)
    assert asym / 2 <= rb <= 2 * asym


def test_bound_state_decoupling_limit():
    p = make_params(0.02, 0.01)
    pole = sharp.bound_state_pole(p)
    assert pole.location / p.omega_h - 1 < 1e-40
    assert 0.0 < pole.residue < 1e-38


@given(st.floats(0.01, 0.18), st.floats(1e-3, 0.1))
def test_bound_state_residue_small(a, b):
    pole = sharp.bound_state_pole(make_params(a, b))
    assert 0.0 < pole.residue < 1e-3


def test_bound_state_residue_exceeds_1e_minus_3_by_quarter():
    # (8/a) e^(-2/a) is already 1.07e-2 at a = 0.25; the exact residue follows it
    rb = sharp.bound_state_pole(make_params(0.25, 0.01)).residue
    assert rb == pytest.approx(8 / 0.25 * math.exp(-8), rel=0.1)
    assert rb > 1e-3


def test_second_peak_examples():
    p = make_params(0.3, 0.01)
    assert sharp.second_peak(p) == pytest.approx(1 - 2 * math.exp(-20 / 3), rel=1e-3)
    p = make_params(0.1, 0.01)
    assert 1 - sharp.second_peak(p) == pytest.approx(2 * math.exp(-20), rel=0.01)
    assert math.exp(sharp.second_peak_log_offset(p)) == pytest.approx(4.1e-9, rel=0.01)


def test_second_peak_is_a_real_part_zero():
    p = make_params(0.2, 0.01)
    t = sharp.second_peak_log_offset(p)
    eta = math.exp(t)
    with mpmath.workdps(40):
        val = mpmath.re(mp_inverse(1 - mpmath.mpf(eta), 0.2, 0.01))
    assert abs(float(val)) < 1e-12


def test_second_peak_absent_when_merged():
    with pytest.raises(NoRootError):
        sharp.second_peak(make_params(0.85, 0.05))


def test_resonance_zero_distinct_from_edge():
    p = make_params(0.3, 0.01)
    assert sharp.resonance_zero(p) == pytest.approx(0.01, rel=1e-3)
    assert sharp.second_peak(p) > 0.99


# -- sum rule and reconstruction -----------------------------------------------------


@pytest.mark.parametrize("a,b", [(0.1, 0.01), (0.5, 0.05), (0.9, 0.1), (1e-4, 0.02)])
def test_sum_rule(a, b):
    rep = sharp.spectral_sum_rule(make_params(a, b), rel_tol=1e-10)
    assert abs(rep.deviation) < 1e-8
    assert rep.probability == pytest.approx(1.0, rel=1e-8)


def test_sum_rule_random_pairs():
    rng = np.random.default_rng(3)
    for a, b in zip(rng.uniform(0.02, 0.95, 10), rng.uniform(0.002, 0.3, 10)):
        rep = sharp.spectral_sum_rule(make_params(a, b))
        assert abs(rep.deviation) < 1e-7, (a, b)


def test_sum_rule_report_dict():
    rep = sharp.spectral_sum_rule(make_params(0.5, 0.05))
    d = rep.as_dict()
    assert d["target"] == pytest.approx(2.0)
    assert set(d) >= {"integral", "pole_weight", "total", "deviation", "probability"}


@pytest.mark.parametrize("k", [0.1, 0.5, 2.0])
def test_spectral_reconstruction(k):
    p = make_params(0.3, 0.01)
    assert sharp.g_r_negative_axis_spectral(k, p) == pytest.approx(sharp.g_r_negative_axis(k, p), rel=1e-9)
