import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from artifact import regimes as rg

S4 = (2 * math.pi) ** -0.5


def test_coupling_example():
    g = rg.coupling_g(1e-4, 1.0, 0.1, S4)
    assert g == pytest.approx(1 / (-math.log(1e-4) + 1 / (0.1 * S4)), rel=1e-14)
    # intermediates rounded to four decimals
    assert g == pytest.approx(1 / (9.2103 + 25.0663), rel=5e-6)


def test_coupling_rejects_weak_confinement():
    with pytest.raises(rg.DiluteRangeError):
        rg.coupling_g(2.0, 1.0, 0.1)
    with pytest.raises(rg.DiluteRangeError):
        rg.coupling_g_ln(0.0, 10.0)


def test_limits():
    assert rg.coupling_g(0.1, 1.0, 1e-5, S4) / (S4 * 1e-5) == pytest.approx(1.0, rel=1e-4)
    assert rg.coupling_g(1e-30, 1.0, 1e6, S4) * abs(math.log(1e-30)) == pytest.approx(1.0, rel=1e-4)


def test_coupling_log_form_agrees():
    assert rg.coupling_g_ln(math.log(1e-3), 50.0, S4) == pytest.approx(rg.coupling_g(1e-3, 1.0, 0.02, S4))


def test_g_decreases_with_confinement():
    hoa = np.geomspace(0.01, 1e4, 60)
    for rh2 in (1e-8, 1e-3, 0.5):
        g = [rg.coupling_g(rh2, 1.0, 1 / x, S4) for x in hoa]
        assert np.all(np.diff(g) < 0)


def test_classify_examples():
    r = rg.classify(0.01, 1.0, 0.01)
    assert r.region == rg.REGION_I
    assert r.confinement_parameter == "rho a h"
    assert r.confinement_value == pytest.approx(1e-4)
    assert r.strong_confinement
    assert rg.classify(1e-10, 1.0, 0.2).region == rg.REGION_II
    # q = 1 exactly: h/a = |ln(rho h^2)|
    assert rg.classify(math.exp(-5.0), 1.0, 0.2).region == rg.CROSSOVER


def test_classify_outside_strong_confinement():
    r = rg.classify(3.0, 1.0, 0.1)
    assert r.region == rg.REGION_I
    assert not r.strong_confinement
    assert r.q == math.inf


def test_band_is_configurable():
    assert rg.classify(math.exp(-5.0), 1.0, 0.1, band=4).region == rg.CROSSOVER
    assert rg.classify(math.exp(-5.0), 1.0, 0.1, band=1.5).region == rg.REGION_I


@settings(max_examples=60, deadline=None)
@given(st.floats(-30, -0.01), st.floats(-3, 5), st.floats(-3, 3))
def test_classification_scale_invariant(ln_rh2, log_hoa, log_c):
    h, c = 1.0, 10.0**log_c
    a = h / 10.0**log_hoa
    rho = math.exp(ln_rh2) / h**2
    r1 = rg.classify(rho, h, a)
    r2 = rg.classify(c * c * rho, h / c, a / c)
    assert r1.region == r2.region
    assert r1.g == pytest.approx(r2.g, rel=1e-9)
    assert r1.q == pytest.approx(r2.q, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(-700, -0.01), st.floats(-4, 4))
def test_region_two_interparticle_distance(ln_rh2, log_hoa):
    h = 1.0
    a = h / 10.0**log_hoa
    rep = rg.classify(math.exp(ln_rh2), h, a)
    assume(rep.region == rg.REGION_II)
    # rho^-1/2 >= h exp(h / 4a), compared in logs
    assert -0.5 * ln_rh2 >= h / (4 * a) - 1e-12


def test_ln_a2d_never_underflows():
    r = rg.classify(1e-3, 1.0, 1e-5)
    assert r.ln_a2d_over_h == pytest.approx(-1.0 / (2e-5 * S4))
    assert math.isfinite(r.ln_a2d)


def test_ng_class():
    assert rg.ng_class(0.01) == "IDEAL"
    assert rg.ng_class(1.0) == "GP"
    assert rg.ng_class(100.0) == "TF"
    assert rg.classify(1e-3, 1.0, 0.01, N=1e6).ng_class == "TF"


def test_dilute_energy_2d():
    assert rg.dilute_energy_2d(1.0, -5.0) == pytest.approx(4 * math.pi / 10)
    with pytest.raises(rg.DiluteRangeError):
        rg.dilute_energy_2d(10.0, 2.0)


def test_dilute_energy_definitional_identity():
    rho, ln_a = 0.3, -7.0
    g = 1 / abs(math.log(rho) + 2 * ln_a)
    assert rg.dilute_energy_2d(rho, ln_a) / (4 * math.pi * rho * g) == pytest.approx(1.0, rel=1e-15)


def test_dilute_energy_log_slow():
    rho, ln_a = 0.2, -3.0
    L = math.log(rho) + 2 * ln_a
    ratio = rg.dilute_energy_2d(rho / math.e, ln_a) / rg.dilute_energy_2d(rho, ln_a)
    assert ratio == pytest.approx(abs(L) / (math.e * (abs(L) + 1)), rel=1e-10)


def test_dilute_energy_3d():
    assert rg.dilute_energy_3d(1.0, 0.01) == pytest.approx(0.04 * math.pi)
    assert rg.dilute_energy_3d(1.0, 0.0) == 0.0
    with pytest.warns(RuntimeWarning):
        rg.dilute_energy_3d(1.0, 1.0)


@pytest.mark.parametrize("rh2, hoa", [(1e-3, 1e4), (1e-6, 1e3), (0.05, 500.0)])
def test_two_and_three_dimensional_formulas_match_in_region_one(rh2, hoa):
    h = 1.0
    a = h / hoa
    rho = rh2 / h**2
    ln_a2d = math.log(h) - h / (2 * a * S4)
    e2 = rg.dilute_energy_2d(rho, ln_a2d)
    dev = abs(e2 / (4 * math.pi * rho * S4 * a / h) - 1)
    assert dev <= 2 * abs(math.log(rh2)) * (a / h) * S4
