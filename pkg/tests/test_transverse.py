import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact.numerics import Grid1D
from artifact.potentials import bumped_harmonic, box, harmonic, quartic
from artifact.transverse import NonConfiningError, scale_mode, solve_transverse

# lowest eigenvalue of -d^2/dz^2 + z^4, known to many digits
QUARTIC_E0 = 1.0603620904841829


@pytest.fixture(scope="module")
def osc():
    return solve_transverse(harmonic())


def test_harmonic_mode(osc):
    assert osc.e_perp == pytest.approx(1.0, abs=1e-5)
    assert osc.e_perp_excited == pytest.approx(3.0, abs=1e-5)
    assert osc.s4 == pytest.approx((2 * math.pi) ** -0.5, abs=1e-5)
    assert osc.s_inf_sq == pytest.approx(math.pi**-0.5, abs=1e-5)
    assert osc.norm() == pytest.approx(1.0, abs=1e-12)


def test_box_mode():
    m = solve_transverse(box(1.0))
    assert m.e_perp == pytest.approx(math.pi**2, rel=1e-6)
    assert m.e_perp_excited == pytest.approx(4 * math.pi**2, rel=1e-6)
    assert m.s4 == pytest.approx(1.5, rel=1e-6)


def test_quartic_mode():
    assert solve_transverse(quartic()).e_perp == pytest.approx(QUARTIC_E0, abs=1e-5)


def test_mode_is_even_and_positive():
    m = solve_transverse(bumped_harmonic())
    np.testing.assert_allclose(m.s, m.s[::-1], atol=1e-10)
    assert np.all(m.s[1:-1] > 0)
    assert m.gap > 0


def test_too_small_domain_is_not_confining():
    with pytest.raises(NonConfiningError):
        solve_transverse(harmonic(), Grid1D.with_spacing(-2.0, 2.0, 0.01))


def test_box_grid_must_span_well():
    with pytest.raises(ValueError):
        solve_transverse(box(1.0), Grid1D.uniform(-0.4, 0.4, 100))


@settings(max_examples=10, deadline=None)
@given(st.floats(0.02, 3.0))
def test_scaling_matches_direct_solve(h):
    V = harmonic()
    unit = solve_transverse(V, Grid1D.with_spacing(-8.0, 8.0, 0.01))
    scaled = scale_mode(unit, h)
    direct = solve_transverse(V.scaled(h), unit.grid.scaled(h))
    assert scaled.e_perp == pytest.approx(direct.e_perp, rel=1e-9)
    assert scaled.e_perp_excited == pytest.approx(direct.e_perp_excited, rel=1e-9)
    assert scaled.s4 == pytest.approx(direct.s4, rel=1e-9)
    assert scaled.norm() == pytest.approx(1.0, abs=1e-12)


def test_scale_rejects_nonpositive(osc):
    with pytest.raises(ValueError):
        scale_mode(osc, 0.0)
