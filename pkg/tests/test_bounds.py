import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact import bounds as bd
from artifact.numerics import Grid1D
from artifact.potentials import hard_core, harmonic, quartic, soft_disc, soft_gaussian_bump, zero


def test_temple_zero_variance_is_exact():
    b = bd.temple_bound(bd.TempleInput(1.5, 2.25, 4.0))
    assert b.bound == 1.5
    assert b.error_term == 0.0


def test_temple_needs_gap():
    with pytest.raises(bd.TempleError):
        bd.temple_bound(bd.TempleInput(3.0, 9.5, 3.0))


def test_temple_rejects_negative_variance():
    with pytest.raises(ValueError):
        bd.TempleInput(2.0, 3.0, 5.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 10.0), st.floats(0.0, 5.0), st.floats(0.01, 10.0))
def test_temple_below_expectation(e, var, gap):
    b = bd.temple_bound(bd.TempleInput(e, e * e + var, e + gap))
    assert b.bound <= e
    assert b.bound == pytest.approx(e - var / gap)


@pytest.fixture(scope="module")
def osc():
    return bd.DiscreteHamiltonian.on_grid(harmonic(), Grid1D.with_spacing(-10.0, 10.0, 0.005))


def test_oscillator_sandwich_with_wide_gaussian(osc):
    sigma = 1.1
    trial = np.exp(-osc.stencil.x**2 / (2 * sigma**2))
    rq = osc.rayleigh(trial)
    # <H> for width sigma: 1/(2 sigma^2) + sigma^2/2
    assert rq == pytest.approx(0.5 / sigma**2 + 0.5 * sigma**2, rel=1e-5)
    b = bd.temple_bound(osc.statistics(trial, gap_floor=3.0))
    E0 = osc.eigenvalues(1)[0][0]
    assert b.bound <= E0 <= rq
    assert b.bound <= 1.0 <= rq


@pytest.mark.parametrize("V", [harmonic(), quartic()])
def test_sandwich_tightens_toward_eigenstate(V):
    H = bd.DiscreteHamiltonian.on_grid(V, Grid1D.with_spacing(-8.0, 8.0, 0.01))
    (E0, E1), vecs = H.eigenvalues(2)
    exact = vecs[:, 0]
    wide = np.exp(-H.stencil.x**2 / 2.6)
    errors = []
    for t in (0.0, 0.5, 0.9, 0.99):
        trial = t * exact + (1 - t) * wide / math.sqrt(H.inner(wide, wide))
        b = bd.temple_bound(H.statistics(trial, gap_floor=E1))
        assert b.bound <= E0 + 1e-10 <= H.rayleigh(trial) + 2e-10
        errors.append(E0 - b.bound)
    assert all(x > y for x, y in zip(errors[:-1], errors[1:]))


def test_temple_hx_ladder():
    rows = [bd.temple_hx(harmonic(), h, 0.5, 0.3) for h in (0.2, 0.1, 0.05)]
    for r in rows:
        assert r.bound.bound <= r.ground <= r.expectation
        # <H> = e_perp/h^2 + 8 pi g |phi|^2 up to the discretization of e_perp
        assert r.expectation == pytest.approx(1 / r.h**2 + 8 * math.pi * 0.5 * 0.3, rel=1e-4)
    rel = [r.relative_error for r in rows]
    assert rel[0] > rel[1] > rel[2]
    # error term scales like (drive)^2 / gap ~ h^2
    for r in rows:
        assert r.bound.error_term <= 2.0 * (8 * math.pi * 0.5 * 0.3) ** 2 / r.gap


# 3D Dyson potential


def test_dyson_u3d_values_and_support():
    U = bd.dyson_u3d(2.0)
    assert U(np.array([1.5]))[0] == pytest.approx(3.0 / 7.0)
    assert U(np.array([1.0 - 1e-9, 2.0 + 1e-9, 0.2]))[0] == 0.0
    assert np.all(U(np.array([1.0 - 1e-9, 2.0 + 1e-9, 0.2])) == 0.0)


@pytest.mark.parametrize("R", [0.3, 1.0, 7.5])
def test_dyson_u3d_normalization(R):
    assert bd.u3d_integral_closed(R) == pytest.approx(4 * math.pi, abs=1e-12)
    assert bd.radial_integral_3d(bd.dyson_u3d(R), 2 * R) == pytest.approx(4 * math.pi, rel=1e-6)


# 2D energies


@pytest.mark.parametrize("eps", [0.1, 1.0, 3.0])
def test_hard_disc_energy_ignores_epsilon(eps):
    assert bd.e_r_epsilon(hard_core(0.5), 4.0, eps) == pytest.approx(2 * math.pi / math.log(8.0), rel=1e-9)


def test_free_energy_is_zero():
    assert bd.e_r_epsilon(zero(), 3.0, 0.7) == 0.0


def test_soft_disc_against_direct_minimization():
    direct = bd.e_r_epsilon_direct(soft_disc(0.1), 1.0, 0.5)
    assert bd.e_r_epsilon(soft_disc(0.1), 1.0, 0.5) == pytest.approx(direct, rel=1e-4)


def test_recursion_trivial_cases():
    assert bd.dyson_recursion(1.3, 2.0, 2.0) == 1.3
    assert bd.dyson_recursion(0.0, 2.0, 9.0) == 0.0
    ln_a = math.log(0.1)
    E = 2 * math.pi / (math.log(2.0) - ln_a)
    assert bd.dyson_recursion(E, 2.0, 50.0) == pytest.approx(2 * math.pi / (math.log(50.0) - ln_a), rel=1e-14)
    with pytest.raises(ValueError):
        bd.dyson_recursion(E, 2.0, 1.0)


@pytest.mark.parametrize("W", [soft_disc(0.2), soft_gaussian_bump(5.0)])
@pytest.mark.parametrize("eps", [0.3, 1.0])
def test_recursion_matches_direct_solve(W, eps):
    E = bd.e_r_epsilon(W, 1.0, eps)
    for Rp in (3.0, 40.0):
        assert bd.dyson_recursion(E, 1.0, Rp) == pytest.approx(bd.e_r_epsilon(W, Rp, eps), rel=1e-4)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.05, 10.0), st.floats(0.1, 2.0), st.floats(1.1, 3.0))
def test_energy_monotone_in_epsilon_and_potential(lam, eps, factor):
    base = bd.e_r_epsilon(soft_disc(lam), 2.0, eps)
    assert bd.e_r_epsilon(soft_disc(lam), 2.0, eps * factor) >= base
    assert bd.e_r_epsilon(soft_disc(lam * factor), 2.0, eps) >= base


# modified Dyson potential


def test_nu_against_closed_form_and_admissible():
    ln_a = 0.0
    fam = bd.hard_disc_family(ln_a)
    d = bd.dyson_u2d(2.0, 1e4, 1.0, fam, ln_a=ln_a)
    assert d.nu == pytest.approx(bd.nu_hard_disc(2.0, 1e4, ln_a), rel=1e-7)
    assert d.admissibility == pytest.approx(1.0, abs=1e-7)
    assert d.profile(np.array([1.0, 5.0, 2e4])).tolist() == [0.0, 1 / d.nu, 0.0]


def test_nu_increasing_and_asymptote():
    fam = bd.hard_disc_family(0.0)
    ladder = [1e3, 1e4, 1e5, 1e6]
    ds = [bd.dyson_u2d(2.0, x, 1.0, fam, ln_a=0.0) for x in ladder]
    nus = [d.nu for d in ds]
    devs = [d.deviation for d in ds]
    assert all(b > a for a, b in zip(nus[:-1], nus[1:]))
    assert all(b < a for a, b in zip(devs[:-1], devs[1:]))
    assert devs[0] <= 0.10
    # the exact deviation at 1e6 is 1 / (2 ln 1e6) to leading order
    exact = [abs(bd.nu_hard_disc(2.0, x, 0.0) / (0.5 * x * x * math.log(x)) - 1) for x in ladder]
    assert devs == pytest.approx(exact, rel=1e-5)


def test_empty_support_rejected():
    with pytest.raises(ValueError, match="empty"):
        bd.dyson_u2d(5.0, 5.0, 1.0, bd.hard_disc_family(0.0))


def test_coarse_nu_grid_rejected():
    with pytest.raises(ValueError):
        bd.dyson_u2d(2.0, 10.0, 1.0, bd.hard_disc_family(0.0), per_decade=16)
