import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import iv

from artifact import scattering as sc
from artifact.potentials import hard_core, soft_disc, soft_gaussian_bump, square_barrier, zero
from artifact.transverse import solve_transverse
from artifact.potentials import harmonic


def _barrier_a(v0, R0):
    k = math.sqrt(v0 / 2.0)
    return R0 - math.tanh(k * R0) / k


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 200.0), st.floats(0.2, 3.0))
def test_square_barrier_length(v0, R0):
    sol = sc.solve_scattering_3d(square_barrier(v0, R0))
    assert sol.a == pytest.approx(_barrier_a(v0, R0), rel=1e-8, abs=1e-12)


def test_hard_core_is_its_radius():
    assert sc.solve_scattering_3d(hard_core(0.7)).a == pytest.approx(0.7, abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 50.0))
def test_length_scales_with_a(scale):
    v = soft_gaussian_bump(6.0)
    base = sc.solve_scattering_3d(v).a
    assert sc.solve_scattering_3d(v, scale).a == pytest.approx(scale * base, rel=1e-8)


def test_f0_bounds():
    sol = sc.solve_scattering_3d(square_barrier(8.0))
    r = sol.grid.points[1:]
    f, df = sol.f0(r), sol.df0(r)
    assert np.all(f >= -1e-6) and np.all(f <= 1 + 1e-6)
    assert np.all(df <= np.minimum(1 / r, sol.a / r**2) + 1e-6)
    far = np.array([4.0, 10.0])
    np.testing.assert_allclose(sol.f0(far), 1 - sol.a / far, rtol=1e-10)


def test_hard_wall_profile():
    sol = sc.solve_scattering_3d(square_barrier(8.0))
    f = sc.hard_wall_profile(sol, 2.0)
    assert f.prefactor == pytest.approx(1 / (1 - sol.a / 2.0))
    assert f.prefactor >= 1.0
    assert f(np.array([2.0 - 1e-12]))[0] == pytest.approx(1.0, abs=1e-9)
    assert np.all(f(np.array([2.0, 3.0, 50.0])) == 1.0)
    assert np.all(f.derivative(np.array([2.5])) == 0.0)


def test_hard_wall_rejects_small_R():
    sol = sc.solve_scattering_3d(hard_core(1.0))
    with pytest.raises(ValueError):
        sc.hard_wall_profile(sol, 0.9)
    sol = sc.solve_scattering_3d(square_barrier(0.5, 1.0))
    with pytest.raises(ValueError, match="range"):
        sc.hard_wall_profile(sol, 0.8)


@pytest.mark.parametrize("v, a, h, R", [
    (square_barrier(8.0), 0.1, 1.0, 0.5),
    (hard_core(1.0), 0.05, 0.5, 0.2),
])
def test_effective_w_integral(v, a, h, R):
    mode = solve_transverse(harmonic())
    sol = sc.solve_scattering_3d(v, a)
    W = sc.effective_w(sc.hard_wall_profile(sol, R), v.scaled(a), mode, h, R)
    assert W.relative_error < 1e-6
    rho = np.linspace(0.0, 1.5 * R, 40)
    w = W.potential(rho)
    assert np.all(w >= 0)
    assert np.all(w[rho >= R] == 0)


# 2D


def _disc_oracle(lam, b, R, eps=1.0):
    # uniform disc of weight lam and radius b: psi = I0(k r) inside, k^2 = lam / (2 pi eps b^2)
    x = math.sqrt(lam / (2 * math.pi * eps))
    I0, I1 = iv(0, x), iv(1, x)
    energy = 2 * math.pi * eps * x * I1 / (I0 + eps * x * I1 * math.log(R / b))
    ln_a = math.log(b) - I0 / (x * I1)
    return energy, ln_a


@pytest.mark.parametrize("lam, b, R", [(0.5, 1.0, 1.0), (3.0, 0.5, 4.0), (40.0, 1.0, 10.0)])
def test_soft_disc_against_bessel(lam, b, R):
    E, ln_a = _disc_oracle(lam, b, R)
    sol = sc.solve_scattering_2d(soft_disc(lam, b), R)
    assert sol.energy == pytest.approx(E, rel=1e-7)
    assert sol.ln_a_scatt == pytest.approx(ln_a, rel=1e-7)
    assert sol.energy_from_length() == pytest.approx(sol.energy, rel=1e-7)


@pytest.mark.parametrize("eps", [0.3, 1.0])
def test_soft_disc_with_epsilon(eps):
    E, _ = _disc_oracle(2.0, 1.0, 1.0, eps)
    assert sc.solve_scattering_2d(soft_disc(2.0), 1.0, eps).energy == pytest.approx(E, rel=1e-7)


def test_hard_disc():
    sol = sc.solve_scattering_2d(hard_core(0.3), 5.0)
    assert sol.ln_a_scatt == pytest.approx(math.log(0.3), abs=1e-9)
    assert sol.energy == pytest.approx(2 * math.pi / math.log(5.0 / 0.3), rel=1e-9)


def test_zero_potential():
    sol = sc.solve_scattering_2d(zero(), 2.0)
    assert sol.energy == 0.0
    assert sol.ln_a_scatt == -math.inf
    assert sol.a_scatt == 0.0


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 20.0), st.floats(1.05, 3.0))
def test_energy_monotone_in_lambda(lam, factor):
    lo = sc.solve_scattering_2d(soft_disc(lam), 2.0).energy
    hi = sc.solve_scattering_2d(soft_disc(lam * factor), 2.0).energy
    assert 0 < lo < hi < 2 * math.pi / math.log(2.0 / 1.0) + 1e-12


def test_eta_is_independent_of_R():
    lam = 0.2
    vals = [sc.eta(lam, R, sc.solve_scattering_2d(soft_disc(lam, R), R).ln_a_scatt)
            for R in (1.0, 7.0)]
    assert vals[0] == pytest.approx(vals[1], abs=1e-6)


def test_perturbative_length():
    assert sc.perturbative_ln_a_scatt(0.5, 2.0) == pytest.approx(math.log(2.0) - 8 * math.pi)
    with pytest.raises(ValueError):
        sc.perturbative_a_scatt(0.0, 1.0)


def test_support_beyond_R_rejected():
    with pytest.raises(ValueError):
        sc.solve_scattering_2d(soft_disc(1.0, 2.0), 1.0)


def test_effective_a2d_log_domain():
    s4 = (2 * math.pi) ** -0.5
    e = sc.effective_a2d(1.0, 0.1, s4)
    assert e.ln_over_h == pytest.approx(-1.0 / (2 * 0.1 * s4))
    assert e.value == pytest.approx(math.exp(e.ln))
    deep = sc.effective_a2d(1.0, 1e-4, s4)
    assert deep.value == 0.0
    assert math.isfinite(deep.ln_over_h)
    with pytest.raises(ValueError):
        sc.effective_a2d(1.0, -1.0, s4)
