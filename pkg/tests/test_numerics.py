import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact import numerics as nm
from artifact.potentials import harmonic


def _well_eig(n, dx, L):
    # exact eigenvalues of the 3-point Dirichlet Laplacian on [0, L]
    return 4.0 / dx**2 * math.sin(n * math.pi * dx / (2.0 * L)) ** 2


def test_box_matches_discrete_closed_form():
    L = math.pi
    grid = nm.Grid1D.uniform(0.0, L, 401)
    dx = grid.spacing[0]
    res = nm.eigs_sturm_liouville(np.zeros_like, grid, 3, tol=1e-14)
    for n, r in enumerate(res, 1):
        assert r.eigenvalue == pytest.approx(_well_eig(n, dx, L), rel=1e-10)


def test_harmonic_levels():
    grid = nm.Grid1D.with_spacing(-8.0, 8.0, 0.004)
    vals = [r.eigenvalue for r in nm.eigs_sturm_liouville(harmonic(), grid, 3)]
    assert vals == pytest.approx([1.0, 3.0, 5.0], abs=1e-4)


def test_second_order_convergence_ratio():
    V = harmonic()
    errs = []
    for dx in (0.04, 0.02, 0.01):
        grid = nm.Grid1D.with_spacing(-8.0, 8.0, dx)
        errs.append(nm.eigs_sturm_liouville(V, grid, 1)[0].eigenvalue)
    ratio = (errs[0] - errs[1]) / (errs[1] - errs[2])
    assert 3.5 <= ratio <= 4.5


def test_richardson_beats_plain():
    grid = nm.Grid1D.with_spacing(-8.0, 8.0, 0.04)
    plain = nm.eigs_sturm_liouville(harmonic(), grid, 1)[0].eigenvalue
    rich = nm.eigs_sturm_liouville(harmonic(), grid, 1, extrapolate=True)[0].eigenvalue
    assert abs(rich - 1.0) < 0.05 * abs(plain - 1.0)


def test_eigenvectors_normalized_and_positive():
    grid = nm.Grid1D.with_spacing(-6.0, 6.0, 0.01)
    r = nm.eigs_sturm_liouville(harmonic(), grid, 1)[0]
    assert grid.integrate(r.eigenvector**2) == pytest.approx(1.0, rel=1e-10)
    assert np.all(r.eigenvector[1:-1] > 0)


def test_k_too_large():
    with pytest.raises(ValueError):
        nm.eigs_sturm_liouville(np.zeros_like, nm.Grid1D.uniform(0, 1, 4), 3)


def test_even_stencil_matches_full_even_sector():
    full = nm.Grid1D.uniform(-3.0, 3.0, 601)
    half = nm.Grid1D.uniform(0.0, 3.0, 301)
    w_full, _ = nm.stencil_eigs(nm.dirichlet_stencil(full), lambda z: z**2, 3, tol=1e-14)
    w_half, _ = nm.stencil_eigs(nm.even_stencil(half), lambda z: z**2, 2, tol=1e-14)
    assert w_half == pytest.approx(w_full[[0, 2]], rel=1e-11)


def test_radial_stencil_2d_oscillator():
    st2 = nm.radial_stencil(8.0, 4000)
    w, _ = nm.stencil_eigs(st2, lambda r: r**2, 1)
    assert w[0] == pytest.approx(2.0, abs=1e-5)
    assert st2.mass.sum() == pytest.approx(math.pi * 64.0, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(3, 40))
def test_quadratic_form_is_mass_inner_product_of_apply(seed, n):
    rng = np.random.default_rng(seed)
    grid = nm.Grid1D(np.cumsum(rng.uniform(0.1, 1.0, n)))
    s = nm.dirichlet_stencil(grid)
    u = rng.normal(size=s.n)
    assert s.quadratic_form(u) == pytest.approx(np.sum(s.mass * u * s.apply(u)), rel=1e-10)
    assert s.quadratic_form(u) >= 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 30), st.integers(1, 4))
def test_thomas_matches_dense(seed, n, m):
    rng = np.random.default_rng(seed)
    off = rng.normal(size=n - 1)
    diag = np.abs(rng.normal(size=(n, m))) + 2.5
    rhs = rng.normal(size=(n, m))
    x = nm.solve_tridiagonal(diag, off, rhs)
    for j in range(m):
        A = np.diag(diag[:, j]) + np.diag(off, 1) + np.diag(off, -1)
        np.testing.assert_allclose(x[:, j], np.linalg.solve(A, rhs[:, j]), rtol=1e-10, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 2.0), st.floats(0.05, 1.0))
def test_with_spacing_never_coarser(dx, length):
    g = nm.Grid1D.with_spacing(0.0, length, dx)
    assert g.spacing.max() <= dx * (1 + 1e-12)
    assert g.points[-1] == pytest.approx(length)


def test_grid_rejects_bad_points():
    with pytest.raises(ValueError):
        nm.Grid1D(np.array([0.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        nm.Grid1D(np.array([0.0, 1.0]), "log-radial")


# u'' = q u


@pytest.mark.parametrize("k", [0.5, 2.0, 7.0])
def test_radial_ode_constant_growth(k):
    grid = nm.Grid1D.uniform(0.0, 3.0, 301)
    u, du = nm.integrate_radial_ode(lambda x: k * k * np.ones_like(x), grid, (1.0, 0.0), True)
    x = grid.points
    np.testing.assert_allclose(u, np.cosh(k * x), rtol=1e-9)
    np.testing.assert_allclose(du, k * np.sinh(k * x), rtol=1e-9, atol=1e-12)


def test_radial_ode_oscillatory():
    grid = nm.Grid1D.uniform(0.0, 10.0, 2001)
    u = nm.integrate_radial_ode(lambda x: -np.ones_like(x), grid, (0.0, 1.0))
    np.testing.assert_allclose(u, np.sin(grid.points), atol=1e-9)


def test_radial_ode_piecewise_step_exact_on_nodes():
    # q = 4 on [0, 1), 0 after: u = cosh(2x) then linear continuation
    grid = nm.Grid1D.uniform(0.0, 2.0, 21)
    u, du = nm.integrate_radial_ode(lambda x: np.where(x < 1.0, 4.0, 0.0), grid, (1.0, 0.0), True)
    x = grid.points
    expect = np.where(x <= 1.0, np.cosh(2 * x), math.cosh(2) + 2 * math.sinh(2) * (x - 1.0))
    np.testing.assert_allclose(u, expect, rtol=1e-12)


def test_radial_ode_rescales_instead_of_overflowing():
    grid = nm.Grid1D.uniform(0.0, 1.0, 11)
    u = nm.integrate_radial_ode(lambda x: 1e6 * np.ones_like(x), grid, (1.0, 0.0))
    assert np.all(np.isfinite(u))
    # growth ratio between neighbouring nodes is exp(1000 * 0.1) in exact arithmetic
    assert math.log(u[-1] / u[-2]) == pytest.approx(100.0, rel=1e-9)


# gradient flow on the sphere


def _quadratic(A):
    return (lambda x: float(x @ A @ x)), (lambda x: 2.0 * A @ x)


def test_flow_finds_lowest_eigenvalue_monotonically():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.normal(size=(12, 12)))
    A = Q @ np.diag(np.arange(1.0, 13.0)) @ Q.T
    e, g = _quadratic(A)
    res = nm.gradient_flow_minimize(e, g, rng.normal(size=12), np.ones(12), tol=1e-14)
    assert res.energy == pytest.approx(1.0, abs=1e-6)
    assert all(b <= a + 1e-15 for a, b in zip(res.energies[:-1], res.energies[1:]))


def test_flow_at_minimizer_stops_at_once():
    A = np.diag([1.0, 2.0, 5.0])
    e, g = _quadratic(A)
    res = nm.gradient_flow_minimize(e, g, np.array([1.0, 0.0, 0.0]), np.ones(3))
    assert res.converged
    assert res.iterations <= 2
    assert res.energy == 1.0


def test_flow_respects_weights():
    w = np.array([0.5, 2.0])
    A = np.diag([3.0, 1.0])
    res = nm.gradient_flow_minimize(lambda x: float(np.sum(w * x * (A @ x))),
                                    lambda x: 2.0 * A @ x, np.array([1.0, 1.0]), w, tol=1e-14)
    assert np.sum(w * res.x**2) == pytest.approx(1.0, rel=1e-12)
    assert res.energy == pytest.approx(1.0, abs=1e-8)
