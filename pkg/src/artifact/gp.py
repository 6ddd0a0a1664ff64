"""Gross-Pitaevskii ground states in 2D (radial) and 3D (cylindrical).

Both functionals are minimized by the preconditioned, normalized gradient
flow of ``numerics``.  Traps are rotationally symmetric in the plane, so
the 2D problem lives on a cell-centred radial grid and the 3D problem on a
(r, z) grid.  Thomas-Fermi quantities have closed forms for homogeneous
traps and the box; other traps go through a flagged numeric path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigvalsh_tridiagonal, solveh_banded
from scipy.integrate import quad
from scipy.optimize import brentq

from .numerics import (
    FLOW_TOL,
    Grid1D,
    Stencil1D,
    dirichlet_stencil,
    even_stencil,
    gradient_flow_minimize,
    radial_stencil,
    solve_tridiagonal,
    stencil_eigs,
)
from .potentials import Potential
from .transverse import TRUNCATION_FACTOR, TransverseMode

DEFAULT_CELLS = 8000
PRECONDITION_SHIFT = 1.0
Z_RESOLUTION = 40  # dz <= h / Z_RESOLUTION
R_RESOLUTION = 200  # dr <= L / R_RESOLUTION


class GridResolutionError(ValueError):
    pass


class FixedPointError(RuntimeError):
    def __init__(self, message, history):
        super().__init__(message)
        self.history = history


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class PeriodicBox:
    """Flat torus of side ``side``; only constant states are represented."""

    side: float

    @property
    def x(self):
        return np.zeros(1)

    @property
    def mass(self):
        return np.array([self.side**2])

    def quadratic_form(self, u, axis=0):
        return 0.0

    def apply(self, u, axis=0):
        return np.zeros_like(u)


def radial_extent(V: Potential, energy: float) -> float:
    """Smallest tried radius with V(r) >= TRUNCATION_FACTOR * energy."""
    target = TRUNCATION_FACTOR * max(energy, 1e-12)
    if V.is_homogeneous and V.coefficient > 0:
        return (target / V.coefficient) ** (1.0 / V.degree)
    r = 1.0
    for _ in range(200):
        if float(V(np.array([r]))[0]) >= target:
            return r
        r *= 1.25
    raise ValueError(f"{V.name} does not reach {target:.4g}; not confining")


def _linear_ground(V: Potential, n: int = 400) -> float:
    r = 2.0
    for _ in range(100):
        st = radial_stencil(r, n)
        e = float(stencil_eigs(st, V(st.x), 1)[0][0])
        if float(V(np.array([r]))[0]) >= TRUNCATION_FACTOR * e:
            return e
        r *= 1.5
    raise ValueError(f"{V.name} is not confining")


def energy_scale(V: Potential, Ng: float) -> float:
    """Upper estimate of the in-plane energy scale: linear ground vs TF mu."""
    e = _linear_ground(V)
    if Ng > 0:
        e = max(e, tf_solve(V, 1.0, Ng).mu_tf)
    return e


def default_radial_grid(V: Potential, Ng: float, n: int = DEFAULT_CELLS) -> Stencil1D:
    return radial_stencil(radial_extent(V, energy_scale(V, Ng)), n)


# ---------------------------------------------------------------------------
# states


@dataclass(eq=False)
class GPState:
    """Normalized minimizer with its energy per particle and chemical potential.

    ``coupling`` is the drive: Ng in 2D, Na in 3D.  ``phi`` is indexed like
    ``grid.x`` in 2D and as (r, z) in 3D; ``weights`` has the same shape.
    """

    phi: np.ndarray
    weights: np.ndarray
    grid: object
    energy: float
    mu: float
    coupling: float
    converged: bool
    iterations: int
    energies: list = field(default_factory=list)
    kind: str = "radial"
    message: str = ""
    meta: dict = field(default_factory=dict)

    def norm(self) -> float:
        return float(np.sum(self.weights * self.phi**2))

    def quartic(self) -> float:
        return float(np.sum(self.weights * self.phi**4))


# ---------------------------------------------------------------------------
# 2D


def gp2d_energy(phi, V_L: Potential, Ng: float, grid) -> float:
    """Quadrature value of int |grad phi|^2 + V_L |phi|^2 + 4 pi Ng |phi|^4."""
    phi = np.asarray(phi, dtype=float)
    m = grid.mass
    kinetic = float(grid.quadratic_form(phi))
    if isinstance(grid, PeriodicBox):
        trap = 0.0
    else:
        trap = float(np.sum(m * V_L(grid.x) * phi**2))
    return kinetic + trap + 4.0 * math.pi * Ng * float(np.sum(m * phi**4))


def _box_state(side: float, Ng: float) -> GPState:
    grid = PeriodicBox(side)
    phi = np.array([1.0 / side])
    e = 4.0 * math.pi * Ng / side**2
    return GPState(phi, grid.mass, grid, e, 2.0 * e, Ng, True, 0, [e], kind="periodic-box",
                   message="constant minimizer")


def minimize_gp2d(
    V_L: Potential,
    Ng: float,
    grid: Stencil1D | None = None,
    tol: float = FLOW_TOL,
    max_iter: int = 2000,
    phi0=None,
) -> GPState:
    """Minimize the 2D GP functional on a radial grid (or the periodic box)."""
    if Ng < 0:
        raise ValueError("Ng must be nonnegative")
    if V_L.box is not None:
        return _box_state(V_L.box, Ng)
    if grid is None:
        grid = default_radial_grid(V_L, Ng)
    m = grid.mass
    v = V_L(grid.x)
    c4 = 4.0 * math.pi * Ng
    d_kin, e_sym = grid.symmetric_form()
    sq = np.sqrt(m)

    def energy(phi):
        return float(grid.quadratic_form(phi) + np.sum(m * (v + c4 * phi * phi) * phi * phi))

    def gradient(phi):
        return 2.0 * (grid.apply(phi) + (v + 2.0 * c4 * phi * phi) * phi)

    def precondition(phi):
        # H_phi + 16 pi Ng phi^2 shifted to just above its floor
        d_h = d_kin + v + 2.0 * c4 * phi * phi
        lam0 = float(eigvalsh_tridiagonal(d_h, e_sym, select="i", select_range=(0, 0))[0])
        d = d_h + 2.0 * c4 * phi * phi - lam0 + PRECONDITION_SHIFT
        band = np.zeros((2, d.size))
        band[0, 1:] = e_sym
        band[1] = d

        def apply(u):
            return solveh_banded(band, sq * u) / sq

        return apply

    if phi0 is None:
        _, u = stencil_eigs(grid, v, 1)
        phi0 = u[:, 0]
        if Ng > 1:
            tf = tf_solve(V_L, 1.0, Ng)
            phi0 = np.sqrt(tf.rho_tf(grid.x)) + 1e-3 * phi0
    res = gradient_flow_minimize(energy, gradient, phi0, m, tol=tol, precondition=precondition,
                                 max_iter=max_iter)
    phi = res.x
    quart = float(np.sum(m * phi**4))
    return GPState(phi, m, grid, res.energy, res.energy + c4 * quart, Ng, res.converged,
                   res.iterations, res.energies, message=res.message)


@dataclass(frozen=True)
class ScaledEnergy:
    per_particle: float
    total: float
    unit_state: GPState


def gp2d_scaled(N: float, L: float, g: float, V: Potential, grid: Stencil1D | None = None,
                tol: float = FLOW_TOL) -> ScaledEnergy:
    """E(N, L, g) from the unit problem at drive Ng: per particle E(1,1,Ng)/L^2."""
    if not L > 0:
        raise ValueError("L must be positive")
    state = minimize_gp2d(V, N * g, grid, tol)
    e = state.energy / L**2
    return ScaledEnergy(e, N * e, state)


# ---------------------------------------------------------------------------
# 3D


@dataclass(frozen=True, eq=False)
class CylindricalGrid:
    """(r, z) grid: cell-centred radial stencil times a z stencil.

    With ``half`` the z stencil is the even half [0, Z] (weights doubled),
    otherwise the full Dirichlet grid [-Z, Z].
    """

    r: Stencil1D
    z: Stencil1D
    half: bool
    dz: float

    @property
    def dr(self) -> float:
        return float(self.r.x[1] - self.r.x[0])

    @property
    def mass(self) -> np.ndarray:
        return np.outer(self.r.mass, self.z.mass)

    @property
    def shape(self):
        return (self.r.n, self.z.n)


def transverse_extent(V_perp: Potential) -> float:
    """Unit-scale half width with V_perp >= TRUNCATION_FACTOR e_perp."""
    if V_perp.box is not None:
        return 0.5 * V_perp.box
    from .transverse import default_grid

    return float(default_grid(V_perp, 0.01).points[-1])


def cylindrical_grid(r_max: float, dr: float, z_max: float, dz: float, half: bool = True):
    n_r = int(math.ceil(r_max / dr - 1e-9))
    rst = radial_stencil(r_max, n_r)
    if half:
        zst = even_stencil(Grid1D.with_spacing(0.0, z_max, dz))
        step = z_max / zst.n
    else:
        zg = Grid1D.with_spacing(-z_max, z_max, dz)
        zst = dirichlet_stencil(zg)
        step = float(zg.spacing[0])
    return CylindricalGrid(rst, zst, half, step)


def minimize_gp3d(
    V_L: Potential,
    V_perp: Potential,
    Na: float,
    h: float,
    L: float = 1.0,
    grid: CylindricalGrid | None = None,
    tol: float = FLOW_TOL,
    max_iter: int = 2000,
    half: bool = True,
) -> GPState:
    """Minimize the 3D GP functional with trap V_L(r) + h^-2 V_perp(z/h).

    ``V_perp`` is the unit-scale transverse potential.  The flow starts at
    the product of the 2D minimizer (drive Na * int s_h^4) with the
    discrete transverse mode, so the result never exceeds the product
    energy.  ``meta`` records the discrete e_perp, int s_h^4, the 2D drive
    and the product energy on this grid.

    Raises GridResolutionError before solving when dz > h/40 or
    dr > L/200.
    """
    if not (h > 0 and L > 0):
        raise ValueError("h and L must be positive")
    if Na < 0:
        raise ValueError("Na must be nonnegative")
    if V_L.box is not None:
        raise ValueError("3D solves need a confining radial trap, not the periodic box")
    Vh = V_perp.scaled(h)
    if grid is None:
        e2 = energy_scale(V_L, Na * _unit_s4(V_perp) / h)
        grid = cylindrical_grid(radial_extent(V_L, e2), L / R_RESOLUTION,
                                transverse_extent(V_perp) * h, h / Z_RESOLUTION, half)
    problems = []
    if grid.dz > h / Z_RESOLUTION * (1 + 1e-9):
        problems.append(f"dz={grid.dz:.4g} exceeds h/{Z_RESOLUTION}={h / Z_RESOLUTION:.4g}")
    if grid.dr > L / R_RESOLUTION * (1 + 1e-9):
        problems.append(f"dr={grid.dr:.4g} exceeds L/{R_RESOLUTION}={L / R_RESOLUTION:.4g}")
    if problems:
        raise GridResolutionError("; ".join(problems))

    rst, zst = grid.r, grid.z
    vz = np.zeros(zst.n) if Vh.box is not None else Vh(zst.x)
    e_perp, s = stencil_eigs(zst, vz, 1)
    e_perp, s = float(e_perp[0]), np.abs(s[:, 0])
    s4 = float(np.sum(zst.mass * s**4))
    drive2d = Na * s4
    state2d = minimize_gp2d(V_L, drive2d, rst, tol=tol, max_iter=max_iter)
    ansatz = np.outer(state2d.phi, s)

    m = grid.mass
    vr = V_L(rst.x)
    V = vr[:, None] + vz[None, :]
    c4 = 4.0 * math.pi * Na

    def energy(phi):
        kin = float(np.dot(zst.mass, rst.quadratic_form(phi, 0)))
        kin += float(np.dot(rst.mass, zst.quadratic_form(phi, 1)))
        return kin + float(np.sum(m * (V + c4 * phi * phi) * phi * phi))

    def gradient(phi):
        return 2.0 * (rst.apply(phi, 0) + zst.apply(phi, 1) + (V + 2.0 * c4 * phi * phi) * phi)

    dr_sym, er_sym = rst.symmetric_form(vr)
    dz_sym, ez_sym = zst.symmetric_form(vz)
    cache = {}

    def precondition(phi):
        # static: (H_0 - lambda_0 + shift)^-1 by z modes and batched r solves
        if not cache:
            tz = np.diag(dz_sym) + np.diag(ez_sym, 1) + np.diag(ez_sym, -1)
            lam, Q = eigh(tz)
            lr = float(eigvalsh_tridiagonal(dr_sym, er_sym, select="i", select_range=(0, 0))[0])
            shift = PRECONDITION_SHIFT - (lr + lam[0])
            cache.update(Q=Q, diag=dr_sym[:, None] + lam[None, :] + shift, sq=np.sqrt(m))
        Q, diag, sq = cache["Q"], cache["diag"], cache["sq"]

        def apply(u):
            y = (sq * u) @ Q
            x = solve_tridiagonal(diag, er_sym, y)
            return (x @ Q.T) / sq

        return apply

    res = gradient_flow_minimize(energy, gradient, ansatz, m, tol=tol, precondition=precondition,
                                 max_iter=max_iter)
    phi = res.x
    quart = float(np.sum(m * phi**4))
    meta = {
        "e_perp": e_perp,
        "s4": s4,
        "drive2d": drive2d,
        "energy2d": state2d.energy,
        # functional value at the product state, where the flow starts
        "ansatz_energy": res.energies[0],
        "product_energy": e_perp + state2d.energy,
        "converged2d": state2d.converged,
        "h": h,
    }
    return GPState(phi, m, grid, res.energy, res.energy + c4 * quart, Na,
                   res.converged and state2d.converged, res.iterations, res.energies,
                   kind="cylindrical", message=res.message, meta=meta)


def _unit_s4(V_perp: Potential) -> float:
    if V_perp.box is not None:
        return 1.5 / V_perp.box
    if V_perp.is_homogeneous and V_perp.degree == 2.0:
        c = V_perp.coefficient
        return c**0.25 / math.sqrt(2.0 * math.pi)
    from .transverse import solve_transverse

    return solve_transverse(V_perp).s4


# ---------------------------------------------------------------------------
# Thomas-Fermi


@dataclass(frozen=True, eq=False)
class TFResult:
    """TF density (mu - V)_+ / (8 pi coupling) holding N particles.

    ``rho_tf`` is a callable of r.  ``numeric`` marks results from the
    root-finding path for traps without a closed form.
    """

    rho_tf: object
    mu_tf: float
    rho_bar: float
    E_tf: float
    N: float
    coupling: float
    r0: float
    numeric: bool = False


def tf_solve(V_L: Potential, N: float, coupling: float = 1.0, numeric: bool = False) -> TFResult:
    """Thomas-Fermi density for N particles in V_L at the given coupling.

    Homogeneous traps c r^p and the box have closed forms; any other radial
    trap needs ``numeric=True`` and is solved by root-finding on the
    normalization.
    """
    if not (N > 0 and coupling > 0):
        raise ValueError("TF needs N > 0 and coupling > 0")
    g = coupling
    if V_L.box is not None:
        side = V_L.box
        rho = N / side**2

        def rho_box(r, rho=rho):
            return np.full_like(np.asarray(r, dtype=float), rho)

        return TFResult(rho_box, 8.0 * math.pi * g * rho, rho, 4.0 * math.pi * g * rho, N, g,
                        math.inf)
    if V_L.is_homogeneous and V_L.degree > 0:
        p, c = V_L.degree, V_L.coefficient
        mu = (N * 8.0 * g * (p + 2.0) / p * c ** (2.0 / p)) ** (p / (p + 2.0))
        r0 = (mu / c) ** (1.0 / p)
        mr2 = mu * mu * r0 * r0
        rho_bar = mr2 * (0.5 - 2.0 / (p + 2.0) + 1.0 / (2.0 * p + 2.0)) / (32.0 * math.pi * g * g * N)
        trap = mr2 * (1.0 / (p + 2.0) - 1.0 / (2.0 * p + 2.0)) / (4.0 * g)
        E = trap / N + 4.0 * math.pi * g * rho_bar
        return TFResult(_tf_profile(V_L, mu, g), mu, rho_bar, E, N, g, r0)
    if not numeric:
        raise ValueError(f"{V_L.name} is neither homogeneous nor a box; pass numeric=True")
    return _tf_numeric(V_L, N, g)


def _tf_profile(V, mu, g):
    def rho(r):
        return np.maximum(mu - V(np.asarray(r, dtype=float)), 0.0) / (8.0 * math.pi * g)

    return rho


def _tf_numeric(V: Potential, N: float, g: float) -> TFResult:
    """Root-finding path; assumes V increases with r, so the support is a disc."""

    def pot(r):
        return float(V(np.array([r]))[0])

    def edge(mu):
        r = 1.0
        while pot(r) < mu:
            r *= 1.5
            if r > 1e12:
                raise ValueError(f"{V.name} is not confining")
        return brentq(lambda x: pot(x) - mu, 0.0, r, xtol=1e-15, rtol=1e-15)

    def moment(mu, weight):
        r0 = edge(mu)
        val, _ = quad(lambda r: weight(r, max(mu - pot(r), 0.0) / (8.0 * math.pi * g)) * 2.0 * math.pi * r,
                      0.0, r0, epsabs=0.0, epsrel=1e-13, limit=200)
        return val

    v0 = pot(0.0)
    hi = v0 + 1.0
    while moment(hi, lambda r, rho: rho) < N:
        hi = v0 + 2.0 * (hi - v0)
    mu = brentq(lambda m_: moment(m_, lambda r, rho: rho) - N, v0, hi, xtol=1e-14, rtol=1e-14)
    rho_bar = moment(mu, lambda r, rho: rho * rho) / N
    trap = moment(mu, lambda r, rho: pot(r) * rho)
    E = trap / N + 4.0 * math.pi * g * rho_bar
    return TFResult(_tf_profile(V, mu, g), mu, rho_bar, E, N, g, edge(mu), numeric=True)


def mean_density_gp(state: GPState, N: float) -> float:
    """N int |phi|^4."""
    return N * state.quartic()


# ---------------------------------------------------------------------------
# self-consistent coupling


@dataclass(frozen=True, eq=False)
class SelfConsistentG:
    g: float
    rho_bar: float
    g_closed: float
    rho_bar_tf: float
    iterations: int
    method: str
    history: list
    roots: list
    converged: bool

    @property
    def multiple_roots(self) -> bool:
        return len(self.roots) > 1


def _g_formula(rho_bar, h, a, s4):
    return 1.0 / abs(-math.log(rho_bar * h * h) + h / (a * s4))


def self_consistent_g(
    N: float,
    L: float,
    h: float,
    a: float,
    V: Potential,
    mode: TransverseMode,
    tol: float = 1e-8,
    damping: float = 0.5,
    max_iter: int = 60,
    scan_points: int = 6,
    grid: Stencil1D | None = None,
) -> SelfConsistentG:
    """Solve rho_bar = rho_bar_{Ng} with g = |ln(rho_bar a_2D^2)|^-1.

    ``V`` is the unit-scale trap and ``mode`` the unit-scale transverse
    mode.  Damped iteration first; if it has not settled after
    ``max_iter`` steps the scalar equation is bracketed and bisected.
    Sign changes of g -> map(g) - g are then scanned on a geometric ladder
    of ``scan_points`` points around the root to detect other fixed points.
    The closed form with rho_bar from the coupling-1 TF density is
    reported alongside.
    """
    if not all(x > 0 for x in (N, L, h, a)):
        raise ValueError("N, L, h, a must be positive")
    s4 = mode.s4
    if V.box is not None:
        rho_tf = N / (V.box * L) ** 2
    else:
        rho_tf = tf_solve(V, N, 1.0, numeric=not V.is_homogeneous).rho_bar / L**2
    g_closed = _g_formula(rho_tf, h, a, s4)

    if V.box is not None:
        rho = N / (V.box * L) ** 2
        g = _g_formula(rho, h, a, s4)
        return SelfConsistentG(g, rho, g_closed, rho_tf, 1, "exact", [g], [g], True)

    if grid is None:
        grid = default_radial_grid(V, 2.0 * N * max(g_closed, s4 * a / h))
    cache = {}

    def rho_of(g):
        if g not in cache:
            st = minimize_gp2d(V, N * g, grid)
            cache[g] = mean_density_gp(st, N) / L**2
        return cache[g]

    def F(g):
        return _g_formula(rho_of(g), h, a, s4)

    history = []
    g = g_closed
    method = "damped"
    converged = False
    for it in range(1, max_iter + 1):
        new = F(g)
        history.append(g)
        if abs(new - g) <= tol * g:
            g = new
            converged = True
            break
        g = (1.0 - damping) * g + damping * new
    iterations = len(history)
    if not converged:
        method = "bisection"
        lo, hi = g / 2.0, 2.0 * g
        for _ in range(60):
            if F(lo) - lo > 0:
                break
            lo /= 2.0
        for _ in range(60):
            if F(hi) - hi < 0:
                break
            hi *= 2.0
        if not (F(lo) - lo > 0 > F(hi) - hi):
            raise FixedPointError("could not bracket the fixed point", history)
        g = brentq(lambda x: F(x) - x, lo, hi, xtol=tol * g, rtol=tol)
        history.append(g)
        converged = True
    roots = [g]
    if scan_points >= 2:
        ladder = np.geomspace(g / 10.0, 10.0 * g, scan_points)
        signs = [F(x) - x for x in ladder]
        for x0, x1, f0, f1 in zip(ladder[:-1], ladder[1:], signs[:-1], signs[1:]):
            if f0 * f1 < 0 and not (x0 <= g <= x1):
                roots.append(brentq(lambda x: F(x) - x, x0, x1, xtol=tol * x0))
    return SelfConsistentG(g, rho_of(g), g_closed, rho_tf, iterations, method, history,
                           sorted(roots), converged)
