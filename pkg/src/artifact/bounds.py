"""Temple lower bounds and Dyson-type potentials in 3D and 2D."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad, simpson
from scipy.linalg import solveh_banded

from .numerics import Grid1D, Stencil1D, dirichlet_stencil, stencil_eigs
from .potentials import Potential
from .scattering import solve_scattering_2d
from .transverse import default_grid


class TempleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Temple


@dataclass(frozen=True)
class TempleInput:
    """Trial-state statistics of H; ``gap_floor`` bounds E_1 from below.

    ``reference`` is an optional ground energy of an unperturbed part,
    used only for the multiplicative diagnostic form.
    """

    expectation: float
    second_moment: float
    gap_floor: float
    reference: float | None = None

    def __post_init__(self):
        var = self.second_moment - self.expectation**2
        if var < -1e-12 * max(self.second_moment, 1.0):
            raise ValueError(f"<H^2> < <H>^2 by {-var:.3g}")


@dataclass(frozen=True)
class TempleBound:
    bound: float
    variance: float
    expectation: float
    multiplicative: float | None

    @property
    def error_term(self) -> float:
        return self.expectation - self.bound


def temple_bound(inp: TempleInput) -> TempleBound:
    """E_0 >= <H> - Var / (E_1 - <H>), valid when E_1 > <H>."""
    e = inp.expectation
    if not inp.gap_floor > e:
        raise TempleError(
            f"gap floor {inp.gap_floor:.10g} does not exceed <H> = {e:.10g}; no Temple bound"
        )
    var = max(inp.second_moment - e * e, 0.0)
    bound = e - var / (inp.gap_floor - e)
    mult = None
    if inp.reference is not None and e != 0:
        mult = e * (1.0 - var / (e * (inp.gap_floor - inp.reference)))
    return TempleBound(bound, var, e, mult)


@dataclass(frozen=True, eq=False)
class DiscreteHamiltonian:
    """-d^2/dz^2 + V on a Dirichlet stencil."""

    stencil: Stencil1D
    potential: np.ndarray

    @classmethod
    def on_grid(cls, potential, grid: Grid1D) -> "DiscreteHamiltonian":
        st = dirichlet_stencil(grid)
        v = potential(st.x) if callable(potential) else np.asarray(potential, dtype=float)[1:-1]
        return cls(st, np.asarray(v, dtype=float))

    def apply(self, u):
        return self.stencil.apply(u) + self.potential * u

    def inner(self, u, w):
        return float(np.sum(self.stencil.mass * u * w))

    def eigenvalues(self, k: int = 2, tol: float = 1e-14):
        return stencil_eigs(self.stencil, self.potential, k, tol)

    def statistics(self, trial, gap_floor: float | None = None, reference=None) -> TempleInput:
        """<H> and <H^2> = |H psi|^2 for the normalized trial; interior values."""
        psi = np.asarray(trial, dtype=float)
        psi = psi / math.sqrt(self.inner(psi, psi))
        hpsi = self.apply(psi)
        if gap_floor is None:
            gap_floor = float(self.eigenvalues(2)[0][1])
        return TempleInput(self.inner(psi, hpsi), self.inner(hpsi, hpsi), gap_floor, reference)

    def rayleigh(self, trial) -> float:
        psi = np.asarray(trial, dtype=float)
        return self.inner(psi, self.apply(psi)) / self.inner(psi, psi)


@dataclass(frozen=True)
class TempleHX:
    """Temple data for -d^2/dz^2 + V_h + 8 pi a rho s_h^2 with trial s_h."""

    h: float
    a: float
    g: float
    density: float
    expectation: float
    bound: TempleBound
    ground: float
    gap: float

    @property
    def relative_error(self) -> float:
        return self.bound.error_term / self.expectation


def temple_hx(V_perp: Potential, h: float, g: float, density: float,
              grid: Grid1D | None = None) -> TempleHX:
    """Temple bound for the 1D operator at one in-plane point.

    ``V_perp`` is the unit-scale transverse potential and ``grid`` its
    unit-scale grid (rescaled here by h).  ``density`` is |phi(x)|^2 and
    a = g h / int s^4 is chosen so that the expectation in the trial s_h
    is e_perp/h^2 + 8 pi g density.  The gap floor is the first excited
    level of the unperturbed operator, which the positive perturbation
    can only raise.
    """
    if grid is None:
        grid = default_grid(V_perp)
    st = dirichlet_stencil(grid.scaled(h))
    v = V_perp.scaled(h)(st.x)
    free_vals, free_vecs = stencil_eigs(st, v, 2)
    s = np.abs(free_vecs[:, 0])
    s4 = float(np.sum(st.mass * s**4))
    a = g / s4
    H = DiscreteHamiltonian(st, v + 8.0 * math.pi * a * density * s * s)
    inp = H.statistics(s, gap_floor=float(free_vals[1]), reference=float(free_vals[0]))
    ground = float(H.eigenvalues(1)[0][0])
    return TempleHX(h, a, g, density, inp.expectation, temple_bound(inp), ground,
                    float(free_vals[1] - free_vals[0]))


# ---------------------------------------------------------------------------
# 3D Dyson potential


def dyson_u3d(R: float) -> Potential:
    """(24/7) R^-3 on (R/2, R), zero elsewhere; integral 4 pi."""
    if not R > 0:
        raise ValueError("R must be positive")
    height = 24.0 / 7.0 / R**3

    def prof(r):
        r = np.abs(np.asarray(r, dtype=float))
        return np.where((r > 0.5 * R) & (r < R), height, 0.0)

    return Potential("dyson-3d", prof, range=R, breakpoints=(0.5 * R, R), meta={"height": height})


def u3d_integral_closed(R: float) -> float:
    height = 24.0 / 7.0 / R**3
    return height * 4.0 * math.pi / 3.0 * (R**3 - (0.5 * R) ** 3)


def radial_integral_3d(pot: Potential, r_max: float, n: int = 2000) -> float:
    """int pot d^3x by the composite midpoint rule on a grid through the breakpoints."""
    nodes = sorted({0.0, r_max, *[b for b in pot.breakpoints if 0 < b < r_max]})
    total = 0.0
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        edges = np.linspace(lo, hi, n + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        total += float(np.sum(pot(mid) * 4.0 * math.pi * mid**2)) * (hi - lo) / n
    return total


# ---------------------------------------------------------------------------
# 2D: E_{R, eps}, the recursion and the modified Dyson potential


def e_r_epsilon(W: Potential, R: float, epsilon: float) -> float:
    """min of eps-weighted kinetic + 1/2 W inside supp W, plain kinetic to R; psi(R) = 1."""
    return solve_scattering_2d(W, R, epsilon).energy


def e_r_epsilon_direct(W: Potential, R: float, epsilon: float, n_inner: int = 20000,
                       per_decade: int = 4000) -> float:
    """Same minimum by P1 finite elements on [0, R] (independent of the ODE path).

    Nodes are uniform on the support of W (plus its breakpoints) and
    geometric beyond.  The quadratic form is assembled with two-point
    Gauss quadrature of 2 pi r (1/2 W) per element and exact integrals of
    2 pi r k for the gradient term; the minimizer solves one banded system.
    """
    RW = min(W.range, R)
    core = W.hard_core
    if W.is_zero or RW == 0.0:
        return 0.0
    inner_nodes = sorted({core, RW, *[b for b in W.breakpoints if core < b < RW]})
    pieces = []
    span = RW - core
    for lo, hi in zip(inner_nodes[:-1], inner_nodes[1:]):
        k = max(int(math.ceil(n_inner * (hi - lo) / span)), 2)
        pieces.append(np.linspace(lo, hi, k + 1)[:-1])
    if R > RW:
        k = max(int(math.ceil(math.log10(R / RW) * per_decade)), 2)
        pieces.append(np.geomspace(RW, R, k + 1)[:-1])
    r = np.concatenate(pieces + [np.array([R])])
    lo, hi = r[:-1], r[1:]
    h = hi - lo
    kappa = np.where(hi <= RW * (1 + 1e-14), epsilon, 1.0)
    stiff = kappa * math.pi * (lo + hi) / h  # int 2 pi r k (1/h)^2 dr
    t, w = leggauss(2)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    pts = lo[:, None] + h[:, None] * t[None, :]
    wv = 0.5 * W(pts) * 2.0 * math.pi * pts * (h[:, None] * w[None, :])
    if core > 0:
        wv[0] = np.where(np.isfinite(wv[0]), wv[0], 0.0)
    b0, b1 = 1.0 - t, t
    m00 = np.sum(wv * b0 * b0, axis=1)
    m01 = np.sum(wv * b0 * b1, axis=1)
    m11 = np.sum(wv * b1 * b1, axis=1)
    n = r.size
    diag = np.zeros(n)
    off = np.zeros(n - 1)
    diag[:-1] += stiff + m00
    diag[1:] += stiff + m11
    off += -stiff + m01
    # unknowns: all nodes but the last (psi(R) = 1); psi(core) = 0 for a hard core
    first = 1 if core > 0 else 0
    d = diag[first:-1]
    rhs = np.zeros(d.size)
    rhs[-1] = -off[-1]
    band = np.zeros((2, d.size))
    band[0, 1:] = off[first:-1]
    band[1] = d
    psi = solveh_banded(band, rhs)
    full = np.zeros(n)
    full[first:-1] = psi
    full[-1] = 1.0
    quad_form = float(np.sum(diag * full * full) + 2.0 * np.sum(off * full[:-1] * full[1:]))
    return quad_form


def dyson_recursion(E_R_eps: float, R: float, R_prime: float) -> float:
    """E_{R', eps} = 2 pi / (ln(R'/R) + 2 pi / E_{R, eps})."""
    if R_prime < R:
        raise ValueError("R' must be at least R")
    if E_R_eps < 0:
        raise ValueError("E_{R,eps} must be nonnegative")
    if E_R_eps == 0.0:
        return 0.0
    return 2.0 * math.pi / (math.log(R_prime / R) + 2.0 * math.pi / E_R_eps)


def recursion_family(E_R_eps: float, R: float) -> Callable:
    """R' -> E_{R', eps} from one value at R (vectorized)."""

    def E(Rp):
        Rp = np.asarray(Rp, dtype=float)
        if E_R_eps == 0.0:
            return np.zeros_like(Rp)
        return 2.0 * math.pi / (np.log(Rp / R) + 2.0 * math.pi / E_R_eps)

    return E


def hard_disc_family(ln_a: float) -> Callable:
    """R' -> 2 pi / ln(R'/a) with ln a given."""

    def E(Rp):
        return 2.0 * math.pi / (np.log(np.asarray(Rp, dtype=float)) - ln_a)

    return E


@dataclass(frozen=True, eq=False)
class DysonPotential2D:
    """Constant height 1/nu on [R, R_tilde]; nu = 2 pi int E^-1 R' dR'."""

    R: float
    R_tilde: float
    epsilon: float
    nu: float
    admissibility: float
    ln_a: float | None = None

    def profile(self, r):
        r = np.asarray(r, dtype=float)
        return np.where((r >= self.R) & (r <= self.R_tilde), 1.0 / self.nu, 0.0)

    __call__ = profile

    @property
    def asymptote(self) -> float | None:
        """R~^2 ln(R~^2 / a^2) / 4 when ln a is known."""
        if self.ln_a is None:
            return None
        return 0.25 * self.R_tilde**2 * 2.0 * (math.log(self.R_tilde) - self.ln_a)

    @property
    def deviation(self) -> float | None:
        asym = self.asymptote
        return None if asym is None else abs(self.nu / asym - 1.0)


def dyson_u2d(R: float, R_tilde: float, epsilon: float, E_of_Rprime: Callable,
              per_decade: int = 256, ln_a: float | None = None) -> DysonPotential2D:
    """The convenient choice of the modified Dyson potential.

    nu is integrated in t = ln R' by Simpson's rule with ``per_decade``
    points per decade (at least 64); the admissibility integral is checked
    independently by adaptive quadrature and must not exceed 1.
    """
    if not R_tilde > R:
        raise ValueError("R~ must exceed R: empty support")
    if per_decade < 64:
        raise ValueError("nu needs at least 64 points per decade")
    grid = Grid1D.log_radial(R, R_tilde, per_decade)
    r = grid.points
    E = np.asarray(E_of_Rprime(r), dtype=float)
    if not np.all(E > 0):
        raise ValueError("E_{R', eps} must be positive on [R, R~]")
    nu = 2.0 * math.pi * float(simpson(r * r / E, x=np.log(r)))
    if not (nu > 0 and math.isfinite(nu)):
        raise ValueError(f"nu quadrature failed: {nu}")

    def integrand(t):
        rp = math.exp(t)
        return rp * rp / float(np.asarray(E_of_Rprime(np.array([rp])))[0])

    val, _ = quad(integrand, math.log(R), math.log(R_tilde), epsabs=0.0, epsrel=1e-12, limit=200)
    adm = 2.0 * math.pi * val / nu
    if adm > 1.0 + 1e-8:
        raise ValueError(f"admissibility integral {adm:.12g} exceeds 1")
    return DysonPotential2D(R, R_tilde, epsilon, nu, adm, ln_a)


def nu_hard_disc(R: float, R_tilde: float, ln_a: float) -> float:
    """Closed form of nu for E = 2 pi / ln(r/a): [r^2 ln(r/a)/2 - r^2/4] from R to R~."""

    def F(r):
        return 0.5 * r * r * (math.log(r) - ln_a) - 0.25 * r * r

    return F(R_tilde) - F(R)
