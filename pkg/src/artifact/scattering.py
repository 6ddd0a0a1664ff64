"""Zero-energy scattering in 3D and 2D and the effective 2D interaction.

3D: u'' = 1/2 v_a u with u = r f_0, scattering length from u = r - a
outside the range.  2D: the radial Euler equation of the functional
int eps|grad psi|^2 + 1/2 W psi^2 with psi(R) = 1, solved in t = ln r where
it reads (k psi_t)_t = 1/2 r^2 W psi; outside the support psi is affine in
t, which defines a_scatt.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline

from .numerics import Grid1D, integrate_radial_ode
from .potentials import Potential
from .transverse import TransverseMode

FIT_FRACTION = 0.2
FIT_RESIDUAL_TOL = 1e-8


class ScatteringFitError(RuntimeError):
    pass


class ResolutionError(RuntimeError):
    pass


def _piecewise_grid(nodes, spacing, kind="uniform"):
    """Grid through every node in ``nodes`` with spacing <= ``spacing``."""
    nodes = sorted(set(float(x) for x in nodes))
    pieces = []
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        n = max(int(math.ceil((hi - lo) / spacing - 1e-9)), 1)
        pieces.append(np.linspace(lo, hi, n + 1)[:-1])
    pieces.append(np.array([nodes[-1]]))
    return Grid1D(np.concatenate(pieces), kind)


def _line_fit(x, y):
    """Least-squares y = slope * x + icpt; returns slope, icpt, rms residual."""
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, icpt), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + icpt)
    return float(slope), float(icpt), float(np.sqrt(np.mean(resid**2)))


# ---------------------------------------------------------------------------
# 3D


@dataclass(frozen=True, eq=False)
class ScatteringSolution3D:
    """Zero-energy solution u = r f_0, normalized so that u = r - a outside."""

    grid: Grid1D
    u: np.ndarray
    du: np.ndarray
    a: float
    fit_residual: float
    range: float
    potential: Potential

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicHermiteSpline(self.grid.points, self.u, self.du))

    @property
    def core(self) -> float:
        return float(self.grid.points[0])

    @property
    def f0_grid(self) -> np.ndarray:
        r = self.grid.points
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(r > 0, self.u / np.where(r > 0, r, 1.0), self.du)

    def f0(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        rmax = self.grid.points[-1]
        inside = np.clip(r, self.core, rmax)
        u = self._spline(inside)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(inside > 0, u / np.where(inside > 0, inside, 1.0), self.du[0])
            outer = 1.0 - self.a / np.where(r > 0, r, 1.0)
        val = np.where(r > rmax, outer, val)
        return np.where(r < self.core, 0.0, val)

    def df0(self, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        rmax = self.grid.points[-1]
        inside = np.clip(r, self.core, rmax)
        u = self._spline(inside)
        du = self._spline(inside, 1)
        tiny = 1e-9 * max(self.range, 1e-300)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(inside > tiny, (du * inside - u) / np.where(inside > tiny, inside, 1.0) ** 2, 0.0)
            outer = self.a / np.where(r > 0, r, 1.0) ** 2
        val = np.where(r > rmax, outer, val)
        return np.where(r < self.core, 0.0, val)


def solve_scattering_3d(
    v: Potential, a_scale: float = 1.0, n_inner: int = 4000, outer_factor: float = 3.0
) -> ScatteringSolution3D:
    """Solve u'' = 1/2 v_a u, u(0) = 0 (or u = 0 at the hard core).

    ``v`` is the unit-scale profile; the solve uses v_a(r) = a^-2 v(r/a) with
    a = ``a_scale``.  The grid runs to ``outer_factor`` times the range and
    the scattering length comes from a straight-line fit over the outer
    20% of [R0, r_max].
    """
    va = v if a_scale == 1.0 else v.scaled(a_scale)
    core = va.hard_core
    R0 = va.range
    if va.is_zero or R0 == 0.0:
        grid = Grid1D.uniform(0.0, 1.0, 11)
        r = grid.points
        return ScatteringSolution3D(grid, r.copy(), np.ones_like(r), 0.0, 0.0, 0.0, va)
    if not math.isfinite(R0):
        raise ValueError(f"{va.name}: scattering needs a finite range")
    r_max = outer_factor * R0
    spacing = (R0 - core) / n_inner if R0 > core else R0 / n_inner
    nodes = [core, R0, r_max] + [b for b in va.breakpoints if core < b < r_max]
    grid = _piecewise_grid(nodes, spacing)
    u, du = integrate_radial_ode(lambda r: 0.5 * va(r), grid, (0.0, 1.0), return_derivative=True)
    r = grid.points
    start = R0 + (1.0 - FIT_FRACTION) * (r_max - R0)
    sel = r >= start - 1e-12 * r_max
    slope, icpt, rms = _line_fit(r[sel], u[sel])
    if not slope > 0:
        raise ScatteringFitError(f"{va.name}: solution not increasing beyond the range")
    a = -icpt / slope
    residual = rms / slope / r_max
    if residual > FIT_RESIDUAL_TOL:
        raise ScatteringFitError(
            f"{va.name}: fit residual {residual:.3g} beyond r={start:.4g}; "
            "the declared range does not contain the potential"
        )
    return ScatteringSolution3D(grid, u / slope, du / slope, a, residual, R0, va)


@dataclass(frozen=True, eq=False)
class HardWallProfile:
    """f = f_0 / (1 - a/R) inside R, 1 outside."""

    solution: ScatteringSolution3D
    R: float

    @property
    def a(self) -> float:
        return self.solution.a

    @property
    def prefactor(self) -> float:
        return 1.0 / (1.0 - self.solution.a / self.R)

    def __call__(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        return np.where(r < self.R, self.solution.f0(r) * self.prefactor, 1.0)

    def derivative(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        return np.where(r < self.R, self.solution.df0(r) * self.prefactor, 0.0)


def hard_wall_profile(sol: ScatteringSolution3D, R: float) -> HardWallProfile:
    if not R > sol.a:
        raise ValueError(f"R={R} must exceed the scattering length a={sol.a}")
    if not R > sol.range:
        raise ValueError(f"R={R} must exceed the range R0={sol.range}")
    return HardWallProfile(sol, R)


# ---------------------------------------------------------------------------
# effective 2D potential from averaging over z


@dataclass(frozen=True, eq=False)
class EffectiveW:
    potential: Potential
    integral: float
    closed_form: float

    @property
    def relative_error(self) -> float:
        return abs(self.integral / self.closed_form - 1.0)


def effective_w(
    f: HardWallProfile,
    v: Potential,
    mode: TransverseMode,
    h: float,
    R: float,
    nodes: int = 64,
    check_tol: float = 1e-4,
) -> EffectiveW:
    """W(x) = (2 ||s||_4^4 / h) int [f'(|(x,z)|)^2 + 1/2 v_a f^2] dz.

    ``v`` must be the already-scaled v_a that produced ``f``; ``mode`` is
    the unit-scale transverse mode.  The z and |x| integrals are split at
    every radius where the integrand has a kink or jump (core, breakpoints,
    R) and done by Gauss-Legendre per piece; the |x| pieces use t^2
    substitution for the square-root edge at their upper ends.  The
    integral is recomputed at half the node count and a disagreement above
    ``check_tol`` is reported as a resolution failure.
    """
    if R != f.R:
        raise ValueError("R must match the hard-wall profile")
    if v.is_zero and f.a == 0.0:
        W = Potential("W", lambda x: np.zeros_like(np.asarray(x, dtype=float)), range=R,
                      meta={"zero": True})
        return EffectiveW(W, 0.0, 0.0)
    cuts = [b for b in (*v.breakpoints, v.range) if f.solution.core < b < R]
    radii = sorted({f.solution.core, R, *cuts})
    if radii[0] > 0:
        radii = [0.0] + radii  # rho below the core still sees the shell above it
    prefactor = 2.0 * mode.s4 / h
    core = f.solution.core

    def integrand(r):
        with np.errstate(invalid="ignore"):
            vv = np.where(r < core, 0.0, v(np.maximum(r, core)))
            fr = f(r)
            val = f.derivative(r) ** 2 + 0.5 * np.where(fr > 0, vv * fr * fr, 0.0)
        return np.where(r < core, 0.0, val)

    def make_w(n):
        t, wt = leggauss(n)
        t = 0.5 * (t + 1.0)
        wt = 0.5 * wt

        def W(rho):
            rho = np.abs(np.asarray(rho, dtype=float))
            flat = rho.reshape(-1)
            total = np.zeros(flat.size)
            zb = np.sqrt(np.maximum(np.subtract.outer(np.square(radii), flat**2), 0.0))
            for k in range(len(radii) - 1):
                lo, hi = zb[k], zb[k + 1]
                length = hi - lo
                if not np.any(length > 0):
                    continue
                z = lo[:, None] + length[:, None] * t[None, :]
                r = np.sqrt(flat[:, None] ** 2 + z * z)
                total += length * (integrand(r) @ wt)
            out = 2.0 * prefactor * total
            out = np.where(flat >= R, 0.0, out)
            return out.reshape(rho.shape)

        return W

    def disc_integral(W, n):
        t, wt = leggauss(n)
        t = 0.5 * (t + 1.0)
        wt = 0.5 * wt
        total = 0.0
        for lo, hi in zip(radii[:-1], radii[1:]):
            rho = hi - (hi - lo) * t * t
            jac = 2.0 * (hi - lo) * t
            total += float(np.sum(wt * jac * W(rho) * rho))
        return 2.0 * math.pi * total

    W = make_w(nodes)
    integral = disc_integral(W, nodes)
    coarse = disc_integral(make_w(nodes // 2), nodes // 2)
    if abs(coarse - integral) > check_tol * abs(integral):
        raise ResolutionError(
            f"integral of W changes by {abs(coarse / integral - 1):.2e} between {nodes // 2} "
            f"and {nodes} nodes; v_a has structure the quadrature does not resolve"
        )
    closed = 8.0 * math.pi * f.a * mode.s4 / (h * (1.0 - f.a / R))
    pot = Potential("W", W, range=R, breakpoints=tuple(x for x in radii if 0 < x < R))
    return EffectiveW(pot, integral, closed)


# ---------------------------------------------------------------------------
# 2D


@dataclass(frozen=True, eq=False)
class ScatteringSolution2D:
    """Radial solution psi (psi(R) = 1) on a log-radial grid.

    ``flux`` is k psi_t with k = epsilon inside the support of W and 1
    outside; ``energy`` is the minimal functional value 2 pi flux(R).
    ``ln_a_scatt`` is the log of the scattering length from the affine
    fit outside the support (-inf for W = 0).
    """

    grid: Grid1D
    psi: np.ndarray
    flux: np.ndarray
    ln_a_scatt: float
    energy: float
    R: float
    epsilon: float
    fit_residual: float = 0.0
    flagged: bool = False

    @property
    def a_scatt(self) -> float:
        return math.exp(self.ln_a_scatt) if self.ln_a_scatt > -745 else 0.0

    @property
    def E_R(self) -> float:
        return self.energy

    def energy_from_length(self) -> float:
        """2 pi / ln(R / a_scatt), the plain-case energy."""
        if self.ln_a_scatt == -math.inf:
            return 0.0
        return 2.0 * math.pi / (math.log(self.R) - self.ln_a_scatt)


def solve_scattering_2d(
    W: Potential, R: float, epsilon: float = 1.0, per_decade: int = 400, depth: float = 6.0
) -> ScatteringSolution2D:
    """Minimize int_{|x|<R} k|grad psi|^2 + 1/2 W psi^2 with psi(R) = 1.

    k = epsilon inside the support radius of W and 1 between it and R.  The
    log grid has ``per_decade`` points per decade and starts ``depth``
    decades below the support radius (or at the hard core).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    RW = W.range
    if RW > R * (1 + 1e-12):
        raise ValueError(f"W has support radius {RW} beyond R={R}")
    RW = min(RW, R)
    if W.is_zero or RW == 0.0:
        grid = Grid1D.log_radial(R * 1e-3, R, 16)
        one = np.ones(len(grid))
        return ScatteringSolution2D(grid, one, 0 * one, -math.inf, 0.0, R, epsilon)
    dt = math.log(10.0) / per_decade
    core = W.hard_core
    t_start = math.log(core) if core > 0 else math.log(RW) - depth * math.log(10.0)
    t_w, t_R = math.log(RW), math.log(R)
    nodes = [t_start, t_w, t_R] + [math.log(b) for b in W.breakpoints if core < b < RW]
    tgrid = _piecewise_grid(nodes, dt)
    t = tgrid.points
    inner = t <= t_w + 1e-14

    def q_inner(tt):
        r = np.exp(tt)
        return 0.5 * r * r * W(r) / epsilon

    if core > 0:
        init = (0.0, 1.0)
    else:
        r0 = math.exp(t_start)
        k2 = 0.5 * float(W(np.array([r0]))[0]) / epsilon
        init = (1.0, 0.5 * k2 * r0 * r0)
    psi = np.empty(t.size)
    flux = np.empty(t.size)
    if np.count_nonzero(inner) >= 2:
        psi_in, dpsi_in = integrate_radial_ode(q_inner, Grid1D(t[inner]), init, return_derivative=True)
        psi[inner] = psi_in
        flux[inner] = epsilon * dpsi_in
    else:
        psi[inner] = init[0]
        flux[inner] = init[1]  # empty eps region: the core sits at the support edge
    outer = ~inner
    if np.any(outer):
        t_out = Grid1D(np.concatenate([[t_w], t[outer]]))

        def q_outer(tt):
            r = np.exp(tt)
            return 0.5 * r * r * W(r)

        i_w = np.count_nonzero(inner) - 1
        po, dpo = integrate_radial_ode(q_outer, t_out, (psi[i_w], flux[i_w]), return_derivative=True)
        psi[outer] = po[1:]
        flux[outer] = dpo[1:]
    scale = psi[-1]
    psi = psi / scale
    flux = flux / scale
    energy = 2.0 * math.pi * flux[-1]

    if np.count_nonzero(outer) >= 5:
        t_o = t[outer]
        sel = t_o >= t_o[0] + (1.0 - FIT_FRACTION) * (t_o[-1] - t_o[0]) - 1e-12
        B, A, rms = _line_fit(t_o[sel], psi[outer][sel])
        rms /= max(abs(B), 1e-300)
    else:
        B = flux[-1]
        A = psi[-1] - B * t[-1]
        rms = 0.0
    ln_a = -A / B if B > 0 else -math.inf
    flagged = bool(ln_a >= t_R)
    return ScatteringSolution2D(
        Grid1D(np.exp(t), "log-radial"), psi, flux, ln_a, energy, R, epsilon, rms, flagged
    )


def perturbative_ln_a_scatt(lam: float, R: float) -> float:
    """ln of the leading-order soft-potential length R exp(-4 pi / lambda)."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return math.log(R) - 4.0 * math.pi / lam


def perturbative_a_scatt(lam: float, R: float) -> float:
    """R exp(-4 pi / lambda); only the lambda -> 0 asymptote."""
    return math.exp(perturbative_ln_a_scatt(lam, R))


def eta(lam: float, R: float, ln_a_scatt: float) -> float:
    """Correction eta in a_scatt = R exp(-(4 pi + eta) / lambda)."""
    return lam * (math.log(R) - ln_a_scatt) - 4.0 * math.pi


# ---------------------------------------------------------------------------
# effective 2D scattering length


@dataclass(frozen=True)
class EffectiveA2D:
    """a_2D = h exp(-h / (2 a int s^4)) carried as ln(a_2D / h)."""

    h: float
    ln_over_h: float

    @property
    def ln(self) -> float:
        return math.log(self.h) + self.ln_over_h

    @property
    def value(self) -> float:
        return math.exp(self.ln) if self.ln > -745 else 0.0


def effective_a2d(h: float, a: float, s4: float) -> EffectiveA2D:
    if not (h > 0 and a > 0 and s4 > 0):
        raise ValueError("h, a and int s^4 must be positive")
    return EffectiveA2D(h, -h / (2.0 * a * s4))
