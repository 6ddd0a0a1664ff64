"""Discretization and solver primitives shared by the physics modules.

Units throughout are hbar = 2m = 1, so every energy is an inverse length
squared.  Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

EIGEN_TOL = 1e-10
FLOW_TOL = 1e-10


class NumericsError(RuntimeError):
    """A solver failed to produce a result it can vouch for."""


class EigenSolverError(NumericsError):
    pass


class RadialODEError(NumericsError):
    pass


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Strictly increasing 1D grid.

    ``kind`` is ``"uniform"`` or ``"log-radial"``; log-radial grids are
    geometric in r and never contain 0.
    """

    points: np.ndarray
    kind: str = "uniform"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least two points")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if self.kind not in ("uniform", "log-radial"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.kind == "log-radial" and pts[0] <= 0:
            raise ValueError("log-radial grids exclude r <= 0")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, start: float, stop: float, n: int) -> "Grid1D":
        return cls(np.linspace(start, stop, int(n)), "uniform")

    @classmethod
    def with_spacing(cls, start: float, stop: float, dx: float) -> "Grid1D":
        """Uniform grid on [start, stop] whose spacing does not exceed dx."""
        n = int(math.ceil((stop - start) / dx - 1e-9)) + 1
        return cls.uniform(start, stop, max(n, 2))

    @classmethod
    def log_radial(cls, r_min: float, r_max: float, per_decade: int = 64) -> "Grid1D":
        decades = math.log10(r_max / r_min)
        n = max(int(math.ceil(decades * per_decade)), 1) + 1
        return cls(np.geomspace(r_min, r_max, n), "log-radial")

    def __len__(self):
        return self.points.size

    @property
    def spacing(self) -> np.ndarray:
        return np.diff(self.points)

    @property
    def is_uniform(self) -> bool:
        h = self.spacing
        return bool(np.allclose(h, h[0], rtol=1e-9, atol=0.0))

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid quadrature weights."""
        h = self.spacing
        w = np.zeros(self.points.size)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
        return w

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def refined(self) -> "Grid1D":
        """Grid with every interval halved."""
        mid = 0.5 * (self.points[1:] + self.points[:-1])
        pts = np.empty(2 * self.points.size - 1)
        pts[0::2] = self.points
        pts[1::2] = mid
        return Grid1D(pts, self.kind)

    def scaled(self, c: float) -> "Grid1D":
        return Grid1D(self.points * c, self.kind)


# ---------------------------------------------------------------------------
# three-point stencils in energy (weak) form


@dataclass(frozen=True, eq=False)
class Stencil1D:
    """Symmetric three-point discretization of -d/dx (k d/dx) on n unknowns.

    The quadratic form is ``sum(couple * diff(u)**2) + sum(wall * u**2)``
    and the inner product is ``sum(mass * u * v)``.  ``wall`` collects the
    edges to Dirichlet boundary nodes.
    """

    x: np.ndarray
    mass: np.ndarray
    couple: np.ndarray
    wall: np.ndarray

    @property
    def n(self) -> int:
        return self.x.size

    def stiffness_diagonal(self) -> np.ndarray:
        d = self.wall.copy()
        d[:-1] += self.couple
        d[1:] += self.couple
        return d

    def symmetric_form(self, potential=None):
        """Diagonal and off-diagonal of M^-1/2 (K + M V) M^-1/2."""
        d = self.stiffness_diagonal() / self.mass
        if potential is not None:
            d = d + potential
        e = -self.couple / np.sqrt(self.mass[:-1] * self.mass[1:])
        return d, e

    def apply(self, u: np.ndarray, axis: int = 0) -> np.ndarray:
        """Return M^-1 K u along ``axis`` (the discrete -Laplacian)."""
        u = np.moveaxis(u, axis, 0)
        shape = (-1,) + (1,) * (u.ndim - 1)
        c = self.couple.reshape(shape)
        flux = c * (u[1:] - u[:-1])
        out = self.wall.reshape(shape) * u
        out[:-1] -= flux
        out[1:] += flux
        out = out / self.mass.reshape(shape)
        return np.moveaxis(out, 0, axis)

    def quadratic_form(self, u: np.ndarray, axis: int = 0) -> np.ndarray:
        """Per-line kinetic energy along ``axis`` (other axes kept)."""
        u = np.moveaxis(u, axis, 0)
        shape = (-1,) + (1,) * (u.ndim - 1)
        du = u[1:] - u[:-1]
        return (self.couple.reshape(shape) * du * du).sum(axis=0) + (
            self.wall.reshape(shape) * u * u
        ).sum(axis=0)


def dirichlet_stencil(grid: Grid1D) -> Stencil1D:
    """Vertex stencil on the interior nodes; both grid ends are Dirichlet."""
    h = grid.spacing
    if h.size < 2:
        raise ValueError("Dirichlet stencil needs at least one interior node")
    mass = 0.5 * (h[:-1] + h[1:])
    couple = 1.0 / h[1:-1]
    wall = np.zeros(mass.size)
    wall[0] += 1.0 / h[0]
    wall[-1] += 1.0 / h[-1]
    return Stencil1D(grid.points[1:-1].copy(), mass, couple, wall)


def even_stencil(grid: Grid1D) -> Stencil1D:
    """Even-parity half of a symmetric Dirichlet stencil.

    ``grid`` must be the uniform half grid [0, Z] (0 is an unknown, Z is
    Dirichlet).  Weights are doubled so sums reproduce full-grid sums for
    even functions; the eigenvalues are exactly the even-sector eigenvalues
    of ``dirichlet_stencil`` on [-Z, Z].
    """
    if grid.points[0] != 0.0 or not grid.is_uniform:
        raise ValueError("even stencil needs a uniform grid starting at 0")
    dz = grid.spacing[0]
    n = grid.points.size - 1
    mass = np.full(n, 2.0 * dz)
    mass[0] = dz
    couple = np.full(n - 1, 2.0 / dz)
    wall = np.zeros(n)
    wall[-1] = 2.0 / dz
    return Stencil1D(grid.points[:-1].copy(), mass, couple, wall)


def radial_stencil(r_max: float, n: int, dim: int = 2) -> Stencil1D:
    """Cell-centred radial stencil on (0, r_max) with Dirichlet at r_max.

    The surface measure (2 pi r in 2D, 4 pi r^2 in 3D) is folded into mass
    and couplings, so the inner product integrates over the full disc or
    ball.  Regularity at r = 0 is natural (zero flux).
    """
    dr = r_max / n
    r = (np.arange(n) + 0.5) * dr
    faces = (np.arange(n) + 1) * dr
    if dim == 2:
        area, face_area = 2 * np.pi * r, 2 * np.pi * faces
    elif dim == 3:
        area, face_area = 4 * np.pi * r**2, 4 * np.pi * faces**2
    else:
        raise ValueError("dim must be 2 or 3")
    mass = area * dr
    couple = face_area[:-1] / dr
    wall = np.zeros(n)
    wall[-1] = face_area[-1] / (0.5 * dr)
    return Stencil1D(r, mass, couple, wall)


# ---------------------------------------------------------------------------
# eigenproblems


@dataclass(frozen=True, eq=False)
class EigenResult:
    eigenvalue: float
    eigenvector: np.ndarray
    index: int


def tridiagonal_eigs(d, e, k: int, tol: float = EIGEN_TOL):
    """Lowest k eigenpairs of a symmetric tridiagonal matrix.

    LAPACK stebz/stein: bisection for the eigenvalues, inverse iteration
    for the vectors.
    """
    n = len(d)
    if k < 1 or k > n:
        raise ValueError(f"k={k} outside 1..{n}")
    try:
        w, v = eigh_tridiagonal(
            d, e, select="i", select_range=(0, k - 1), lapack_driver="stebz", tol=tol
        )
    except LinAlgError as exc:  # stein reports the vectors that failed
        raise EigenSolverError(f"tridiagonal eigensolver did not converge: {exc}") from exc
    return w, v


def _values_on(potential, x):
    if callable(potential):
        return np.asarray(potential(x), dtype=float) * np.ones_like(x)
    return np.asarray(potential, dtype=float)


def stencil_eigs(stencil: Stencil1D, potential, k: int, tol: float = EIGEN_TOL):
    """Eigenpairs of M^-1 K + V; vectors normalized in the mass inner product."""
    v = _values_on(potential, stencil.x)
    if not np.all(np.isfinite(v)):
        raise ValueError("potential must be finite on the grid interior")
    d, e = stencil.symmetric_form(v)
    w, y = tridiagonal_eigs(d, e, k, tol)
    u = y / np.sqrt(stencil.mass)[:, None]
    for j in range(u.shape[1]):
        # deterministic sign: positive overlap with the first lobe
        i = int(np.argmax(np.abs(u[:, j]) > 1e-8 * np.abs(u[:, j]).max()))
        if u[i, j] < 0:
            u[:, j] = -u[:, j]
    return w, u


def eigs_sturm_liouville(
    potential, grid: Grid1D, k: int = 1, tol: float = EIGEN_TOL, extrapolate: bool = False
) -> list[EigenResult]:
    """Lowest k eigenpairs of -d^2/dx^2 + V with Dirichlet ends.

    ``potential`` is a callable or an array over ``grid.points``.  Vectors
    cover the full grid (zero at both ends) and have unit trapezoid norm.
    With ``extrapolate`` the eigenvalues are Richardson-combined with a run
    on the 2x refined grid, (4 lam_{h/2} - lam_h) / 3; vectors stay those
    of ``grid``.
    """
    if k > len(grid) - 2:
        raise ValueError(f"k={k} exceeds the {len(grid) - 2} interior unknowns")
    st = dirichlet_stencil(grid)
    if callable(potential):
        vint = _values_on(potential, st.x)
    else:
        vint = np.asarray(potential, dtype=float)[1:-1]
    w, u = stencil_eigs(st, vint, k, tol)
    if extrapolate:
        if not callable(potential):
            raise ValueError("extrapolation needs a callable potential")
        fine = eigs_sturm_liouville(potential, grid.refined(), k, tol)
        w = np.array([(4 * f.eigenvalue - c) / 3 for f, c in zip(fine, w)])
    out = []
    for j in range(k):
        vec = np.zeros(len(grid))
        vec[1:-1] = u[:, j]
        out.append(EigenResult(float(w[j]), vec, j))
    return out


def solve_tridiagonal(diag, off, rhs):
    """Solve a symmetric tridiagonal system (Thomas algorithm).

    ``diag`` may be (n,) or (n, m) to solve m independently shifted systems
    at once; ``rhs`` is (n,) or (n, m).  No pivoting: intended for
    diagonally dominant / positive definite matrices.
    """
    diag = np.asarray(diag, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[0]
    off = np.asarray(off, dtype=float)
    if rhs.ndim > 1:
        off = off.reshape((-1,) + (1,) * (rhs.ndim - 1))
    if diag.ndim < rhs.ndim:
        diag = diag.reshape(diag.shape + (1,) * (rhs.ndim - diag.ndim))
    cp = np.empty((n - 1,) + np.broadcast_shapes(diag.shape[1:], rhs.shape[1:]))
    dp = np.empty((n,) + cp.shape[1:])
    denom = diag[0] * np.ones(cp.shape[1:])
    cp[0] = off[0] / denom
    dp[0] = rhs[0] / denom
    for i in range(1, n):
        denom = diag[i] - off[i - 1] * cp[i - 1]
        if i < n - 1:
            cp[i] = off[i] / denom
        dp[i] = (rhs[i] - off[i - 1] * dp[i - 1]) / denom
    x = dp
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


# ---------------------------------------------------------------------------
# linear second-order ODE  u'' = q(x) u

_SQRT3 = math.sqrt(3.0)
_MAX_EXPONENT = 600.0
_RESCALE = 1e100


def _magnus_cells(q, x0, h):
    """Fourth-order Magnus exponents for u'' = q u on cells [x0, x0+h]."""
    c1 = x0 + h * (0.5 - _SQRT3 / 6)
    c2 = x0 + h * (0.5 + _SQRT3 / 6)
    q1 = np.asarray(q(c1), dtype=float) * np.ones_like(c1)
    q2 = np.asarray(q(c2), dtype=float) * np.ones_like(c2)
    alpha = (_SQRT3 / 12) * h * h * (q1 - q2)
    beta = 0.5 * h * (q1 + q2)
    return alpha, beta, q1, q2


def _propagators(alpha, beta, h):
    """2x2 exponentials of [[alpha, h], [beta, -alpha]], entrywise."""
    delta = alpha * alpha + h * beta
    s = np.sqrt(np.abs(delta))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pos = delta > 0
        c = np.where(pos, np.cosh(np.where(pos, s, 0.0)), np.cos(s))
        sinc = np.where(
            s > 1e-8,
            np.where(pos, np.sinh(np.where(pos, s, 0.0)), np.sin(s)) / np.where(s > 0, s, 1.0),
            1.0 + delta / 6.0,
        )
    m00 = c + sinc * alpha
    m01 = sinc * h
    m10 = sinc * beta
    m11 = c - sinc * alpha
    return m00, m01, m10, m11, s


def integrate_radial_ode(
    coefficient: Callable, grid: Grid1D, init: Sequence[float], return_derivative: bool = False
):
    """Integrate u'' = q(x) u across ``grid`` from (u, u') at its first point.

    Fourth-order Magnus propagation with the coefficient sampled at the
    two Gauss points of each cell, so piecewise-constant coefficients with
    jumps on grid nodes are integrated exactly and u, u' stay continuous.
    The solution is renormalized on the fly when it grows large (only the
    ratios along the grid are meaningful then); cells whose exponent would
    overflow are bisected, and a cell that cannot be resolved after 40
    halvings raises RadialODEError.
    """
    x = grid.points
    h = np.diff(x)
    alpha, beta, _, _ = _magnus_cells(coefficient, x[:-1], h)
    if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
        raise RadialODEError("coefficient is not finite on the grid")
    m00, m01, m10, m11, s = _propagators(alpha, beta, h)
    stiff = np.nonzero(s > _MAX_EXPONENT)[0]
    m00, m01, m10, m11 = (a.tolist() for a in (m00, m01, m10, m11))
    for i in stiff:
        m00[i], m01[i], m10[i], m11[i] = _subdivided(coefficient, x[i], h[i])

    n = x.size
    u = np.empty(n)
    du = np.empty(n)
    a, b = float(init[0]), float(init[1])
    u[0], du[0] = a, b
    for i in range(n - 1):
        a, b = m00[i] * a + m01[i] * b, m10[i] * a + m11[i] * b
        size = abs(a) + abs(b)
        if size > _RESCALE:
            a /= size
            b /= size
            u[: i + 1] /= size
            du[: i + 1] /= size
        elif not math.isfinite(size):
            raise RadialODEError(f"solution overflowed at x={x[i + 1]:.6g}")
        u[i + 1], du[i + 1] = a, b
    if return_derivative:
        return u, du
    return u


def _subdivided(coefficient, x0, h, depth=0):
    if depth > 40:
        raise RadialODEError(f"cannot resolve stiff cell at x={x0:.6g} after step halving")
    alpha, beta, _, _ = _magnus_cells(coefficient, np.array([x0]), np.array([h]))
    if alpha[0] ** 2 + h * beta[0] < _MAX_EXPONENT**2:
        m = _propagators(alpha, beta, np.array([h]))
        return tuple(float(v[0]) for v in m[:4])
    left = _subdivided(coefficient, x0, 0.5 * h, depth + 1)
    right = _subdivided(coefficient, x0 + 0.5 * h, 0.5 * h, depth + 1)
    # right @ left, normalized to keep the entries finite
    p = (
        right[0] * left[0] + right[1] * left[2],
        right[0] * left[1] + right[1] * left[3],
        right[2] * left[0] + right[3] * left[2],
        right[2] * left[1] + right[3] * left[3],
    )
    if not all(math.isfinite(v) for v in p):
        raise RadialODEError(f"propagator overflow at x={x0:.6g}")
    return p


# ---------------------------------------------------------------------------
# normalized gradient flow


@dataclass
class FlowResult:
    x: np.ndarray
    energy: float
    energies: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    step: float = 0.0
    message: str = ""


def gradient_flow_minimize(
    energy: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    x0: np.ndarray,
    weights: np.ndarray,
    tol: float = FLOW_TOL,
    precondition: Callable | None = None,
    max_iter: int = 5000,
    step: float = 0.5,
    min_step: float = 1e-14,
    max_step: float = 1e3,
) -> FlowResult:
    """Minimize ``energy`` on the unit sphere sum(weights * x**2) = 1.

    ``gradient`` returns the L2 gradient (the functional derivative divided
    by the quadrature weights).  Each iteration takes an explicit step along
    the projected (optionally preconditioned) gradient, renormalizes, and
    backtracks until the Armijo condition holds, so the accepted energies
    never increase.  ``precondition(x)`` returns a callable applying an
    approximate inverse Hessian; it must be self-adjoint and positive in the
    weighted inner product.

    Stops when the relative energy change of an accepted step drops below
    ``tol`` or the projected slope vanishes.  If the step underflows first,
    the best state is returned with ``converged=False``.
    """

    def dot(a, b):
        return float(np.sum(weights * a * b))

    def normalize(v):
        return v / math.sqrt(dot(v, v))

    x = normalize(np.array(x0, dtype=float))
    e = float(energy(x))
    history = [e]
    tau = step
    for it in range(1, max_iter + 1):
        g = gradient(x)
        if precondition is not None:
            apply = precondition(x)
            pg, px = apply(g), apply(x)
            d = pg - (dot(x, pg) / dot(x, px)) * px
        else:
            d = g - dot(x, g) * x
        slope = dot(g, d)
        if not slope > 1e-3 * tol * max(abs(e), 1e-300):
            return FlowResult(x, e, history, it - 1, True, tau, "stationary")
        while True:
            trial = normalize(x - tau * d)
            et = float(energy(trial))
            if et <= e - 1e-4 * tau * slope:
                break
            if et <= e and tau * slope < tol * max(abs(e), 1e-300):
                break  # round-off floor: accept the non-increasing step
            tau *= 0.5
            if tau < min_step:
                return FlowResult(x, e, history, it, False, tau, "step size underflow")
        change = abs(e - et) / max(abs(et), 1e-300)
        x, e = trial, et
        history.append(e)
        if change < tol:
            return FlowResult(x, e, history, it, True, tau, "energy change below tol")
        tau = min(2.0 * tau, max_step)
    return FlowResult(x, e, history, max_iter, False, tau, "iteration limit")
