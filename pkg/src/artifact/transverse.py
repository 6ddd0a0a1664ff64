"""Ground state of the transverse confinement -d^2/dz^2 + V_perp(z)."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .numerics import Grid1D, eigs_sturm_liouville
from .potentials import Potential

TRUNCATION_FACTOR = 50.0
DEFAULT_DZ = 0.002


class NonConfiningError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TransverseMode:
    """Transverse ground state s with its energies and moments.

    ``h`` records the confinement scale: a mode of scale h has
    s_h(z) = h^-1/2 s(z/h) and energies divided by h^2.
    """

    grid: Grid1D
    s: np.ndarray
    e_perp: float
    e_perp_excited: float
    s4: float
    s_inf_sq: float
    ds2_inf: float
    h: float = 1.0
    potential: str = ""

    @property
    def gap(self) -> float:
        return self.e_perp_excited - self.e_perp

    def norm(self) -> float:
        return self.grid.integrate(self.s**2)

    def moment(self, power: int) -> float:
        return self.grid.integrate(self.s**power)


def default_grid(V_perp: Potential, dz: float = DEFAULT_DZ) -> Grid1D:
    """Symmetric grid extended until V_perp at the ends exceeds 50 e_perp."""
    if V_perp.box is not None:
        half = 0.5 * V_perp.box
        return Grid1D.with_spacing(-half, half, min(dz, V_perp.box / 4000))
    z = 4.0
    for _ in range(40):
        grid = Grid1D.with_spacing(-z, z, dz)
        e0 = eigs_sturm_liouville(V_perp, grid, 1)[0].eigenvalue
        edge = min(float(V_perp(np.array([-z]))[0]), float(V_perp(np.array([z]))[0]))
        if edge >= TRUNCATION_FACTOR * max(e0, 1e-12):
            return grid
        z *= 1.5
    raise NonConfiningError(f"{V_perp.name}: no domain reaches V >= {TRUNCATION_FACTOR} e_perp")


def solve_transverse(V_perp: Potential, grid: Grid1D | None = None) -> TransverseMode:
    """Solve the unit-scale transverse problem on ``grid`` (Dirichlet ends).

    A box potential is the infinite well whose walls are the grid ends.
    Any other potential must reach 50 e_perp at both ends of the grid,
    otherwise the domain is too small to call it confining.
    """
    if grid is None:
        grid = default_grid(V_perp)
    if V_perp.box is not None:
        width = grid.points[-1] - grid.points[0]
        if not math.isclose(width, V_perp.box, rel_tol=1e-12):
            raise ValueError(f"box of width {V_perp.box} needs a grid spanning it, got {width}")
        values = np.zeros(len(grid))
    else:
        values = V_perp(grid.points)
    ground, excited = eigs_sturm_liouville(values, grid, 2)
    if V_perp.box is None:
        edge = min(values[0], values[-1])
        if not edge >= TRUNCATION_FACTOR * max(ground.eigenvalue, 1e-12):
            raise NonConfiningError(
                f"{V_perp.name}: V at the domain ends is {edge:.4g} < "
                f"{TRUNCATION_FACTOR:g} x e_perp = {TRUNCATION_FACTOR * ground.eigenvalue:.4g}"
            )
    s = np.abs(ground.eigenvector)
    s2 = s * s
    return TransverseMode(
        grid=grid,
        s=s,
        e_perp=ground.eigenvalue,
        e_perp_excited=excited.eigenvalue,
        s4=grid.integrate(s2 * s2),
        s_inf_sq=float(s2.max()),
        ds2_inf=float(np.abs(np.gradient(s2, grid.points)).max()),
        potential=V_perp.name,
    )


def scale_mode(mode: TransverseMode, h: float) -> TransverseMode:
    """The mode of -d^2/dz^2 + h^-2 V_perp(z/h) from the unit-scale one."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    return replace(
        mode,
        grid=mode.grid.scaled(h),
        s=mode.s / math.sqrt(h),
        e_perp=mode.e_perp / h**2,
        e_perp_excited=mode.e_perp_excited / h**2,
        s4=mode.s4 / h,
        s_inf_sq=mode.s_inf_sq / h,
        ds2_inf=mode.ds2_inf / h**2,
        h=mode.h * h,
    )
