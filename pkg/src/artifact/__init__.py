"""Dilute Bose gases in thin traps: 3D to 2D crossover at the GP level.

Units are hbar = 2m = 1.  Modules: numerics (grids, eigen/ODE/flow
solvers), potentials, transverse, scattering, gp, regimes, bounds,
experiments and cli.
"""

__version__ = "0.1.0"
