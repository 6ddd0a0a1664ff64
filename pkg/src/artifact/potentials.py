"""Radial (or 1D) potentials with the metadata the solvers need."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class Potential:
    """A nonnegative potential of one variable (|x| or z).

    Attributes:
        name: label used in reports.
        profile: vectorized function; ignored inside ``hard_core``.
        range: support radius R0 (``inf`` for traps).
        hard_core: Dirichlet radius, 0 if none.
        degree: homogeneity degree p of ``coefficient * |x|**p`` traps.
        coefficient: prefactor of the homogeneous form.
        box: side length of a box trap / width of an infinite well.
        breakpoints: radii where the profile jumps; solvers put grid nodes
            there.
        even: reflection symmetric (1D use).
        scale: the a in v_a(r) = a^-2 v(r/a) relative to the base profile.
    """

    name: str
    profile: Callable[[np.ndarray], np.ndarray]
    range: float = math.inf
    hard_core: float = 0.0
    degree: float | None = None
    coefficient: float = 1.0
    box: float | None = None
    breakpoints: tuple = ()
    even: bool = True
    scale: float = 1.0
    meta: dict = field(default_factory=dict)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.profile(r), dtype=float) * np.ones_like(r)
        if self.hard_core > 0:
            out = np.where(np.abs(r) < self.hard_core, np.inf, out)
        return out

    @property
    def is_zero(self) -> bool:
        return bool(self.meta.get("zero", False))

    @property
    def is_homogeneous(self) -> bool:
        return self.degree is not None

    def scaled(self, c: float) -> "Potential":
        """c^-2 V(r / c): the v_a family for interactions, V_L for traps."""
        if c <= 0:
            raise ValueError("scale must be positive")
        base = self.profile
        coeff = self.coefficient
        if self.degree is not None:
            coeff = self.coefficient * c ** (-2.0 - self.degree)
        return replace(
            self,
            profile=lambda r, base=base, c=c: base(np.asarray(r) / c) / c**2,
            range=self.range * c,
            hard_core=self.hard_core * c,
            coefficient=coeff,
            box=None if self.box is None else self.box * c,
            breakpoints=tuple(b * c for b in self.breakpoints),
            scale=self.scale * c,
        )


def zero() -> Potential:
    return Potential("zero", lambda r: np.zeros_like(np.asarray(r, dtype=float)), range=0.0,
                     meta={"zero": True})


def power(p: float, coefficient: float = 1.0) -> Potential:
    """Homogeneous trap coefficient * |x|**p."""
    return Potential(
        f"power{p:g}",
        lambda r: coefficient * np.abs(r) ** p,
        degree=float(p),
        coefficient=coefficient,
    )


def harmonic(coefficient: float = 1.0) -> Potential:
    pot = power(2.0, coefficient)
    return replace(pot, name="harmonic")


def quartic(coefficient: float = 1.0) -> Potential:
    pot = power(4.0, coefficient)
    return replace(pot, name="quartic")


def box(side: float = 1.0) -> Potential:
    """Box trap of side ``side``: flat inside, hard walls (p = infinity).

    As a transverse potential this is the infinite well [-side/2, side/2].
    """
    return Potential("box", lambda r: np.zeros_like(np.asarray(r, dtype=float)), box=side,
                     degree=None)


def square_barrier(height: float, radius: float = 1.0) -> Potential:
    return Potential(
        "square-barrier",
        lambda r: np.where(np.abs(r) < radius, height, 0.0),
        range=radius,
        breakpoints=(radius,),
        meta={"height": height},
    )


def hard_core(radius: float = 1.0) -> Potential:
    return Potential(
        "hard-core",
        lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        range=radius,
        hard_core=radius,
        breakpoints=(radius,),
    )


def soft_disc(lam: float, radius: float = 1.0) -> Potential:
    """2D potential lam * (uniform disc of radius ``radius`` with unit integral)."""
    height = lam / (math.pi * radius**2)
    return Potential(
        "soft-disc",
        lambda r: np.where(np.abs(r) < radius, height, 0.0),
        range=radius,
        breakpoints=(radius,),
        meta={"lambda": lam},
    )


def soft_gaussian_bump(lam: float, radius: float = 1.0) -> Potential:
    """2D bump lam * w(r) with w proportional to (1 - (r/R)^2)^2, unit integral."""
    norm = 3.0 / (math.pi * radius**2)  # int (1-s^2)^2 2 pi r dr = pi R^2 / 3

    def prof(r):
        s = np.clip(np.abs(np.asarray(r, dtype=float)) / radius, 0.0, 1.0)
        return lam * norm * (1.0 - s * s) ** 2

    return Potential("soft-bump", prof, range=radius, meta={"lambda": lam})


def bumped_harmonic(height: float = 2.0, width: float = 1.0) -> Potential:
    """z^2 + height * exp(-(z/width)^2): a smooth, even test trap."""
    return Potential(
        "harmonic+bump",
        lambda z: np.asarray(z, dtype=float) ** 2 + height * np.exp(-(np.asarray(z) / width) ** 2),
    )


def tabulated(r, v, name: str = "tabulated") -> Potential:
    """Linear interpolation of (r, v) samples, zero beyond the last point."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    if r.ndim != 1 or r.size < 2 or not np.all(np.diff(r) > 0):
        raise ValueError("tabulated r must be strictly increasing with >= 2 points")
    if np.any(v < 0):
        raise ValueError("tabulated potential must be nonnegative")
    last = r[-1]

    def prof(x):
        x = np.abs(np.asarray(x, dtype=float))
        return np.where(x <= last, np.interp(x, r, v), 0.0)

    nonzero = np.nonzero(v > 0)[0]
    rng = float(r[min(nonzero[-1] + 1, r.size - 1)]) if nonzero.size else 0.0
    return Potential(name, prof, range=rng, breakpoints=(last,) if v[-1] > 0 else ())


def load_tabulated(path) -> Potential:
    """Read a two-column (r, v) text file."""
    data = np.loadtxt(Path(path), ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{path}: expected two columns, found {data.shape[1]}")
    return tabulated(data[:, 0], data[:, 1], name=Path(path).stem)


_FACTORIES = {
    "zero": lambda **kw: zero(),
    "harmonic": lambda coefficient=1.0, **kw: harmonic(coefficient),
    "quartic": lambda coefficient=1.0, **kw: quartic(coefficient),
    "power": lambda p=2.0, coefficient=1.0, **kw: power(p, coefficient),
    "box": lambda side=1.0, **kw: box(side),
    "square-barrier": lambda height=8.0, radius=1.0, **kw: square_barrier(height, radius),
    "hard-core": lambda radius=1.0, **kw: hard_core(radius),
    "soft-disc": lambda lam=0.1, radius=1.0, **kw: soft_disc(lam, radius),
    "soft-bump": lambda lam=0.1, radius=1.0, **kw: soft_gaussian_bump(lam, radius),
    "harmonic+bump": lambda height=2.0, width=1.0, **kw: bumped_harmonic(height, width),
}

NAMES = tuple(sorted(_FACTORIES)) + ("tabulated",)


def by_name(name: str, **params) -> Potential:
    """Build a potential from its CLI name; ``tabulated`` needs ``path``."""
    if name == "tabulated":
        if "path" not in params:
            raise ValueError("tabulated potential needs a path")
        return load_tabulated(params["path"])
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown potential {name!r}; choose from {', '.join(NAMES)}") from None
    return factory(**params)
