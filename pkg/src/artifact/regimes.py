"""Coupling constant, Region I/II labels and dilute-gas reference energies.

Everything logarithmic is evaluated in log domain: a_2D enters only as
ln(a_2D / h) = -h / (2 a int s^4).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

HARMONIC_S4 = (2.0 * math.pi) ** -0.5
REGION_BAND = 4.0
SMALLNESS = 0.1
IDEAL_BELOW = 0.1
TF_ABOVE = 10.0

REGION_I = "REGION_I"
REGION_II = "REGION_II"
CROSSOVER = "CROSSOVER"


class DiluteRangeError(ValueError):
    pass


def coupling_g(rho_bar: float, h: float, a: float, s4: float = HARMONIC_S4) -> float:
    """g = |-ln(rho_bar h^2) + h / (a int s^4)|^-1 for rho_bar h^2 < 1."""
    if not (h > 0 and a > 0 and s4 > 0 and rho_bar > 0):
        raise ValueError("rho_bar, h, a and int s^4 must be positive")
    x = rho_bar * h * h
    if not x < 1.0:
        raise DiluteRangeError(f"rho_bar h^2 = {x:.6g} >= 1: outside strong confinement")
    return 1.0 / abs(-math.log(x) + h / (a * s4))


def coupling_g_ln(ln_rho_h2: float, h_over_a: float, s4: float = HARMONIC_S4) -> float:
    """Same formula with ln(rho_bar h^2) and h/a given directly."""
    if not ln_rho_h2 < 0:
        raise DiluteRangeError(f"ln(rho_bar h^2) = {ln_rho_h2:.6g} >= 0: outside strong confinement")
    return 1.0 / abs(-ln_rho_h2 + h_over_a / s4)


@dataclass(frozen=True)
class RegimeReport:
    """Region label and diagnostics for one (rho_bar, h, a) point.

    ``confinement_parameter`` names the governing small quantity
    (``rho a h`` in Region I, ``rho h^2`` in Region II, the larger of the two
    in the crossover) and ``confinement_value`` its value.
    """

    rho_bar: float
    h: float
    a: float
    g: float
    ln_a2d: float
    q: float
    region: str
    strong_confinement: bool
    confinement_parameter: str
    confinement_value: float
    ng_class: str | None = None

    @property
    def ln_a2d_over_h(self) -> float:
        return self.ln_a2d - math.log(self.h)


def ng_class(Ng: float) -> str:
    if Ng < IDEAL_BELOW:
        return "IDEAL"
    if Ng > TF_ABOVE:
        return "TF"
    return "GP"


def classify(
    rho_bar: float,
    h: float,
    a: float,
    s4: float = HARMONIC_S4,
    N: float | None = None,
    band: float = REGION_BAND,
    smallness: float = SMALLNESS,
) -> RegimeReport:
    """Label by q = (h/a) / |ln(rho_bar h^2)|: I above ``band``, II below 1/band.

    Points with rho_bar h^2 >= 1 are not strongly confined in any sense;
    they are labelled REGION_I (h/a dominates) with the flag off, and g is
    the raw formula value.
    """
    if not (rho_bar > 0 and h > 0 and a > 0 and s4 > 0):
        raise ValueError("rho_bar, h, a and int s^4 must be positive")
    ln_x = math.log(rho_bar) + 2.0 * math.log(h)
    ln_a2d = math.log(h) - h / (2.0 * a * s4)
    g = 1.0 / abs(-ln_x + h / (a * s4))
    rah = rho_bar * a * h
    rhh = math.exp(ln_x)
    if ln_x >= 0:
        q = math.inf
        region, param, value, strong = REGION_I, "rho a h", rah, False
    else:
        q = (h / a) / abs(ln_x)
        if q > band:
            region, param, value = REGION_I, "rho a h", rah
        elif q < 1.0 / band:
            region, param, value = REGION_II, "rho h^2", rhh
        else:
            region = CROSSOVER
            param, value = ("rho a h", rah) if rah >= rhh else ("rho h^2", rhh)
        strong = value < smallness
    return RegimeReport(rho_bar, h, a, g, ln_a2d, q, region, strong, param, value,
                        None if N is None else ng_class(N * g))


def dilute_energy_2d(rho: float, a2d_ln: float) -> float:
    """4 pi rho / |ln(rho a_2D^2)| with ln a_2D given."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    ln_x = math.log(rho) + 2.0 * a2d_ln
    if not ln_x < 0:
        raise DiluteRangeError(f"rho a_2D^2 = exp({ln_x:.6g}) >= 1: not dilute")
    return 4.0 * math.pi * rho / abs(ln_x)


def dilute_energy_3d(rho3: float, a: float) -> float:
    """4 pi rho a; warns when rho a^3 is not small."""
    if rho3 < 0 or a < 0:
        raise ValueError("rho and a must be nonnegative")
    if rho3 * a**3 > SMALLNESS:
        warnings.warn(f"rho a^3 = {rho3 * a**3:.3g} is not small", RuntimeWarning, stacklevel=2)
    return 4.0 * math.pi * rho3 * a
