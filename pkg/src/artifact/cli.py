"""Command-line front end.

Every subcommand takes its parameters as ``--key value`` flags and/or a
flat ``key = value`` config file (``--config``); flags win.  Parsing is
strict and reports every problem at once.  Results go to CSV (stdout or
``--out``).

Exit codes: 0 when every row converged and every check passed, 2 for
configuration errors, 3 for solver non-convergence or failed checks.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import bounds, experiments, gp, regimes, scattering
from .potentials import NAMES, by_name
from .transverse import scale_mode, solve_transverse

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


# ---------------------------------------------------------------------------
# schemas: key -> (kind, default, positive); default None means optional,
# REQUIRED means it must be given

REQUIRED = object()
POT = ("str", None, False)


def _f(default=None, positive=True):
    return ("float", default, positive)


def _fl(default=None):
    return ("floats", default, True)


SCHEMAS = {
    "transverse": {"potential": ("str", "harmonic", False), "h": _f(1.0), "dz": _f()},
    "scatter3d": {"potential": ("str", "square-barrier", False), "height": _f(8.0),
                  "radius": _f(1.0), "a": _f(1.0)},
    "scatter2d": {"potential": ("str", "soft-disc", False), "lam": _fl([0.1]), "radius": _f(1.0),
                  "R": _fl(None), "epsilon": _f(1.0)},
    "a2d": {"h": _f(REQUIRED), "a": _f(REQUIRED), "s4": _f(), "transverse": ("str", "harmonic", False)},
    "gp2d": {"trap": ("str", "harmonic", False), "Ng": _f(REQUIRED, False), "L": _f(1.0),
             "side": _f(1.0), "cells": ("int", gp.DEFAULT_CELLS, True), "r_max": _f(),
             "tol": _f(), "state_out": ("str", None, False)},
    "gp3d": {"trap": ("str", "harmonic", False), "transverse": ("str", "harmonic", False),
             "Na": _f(REQUIRED, False), "h": _f(REQUIRED), "L": _f(1.0), "dr": _f(), "dz": _f(),
             "tol": _f()},
    "tf": {"trap": ("str", "harmonic", False), "N": _f(REQUIRED), "coupling": _f(1.0),
           "L": _f(1.0), "side": _f(1.0)},
    "selfg": {"trap": ("str", "harmonic", False), "transverse": ("str", "harmonic", False),
              "N": _f(REQUIRED), "L": _f(1.0), "h": _f(REQUIRED), "a": _f(REQUIRED),
              "side": _f(1.0), "scan_points": ("int", 6, False)},
    "regime": {"rho_bar": _f(REQUIRED), "h": _f(REQUIRED), "a": _f(), "ln_a2d": _f(None, False),
               "s4": _f(), "N": _f(), "band": _f(regimes.REGION_BAND),
               "smallness": _f(regimes.SMALLNESS)},
    "temple": {"transverse": ("str", "harmonic", False), "h": _fl([0.2, 0.1, 0.05]),
               "g": _f(0.5), "density": _f(0.3)},
    "dyson": {"potential": ("str", "hard-core", False), "radius": _f(1.0), "lam": _f(100.0),
              "R": _f(2.0), "epsilon": _f(1.0), "R_tilde": _fl([1e3, 1e4, 1e5, 1e6])},
    "crossover": {"h": _fl([0.2, 0.1, 0.05]), "g": _f(0.5, False), "trap": ("str", "harmonic", False),
                  "transverse": ("str", "harmonic", False), "L": _f(1.0), "dr": _f(),
                  "dz_factor": _f(), "workers": ("int", 1, True)},
    "phase": {"h_over_a": _fl(None), "rho_h2": _fl(None), "s4": _f()},
    "accept": {"criterion": ("ints", REQUIRED, True)},
}
# ``table`` is the (r, v) file behind any selection named "tabulated"
COMMON = {"out": ("str", None, False), "table": ("str", None, False)}

HELP = {
    "transverse": "transverse mode, energies and moments",
    "scatter3d": "3D zero-energy scattering length",
    "scatter2d": "2D scattering length and E_R (sweep when lam or R is a list)",
    "a2d": "effective 2D scattering length (log domain)",
    "gp2d": "2D GP ground state",
    "gp3d": "3D GP ground state on an (r, z) grid",
    "tf": "Thomas-Fermi chemical potential and mean density",
    "selfg": "self-consistent coupling g",
    "regime": "coupling g and region label",
    "temple": "Temple bound for the transverse operator along an h ladder",
    "dyson": "modified 2D Dyson potential: nu(R~) and its asymptote",
    "crossover": "3D -> 2D GP energy crossover sweep",
    "phase": "region labels on an (h/a, rho h^2) grid",
    "accept": "run acceptance experiments by number",
}


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    output: str | None = None
    sources: dict = field(default_factory=dict)


def read_config_text(text: str, errors: list, origin: str = "config") -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{origin}:{n}: expected 'key = value', got {raw.strip()!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            errors.append(f"{origin}:{n}: empty key")
            continue
        if key in out:
            errors.append(f"{origin}:{n}: duplicate key {key!r}")
        out[key] = value
    return out


def _convert(key, raw, spec, errors):
    kind, _, positive = spec
    try:
        if kind == "str":
            return str(raw)
        if kind == "int":
            val = int(raw)
            vals = [val]
        elif kind == "float":
            val = float(raw)
            vals = [val]
        elif kind == "floats":
            val = [float(x) for x in str(raw).split(",") if x.strip()]
            vals = val
            if not val:
                errors.append(f"{key}: empty list")
                return None
        elif kind == "ints":
            val = [int(x) for x in str(raw).split(",") if x.strip()]
            vals = val
        else:  # pragma: no cover - schema typo
            raise AssertionError(kind)
    except ValueError:
        errors.append(f"{key}: cannot parse {raw!r} as {kind}")
        return None
    for v in vals:
        if not math.isfinite(v):
            errors.append(f"{key}: must be finite, got {v}")
            return None
        if positive and not v > 0:
            errors.append(f"{key}: must be positive, got {v}")
            return None
        if not positive and kind in ("float", "floats") and v < 0 and not key.endswith("ln_a2d"):
            errors.append(f"{key}: must be nonnegative, got {v}")
            return None
    return val


def validate(subcommand: str, raw: dict, sources: dict | None = None) -> RunConfig:
    """Check ``raw`` (key -> string) against the subcommand schema."""
    errors = []
    if subcommand not in SCHEMAS:
        raise ConfigError([f"unknown subcommand {subcommand!r}"])
    schema = dict(SCHEMAS[subcommand], **COMMON)
    params = {}
    for key in raw:
        if key not in schema:
            errors.append(f"{subcommand}.{key}: unknown key")
    for key, spec in schema.items():
        default = spec[1]
        if key in raw and raw[key] is not None:
            val = _convert(f"{subcommand}.{key}", raw[key], spec, errors)
            params[key] = val
        elif default is REQUIRED:
            if not (subcommand == "regime" and key == "a"):
                errors.append(f"{subcommand}.{key}: missing required field")
        else:
            params[key] = default
    for key in ("potential", "trap", "transverse"):
        name = params.get(key)
        if key in schema and name is not None and name not in NAMES:
            errors.append(f"{subcommand}.{key}: unknown potential {name!r}")
        if key in schema and name == "tabulated":
            table = params.get("table")
            if table is None:
                errors.append(f"{subcommand}.table: required when {key} = tabulated")
            elif not Path(table).is_file():
                errors.append(f"{subcommand}.table: no such file {table}")
    if subcommand == "crossover":
        for key in ("trap", "transverse"):
            if params.get(key) == "tabulated":
                errors.append(f"crossover.{key}: sweeps take named potentials only")
    if subcommand == "regime":
        has_a = raw.get("a") is not None
        has_ln = raw.get("ln_a2d") is not None
        if has_a and has_ln:
            errors.append("regime: give either a or ln_a2d, not both (over-specified)")
        elif not (has_a or has_ln):
            errors.append("regime.a: missing required field (or give ln_a2d)")
        if has_ln and params.get("ln_a2d") is not None and not params["ln_a2d"] < 0:
            errors.append("regime.ln_a2d: ln(a_2D/h) must be negative")
    if subcommand == "phase":
        for key in ("h_over_a", "rho_h2"):
            vals = params.get(key)
            if vals is not None and len(vals) > 1:
                d = [b - a for a, b in zip(vals[:-1], vals[1:])]
                if not (all(x > 0 for x in d) or all(x < 0 for x in d)):
                    errors.append(f"phase.{key}: ladder must be strictly sorted")
    if subcommand == "accept":
        for n in params.get("criterion") or []:
            if n not in experiments.ACCEPTANCE:
                errors.append(f"accept.criterion: no criterion {n}")
    if errors:
        raise ConfigError(errors)
    return RunConfig(subcommand, params, params.get("out"), sources or {})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="artifact",
        allow_abbrev=False,
        description="Dilute Bose gas in thin traps: scattering, GP/TF, bounds and sweeps.",
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for name, schema in SCHEMAS.items():
        p = sub.add_parser(name, help=HELP[name], description=HELP[name], allow_abbrev=False)
        p.add_argument("--config", help="flat key = value file; flags override it")
        for key, spec in dict(schema, **COMMON).items():
            kind, default = spec[0], spec[1]
            shown = "required" if default is REQUIRED else f"default {default}"
            p.add_argument(f"--{key}", dest=key, default=None, metavar=kind.upper(),
                           help=f"{kind} ({shown})")
    return parser


def parse_config(argv) -> RunConfig:
    """Parse flags (and the optional config file) into a validated RunConfig."""
    parser = build_parser()
    args, unknown = parser.parse_known_args(argv)
    if not args.subcommand:
        raise ConfigError(["no subcommand given"])
    errors = [f"{args.subcommand}: unknown argument {u!r}" for u in unknown]
    raw = {}
    sources = {}
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ConfigError(errors + [f"config {path}: {exc}"]) from None
        file_vals = read_config_text(text, errors, str(path))
        sub = file_vals.pop("subcommand", None)
        if sub is not None and sub != args.subcommand:
            errors.append(f"config {path}: written for {sub!r}, not {args.subcommand!r}")
        raw.update(file_vals)
        sources.update({k: str(path) for k in file_vals})
    for key, value in vars(args).items():
        if key in ("subcommand", "config") or value is None:
            continue
        raw[key] = value
        sources[key] = "flag"
    try:
        cfg = validate(args.subcommand, raw, sources)
    except ConfigError as exc:
        raise ConfigError(errors + exc.errors) from None
    if errors:
        raise ConfigError(errors)
    return cfg


# ---------------------------------------------------------------------------
# CSV


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or type(v).__name__.startswith("float"):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def emit_csv(rows, schema, path=None, stream=None) -> str:
    """Write header + rows; floats as shortest round-trip decimals.

    ``schema`` lists the columns.  Log-domain quantities carry the ``_ln``
    suffix.  Returns the CSV text; writes it to ``path`` (or ``stream``).
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(schema)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in schema])
    text = buf.getvalue()
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    elif stream is not None:
        stream.write(text)
    return text


def read_csv(path) -> list:
    """Rows of an emitted CSV with floats parsed back (bit-exact)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        rec = {}
        for k, v in r.items():
            try:
                rec[k] = float(v)
            except ValueError:
                rec[k] = v
        out.append(rec)
    return out


def _columns(rows, first=()):
    cols = list(first)
    for r in rows:
        for k in r:
            if k not in cols:
                cols.append(k)
    return cols


# ---------------------------------------------------------------------------
# subcommands; each returns (rows, ok)


def _pot(p, key, **params):
    if p[key] == "tabulated":
        return by_name("tabulated", path=p["table"])
    if p[key] == "box" and "side" in p:
        params.setdefault("side", p["side"])
    return by_name(p[key], **params)


def _s4_of(p, key="transverse"):
    return solve_transverse(_pot(p, key)).s4


def cmd_transverse(p):
    m = solve_transverse(_pot(p, "potential"))
    m = scale_mode(m, p["h"])
    row = dict(h=p["h"], e_perp=m.e_perp, e_perp_excited=m.e_perp_excited, gap=m.gap, s4=m.s4,
               s_inf_sq=m.s_inf_sq, ds2_inf=m.ds2_inf, norm=m.norm())
    return [row], True


def cmd_scatter3d(p):
    v = _pot(p, "potential", height=p["height"], radius=p["radius"])
    sol = scattering.solve_scattering_3d(v, p["a"])
    return [dict(potential=v.name, a_scale=p["a"], a=sol.a, fit_residual=sol.fit_residual)], True


def cmd_scatter2d(p):
    rows, ok = [], True
    for R in p["R"] or [p["radius"]]:
        for lam in p["lam"]:
            W = _pot(p, "potential", lam=lam, radius=p["radius"])
            sol = scattering.solve_scattering_2d(W, R, p["epsilon"])
            rows.append(dict(lam=lam, R=R, epsilon=p["epsilon"], a_scatt_ln=sol.ln_a_scatt,
                             E_R=sol.energy, eta=scattering.eta(lam, R, sol.ln_a_scatt)
                             if sol.ln_a_scatt > -math.inf else None, flagged=sol.flagged))
            ok &= not sol.flagged
    return rows, ok


def cmd_a2d(p):
    s4 = p["s4"] if p["s4"] is not None else _s4_of(p)
    eff = scattering.effective_a2d(p["h"], p["a"], s4)
    row = dict(h=p["h"], a=p["a"], s4=s4, a2d_ln=eff.ln_over_h)
    if eff.ln > -700:
        row["a2d"] = eff.value
    return [row], True


def cmd_gp2d(p):
    V = _pot(p, "trap")
    grid = None
    if p["r_max"] is not None and V.box is None:
        from .numerics import radial_stencil

        grid = radial_stencil(p["r_max"], p["cells"])
    elif V.box is None:
        grid = gp.default_radial_grid(V, p["Ng"], p["cells"])
    st = gp.minimize_gp2d(V, p["Ng"], grid, **({"tol": p["tol"]} if p["tol"] else {}))
    L = p["L"]
    if p["state_out"]:
        emit_csv([dict(r=float(r), phi=float(f)) for r, f in zip(st.grid.x, st.phi)],
                 ["r", "phi"], p["state_out"])
    row = dict(Ng=p["Ng"], L=L, energy=st.energy / L**2, mu=st.mu / L**2,
               quartic=st.quartic() / L**2, iterations=st.iterations, converged=st.converged)
    return [row], st.converged


def cmd_gp3d(p):
    V, Vp = _pot(p, "trap"), _pot(p, "transverse")
    grid = None
    if p["dr"] is not None or p["dz"] is not None:
        h, L = p["h"], p["L"]
        e2 = gp.energy_scale(V, p["Na"] * _s4_of(p) / h)
        grid = gp.cylindrical_grid(gp.radial_extent(V, e2), p["dr"] or L / gp.R_RESOLUTION,
                                   gp.transverse_extent(Vp) * h, p["dz"] or h / gp.Z_RESOLUTION)
    st = gp.minimize_gp3d(V, Vp, p["Na"], p["h"], p["L"], grid=grid,
                          **({"tol": p["tol"]} if p["tol"] else {}))
    m = st.meta
    den = m["energy2d"]
    row = dict(Na=p["Na"], h=p["h"], energy=st.energy, mu=st.mu, e_perp=m["e_perp"],
               energy2d=den, ansatz_energy=m["ansatz_energy"],
               ratio=(st.energy - m["e_perp"]) / den if den else None,
               iterations=st.iterations, converged=st.converged)
    return [row], st.converged and st.energy <= m["ansatz_energy"]


def cmd_tf(p):
    V = _pot(p, "trap")
    if p["L"] != 1.0:
        V = V.scaled(p["L"])
    tf = gp.tf_solve(V, p["N"], p["coupling"], numeric=not (V.is_homogeneous or V.box))
    return [dict(N=p["N"], coupling=p["coupling"], L=p["L"], mu_tf=tf.mu_tf, rho_bar=tf.rho_bar,
                 E_tf=tf.E_tf, r0=tf.r0, numeric=tf.numeric)], True


def cmd_selfg(p):
    V = _pot(p, "trap")
    mode = solve_transverse(_pot(p, "transverse"))
    res = gp.self_consistent_g(p["N"], p["L"], p["h"], p["a"], V, mode,
                               scan_points=p["scan_points"])
    return [dict(g=res.g, rho_bar=res.rho_bar, g_closed=res.g_closed, rho_bar_tf=res.rho_bar_tf,
                 method=res.method, iterations=res.iterations, roots=res.roots,
                 multiple_roots=res.multiple_roots, converged=res.converged)], res.converged


def cmd_regime(p):
    s4 = p["s4"] if p["s4"] is not None else regimes.HARMONIC_S4
    h = p["h"]
    a = p["a"] if p["a"] is not None else -h / (2.0 * s4 * p["ln_a2d"])
    rep = regimes.classify(p["rho_bar"], h, a, s4, N=p["N"], band=p["band"],
                           smallness=p["smallness"])
    return [dict(rho_bar=rep.rho_bar, h=h, a=a, g=rep.g, a2d_ln=rep.ln_a2d_over_h, q=rep.q,
                 region=rep.region, ng_class=rep.ng_class, strong_confinement=rep.strong_confinement,
                 confinement_parameter=rep.confinement_parameter,
                 confinement_value=rep.confinement_value)], True


def cmd_temple(p):
    Vp = _pot(p, "transverse")
    rows = []
    for h in p["h"]:
        t = bounds.temple_hx(Vp, h, p["g"], p["density"])
        rows.append(dict(h=h, g=p["g"], density=p["density"], expectation=t.expectation,
                         bound=t.bound.bound, ground=t.ground, error_term=t.bound.error_term,
                         relative_error=t.relative_error, gap=t.gap,
                         sandwich=t.bound.bound <= t.ground <= t.expectation))
    return rows, all(r["sandwich"] for r in rows)


def cmd_dyson(p):
    R, eps = p["R"], p["epsilon"]
    if p["potential"] == "hard-core":
        ln_a = math.log(p["radius"])
        if not R > p["radius"]:
            raise ConfigError([f"dyson.R: must exceed the core radius {p['radius']}"])
        fam = bounds.hard_disc_family(ln_a)
    else:
        W = _pot(p, "potential", lam=p["lam"], radius=p["radius"])
        sol = scattering.solve_scattering_2d(W, R, eps)
        ln_a = sol.ln_a_scatt
        fam = bounds.recursion_family(sol.energy, R)
    rows = []
    for x in p["R_tilde"]:
        Rt = x * math.exp(ln_a)
        d = bounds.dyson_u2d(R, Rt, eps, fam, ln_a=ln_a)
        rows.append(dict(R_tilde_over_a=x, R_tilde=Rt, nu=d.nu, asymptote=d.asymptote,
                         deviation=d.deviation, admissibility=d.admissibility))
    return rows, True


def cmd_crossover(p):
    ladders = {"h": p["h"]}
    fixed = {k: p[k] for k in ("g", "trap", "transverse", "L", "dr", "dz_factor")}
    res = experiments.run_crossover(experiments.SweepSpec(ladders, fixed, workers=p["workers"]))
    rows = []
    for r in res.rows:
        rec = r.record()
        rows.append(rec)
    ok = res.ok and res.summary["upper_bound_every_row"]
    return rows, ok


def cmd_phase(p):
    ladders = {}
    if p["h_over_a"]:
        ladders["h_over_a"] = p["h_over_a"]
    if p["rho_h2"]:
        ladders["rho_h2"] = p["rho_h2"]
    fixed = {"s4": p["s4"]} if p["s4"] is not None else {}
    res = experiments.run_phase_diagram(experiments.SweepSpec(ladders, fixed))
    return [r.record() for r in res.rows], True


def cmd_accept(p):
    rows, ok = [], True
    for n in p["criterion"]:
        res = experiments.run_criterion(n)
        for line in res.lines():
            print(line, file=sys.stderr)
        ok &= res.passed
        for c in res.checks:
            rows.append(dict(criterion=n, check=c.name, value=c.value, limit=c.limit, passed=c.passed))
    return rows, ok


COMMANDS = {name: globals()[f"cmd_{name}"] for name in SCHEMAS}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help or argparse usage errors
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        rows, ok = COMMANDS[cfg.subcommand](cfg.params)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"{cfg.subcommand}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        emit_csv(rows, _columns(rows), cfg.output, None if cfg.output else sys.stdout)
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK if ok else EXIT_SOLVER


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
