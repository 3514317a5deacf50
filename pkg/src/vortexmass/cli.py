"""
Batch front end
===============

Each invocation runs one scenario and writes, into the output directory,

* ``metadata.txt`` with flat ``key = value`` lines (written first, rewritten
  with measured quantities at the end),
* ``data.csv`` with columns ``t,rho,m,u`` at 17 significant digits,
* scenario-specific extras (``shock.csv``, ``fan.csv``, ``convergence.csv``).

Configuration is ``key = value`` text, one entry per line, ``#`` comments
allowed. Command-line ``--set key=value`` entries override the file.

Exit codes: 0 success, 2 an acceptance threshold failed, 1 runtime error.
"""
from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, characteristics, exact, hjfd, shocks, viscous
from .characteristics import RadialInitialData

__all__ = ["ConfigError", "ScenarioConfig", "parse_config", "run_scenario", "main", "SCENARIOS"]

SCENARIOS = (
    "exact",
    "characteristics",
    "shock-two-bumps",
    "spurious",
    "fd",
    "viscous",
    "asymptotics",
    "convergence-study",
)
PRESETS = ("square", "triangle", "two-bumps", "gap", "steps")
MONOTONE_SCENARIOS = {"characteristics", "spurious", "fd", "viscous", "asymptotics", "convergence-study"}

# key -> (parser, default)
_FLOAT = float
_INT = int


def _floats(text: str):
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _str(text: str):
    return text.strip()


KEYS = {
    "scenario": (_str, None),
    "alpha": (_FLOAT, 0.5),
    "d": (_INT, 1),
    "data": (_str, "square"),
    "c0": (_FLOAT, 1.0),
    "L": (_FLOAT, 1.0),
    "b": (_FLOAT, None),  # gap width or right end of the second bump
    "c1": (_FLOAT, 1.0),
    "c2": (_FLOAT, 1.0),
    "a": (_FLOAT, 1.5),
    "edges": (_floats, None),
    "values": (_floats, None),
    "n_cells": (_INT, 200),
    "mass": (_FLOAT, 1.0),
    "T": (_FLOAT, 1.0),
    "times": (_floats, None),
    "delta": (_FLOAT, 0.05),
    "deltas": (_floats, (0.1, 0.05, 0.025)),
    "epsilon": (_FLOAT, 1e-2),
    "epsilons": (_floats, (1e-1, 1e-2, 1e-3)),
    "h_rho": (_FLOAT, None),
    "h_t": (_FLOAT, None),
    "h_shock": (_FLOAT, 1e-3),
    "rho_max": (_FLOAT, None),
    "n_out": (_INT, 401),
    "y_max": (_FLOAT, 50.0),
    "kappa0": (_FLOAT, 0.1),
    "y_min": (_FLOAT, 0.0),
    "window": (_floats, (0.0, 2.0)),
    "seed": (_INT, 0),
}
# which keys each scenario reads; anything else set explicitly is a validation error
_COMMON = {"scenario", "alpha", "d", "data", "c0", "L", "b", "c1", "c2", "a", "edges", "values", "n_cells", "n_out", "seed"}
USED = {
    "exact": {"scenario", "alpha", "d", "mass", "times", "n_out", "y_max", "seed"},
    "characteristics": _COMMON | {"T", "times", "rho_max"},
    "shock-two-bumps": {"scenario", "alpha", "d", "c1", "c2", "a", "b", "T", "times", "h_shock", "rho_max", "n_out", "seed"},
    "spurious": {"scenario", "alpha", "d", "c0", "L", "T", "times", "rho_max", "n_out", "seed"},
    "fd": _COMMON | {"T", "times", "delta", "deltas", "h_rho", "h_t", "rho_max"},
    "viscous": _COMMON | {"T", "times", "epsilon", "h_rho", "h_t", "rho_max", "window"},
    "asymptotics": _COMMON | {"times", "y_max", "y_min", "kappa0"},
    "convergence-study": _COMMON | {"T", "deltas", "epsilons", "rho_max", "window"},
}


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every problem found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict
    explicit: set = field(default_factory=set)

    def __getattr__(self, name):
        try:
            return self.__dict__["params"][name]
        except KeyError:
            raise AttributeError(name) from None

    def initial_data(self):
        """Initial datum: RadialInitialData, or TwoBumpParams for two bumps."""
        p = self.params
        kind = p["data"]
        if kind == "square":
            return characteristics.square_data(p["c0"], p["L"])
        if kind == "gap":
            return characteristics.gap_data(p["c0"], p["L"], 0.5 if p["b"] is None else p["b"])
        if kind == "triangle":
            return characteristics.triangle_data(p["n_cells"])
        if kind == "steps":
            return RadialInitialData(p["edges"], p["values"])
        if kind == "two-bumps":
            return self.two_bumps()
        raise ConfigError([f"unknown data preset {kind!r}"])

    def two_bumps(self):
        p = self.params
        b = 2.5 if p["b"] is None else p["b"]
        return shocks.TwoBumpParams(p["c1"], p["c2"], p["a"], b, p["alpha"])


def _read_pairs(text: str):
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",), inline_comment_prefixes=("#",))
    parser.optionxform = str  # keys are case-sensitive (T, L)
    parser.read_string("[scenario]\n" + text)
    return dict(parser["scenario"])


def parse_config(text: str, overrides: dict | None = None) -> ScenarioConfig:
    """Parse and validate ``key = value`` text; raises ConfigError with all problems."""
    errors = []
    try:
        raw = _read_pairs(text)
    except configparser.Error as exc:
        raise ConfigError([f"malformed configuration: {exc}"]) from exc
    raw.update(overrides or {})
    params = {k: v[1] for k, v in KEYS.items()}
    explicit = set()
    for key, value in raw.items():
        if key not in KEYS:
            errors.append(f"unknown key {key!r}")
            continue
        try:
            params[key] = KEYS[key][0](value)
            explicit.add(key)
        except ValueError:
            errors.append(f"cannot parse {key} = {value!r}")
    scenario = params["scenario"]
    if scenario is None:
        errors.append("missing key 'scenario'")
    elif scenario not in SCENARIOS:
        errors.append(f"unknown scenario {scenario!r}; choose from {', '.join(SCENARIOS)}")
    else:
        for key in sorted(explicit - USED[scenario]):
            errors.append(f"key {key!r} is not used by scenario {scenario!r}")
    errors += _validate(params, scenario)
    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(scenario, params, explicit)


def _validate(p: dict, scenario) -> list:
    errors = []
    al = p["alpha"]
    if isinstance(al, float) and not 0 < al < 1:
        errors.append(f"alpha outside (0,1): {al!r}")
    if not 1 <= p["d"] <= 10:
        errors.append(f"d must be a positive dimension, got {p['d']!r}")
    if p["data"] not in PRESETS:
        errors.append(f"unknown data preset {p['data']!r}; choose from {', '.join(PRESETS)}")
    for key in ("c0", "L", "c1", "c2", "mass", "h_shock", "epsilon", "y_max", "kappa0"):
        if not p[key] > 0:
            errors.append(f"{key} must be positive")
    for key in ("T",):
        if not p[key] > 0:
            errors.append(f"{key} must be positive")
    for key in ("h_rho", "h_t", "rho_max", "b"):
        if p[key] is not None and not p[key] > 0:
            errors.append(f"{key} must be positive")
    if p["n_out"] < 2:
        errors.append("n_out must be at least 2")
    if p["times"] is not None and any(t < 0 for t in p["times"]):
        errors.append("times must be non-negative")
    for key in ("deltas", "epsilons"):
        seq = p[key]
        if any(v <= 0 for v in seq) or any(b >= a for a, b in zip(seq, seq[1:])):
            errors.append(f"{key} must be positive and strictly decreasing")
    if not p["delta"] > 0:
        errors.append("delta must be positive")
    if len(p["window"]) != 2 or not p["window"][0] < p["window"][1]:
        errors.append("window must be two increasing numbers")

    kind = p["data"]
    if kind == "steps":
        e, v = p["edges"], p["values"]
        if e is None or v is None:
            errors.append("data = steps needs edges and values")
        elif len(e) != len(v) + 1:
            errors.append("edges must have one more entry than values")
        else:
            if any(b <= a for a, b in zip(e, e[1:])) or e[0] != 0:
                errors.append("edges must start at 0 and increase")
            if any(x < 0 for x in v):
                errors.append("values must be non-negative")
            if scenario in MONOTONE_SCENARIOS and any(b > a for a, b in zip(v, v[1:])):
                errors.append(f"values must be non-increasing for scenario {scenario!r}")
    if kind == "two-bumps" or scenario == "shock-two-bumps":
        b = 2.5 if p["b"] is None else p["b"]
        if not 1 < p["a"] < b:
            errors.append("two bumps need 1 < a < b")
        if scenario in MONOTONE_SCENARIOS - {"fd"}:
            errors.append(f"two-bumps data is not non-increasing; scenario {scenario!r} needs monotone data")
    if kind == "gap" and scenario in {"fd", "viscous", "convergence-study"}:
        pass  # fine: the mass is still non-decreasing

    # CFL check of explicit overrides, before any run starts
    if scenario == "fd" and not errors and p["h_rho"] is not None and p["h_t"] is not None:
        M_bar = _mass_of(p)
        bound = p["delta"] ** (1 - al) / (al * M_bar)
        if not p["h_t"] / p["h_rho"] < bound:
            errors.append(
                f"CFL violated: h_t/h_rho = {p['h_t'] / p['h_rho']:.6g} must be < delta^(1-alpha)/(alpha Mbar) = {bound:.6g}"
            )
    if scenario == "viscous" and not errors and p["h_t"] is not None:
        cfg = _viscous_config(p)
        try:
            cfg.check()
        except viscous.StabilityError as exc:
            errors.append(str(exc))
    return errors


def _mass_of(p: dict) -> float:
    cfg = ScenarioConfig(p["scenario"] or "fd", p)
    data = cfg.initial_data()
    return data.mass


def _viscous_config(p: dict) -> viscous.ViscousConfig:
    data = ScenarioConfig(p["scenario"], p).initial_data()
    h_rho = p["h_rho"] or viscous.default_h_rho(p["epsilon"])
    rho_max = p["rho_max"] or _default_window_max(data, p["alpha"], p["T"])
    return viscous.ViscousConfig(
        p["epsilon"], p["alpha"], p["d"], h_rho, p["h_t"], rho_max, p["T"], u0_sup=data.sup, M=data.mass
    )


def _default_window_max(data, alpha, T) -> float:
    if isinstance(data, shocks.TwoBumpParams):
        end, sup = data.b, max(data.c1, data.c2)
    else:
        end, sup = data.support_end, data.sup
    return 2.0 * end * (1 + alpha * sup**alpha * T) + 1.0


# -- output ---------------------------------------------------------------------


def _fmt(x) -> str:
    return format(float(x), ".17g")


CSV_HEADER = "# columns: t [time], rho [volume coordinate], m [enclosed mass], u [density]; nondimensional\nt,rho,m,u\n"


def _write_csv(path: Path, rows) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(CSV_HEADER)
        for t, rho, m, u in rows:
            for r, mm, uu in zip(rho, m, u):
                fh.write(f"{_fmt(t)},{_fmt(r)},{_fmt(mm)},{_fmt(uu)}\n")


def _write_table(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_meta(path: Path, meta: dict) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for key, value in meta.items():
            if isinstance(value, float):
                value = _fmt(value)
            elif isinstance(value, (tuple, list)):
                value = ",".join(_fmt(v) if isinstance(v, float) else str(v) for v in value)
            fh.write(f"{key} = {value}\n")


def _times(cfg: ScenarioConfig, default):
    return list(cfg.times) if cfg.times is not None else list(default)


def _stride(n_points: int, n_out: int) -> int:
    return max(1, int(math.ceil((n_points - 1) / max(n_out - 1, 1))))


# -- scenarios ----------------------------------------------------------------------
#
# Each runner returns (rows, extra, checks) where rows feed data.csv, extra is
# a dict of additional metadata and checks maps an acceptance name to a bool.


def _run_exact(cfg, out, jobs):
    al, M, dim = cfg.alpha, cfg.mass, cfg.d
    params = exact.SelfSimilarParams(al, M, dim)
    quad = exact.profile_mass_quadrature(params)
    times = _times(cfg, (1.0, 10.0, 100.0))
    if any(t <= 0 for t in times):
        raise ValueError("exact scenario needs t > 0")
    rows = []
    for t in times:
        rho = np.linspace(0.0, t ** (1 / al) * cfg.y_max, cfg.n_out)
        u = analysis.self_similar_u_rho(M, al, t, rho)
        m = self_similar_mass_at(params, t, rho)
        rows.append((t, rho, m, u))
    err = abs(quad - M)
    return rows, {"quadrature_mass": quad, "quadrature_mass_error": err}, {"quadrature_mass_within_1e-8": err < 1e-8}


def self_similar_mass_at(params, t, rho):
    return exact.self_similar_mass(params, np.asarray(rho) * t ** (-1 / params.alpha))


def _rho_grid(cfg, data, T):
    rho_max = cfg.rho_max or _default_window_max(data, cfg.alpha, T)
    return np.linspace(0.0, rho_max, cfg.n_out)


def _run_characteristics(cfg, out, jobs):
    data, al = cfg.initial_data(), cfg.alpha
    times = _times(cfg, np.linspace(0.0, cfg.T, 5))
    rho = _rho_grid(cfg, data, max(times))
    rows = [(t, rho, characteristics.eval_m(t, rho, data, al), characteristics.eval_u(t, rho, data, al)) for t in times]
    pos = [t for t in times if t > 0]
    ok = True
    worst = 0.0
    if pos:
        rep = analysis.check_global_bound(lambda t, r: characteristics.eval_m(t, r, data, al), al, pos, rho)
        ok, worst = rep.ok, rep.worst_ratio
    return rows, {"global_bound_worst_ratio": worst, "mass": data.mass}, {"global_bound": ok}


def _run_two_bumps(cfg, out, jobs):
    pr = cfg.two_bumps()
    path, sol = shocks.two_bump_solve(pr, cfg.T, cfg.h_shock)
    res = max(
        float(shocks.rh_residual(v, sol.mass_at_shock(t), sol.u_left(t), sol.u_right(t), pr.alpha))
        for t, v in zip(path.times, path.speeds)
    )
    lax = shocks.lax_oleinik_check(sol, path, pr.alpha)
    times = _times(cfg, np.linspace(0.0, cfg.T, 5))
    rho = _rho_grid(cfg, pr, cfg.T)
    rows = [(t, rho, sol.m(t, rho), sol.u(t, rho)) for t in times]
    _write_table(out / "shock.csv", "t,S,dS", zip(path.times, path.positions, path.speeds))
    extra = {
        "rh_residual_max": res,
        "rk4_error_estimate": path.error_estimate,
        "shock_position_T": float(path.positions[-1]),
        "lax_oleinik_passed": lax.all_passed,
    }
    return rows, extra, {"rh_residual_below_1e-8": res < 1e-8, "lax_oleinik": lax.all_passed}


def _run_spurious(cfg, out, jobs):
    al, c0, L = cfg.alpha, cfg.c0, cfg.L
    path, sp = shocks.spurious_square(c0, L, al, cfg.T, 200)
    lax = shocks.lax_oleinik_check(sp, path, al)
    times = _times(cfg, np.linspace(0.0, cfg.T, 5))
    rho = _rho_grid(cfg, characteristics.square_data(c0, L), cfg.T)
    rows = [(t, rho, sp.m(t, rho), sp.u(t, rho)) for t in times]
    fan = [
        (t, rho, characteristics.square_rarefaction_m(c0, L, al, t, rho), characteristics.square_rarefaction_u(c0, L, al, t, rho))
        for t in times
    ]
    _write_csv(out / "fan.csv", fan)
    _write_table(out / "shock.csv", "t,S,dS", zip(path.times, path.positions, path.speeds))
    # the spurious shock must violate the admissibility condition for t > 0
    fails = not bool(np.any(lax.passed[1:]))
    return rows, {"lax_oleinik_passed_anywhere": not fails}, {"lax_oleinik_rejects_spurious": fails}


def _fd_inputs(cfg):
    data = cfg.initial_data()
    if isinstance(data, shocks.TwoBumpParams):
        return data.m0, data.mass, None
    oracle = (lambda t, r: characteristics.eval_m(t, r, data, cfg.alpha)) if isinstance(data, RadialInitialData) else None
    return data, data.mass, oracle


def _fd_rows(sol, times, n_out):
    k = _stride(sol.rho.size, n_out)
    U = hjfd.derive_u(sol)
    rows = []
    for t in times:
        i = int(np.argmin(np.abs(sol.times - t)))
        rows.append((sol.times[i], sol.rho[::k], sol.values[i, ::k], U[i, ::k]))
    return rows


def _run_fd(cfg, out, jobs):
    al = cfg.alpha
    m0, M_bar, oracle = _fd_inputs(cfg)
    times = _times(cfg, np.linspace(0.0, cfg.T, 5))
    rho_max = cfg.rho_max or _default_window_max(cfg.initial_data(), al, cfg.T)
    sol = hjfd.run_fd(
        m0, cfg.T, cfg.delta, al, rho_max=rho_max, h_rho=cfg.h_rho, h_t=cfg.h_t, M_bar=M_bar, save_times=times
    )
    rows = _fd_rows(sol, times, cfg.n_out)
    extra = {f"fd_{k}": v for k, v in sol.meta.items()}
    checks = {}
    pos = sol.times > 0
    rep = analysis.check_global_bound(sol.values[pos], al, sol.times[pos], sol.rho)
    checks["global_bound"] = rep.ok
    checks["monotone_in_rho"] = bool(np.all(np.diff(sol.values, axis=1) >= -1e-10))
    if oracle is not None:
        err = float(np.max(np.abs(sol.final - oracle(sol.final_time, sol.rho))))
        extra["sup_error_T"] = err
        # the rate is measured on the scheme's default window unless rho_max is set
        table = hjfd.convergence_study(m0, cfg.deltas, oracle, T=cfg.T, alpha=al, rho_max=cfg.rho_max, jobs=jobs)
        _write_table(out / "convergence.csv", "delta,sup_error", table.rows())
        extra["measured_slope"] = table.slope
        extra["slope_window"] = (0.7 * al, 1.5 * al)
        checks["errors_decrease"] = bool(np.all(np.diff(table.errors) < 0))
        checks["slope_in_window"] = table.slope is not None and 0.7 * al <= table.slope <= 1.5 * al
    return rows, extra, checks


def _run_viscous(cfg, out, jobs):
    al = cfg.alpha
    data = cfg.initial_data()
    h_rho = cfg.h_rho or viscous.default_h_rho(cfg.epsilon)
    rho_max = cfg.rho_max or _default_window_max(data, al, cfg.T)
    times = _times(cfg, np.linspace(0.0, cfg.T, 5))
    sol = viscous.run_viscous(data, cfg.epsilon, al, cfg.T, rho_max=rho_max, h_rho=h_rho, h_t=cfg.h_t, dim=cfg.d, save_times=times)
    rows = _fd_rows(sol, times, cfg.n_out)
    extra = {f"viscous_{k}": v for k, v in sol.meta.items()}
    pos = sol.times > 0
    checks = {
        "max_principle": bool(np.all(sol.values >= -1e-10) and np.all(sol.values <= data.mass + 1e-10)),
        "monotone_in_rho": bool(np.all(np.diff(sol.values, axis=1) >= -1e-10)),
        "global_bound": analysis.check_global_bound(sol.values[pos], al, sol.times[pos], sol.rho).ok,
    }
    lo, hi = cfg.window
    mask = (sol.rho >= lo) & (sol.rho <= hi)
    ref = characteristics.eval_m(sol.final_time, sol.rho[mask], data, al)
    extra["sup_distance_to_fan_on_window"] = float(np.max(np.abs(sol.final[mask] - ref)))
    return rows, extra, checks


def _run_asymptotics(cfg, out, jobs):
    al, dim = cfg.alpha, cfg.d
    data = cfg.initial_data()
    M = data.mass
    times = _times(cfg, (10.0, 100.0, 1000.0))
    if any(t <= 0 for t in times):
        raise ValueError("asymptotics needs t > 0")
    u = analysis.radial_evaluator(lambda t, r: characteristics.eval_u(t, r, data, al), dim)
    m = lambda t, r: characteristics.eval_m(t, r, data, al)  # noqa: E731
    y = np.concatenate([[0.0], np.geomspace(1e-3, cfg.y_max, cfg.n_out - 1)])
    kappa = np.geomspace(cfg.kappa0, 1e4, cfg.n_out)
    prof = [analysis.relative_error_profile(u, M, al, dim, t, y, y_min=cfg.y_min) for t in times]
    mass = [analysis.mass_rel_error(m, M, al, t, kappa, cfg.kappa0) for t in times]
    rows = []
    for t in times:
        rho = np.linspace(0.0, t ** (1 / al) * cfg.y_max, cfg.n_out)
        rows.append((t, rho, m(t, rho), characteristics.eval_u(t, rho, data, al)))
    extra = {"times": tuple(float(t) for t in times), "profile_rel_error": tuple(prof), "mass_rel_error": tuple(mass)}
    checks = {
        "profile_error_decreases": bool(np.all(np.diff(prof) < 0)),
        "mass_error_decreases": bool(np.all(np.diff(mass) < 0)),
    }
    return rows, extra, checks


def _run_convergence(cfg, out, jobs):
    al = cfg.alpha
    m0, M_bar, oracle = _fd_inputs(cfg)
    if oracle is None:
        raise ValueError("convergence-study needs monotone step data with a characteristics oracle")
    data = cfg.initial_data()
    rho_max = cfg.rho_max or hjfd.default_rho_max(data, al, cfg.T, 0.0)
    table = hjfd.convergence_study(m0, cfg.deltas, oracle, T=cfg.T, alpha=al, rho_max=rho_max, jobs=jobs)
    _write_table(out / "convergence.csv", "delta,sup_error", table.rows())
    lo, hi = cfg.window
    vv = viscous.vanishing_viscosity_study(data, cfg.epsilons, cfg.T, al, window=(lo, hi), jobs=jobs)
    _write_table(out / "viscosity.csv", "epsilon,sup_distance", vv.rows())
    rho = np.linspace(0.0, rho_max, cfg.n_out)
    rows = [(cfg.T, rho, oracle(cfg.T, rho), characteristics.eval_u(cfg.T, rho, data, al))]
    extra = {
        "deltas": tuple(table.deltas.tolist()),
        "sup_errors": tuple(table.errors.tolist()),
        "measured_slope": table.slope,
        "slope_window": (0.7 * al, 1.5 * al),
        "epsilons": tuple(vv.epsilons.tolist()),
        "viscous_distances": tuple(vv.distances.tolist()),
    }
    checks = {
        "errors_decrease": bool(np.all(np.diff(table.errors) < 0)),
        "slope_in_window": table.slope is not None and 0.7 * al <= table.slope <= 1.5 * al,
        "viscous_distances_decrease": vv.monotone,
    }
    return rows, extra, checks


RUNNERS = {
    "exact": _run_exact,
    "characteristics": _run_characteristics,
    "shock-two-bumps": _run_two_bumps,
    "spurious": _run_spurious,
    "fd": _run_fd,
    "viscous": _run_viscous,
    "asymptotics": _run_asymptotics,
    "convergence-study": _run_convergence,
}


def run_scenario(cfg: ScenarioConfig, out_dir, jobs: int = 1) -> int:
    """Run one scenario, writing artifacts to ``out_dir``; returns the exit code."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"scenario": cfg.scenario, "status": "running"}
    meta.update({f"param.{k}": v for k, v in sorted(cfg.params.items()) if v is not None and k != "scenario"})
    meta_path = out / "metadata.txt"
    _write_meta(meta_path, meta)
    try:
        rows, extra, checks = RUNNERS[cfg.scenario](cfg, out, jobs)
        _write_csv(out / "data.csv", rows)
    except Exception as exc:  # recorded, then reported with context
        meta["status"] = "error"
        meta["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
        _write_meta(meta_path, meta)
        print(f"error in scenario {cfg.scenario!r}: {meta['error']}", file=sys.stderr)
        return 1
    meta.update({f"result.{k}": v for k, v in extra.items()})
    meta.update({f"check.{k}": "pass" if ok else "fail" for k, ok in checks.items()})
    passed = all(checks.values())
    meta["status"] = "ok" if passed else "acceptance-failed"
    _write_meta(meta_path, meta)
    return 0 if passed else 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vortexmass", description="Run a vortexmass scenario and write CSV data.")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", type=Path, help="key = value configuration file")
        p.add_argument("--out", type=Path, default=Path("out") / name, help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a configuration key")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    text = ""
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            print(f"cannot read config: {exc}", file=sys.stderr)
            return 1
    overrides = {"scenario": args.scenario}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            print(f"--set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return 1
        overrides[key.strip()] = value.strip()
    if args.jobs < 1:
        print("--jobs must be at least 1", file=sys.stderr)
        return 1
    try:
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1
    return run_scenario(cfg, args.out, args.jobs)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
