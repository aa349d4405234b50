"""Command line: JSON configs in, deterministic JSON/CSV/PGM artifacts out.

Every run writes ``<command>.json`` plus command-specific CSV and graymap
files into the output directory, and a ``manifest.json`` listing their
SHA-256 hashes. Exit codes: 0 success, 2 configuration error, 3 the
requested object does not exist, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from . import barrier as B
from . import config as cfg
from .errors import ConfigError, InfeasibleError, NumericalError
from .io import config_hash, sha256_file, write_csv, write_json
from .pde import (front_speed, simulate_frequency_law, simulate_heterogeneous,
                  simulate_two_population)
from .propagule import ScriptF, bubble_profile
from .reaction import BISTABLE, make_wolbachia_f, make_wolbachia_h, speed_sign_integral
from .wavespeed import bistable_speed

COMMANDS = ("speed", "theta-c", "sign-curve", "barrier", "lstar-curve", "cstar", "jump",
            "propagule", "simulate", "figures")
DEFAULT_OUT = "frontgate_out"
EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_NUMERICAL = 0, 2, 3, 4


class Bundle:
    """Collects the files of one run and writes the manifest."""

    def __init__(self, out: Path, command: str, config: dict):
        self.out = out
        self.command = command
        self.config = config
        self.hash = config_hash({"command": command, "config": config})
        self.files: list[Path] = []
        out.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.out / name

    def add(self, path: Path) -> Path:
        self.files.append(Path(path))
        return path

    def result(self, payload: dict, tolerances: dict | None = None) -> dict:
        doc = {"command": self.command, "config": self.config, "config_hash": self.hash,
               "version": __version__, "tolerances": tolerances or {}, "result": payload}
        self.add(write_json(self.path(f"{self.command}.json"), doc))
        return doc

    def manifest(self) -> Path:
        entries = {str(p.relative_to(self.out)): sha256_file(p) for p in sorted(self.files)}
        return write_json(self.out / "manifest.json",
                          {"command": self.command, "config_hash": self.hash,
                           "version": __version__, "files": entries})


# shared helpers --------------------------------------------------------------

def _oriented(spec: dict):
    """Build the model, reflecting u -> 1-u when F(1) < 0."""
    model = cfg.build_model(spec)
    if model.kind == BISTABLE and not model.degenerate and model.F1 < 0:
        return model.reflected(), True
    return model, False


def _barrier_model(spec: dict):
    model, reflected = _oriented(spec)
    if model.kind != BISTABLE:
        raise ConfigError("barrier computations need a bistable reaction")
    if model.degenerate:
        raise InfeasibleError("degenerate F(1)=0")
    return model, reflected


def _model_summary(model) -> dict:
    out = {"name": model.name, "kind": model.kind, "theta": model.theta}
    if model.kind == BISTABLE:
        out["F1"] = model.F1
        out["F_theta"] = model.F_theta
    return out


# commands --------------------------------------------------------------------

def cmd_speed(conf: dict, bundle: Bundle, threads: int) -> dict:
    model, reflected = _oriented(conf["model"])
    tol = conf.get("tol", 1e-10)
    if model.kind == BISTABLE:
        res = bistable_speed(model, tol=tol)
        c = -res.c if reflected else res.c
        payload = {"c_star": c, "residual": res.residual, "reflected": reflected,
                   "model": _model_summary(model)}
    else:
        from .wavespeed import kpp_min_speed
        payload = {"c_star": kpp_min_speed(model), "residual": 0.0, "reflected": False,
                   "model": _model_summary(model)}
    return bundle.result(payload, {"bisection": tol})


def cmd_theta_c(conf: dict, bundle: Bundle, threads: int) -> dict:
    model = cfg.build_model(conf["model"])
    if model.kind != BISTABLE:
        raise ConfigError("theta_c needs a bistable reaction")
    if model.degenerate or model.F1 <= 0:
        raise InfeasibleError("F(1) <= 0: F has no zero in (theta, 1)")
    payload = {"theta": model.theta, "theta_c": model.theta_c, "F1": model.F1,
               "F_theta": model.F_theta}
    if "law" in conf:
        law = cfg.build_law(conf["law"])
        payload["theta_c_weighted"] = ScriptF(model, law).theta_c
    return bundle.result(payload, {"brentq_xtol": 1e-15})


def sign_curve(params, eps_values, threads: int = 1) -> np.ndarray:
    """int f h_eps^4 for each eps; nan where h_eps is not positive."""
    from dataclasses import replace
    model = make_wolbachia_f(params)

    def one(eps):
        try:
            law = make_wolbachia_h(replace(params, eps=float(eps)))
        except ValueError:
            return np.nan
        return speed_sign_integral(model, law)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return np.array(list(pool.map(one, eps_values)))
    return np.array([one(e) for e in eps_values])


def sign_changes(eps, vals) -> list[list[float]]:
    """Maximal eps-intervals (by linear interpolation) where the integral is negative."""
    out = []
    start = None
    for i in range(len(eps)):
        neg = np.isfinite(vals[i]) and vals[i] < 0
        if neg and start is None:
            start = eps[0] if i == 0 else _cross(eps, vals, i - 1)
        if not neg and start is not None:
            out.append([float(start), float(_cross(eps, vals, i - 1))])
            start = None
    if start is not None:
        out.append([float(start), float(eps[-1])])
    return out


def _cross(eps, vals, i):
    a, b = vals[i], vals[i + 1]
    if not np.isfinite(b):
        return eps[i]
    if not np.isfinite(a) or a == b:
        return eps[i + 1]
    return eps[i] + (eps[i + 1] - eps[i]) * a / (a - b)


def cmd_sign_curve(conf: dict, bundle: Bundle, threads: int) -> dict:
    params = cfg.wolbachia_params(conf.get("params"))
    eps = np.linspace(conf.get("eps_min", 0.0), conf.get("eps_max", 1.0), conf.get("steps", 101))
    try:
        make_wolbachia_f(params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    vals = sign_curve(params, eps, threads)
    bundle.add(write_csv(bundle.path("sign_curve.csv"), ["eps", "integral"], [eps, vals]))
    intervals = sign_changes(eps, vals)
    payload = {"negative_intervals": intervals, "sign_change": bool(intervals),
               "invalid_eps": [float(e) for e, v in zip(eps, vals) if not np.isfinite(v)]}
    return bundle.result(payload, {"quad_epsabs": 1e-14})


def cmd_barrier(conf: dict, bundle: Bundle, threads: int) -> dict:
    model, reflected = _barrier_model(conf["model"])
    C, L = conf["C"], conf["L"]
    Ls, beta0, alpha0 = B.L_star(model, C)
    found = B.enumerate_barriers(model, C, L, dx=conf.get("dx", 1e-3))
    if not found:
        bundle.result({"barriers": [], "L_star": Ls, "reason": found.reason or "no_barrier",
                       "reflected": reflected})
        raise InfeasibleError(f"no barrier: L={L:g} < L_*({C:g})={Ls:.10g}")
    rows = []
    for i, sol in enumerate(found):
        name = f"barrier_{i}_{sol.kind}.csv"
        bundle.add(sol.to_csv(bundle.path(name)))
        rows.append({"file": name, "kind": sol.kind, "alpha": sol.pair.alpha,
                     "beta": sol.pair.beta, "C": sol.pair.C, "L": sol.pair.L,
                     "inner_residual": sol.inner_residual,
                     "outer_residual": sol.outer_residual, "energy_defect": sol.energy_defect})
    payload = {"barriers": rows, "L_star": Ls, "beta_star": beta0, "alpha_star": alpha0,
               "reflected": reflected}
    return bundle.result(payload, {"shooting": 1e-11, "dx": conf.get("dx", 1e-3)})


def cmd_lstar_curve(conf: dict, bundle: Bundle, threads: int) -> dict:
    model, reflected = _barrier_model(conf["model"])
    lo, hi, n = conf["C_min"], conf["C_max"], conf["steps"]
    if hi < lo:
        raise ConfigError("C_max must not be below C_min")
    if lo <= model.c_star:
        raise InfeasibleError(f"C_min={lo:g} must exceed c_*={model.c_star:.10g}")
    if conf.get("spacing", "linear") == "log":
        Cs = np.geomspace(lo, hi, n)
    else:
        Cs = np.linspace(lo, hi, n)
    curve = B.lstar_curve(model, Cs, threads=threads)
    bundle.add(curve.to_csv(bundle.path("lstar_curve.csv")))
    limit = float(np.log(1.0 - model.F1 / model.F_theta))
    payload = {"c_star": model.c_star, "limit_4CL": limit, "reflected": reflected,
               "n": int(n), "monotone_decreasing": bool(np.all(np.diff(curve.L_star_values) < 0))}
    return bundle.result(payload, {"golden": 1e-10})


def cmd_cstar(conf: dict, bundle: Bundle, threads: int) -> dict:
    model, reflected = _barrier_model(conf["model"])
    C = B.C_star(model, conf["L"])
    return bundle.result({"C_star": C, "L": conf["L"], "c_star": model.c_star,
                          "reflected": reflected}, {"brentq": 1e-10})


def cmd_jump(conf: dict, bundle: Bundle, threads: int) -> dict:
    model, reflected = _barrier_model(conf["model"])
    return bundle.result({"critical_jump": B.critical_jump(model), "reflected": reflected})


def cmd_propagule(conf: dict, bundle: Bundle, threads: int) -> dict:
    model = cfg.build_model(conf["model"])
    law = cfg.build_law(conf.get("law"))
    prop = bubble_profile(model, law, conf["alpha"], conf.get("n_samples", 2048))
    bundle.add(prop.to_csv(bundle.path("propagule.csv")))
    return bundle.result({"alpha": prop.alpha, "L_alpha": prop.L, "zero_x": prop.zero_x},
                         {"quad_epsabs": 1e-12})


def run_simulation(conf: dict):
    """Build and run the simulation described by a validated ``simulate`` config."""
    eq = conf.get("equation", "heterogeneous")
    grid = cfg.build_grid(conf.get("grid"))
    common = {"T": conf.get("T", 400.0), "snapshot_every": conf.get("snapshot_every", 1.0),
              "probe_x": conf.get("probe_x")}
    if eq == "two_population":
        if "capacity" not in conf:
            raise ConfigError("two_population needs a capacity block")
        params = cfg.wolbachia_params(conf.get("params"))
        K = cfg.build_capacity(conf["capacity"], grid)
        init = cfg.build_init(conf["init"])
        L = conf["capacity"]["L"]
        return simulate_two_population(params, K, init, grid, dt=conf.get("dt", 0.02),
                                       support=(-L, L), **common)
    if "model" not in conf:
        raise ConfigError(f"{eq} needs a model")
    model = cfg.build_model(conf["model"])
    dt = conf.get("dt", 0.05)
    if eq == "frequency_law":
        law = cfg.build_law(conf.get("law"))
        init = cfg.build_init(conf["init"], model, law)
        return simulate_frequency_law(model, law, init, grid, dt=dt, **common)
    init = cfg.build_init(conf["init"], model)
    eta = cfg.build_gradient(conf.get("gradient"))
    return simulate_heterogeneous(model, eta, init, grid, dt=dt, **common)


def cmd_simulate(conf: dict, bundle: Bundle, threads: int) -> dict:
    res = run_simulation(conf)
    bundle.add(res.to_csv(bundle.path("snapshots.csv")))
    bundle.add(res.to_pgm(bundle.path("heatmap.pgm"), f"config_hash={bundle.hash}"))
    bundle.add(write_csv(bundle.path("front.csv"), ["t", "front_x"],
                         [res.times, res.front_positions]))
    payload = {"outcome": res.outcome, "flags": list(res.flags), "probe_x": res.probe_x,
               "final_front": float(res.front_positions[-1]),
               "front_speed": front_speed(res), "dt": res.dt, "T": res.T,
               "dx": res.grid.dx}
    return bundle.result(payload)


# figure recipes --------------------------------------------------------------

def recipe_names() -> list[str]:
    root = resources.files("frontgate") / "recipes"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_recipe(name: str) -> dict:
    path = resources.files("frontgate") / "recipes" / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"unknown recipe {name!r}; known: {', '.join(recipe_names())}")
    return json.loads(path.read_text())


def run_recipe(name: str, out: Path, threads: int = 1) -> dict:
    recipe = load_recipe(name)
    command = recipe["command"]
    conf = cfg.validate(command, recipe["config"])
    bundle = Bundle(out, command, conf)
    doc = HANDLERS[command](conf, bundle, threads)
    extra = recipe.get("post")
    if extra == "lstar_excess":
        _lstar_excess(bundle, doc)
    bundle.manifest()
    result = doc["result"]
    summary = {"recipe": name, "command": command, "config_hash": bundle.hash}
    expect = recipe.get("expect", {})
    if expect:
        got = {k: result.get(k) for k in expect}
        summary.update({"expected": expect, "observed": got, "matches": got == expect})
    return summary


def _lstar_excess(bundle: Bundle, doc: dict):
    from .io import read_csv
    _, data = read_csv(bundle.path("lstar_curve.csv"))
    excess = data[:, 2] - doc["result"]["limit_4CL"]
    with np.errstate(invalid="ignore", divide="ignore"):
        logs = np.where(excess > 0, np.log(np.where(excess > 0, excess, 1.0)), np.nan)
    bundle.add(write_csv(bundle.path("lstar_excess.csv"), ["C", "log_excess"],
                         [data[:, 0], logs]))


def cmd_figures(conf: dict, bundle: Bundle, threads: int) -> dict:
    names = conf.get("recipes") or recipe_names()
    for n in names:
        load_recipe(n)

    def one(name):
        return run_recipe(name, bundle.out / name, 1)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(one, names))
    else:
        rows = [one(n) for n in names]
    for name in names:
        bundle.add(bundle.out / name / "manifest.json")
    return bundle.result({"recipes": rows,
                          "all_match": all(r.get("matches", True) for r in rows)})


HANDLERS = {
    "speed": cmd_speed, "theta-c": cmd_theta_c, "sign-curve": cmd_sign_curve,
    "barrier": cmd_barrier, "lstar-curve": cmd_lstar_curve, "cstar": cmd_cstar,
    "jump": cmd_jump, "propagule": cmd_propagule, "simulate": cmd_simulate,
    "figures": cmd_figures,
}


# entry point -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frontgate", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"frontgate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration (optional for figures)")
        p.add_argument("--out", default=None, help=f"output directory (default {DEFAULT_OUT})")
        p.add_argument("--threads", type=int, default=1, help="worker threads for sweeps")
        p.add_argument("--seedless", action="store_true",
                       help="accepted for compatibility; every computation is deterministic")
        if name == "figures":
            p.add_argument("recipes", nargs="*", help="recipe names (default: all)")
            p.add_argument("--list", action="store_true", help="print recipe names and exit")
    return parser


def _read_config(path: str | None, command: str) -> dict:
    if path is None:
        if command == "figures":
            return {}
        raise ConfigError(f"{command} needs --config")
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        conf = json.loads(text)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(conf, dict):
        raise ConfigError("config must be a JSON object")
    return conf


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(os.environ.get("FRONTGATE_OUT") or args.out or DEFAULT_OUT)
    if args.command == "figures" and args.list:
        print("\n".join(recipe_names()))
        return EXIT_OK
    code, message = EXIT_OK, ""
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        conf = _read_config(args.config, args.command)
        if args.command == "figures" and args.recipes:
            conf = {**conf, "recipes": args.recipes}
        conf = cfg.validate(args.command, conf)
        bundle = Bundle(out, args.command, conf)
        try:
            doc = HANDLERS[args.command](conf, bundle, args.threads)
        finally:
            bundle.manifest()
        print(json.dumps(doc["result"], indent=2, sort_keys=True, default=float))
    except InfeasibleError as exc:
        code, message = EXIT_INFEASIBLE, str(exc)
    except ConfigError as exc:
        code, message = EXIT_CONFIG, str(exc)
    except NumericalError as exc:
        code, message = EXIT_NUMERICAL, str(exc)
    except (ValueError, KeyError) as exc:
        code, message = EXIT_CONFIG, str(exc)
    except (ArithmeticError, RuntimeError) as exc:
        code, message = EXIT_NUMERICAL, str(exc)
    if code:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "error.json", {"command": args.command, "exit_code": code,
                                        "message": message})
        print(f"frontgate {args.command}: {message}", file=sys.stderr)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
