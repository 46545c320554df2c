"""Command-line front end: ``fouqv simulate|variogram|estimate|experiment``.

Every command writes into ``--out`` through a staging directory, so a failed
run leaves no partial files, and always includes a ``manifest.json`` with the
resolved configuration, seeds and tool version.  Wall-clock timings go to a
separate ``timings.json`` so all other outputs are byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import __version__
from .core import (
    ConfigError,
    GridError,
    HurstParam,
    SeedSpec,
    TimeChangeOverflow,
    VolatilityFn,
    time_change,
)
from .gaussian import sample_fbm, sample_y1, variogram_route, y1_variogram
from .harness import (
    CLTConfig,
    ConsistencyConfig,
    VarianceConstantConfig,
    run_clt,
    run_consistency,
    run_variance_constant,
)
from .io import (
    InputDataError,
    csv_text,
    json_text,
    read_path_csv,
    staged_output,
    write_path_csv,
    write_text,
)
from .pathwise import PathTag, ProcessPath, check_young_regularity, solve_fou2
from .qv import frequency_grid, iv_target, qv_estimator, sup_error

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_VERDICT = 4

DEFAULTS = {
    "simulate": {"process": "y1", "h": None, "n": 1024, "t": 1.0, "theta": 0.0,
                 "x0": 0.0, "sigma": "const:1", "route": "auto", "paths": 1},
    "variogram": {"h": None, "times": [1e-4, 1e-3, 1e-2, 1e-1, 1.0]},
    "estimate": {"input": None, "h": None, "n": 1024, "t": 1.0, "theta": 0.0,
                 "x0": 0.0, "sigma": None, "route": "auto"},
    "experiment": {"kind": None, "h": None, "t": 1.0, "theta": 0.0, "x0": 0.0,
                   "sigma": "const:1", "n": 4096, "n_ladder": [2**k for k in range(8, 15)],
                   "replications": None, "calibration_replications": 2000,
                   "route": "auto"},
}
GLOBAL_DEFAULTS = {"seed": 0, "out": "fouqv-out", "threads": 1}


def _float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def _int_list(text):
    vals = _float_list(text)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    # SUPPRESS so a flag given before the subcommand is not reset after it
    g.add_argument("--config", default=argparse.SUPPRESS,
                   help="JSON file of parameters; flags override it")
    g.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="base seed (default 0)")
    g.add_argument("--out", default=argparse.SUPPRESS,
                   help="output directory (default ./fouqv-out)")
    g.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                   help="worker processes for replications (default 1)")

    p = argparse.ArgumentParser(prog="fouqv", parents=[common],
                                description="fOU of the second kind: simulation and "
                                            "quadratic-variation estimation")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="sample fBm, Y1 or fOU paths")
    s.add_argument("--process", choices=["fbm", "y1", "fou"])
    s.add_argument("--h", type=float)
    s.add_argument("--n", type=int, help="sampling frequency; n*T must be an integer")
    s.add_argument("--t", type=float, help="horizon T")
    s.add_argument("--theta", type=float)
    s.add_argument("--x0", type=float)
    s.add_argument("--sigma", help="volatility, e.g. const:1, linear:1,0.5, holder:1,0.5,0.3;beta=0.7")
    s.add_argument("--route")
    s.add_argument("--paths", type=int, help="number of independent paths")

    v = sub.add_parser("variogram", parents=[common], help="tabulate the Y1 variogram")
    v.add_argument("--h", help="comma-separated Hurst values")
    v.add_argument("--times", help="comma-separated lags t > 0")

    e = sub.add_parser("estimate", parents=[common], help="QV estimator on a path")
    e.add_argument("--input", help="path CSV with header t,value (else simulate one)")
    e.add_argument("--h", type=float)
    e.add_argument("--n", type=int)
    e.add_argument("--t", type=float)
    e.add_argument("--theta", type=float)
    e.add_argument("--x0", type=float)
    e.add_argument("--sigma", help="volatility; also sets the target int sigma^2")
    e.add_argument("--route")

    x = sub.add_parser("experiment", parents=[common], help="Monte Carlo experiments")
    x.add_argument("kind", nargs="?", choices=["consistency", "clt", "variance-constant"])
    x.add_argument("--h", type=float)
    x.add_argument("--t", type=float)
    x.add_argument("--theta", type=float)
    x.add_argument("--x0", type=float)
    x.add_argument("--sigma")
    x.add_argument("--n", type=int)
    x.add_argument("--n-ladder", dest="n_ladder", help="comma-separated frequencies")
    x.add_argument("--replications", "-R", type=int)
    x.add_argument("--calibration-replications", dest="calibration_replications", type=int)
    x.add_argument("--route")
    return p


def resolve(args: argparse.Namespace) -> dict:
    """defaults < config file < flags."""
    cfg = dict(GLOBAL_DEFAULTS)
    cfg.update(DEFAULTS[args.command])
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(file_cfg) - set(cfg))
        if unknown:
            raise ConfigError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
        cfg.update(file_cfg)
    for key, val in vars(args).items():
        if key in ("command", "config") or val is None:
            continue
        cfg[key] = val
    return cfg


def _need(cfg, key):
    if cfg.get(key) is None:
        raise ConfigError(f"missing required parameter '{key}'")
    return cfg[key]


def _hurst(value, field="h") -> float:
    try:
        return HurstParam.parse(float(value)).h
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{field}: {exc}") from exc


def _manifest(command, cfg, **extra) -> dict:
    m = {"command": command, "config": cfg, "tool_version": __version__,
         "seeds": {"base_seed": cfg["seed"]}}
    m.update(extra)
    return m


def _sigma(cfg):
    try:
        return VolatilityFn.parse(cfg["sigma"])
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"sigma: {exc}") from exc


# --------------------------------------------------------------------------
# commands


def cmd_simulate(cfg: dict) -> int:
    h = _hurst(_need(cfg, "h"))
    T = float(cfg["t"])
    grid = frequency_grid(T, int(cfg["n"]))
    process = cfg["process"]
    if process not in ("fbm", "y1", "fou"):
        raise ConfigError(f"process must be fbm, y1 or fou, got {process!r}")
    paths = int(cfg["paths"])
    if paths < 1:
        raise ConfigError("paths must be >= 1")
    sigma = _sigma(cfg) if process == "fou" else None
    if process != "fbm":
        time_change(h, T)
    if sigma is not None and not sigma.is_zero:
        check_young_regularity(sigma.beta, h)
    if process == "fou" and float(cfg["theta"]) < 0:
        raise ConfigError("theta must be >= 0")
    methods = set()
    with staged_output(cfg["out"]) as stage:
        files = []
        for i in range(paths):
            seed = SeedSpec(int(cfg["seed"]), i)
            suffix = "" if paths == 1 else f"_{i:04d}"
            if process == "fbm":
                y = sample_fbm(h, grid, seed, cfg["route"])
            else:
                y = sample_y1(h, grid, seed, cfg["route"])
            methods.add(y.method.value)
            if process == "fou":
                xp, _ = solve_fou2(float(cfg["theta"]), sigma, float(cfg["x0"]), y)
                files.append(write_path_csv(stage, f"driver{suffix}.csv", grid.points, y.values).name)
                files.append(write_path_csv(stage, f"path{suffix}.csv", grid.points, xp.values).name)
            else:
                files.append(write_path_csv(stage, f"path{suffix}.csv", grid.points, y.values).name)
        man = _manifest("simulate", cfg, method=sorted(methods), grid=grid.to_dict(),
                        files=files, replications=list(range(paths)))
        write_text(stage, "manifest.json", json_text(man))
    return EXIT_OK


def cmd_variogram(cfg: dict) -> int:
    hs = sorted(_hurst(x) for x in _float_list(_need(cfg, "h")))
    ts = sorted(set(_float_list(cfg["times"])))
    if any(not t >= 0 or not math.isfinite(t) for t in ts):
        raise ConfigError("times must be finite and nonnegative")
    ts = [t for t in ts if t > 0]
    if not ts:
        raise ConfigError("no positive lags requested")
    rows, routes = [], {}
    for h in hs:
        route = variogram_route(h)
        routes[repr(h)] = route
        if route != "quadrature":
            print(f"note: H={h} <= 1/2, kernel quadrature invalid; using brute-force route",
                  file=sys.stderr)
        for t in ts:
            v = float(y1_variogram(h, t))
            rows.append((h, t, v, v / t ** (2 * h)))
    with staged_output(cfg["out"]) as stage:
        write_text(stage, "variogram.csv", csv_text(["h", "t", "v", "v_over_t2h"], rows))
        write_text(stage, "manifest.json",
                   json_text(_manifest("variogram", cfg, routes=routes, files=["variogram.csv"])))
    return EXIT_OK


def cmd_estimate(cfg: dict) -> int:
    h = _hurst(_need(cfg, "h"))
    sigma = _sigma(cfg) if cfg.get("sigma") is not None else None
    t0 = time.perf_counter()
    extra = {}
    if cfg.get("input"):
        grid, values = read_path_csv(cfg["input"])
        try:
            x = ProcessPath(grid, values, PathTag.X_SDE, {"input": str(cfg["input"])})
        except ValueError as exc:
            raise InputDataError(str(exc)) from exc
        theta = None
    else:
        T = float(cfg["t"])
        grid = frequency_grid(T, int(cfg["n"]))
        sim_sigma = sigma or VolatilityFn.constant(1.0)
        sigma = sim_sigma
        if not sim_sigma.is_zero:
            check_young_regularity(sim_sigma.beta, h)
        theta = float(cfg["theta"])
        y = sample_y1(h, grid, SeedSpec(int(cfg["seed"])), cfg["route"])
        x, _ = solve_fou2(theta, sim_sigma, float(cfg["x0"]), y)
        extra["method"] = y.method.value
    try:
        est = qv_estimator(x, h)
    except GridError as exc:
        raise InputDataError(str(exc)) from exc
    if sigma is not None:
        target = iv_target(sigma, est.times).values
        err = sup_error(est, iv_target(sigma, est.times))
    else:
        target = np.full(est.times.shape, np.nan)
        err = None
    rows = zip(est.times, est.values, target, np.abs(est.values - target))
    summary = {"n": est.n, "H": h, "theta": theta, "scale_exponent": est.scale_exponent,
               "sup_error": err}
    runtime_ms = 1000.0 * (time.perf_counter() - t0)
    with staged_output(cfg["out"]) as stage:
        write_text(stage, "qv.csv", csv_text(["t", "qv", "target", "abs_error"], rows))
        write_text(stage, "summary.json", json_text(summary))
        write_text(stage, "timings.json", json_text({"runtime_ms": runtime_ms}))
        write_text(stage, "manifest.json", json_text(_manifest(
            "estimate", cfg, n=est.n, H=h, scale_exponent=est.scale_exponent,
            files=["qv.csv", "summary.json", "timings.json"], **extra)))
    return EXIT_OK


def _experiment_config(cfg: dict):
    kind = _need(cfg, "kind")
    h = _hurst(_need(cfg, "h"))
    R = cfg["replications"]
    if kind == "consistency":
        return ConsistencyConfig(
            h=h, sigma=_sigma(cfg), theta=float(cfg["theta"]), x0=float(cfg["x0"]),
            T=float(cfg["t"]), n_ladder=tuple(_int_list(cfg["n_ladder"])),
            replications=100 if R is None else int(R), base_seed=int(cfg["seed"]),
            route=cfg["route"])
    if kind == "clt":
        return CLTConfig(
            h=h, sigma=_sigma(cfg), theta=float(cfg["theta"]), x0=float(cfg["x0"]),
            T=float(cfg["t"]), n=int(cfg["n"]), replications=500 if R is None else int(R),
            calibration_replications=int(cfg["calibration_replications"]),
            base_seed=int(cfg["seed"]), route=cfg["route"])
    if kind == "variance-constant":
        return VarianceConstantConfig(h=h, n=int(cfg["n"]),
                                      replications=2000 if R is None else int(R),
                                      base_seed=int(cfg["seed"]), route=cfg["route"])
    raise ConfigError(f"unknown experiment kind {kind!r}")


def cmd_experiment(cfg: dict) -> int:
    config = _experiment_config(cfg).validate()
    workers = int(cfg["threads"])
    if workers < 1:
        raise ConfigError("threads must be >= 1")
    runner = {ConsistencyConfig: run_consistency, CLTConfig: run_clt,
              VarianceConstantConfig: run_variance_constant}[type(config)]
    report = runner(config, workers=workers)
    files = ["report.json", "samples.csv", "timings.json"]
    with staged_output(cfg["out"]) as stage:
        write_text(stage, "report.json", report.to_json())
        if report.kind == "consistency":
            write_text(stage, "samples.csv", csv_text(
                ["replication", "n", "sup_error", "qv_T"],
                ((s["replication"], s["n"], s["sup_error"], s["qv_T"]) for s in report.samples)))
            keys = ["n", "median_sup_error", "p90_sup_error", "max_sup_error",
                    "single_path_sup_error", "mean_bias_T", "bias_se_T"]
            write_text(stage, "ladder.csv", csv_text(
                keys, ([row[k] for k in keys] for row in report.results["ladder"])))
            files.append("ladder.csv")
        elif report.kind == "clt":
            write_text(stage, "samples.csv", csv_text(
                ["replication", "raw", "standardized"],
                ((s.replication, s.raw, s.standardized) for s in report.samples)))
        else:
            write_text(stage, "samples.csv", csv_text(
                ["batch", "replication", "raw"],
                ((s["batch"], s["replication"], s["raw"]) for s in report.samples)))
        write_text(stage, "timings.json", json_text(report.timings))
        write_text(stage, "manifest.json", json_text(_manifest(
            "experiment", cfg, seeds=report.seeds, files=sorted(files))))
    verdicts = ", ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in sorted(report.verdicts.items()))
    print(f"{report.kind}: {verdicts}")
    return EXIT_OK if report.passed else EXIT_VERDICT


COMMANDS = {"simulate": cmd_simulate, "variogram": cmd_variogram,
            "estimate": cmd_estimate, "experiment": cmd_experiment}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except InputDataError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, TimeChangeOverflow) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
