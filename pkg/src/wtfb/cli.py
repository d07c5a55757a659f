"""Command-line front end: ``wtfb bounds | sweep | simulate | check``.

Exit codes: 0 success, 1 check failure, 2 input or validation error,
3 infeasible simulation rates.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .binary import SWEEP_COLUMNS, format_number, sweep, write_sweep_csv
from .bounds import BOUNDS, StructureError, bound_chain
from .channel import BinaryWiretapParams, ChannelFormatError, channel_from_dict, load_channel, make_binary_channel
from .checks import SUITES, run_suite
from .info import ConditionalPmf, DimensionError, DistributionError, JointPmf
from .optimize import AuxiliarySystem, CapExceededError, OptimizerConfig
from .sim import (
    ConfigError,
    KeyRateError,
    RateInfeasibleError,
    SimConfig,
    corner_rates,
    default_aux,
    error_trend,
    run_dmc_feedback_sim,
    run_wiretap_feedback_sim,
    write_trend_csv,
    wz_success_rate,
)
from .sim.scheme import TrendRow
from .svgplot import sweep_svg

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_RATES = 0, 1, 2, 3
BOUND_CHOICES = ("cs", "rs", "rstar", "cfout", "rdstar", "cfstarout", "rnon", "all")
INPUT_ERRORS = (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError)


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


# --- manifests --------------------------------------------------------------


def utc_timestamp() -> str:
    """UTC ISO-8601 time, pinned by ``SOURCE_DATE_EPOCH`` when set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc) if epoch else _dt.datetime.now(_dt.timezone.utc)
    return t.replace(microsecond=0).isoformat().replace("+00:00", "Z")


def write_manifest(out_path, command: str, parameters: dict, seed: int) -> Path:
    """Write ``<out>.manifest.json`` describing how ``out_path`` was produced."""
    path = Path(f"{out_path}.manifest.json")
    doc = {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "tool_version": __version__,
        "timestamp": utc_timestamp(),
        "output": Path(out_path).name,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


# --- parsing helpers --------------------------------------------------------


def parse_grid(spec: str) -> list[float]:
    """``start:stop:step`` -> [start, start+step, ...] up to stop (within step/2).

    Values are rounded to 12 decimals so the grid prints cleanly.
    """
    try:
        start, stop, step = (float(s) for s in spec.split(":"))
    except ValueError:
        raise InputError(f"grid '{spec}' must be start:stop:step") from None
    if not step > 0 or stop < start:
        raise InputError(f"grid '{spec}' needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 0.5)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def parse_int_list(spec: str) -> list[int]:
    """Comma list or ``start:stop:step`` grid of integers."""
    try:
        if ":" in spec:
            return [int(round(v)) for v in parse_grid(spec)]
        return [int(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise InputError(f"'{spec}' is not a list of integers") from None


def _check_crossover(name: str, p: float):
    if not 0.0 <= p < 0.5:
        raise InputError(f"{name} = {p} outside [0, 0.5)")


def _optimizer(args) -> OptimizerConfig:
    return OptimizerConfig(seed=args.seed, restarts=args.restarts, grid_resolution=args.grid_resolution)


def _load_any_channel(args):
    if args.binary is not None:
        p1, p2 = args.binary
        _check_crossover("p1", p1)
        _check_crossover("p2", p2)
        return make_binary_channel(BinaryWiretapParams(p1, p2))
    if args.channel is None:
        raise InputError("give a channel file or --binary P1 P2")
    return load_channel(args.channel)


# --- commands ---------------------------------------------------------------


def cmd_bounds(args) -> int:
    ch = _load_any_channel(args)
    opt = _optimizer(args)
    kinds = list(BOUND_CHOICES[:-1]) if args.bound == "all" else [args.bound]
    results = {}
    if args.bound == "all":
        results.update(bound_chain(ch, opt))
    for k in kinds:
        if k in results:
            continue
        try:
            results[k] = BOUNDS[k](ch, opt)
        except StructureError as exc:
            if args.bound != "all":
                raise InputError(str(exc)) from None
    rows = [(k, results[k]) for k in kinds if k in results]
    width = max(len(k) for k, _ in rows)
    for k, r in rows:
        print(f"{k:<{width}}  {format_number(r.value)}")
        if args.show_argmax:
            print(json.dumps(r.to_dict()["argmax"], sort_keys=True))
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write("bound,value\n")
            for k, r in rows:
                fh.write(f"{k},{format_number(r.value)}\n")
        write_manifest(args.csv, "bounds", _params(args), args.seed)
    return EXIT_OK


def cmd_sweep(args) -> int:
    _check_crossover("p1", args.p1)
    grid = parse_grid(args.p2_grid)
    for p2 in grid:
        _check_crossover("p2", p2)
    rows = sweep(args.p1, grid, _optimizer(args))
    if args.out:
        write_sweep_csv(rows, args.out, args.p1)
        write_manifest(args.out, "sweep", _params(args), args.seed)
    else:
        print(",".join(SWEEP_COLUMNS))
        for r in rows:
            print(",".join(format_number(v) for v in r.values()))
    if args.plot:
        Path(args.plot).write_text(sweep_svg(rows, args.p1))
        write_manifest(args.plot, "sweep", _params(args), args.seed)
    return EXIT_OK


def _matrix(doc, key):
    if key not in doc:
        raise InputError(f"simulation config needs '{key}'")
    return np.asarray(doc[key], dtype=float)


def _sim_config(doc: dict, seed: int | None) -> SimConfig:
    fields = {k: doc[k] for k in ("n", "N", "epsilon", "seed", "trials", "engine", "aux", "rates") if k in doc}
    if seed is not None:
        fields["seed"] = seed
    return SimConfig.from_dict(fields)


def _wiretap_rates(doc: dict, ch) -> dict:
    """``rates`` may be explicit or ``{"corner_scale": s}`` (corner with messages scaled by s)."""
    rates = doc.get("rates")
    if isinstance(rates, dict) and "corner_scale" in rates:
        aux = AuxiliarySystem.from_dict(doc["aux"]) if doc.get("aux") else default_aux(ch.x_size, ch.y1_size)
        c = corner_rates(ch, aux).scaled_messages(float(rates["corner_scale"]))
        return {**doc, "rates": c.to_dict()}
    return doc


def cmd_simulate(args) -> int:
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read simulation config {args.config}: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("simulation config must be a JSON object")
    seed = args.seed if args.seed is not None else int(doc.get("seed", 42))
    trend_path = args.trend_out or (f"{args.out}.trend.csv" if args.out else None)
    if args.n_grid and trend_path is None:
        raise InputError("--n-grid needs --out or --trend-out for the trend CSV")
    params = {"mode": args.mode, "config": doc, "n_grid": args.n_grid, "seeds": args.seeds}
    if args.mode == "wynerziv":
        report, trend = _simulate_wz(doc, seed, args)
    else:
        if args.mode == "dmc":
            target = ConditionalPmf(_matrix(doc, "channel"))
            run = run_dmc_feedback_sim
        else:
            ch_doc = doc.get("channel")
            if isinstance(ch_doc, str):
                target = load_channel(Path(args.config).parent / ch_doc)
            elif isinstance(ch_doc, dict):
                target = channel_from_dict(ch_doc, source=args.config)
            else:
                raise InputError("wiretap config needs 'channel' (file name or channel object)")
            doc = _wiretap_rates(doc, target)
            run = run_wiretap_feedback_sim
        cfg = _sim_config(doc, seed)
        report = run(target, cfg).to_dict()
        trend = None
        if args.n_grid:
            seeds = parse_int_list(args.seeds) if args.seeds else [seed]
            trend = error_trend(run, target, cfg, parse_int_list(args.n_grid), seeds)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        write_manifest(args.out, "simulate", params, seed)
    else:
        sys.stdout.write(text)
    if trend is not None:
        write_trend_csv(trend, trend_path, header=f"{args.mode} decode error versus block length")
        write_manifest(trend_path, "simulate", params, seed)
    return EXIT_OK


def _simulate_wz(doc, seed, args):
    source = JointPmf(_matrix(doc, "source"))
    quant = ConditionalPmf(_matrix(doc, "quantizer"))
    rates = doc.get("rates", {})
    try:
        r, r_star = float(rates["r"]), float(rates["r_star"])
    except (KeyError, TypeError, ValueError):
        raise InputError("wynerziv config needs rates {\"r\": R, \"r_star\": R*}") from None
    trials = int(doc.get("trials", 20))
    eps = float(doc.get("epsilon", 0.03))
    n_sym = int(doc.get("N", 256))
    kw = {"epsilon": eps, "engine": doc.get("engine", "auto")}
    if doc.get("decode_epsilon") is not None:
        kw["decode_epsilon"] = float(doc["decode_epsilon"])
    rate = wz_success_rate(source, quant, (r, r_star), n_sym, seed, trials=trials, **kw)
    report = {"success_rate": rate, "N": n_sym, "trials": trials, "seed": seed,
              "rates": {"r": r, "r_star": r_star}, "epsilon": eps}
    trend = None
    if args.n_grid:
        seeds = parse_int_list(args.seeds) if args.seeds else [seed]
        trend = [
            TrendRow(n, s, 1.0 - wz_success_rate(source, quant, (r, r_star), n, s, trials=trials, **kw), 0.0, "wynerziv")
            for n in parse_int_list(args.n_grid) for s in seeds
        ]
    return report, trend


def cmd_check(args) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    failed = False
    for name in suites:
        kw = {} if name == "identities" else {"channels": args.channels}
        for res in run_suite(name, seed=args.seed, **kw):
            print(f"[{name}] {res.line()}")
            failed |= not res.ok
    return EXIT_CHECK if failed else EXIT_OK


def _params(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wtfb", description="Secrecy bounds and simulations for wiretap channels with feedback.")
    ap.add_argument("--version", action="version", version=f"wtfb {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def opt_flags(p):
        p.add_argument("--seed", type=int, default=42, help="master seed (default 42)")
        p.add_argument("--restarts", type=int, default=16, help="optimizer restarts")
        p.add_argument("--grid-resolution", type=int, default=9, help="simplex grid resolution for starts")

    b = sub.add_parser("bounds", help="evaluate secrecy-rate bounds of a channel")
    b.add_argument("channel", nargs="?", help="channel JSON file")
    b.add_argument("--binary", nargs=2, type=float, metavar=("P1", "P2"), help="binary channel crossovers")
    b.add_argument("--bound", choices=BOUND_CHOICES, default="all")
    b.add_argument("--csv", help="also write the values to this CSV")
    b.add_argument("--show-argmax", action="store_true", help="print the maximizing auxiliary system")
    opt_flags(b)
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser(
        "sweep", help="binary bounds over a p2 grid",
        description="Grid syntax start:stop:step includes start and every start+k*step up to stop "
                    "(a point within step/2 of stop counts as stop).",
    )
    s.add_argument("--p1", type=float, required=True)
    s.add_argument("--p2-grid", default="0.01:0.49:0.02", help="start:stop:step (default 0.01:0.49:0.02)")
    s.add_argument("--out", help="CSV output (stdout when omitted)")
    s.add_argument("--plot", help="SVG output")
    opt_flags(s)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", help="Monte Carlo run of a coding scheme")
    m.add_argument("--mode", choices=("wynerziv", "dmc", "wiretap"), required=True)
    m.add_argument("config", help="simulation config JSON")
    m.add_argument("--out", help="report JSON (stdout when omitted)")
    m.add_argument("--seed", type=int, default=None, help="overrides the config seed (default 42)")
    m.add_argument("--n-grid", help="block lengths for the trend CSV, e.g. 64,256,1024")
    m.add_argument("--seeds", help="seeds for the trend CSV, e.g. 0:9:1")
    m.add_argument("--trend-out", help="trend CSV path (default <out>.trend.csv)")
    m.set_defaults(func=cmd_simulate)

    c = sub.add_parser("check", help="run consistency suites")
    c.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    c.add_argument("--channels", type=int, default=5, help="random channels per optimizing suite")
    c.add_argument("--seed", type=int, default=42)
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RateInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RATES
    except KeyRateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RATES
    except (InputError, ChannelFormatError, ConfigError, CapExceededError, DimensionError,
            DistributionError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
