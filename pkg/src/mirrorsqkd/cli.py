"""Command-line front end: ``mirrorsqkd {rate,curve,threshold,validate}``.

Settings are resolved as defaults, then the ``--config`` JSON document, then
explicit flags.  Every run can write a JSON report whose ``config`` block is
itself a valid ``--config`` input, so a report can be replayed exactly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .adversary import build_depolarizing_attack
from .keyrate import DEFAULT_GRID, key_rate
from .scenarios import (
    CURVE_COLUMNS,
    BracketError,
    ScenarioConfig,
    closed_form_statistics,
    find_threshold,
    sweep_curve,
)
from .stats import FIELDS, ObservedStatistics, StatisticsError, analytic_statistics, monte_carlo_statistics

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NEGATIVE = 2
EXIT_INFEASIBLE = 3

DB_FLAG = {"paper": "paper-literal", "db10": "db-per-10"}
SCENARIO_KEYS = tuple(f.name for f in dataclasses.fields(ScenarioConfig))
RUN_DEFAULTS = {
    "seed": 0,
    "grid": DEFAULT_GRID,
    "qz_start": 0.0,
    "qz_end": 0.15,
    "steps": 100,
    "tolerance": 1e-4,
    "rounds": 1_000_000,
    "sigmas": 5.0,
    "workers": 1,
    "statistics": None,
}
SIG_DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ScenarioConfig fields and run settings")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--grid", type=int, help=f"grid points for the entropy scan (default {DEFAULT_GRID})")
    p.add_argument("--out", type=Path, help="write results to PATH (.csv or .json)")
    p.add_argument("--db-convention", choices=sorted(DB_FLAG), help="fiber loss decibel convention")
    p.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    p.add_argument("--model", choices=("dependent", "independent", "explicit"))
    p.add_argument("--qz", type=float)
    p.add_argument("--qx", type=float, help="X-basis error rate (explicit model only)")
    p.add_argument("--loss-mode", choices=("none", "explicit", "fiber"))
    p.add_argument("--p-loss-forward", type=float)
    p.add_argument("--p-loss-reverse", type=float)
    p.add_argument("--alpha", type=float, help="fiber attenuation in dB/km")
    p.add_argument("--length-km", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mirrorsqkd", description="Mirror protocol key rates and statistics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rate", help="key rate for one scenario or explicit statistics")
    _add_shared(p)
    p.add_argument("--stats", type=Path, help="JSON file with the thirteen observed statistics")

    p = sub.add_parser("curve", help="sweep qz and write the key-rate curve as CSV")
    _add_shared(p)
    p.add_argument("--qz-start", type=float)
    p.add_argument("--qz-end", type=float)
    p.add_argument("--steps", type=int)

    p = sub.add_parser("threshold", help="largest qz with a non-negative key rate")
    _add_shared(p)
    p.add_argument("--tolerance", type=float)

    p = sub.add_parser("validate", help="compare Monte Carlo and analytic statistics")
    _add_shared(p)
    p.add_argument("--rounds", type=int)
    p.add_argument("--sigmas", type=float)
    p.add_argument("--workers", type=int)
    return parser


def resolve_settings(args: argparse.Namespace) -> tuple[ScenarioConfig, dict]:
    """Merge defaults, the config file and flags into a scenario and run settings."""
    merged: dict = {}
    if args.config is not None:
        try:
            doc = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
        if isinstance(doc.get("config"), dict):  # a previous run report
            doc = doc["config"]
        unknown = set(doc) - set(SCENARIO_KEYS) - set(RUN_DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(doc)

    flags = {k: v for k, v in vars(args).items() if v is not None}
    if "db_convention" in flags:
        flags["db_convention"] = DB_FLAG[flags["db_convention"]]
    if "stats" in flags:
        try:
            flags["statistics"] = json.loads(flags.pop("stats").read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read statistics: {exc}") from exc
    for key in SCENARIO_KEYS + tuple(RUN_DEFAULTS):
        if key in flags:
            merged[key] = flags[key]

    run = {k: merged.get(k, v) for k, v in RUN_DEFAULTS.items()}
    try:
        cfg = ScenarioConfig(**{k: merged[k] for k in SCENARIO_KEYS if k in merged})
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    if run["grid"] < 3:
        raise UsageError("--grid must be >= 3")
    return cfg, run


def _num(x: float) -> str:
    return "nan" if isinstance(x, float) and math.isnan(x) else format(x, f".{SIG_DIGITS}g")


def curve_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for row in rows:
        values = dataclasses.astuple(row)
        writer.writerow(
            [("true" if v else "false") if isinstance(v, bool) else _num(float(v)) for v in values]
        )
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def make_report(command: str, cfg: ScenarioConfig, run: dict, results, statistics, started: float) -> dict:
    config = dataclasses.asdict(cfg)
    config.update(run)
    return _json_safe(
        {
            "command": command,
            "config": config,
            "results": results,
            "statistics": statistics,
            "version": __version__,
            "seed": run["seed"],
            "wall_time": time.perf_counter() - started,
        }
    )


def _emit(args, report: dict, csv_text: str | None = None) -> None:
    if args.out is not None:
        if args.out.suffix.lower() == ".csv":
            if csv_text is None:
                res = report["results"]
                csv_text = "key,value\n" + "".join(
                    f"{k},{_num(v) if isinstance(v, float) else v}\n" for k, v in res.items()
                )
            args.out.write_text(csv_text)
        else:
            args.out.write_text(json.dumps(report, indent=2) + "\n")
    if args.json:
        print(json.dumps(report, indent=2))


def cmd_rate(args, cfg: ScenarioConfig, run: dict, started: float) -> int:
    if run["statistics"] is not None:
        try:
            stats = ObservedStatistics.from_dict(run["statistics"])
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid statistics: {exc}") from exc
    else:
        stats = closed_form_statistics(cfg)
    try:
        result = key_rate(stats, run["grid"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    results = dataclasses.asdict(result)
    report = make_report("rate", cfg, run, results, stats.as_dict(), started)
    if not args.json:
        print(f"rate        {_num(result.rate)}")
        print(f"S(A|E)      {_num(result.sae_lower)}")
        print(f"H(A|B)      {_num(result.h_a_given_b)}")
        print(f"argmin      Re<E0|E3>={_num(result.argmin_re03)} Re<E1|E2>={_num(result.argmin_re12)}")
        print(f"feasible    {str(result.feasible).lower()}")
    _emit(args, report)
    if not result.feasible:
        return EXIT_INFEASIBLE
    return EXIT_OK if result.rate >= 0.0 else EXIT_NEGATIVE


def cmd_curve(args, cfg: ScenarioConfig, run: dict, started: float) -> int:
    try:
        rows = sweep_curve(cfg, run["qz_start"], run["qz_end"], run["steps"], run["grid"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = curve_csv(rows)
    report = make_report("curve", cfg, run, [dataclasses.asdict(r) for r in rows], None, started)
    if not args.json and args.out is None:
        sys.stdout.write(text)
    _emit(args, report, text)
    return EXIT_OK


def cmd_threshold(args, cfg: ScenarioConfig, run: dict, started: float) -> int:
    try:
        qz = find_threshold(cfg, run["tolerance"], run["grid"])
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = make_report(
        "threshold", cfg, run, {"threshold": qz, "tolerance": run["tolerance"]}, None, started
    )
    if not args.json:
        print(f"threshold   {qz:.3f}  (+/- {run['tolerance']:g})")
    _emit(args, report)
    return EXIT_OK


def cmd_validate(args, cfg: ScenarioConfig, run: dict, started: float) -> int:
    if run["rounds"] < 1:
        raise UsageError("--rounds must be >= 1")
    first, second = build_depolarizing_attack(cfg.noise_spec())
    exact, _ = analytic_statistics(first, second)
    mc, errors = monte_carlo_statistics(
        first, second, run["rounds"], seed=run["seed"], workers=run["workers"]
    )
    rows = {}
    for name in FIELDS:
        a, m, se = getattr(exact, name), getattr(mc, name), errors[name]
        z = abs(m - a) / se if se > 0 else (0.0 if m == a else math.inf)
        rows[name] = {
            "analytic": a,
            "monte_carlo": m,
            "std_error": se,
            "z": z,
            "pass": z <= run["sigmas"],
        }
        if not args.json:
            flag = "PASS" if rows[name]["pass"] else "FAIL"
            print(f"{flag}  {name:<12} analytic={_num(a)} mc={_num(m)} se={se:.3g} z={z:.2f}")
    ok = all(r["pass"] for r in rows.values())
    report = make_report("validate", cfg, run, {"fields": rows, "all_pass": ok}, exact.as_dict(), started)
    _emit(args, report)
    return EXIT_OK if ok else EXIT_USAGE


COMMANDS = {"rate": cmd_rate, "curve": cmd_curve, "threshold": cmd_threshold, "validate": cmd_validate}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        cfg, run = resolve_settings(args)
        return COMMANDS[args.command](args, cfg, run, started)
    except (UsageError, StatisticsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
