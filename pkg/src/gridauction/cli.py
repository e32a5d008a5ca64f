"""Command-line front end: scenario generation, single runs, parameter
sweeps, and quick stats over generated files.

Exit codes: 0 ok, 1 input error, 2 the run (or any sweep run) was
truncated at the tick cap.  ``GRIDAUCTION_OUT`` sets the default output
directory.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import figures, reporting, tables
from .costs import StrategyParams
from .engine import FailureModel, RunReport, loading_variance_series, run
from .properties import (PropertiesError, parse_grid_properties,
                         parse_job_properties, parse_user_properties)
from .scenario import Scenario, generate_scenario, load_scenario, save_scenario

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_TRUNCATED = 2

SWEEP_PARAMS = ("sp", "fp", "qp", "balance")
SWEEP_METRICS = ("processed_jobs", "mean_assigned_raw_cost",
                 "mean_completion_time", "failed_jobs")


def _default_out() -> str:
    return os.environ.get("GRIDAUCTION_OUT", ".")


def _read_properties(path: str, parser, label: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise PropertiesError("io", f"cannot read {label} file {path}: {exc}")
    try:
        return parser(text)
    except PropertiesError as exc:
        raise PropertiesError(exc.kind, f"{path}: {exc}", exc.line, exc.key)


def _params_from_args(args) -> StrategyParams:
    return StrategyParams(fp=args.fp, qp=args.qp, sp=args.sp,
                          balance_global=args.balance_global,
                          balance_local=args.balance_local)


def _failure_model(args, seed: int) -> FailureModel:
    return FailureModel(repair_time=args.repair_time, seed=seed,
                        enabled=not args.no_failures)


def cmd_gen(args) -> int:
    try:
        if args.grid_table:
            if args.grid_table not in tables.GRID_PRESETS:
                raise PropertiesError(
                    "bad-kind", f"unknown grid preset {args.grid_table!r}; "
                    f"available: {', '.join(sorted(tables.GRID_PRESETS))}")
            grid = tables.GRID_PRESETS[args.grid_table]
        else:
            grid = _read_properties(args.grid, parse_grid_properties, "grid")
        if args.users_table:
            if args.users_table not in tables.USER_PRESETS:
                raise PropertiesError(
                    "bad-kind", f"unknown user preset {args.users_table!r}")
            users = tables.USER_PRESETS[args.users_table]
        else:
            users = _read_properties(args.users, parse_user_properties, "user")
        if args.jobs:
            jobs = _read_properties(args.jobs, parse_job_properties, "job")
        else:
            jobs = tables.DEFAULT_JOBS
    except PropertiesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    scenario = generate_scenario(grid, users, jobs, n_job_sets=args.sets,
                                 seed=args.seed,
                                 jobs_per_set=args.jobs_per_set,
                                 horizon=args.horizon, peak=args.peak)
    path = save_scenario(scenario, args.out)
    print(f"wrote {path} ({len(scenario.jobs)} jobs, "
          f"{len(scenario.resources)} resources, "
          f"{len(scenario.users)} users)")
    return EXIT_OK


def _load(args) -> Scenario | None:
    try:
        return load_scenario(args.scenario)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: cannot load scenario {args.scenario}: {exc}",
              file=sys.stderr)
        return None


def _write_run_outputs(report: RunReport, out_dir: Path, fmt: str,
                       with_figures: bool) -> None:
    written = reporting.emit_report(report, out_dir, fmt)
    if with_figures:
        written += figures.render_run_figures(report, out_dir)
    for path in written:
        print(f"wrote {path}")


def cmd_run(args) -> int:
    scenario = _load(args)
    if scenario is None:
        return EXIT_INPUT
    params = _params_from_args(args)
    report = run(scenario, params, _failure_model(args, args.seed),
                 max_ticks=args.max_ticks)
    _write_run_outputs(report, Path(args.out), args.format, args.figures)
    if report.truncated:
        print(f"warning: truncated at {args.max_ticks} ticks "
              f"({int(report.metrics['unfinished_jobs'])} jobs unfinished)",
              file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def _one_sweep_run(task) -> tuple:
    """(key, metrics, variance series, truncated) for one (value, seed) cell."""
    scenario_path, param, value, seed, base, max_ticks, no_failures, \
        repair_time = task
    scenario = load_scenario(scenario_path)
    fp, qp, sp, bg, bl = base
    if param == "sp":
        sp = value
    elif param == "fp":
        fp = value
    elif param == "qp":
        qp = value
    elif param == "balance":
        bg = bool(value)
    params = StrategyParams(fp=fp, qp=qp, sp=sp, balance_global=bg,
                            balance_local=bl)
    model = FailureModel(repair_time=repair_time, seed=seed,
                         enabled=not no_failures)
    report = run(scenario, params, model, max_ticks=max_ticks)
    variance = loading_variance_series(report.loading)
    metrics = dict(report.metrics)
    qos_by_user = {u.id: u.qos for u in scenario.users}
    hi, lo = max(qos_by_user.values()), min(qos_by_user.values())
    metrics["processed_max_qos"] = float(sum(
        n for uid, n in report.per_user_processed.items()
        if qos_by_user[uid] == hi))
    metrics["processed_min_qos"] = float(sum(
        n for uid, n in report.per_user_processed.items()
        if qos_by_user[uid] == lo))
    return ((value, seed), metrics, variance, report.truncated)


def _mean(values) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def cmd_sweep(args) -> int:
    if _load(args) is None:
        return EXIT_INPUT
    try:
        if args.param == "balance":
            values: list = [0, 1]
        else:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    except ValueError as exc:
        print(f"error: bad sweep grid: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not values or not seeds:
        print("error: sweep needs at least one value and one seed",
              file=sys.stderr)
        return EXIT_INPUT

    base = (args.fp, args.qp, args.sp, args.balance_global,
            args.balance_local)
    taskset = [(args.scenario, args.param, value, seed, base, args.max_ticks,
                args.no_failures, args.repair_time)
               for value in values for seed in seeds]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = dict_from(pool.map(_one_sweep_run, taskset))
    else:
        results = dict_from(map(_one_sweep_run, taskset))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    any_truncated = any(trunc for _, _, trunc in results.values())

    with open(out_dir / "sweep_meta.csv", "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["key", "value"])
        writer.writerow(["param", args.param])
        writer.writerow(["regime", args.regime])
        writer.writerow(["values", " ".join(str(v) for v in values)])
        writer.writerow(["seeds", " ".join(str(s) for s in seeds)])
        writer.writerow(["scenario", args.scenario])
        writer.writerow(["base_fp", args.fp])
        writer.writerow(["base_qp", args.qp])
        writer.writerow(["base_sp", args.sp])
        writer.writerow(["max_ticks", args.max_ticks])

    per_value: dict = {}
    for value in values:
        cells = [results[(value, seed)] for seed in seeds]
        per_value[value] = {
            metric: _mean(metrics[metric] for metrics, _, _ in cells)
            for metric in cells[0][0]}

    written: list[Path] = []
    for metric in SWEEP_METRICS:
        path = out_dir / f"sweep_{metric}.csv"
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow([args.param, metric])
            for value in values:
                writer.writerow([value, repr(per_value[value][metric])])
        written.append(path)
        if args.figures:
            written.append(figures.render_sweep_figure(
                args.param, values, [per_value[v][metric] for v in values],
                metric, out_dir / f"fig_{metric}.png"))

    if args.param == "qp":
        written += _emit_qos_groups(args, values, seeds, results, out_dir)
    if args.param == "balance":
        written += _emit_variance(args, values, seeds, results, out_dir)

    for path in written:
        print(f"wrote {path}")
    if any_truncated:
        print("warning: at least one sweep run was truncated",
              file=sys.stderr)
        return EXIT_TRUNCATED
    return EXIT_OK


def dict_from(iterable) -> dict:
    return {key: rest for key, *rest in iterable}


def _emit_qos_groups(args, values, seeds, results, out_dir: Path) -> list[Path]:
    """Processed-job counts for the user groups at the qos extremes."""
    path = out_dir / "sweep_qos_groups.csv"
    rows = []
    for value in values:
        hi_mean = _mean(results[(value, seed)][0]["processed_max_qos"]
                        for seed in seeds)
        lo_mean = _mean(results[(value, seed)][0]["processed_min_qos"]
                        for seed in seeds)
        rows.append((value, hi_mean, lo_mean))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([args.param, "processed_max_qos", "processed_min_qos"])
        for value, hi_mean, lo_mean in rows:
            writer.writerow([value, repr(hi_mean), repr(lo_mean)])
    written = [path]
    if args.figures:
        written.append(figures.render_group_sweep_figure(
            args.param, values,
            {"max qos": [r[1] for r in rows], "min qos": [r[2] for r in rows]},
            out_dir / "fig_qos_groups.png"))
    return written


def _emit_variance(args, values, seeds, results, out_dir: Path) -> list[Path]:
    """Per-tick loading variance with balancing off (value 0) and on (1)."""
    series: dict[int, dict[int, list[float]]] = {0: {}, 1: {}}
    for value in (0, 1):
        for seed in seeds:
            _, variance, _ = results[(value, seed)]
            for t, v in variance:
                series[value].setdefault(t, []).append(v)
    ticks = sorted(set(series[0]) | set(series[1]))
    path = out_dir / "sweep_variance.csv"
    rows = []
    for t in ticks:
        off = _mean(series[0].get(t, [0.0]))
        on = _mean(series[1].get(t, [0.0]))
        rows.append((t, off, on))
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["tick", "variance_off", "variance_on"])
        for t, off, on in rows:
            writer.writerow([t, repr(off), repr(on)])
    written = [path]
    if args.figures:
        written.append(figures.render_variance_figure(
            ticks, {"balancing off": [r[1] for r in rows],
                    "balancing on": [r[2] for r in rows]},
            out_dir / "fig_variance.png"))
    return written


def cmd_stats(args) -> int:
    path = Path(args.path)
    try:
        if path.is_dir():
            summary = path / "summary.csv"
            print(summary.read_text(), end="")
            return EXIT_OK
        if path.suffix == ".json":
            import json
            data = json.loads(path.read_text())
            if "jobs" in data and "resources" in data:
                scenario = load_scenario(path)
                procs = sum(r.total_processors for r in scenario.resources)
                machines = sum(len(r.machines) for r in scenario.resources)
                print(f"scenario: {len(scenario.jobs)} jobs, "
                      f"{len(scenario.users)} users, "
                      f"{len(scenario.resources)} resources, "
                      f"{machines} machines, {procs} processors")
                return EXIT_OK
            if "metrics" in data:
                for name, value in data["metrics"].items():
                    print(f"{name}={value}")
                return EXIT_OK
        print(f"error: unrecognized stats target {path}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--fp", type=float, default=0.0,
                        help="failure-avoidance exponent")
    parser.add_argument("--qp", type=float, default=0.0,
                        help="quality-of-service exponent")
    parser.add_argument("--sp", type=float, default=0.0,
                        help="starvation exponent")
    parser.add_argument("--balance-global", action="store_true",
                        help="water-filling quotas across resources")
    parser.add_argument("--balance-local", action="store_true",
                        help="water-filling quotas across machines")
    parser.add_argument("--seed", type=int, default=0,
                        help="failure-process seed")
    parser.add_argument("--repair-time", type=int, default=30,
                        help="ticks a failed component stays down")
    parser.add_argument("--no-failures", action="store_true",
                        help="disable the failure process")
    parser.add_argument("--max-ticks", type=int, default=10_000,
                        help="hard cap on simulated ticks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridauction",
        description="Grid scheduling simulator with an auction-based "
                    "global scheduler")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a scenario file")
    src = gen.add_mutually_exclusive_group(required=True)
    src.add_argument("--grid", help="grid properties file")
    src.add_argument("--grid-table",
                     help="bundled grid preset name (e.g. G1)")
    usrc = gen.add_mutually_exclusive_group(required=True)
    usrc.add_argument("--users", help="user properties file")
    usrc.add_argument("--users-table",
                      help="bundled user preset name (users1/users2)")
    gen.add_argument("--jobs", help="job properties file "
                                    "(default: bundled ranges)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--sets", type=int, default=30,
                     help="number of job sets")
    gen.add_argument("--jobs-per-set", type=int, default=10)
    gen.add_argument("--horizon", type=int, default=100,
                     help="arrival window in ticks")
    gen.add_argument("--peak", action="store_true",
                     help="front-load arrivals into the first tenth "
                          "of the horizon")
    gen.add_argument("--out", default=None, help="scenario file to write")
    gen.set_defaults(func=cmd_gen)

    runp = sub.add_parser("run", help="simulate one scenario")
    runp.add_argument("scenario", help="scenario JSON file")
    _add_param_flags(runp)
    runp.add_argument("--out", default=None, help="output directory")
    runp.add_argument("--format", choices=("csv", "json", "both"),
                      default="both")
    fig = runp.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_true",
                     default=True)
    fig.add_argument("--no-figures", dest="figures", action="store_false")
    runp.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a parameter sweep")
    sweep.add_argument("--scenario", required=True)
    sweep.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    sweep.add_argument("--values", default="0,0.5,1,1.5,2",
                       help="comma-separated values (ignored for balance)")
    sweep.add_argument("--seeds", default="0",
                       help="comma-separated failure seeds")
    sweep.add_argument("--regime", choices=("under-peak", "in-peak"),
                       default="under-peak", help="label recorded in output")
    sweep.add_argument("--workers", type=int, default=1,
                       help="parallel run workers")
    _add_param_flags(sweep)
    sweep.add_argument("--out", default=None, help="output directory")
    sfig = sweep.add_mutually_exclusive_group()
    sfig.add_argument("--figures", dest="figures", action="store_true",
                      default=True)
    sfig.add_argument("--no-figures", dest="figures", action="store_false")
    sweep.set_defaults(func=cmd_sweep)

    stats = sub.add_parser("stats", help="summarize a scenario or report")
    stats.add_argument("path", help="scenario JSON, report JSON, "
                                    "or a report directory")
    stats.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "out", None) is None and args.command in ("gen", "run",
                                                               "sweep"):
        if args.command == "gen":
            args.out = str(Path(_default_out()) / "scenario.json")
        else:
            args.out = _default_out()
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
