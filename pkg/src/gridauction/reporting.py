"""CSV and JSON emission of run reports, and JSON re-loading.

Three CSVs with a stable column order and ``\\n`` line endings:
``outcomes.csv`` (one row per terminal job), ``loading.csv`` (one row per
resource per tick) and ``summary.csv`` (metric, value).  ``report.json``
mirrors the same field names and carries the full report, so a JSON
round-trip reproduces the in-memory RunReport exactly.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .engine import JobOutcome, LoadingSample, RunReport

OUTCOME_COLUMNS = ["job_id", "owner", "status", "arrival", "assign",
                   "termination", "resource", "machine", "effective_cost"]
LOADING_COLUMNS = ["tick", "resource_id", "fraction"]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _outcome_row(out: JobOutcome) -> list[str]:
    return [_cell(getattr(out, name)) for name in OUTCOME_COLUMNS]


def write_outcomes_csv(report: RunReport, path: Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(OUTCOME_COLUMNS)
        for out in report.outcomes:
            writer.writerow(_outcome_row(out))


def write_loading_csv(report: RunReport, path: Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(LOADING_COLUMNS)
        for sample in report.loading:
            writer.writerow([_cell(sample.tick), sample.resource_id,
                             _cell(sample.fraction)])


def write_summary_csv(report: RunReport, path: Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["metric", "value"])
        for name, value in report.metrics.items():
            writer.writerow([name, _cell(value)])


def outcome_to_dict(out: JobOutcome) -> dict:
    data = {name: getattr(out, name) for name in OUTCOME_COLUMNS}
    data["start"] = out.start
    data["raw_cost"] = out.raw_cost
    return data


def report_to_dict(report: RunReport) -> dict:
    return {
        "version": 1,
        "ticks": report.ticks,
        "truncated": report.truncated,
        "metrics": report.metrics,
        "per_user_processed": report.per_user_processed,
        "outcomes": [outcome_to_dict(out) for out in report.outcomes],
        "loading": [{"tick": s.tick, "resource_id": s.resource_id,
                     "fraction": s.fraction} for s in report.loading],
    }


def report_json_str(report: RunReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_from_dict(data: dict) -> RunReport:
    outcomes = [JobOutcome(
        job_id=o["job_id"], owner=o["owner"], status=o["status"],
        arrival=o["arrival"], assign=o["assign"], start=o["start"],
        termination=o["termination"], resource=o["resource"],
        machine=o["machine"], raw_cost=o["raw_cost"],
        effective_cost=o["effective_cost"]) for o in data["outcomes"]]
    loading = [LoadingSample(s["tick"], s["resource_id"], s["fraction"])
               for s in data["loading"]]
    return RunReport(outcomes, loading, dict(data["metrics"]),
                     dict(data["per_user_processed"]), data["truncated"],
                     data["ticks"])


def load_report(path) -> RunReport:
    return report_from_dict(json.loads(Path(path).read_text()))


def emit_report(report: RunReport, out_dir, fmt: str = "csv") -> list[Path]:
    """Write the report files into ``out_dir``; ``fmt`` is ``csv``,
    ``json`` or ``both``."""
    if fmt not in ("csv", "json", "both"):
        raise ValueError(f"unknown format {fmt!r}")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        if fmt in ("csv", "both"):
            for name, writer in (("outcomes.csv", write_outcomes_csv),
                                 ("loading.csv", write_loading_csv),
                                 ("summary.csv", write_summary_csv)):
                path = out_dir / name
                writer(report, path)
                written.append(path)
        if fmt in ("json", "both"):
            path = out_dir / "report.json"
            path.write_text(report_json_str(report))
            written.append(path)
        return written
    except OSError as exc:
        raise OSError(f"cannot write report under {out_dir}: {exc}") from exc
