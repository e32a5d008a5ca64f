"""Matplotlib renderings saved next to the CSV outputs.

All functions write PNG files and return the paths; the Agg backend keeps
them usable on headless hosts.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .engine import RunReport, loading_variance_series  # noqa: E402

FIGSIZE = (7.2, 4.2)


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_loading_figure(report: RunReport, path) -> Path:
    """Loading fraction of each resource over time."""
    by_resource: dict[str, tuple[list[int], list[float]]] = {}
    for sample in report.loading:
        ticks, fractions = by_resource.setdefault(sample.resource_id, ([], []))
        ticks.append(sample.tick)
        fractions.append(sample.fraction)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for rid in sorted(by_resource):
        ticks, fractions = by_resource[rid]
        ax.plot(ticks, fractions, label=rid, linewidth=1.2)
    ax.set_xlabel("tick")
    ax.set_ylabel("loading fraction")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)
    if by_resource:
        ax.legend(loc="best", fontsize=8)
    return _save(fig, Path(path))


def render_outcomes_figure(report: RunReport, path) -> Path:
    """Bar chart of terminal statuses."""
    counts: dict[str, int] = {}
    for out in report.outcomes:
        counts[out.status] = counts.get(out.status, 0) + 1
    labels = sorted(counts)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.bar(range(len(labels)), [counts[s] for s in labels], color="#4878b0")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("jobs")
    ax.grid(True, axis="y", alpha=0.3)
    return _save(fig, Path(path))


def render_run_figures(report: RunReport, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [render_loading_figure(report, out_dir / "fig_loading.png"),
            render_outcomes_figure(report, out_dir / "fig_outcomes.png")]


def render_sweep_figure(param: str, values, means, metric: str, path) -> Path:
    """One swept metric against the parameter values."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(values, means, marker="o")
    ax.set_xlabel(param)
    ax.set_ylabel(metric.replace("_", " "))
    ax.grid(True, alpha=0.3)
    return _save(fig, Path(path))


def render_group_sweep_figure(param: str, values, series: dict, path) -> Path:
    """Several labelled series against the parameter values."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for label in sorted(series):
        ax.plot(values, series[label], marker="o", label=label)
    ax.set_xlabel(param)
    ax.set_ylabel("processed jobs")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return _save(fig, Path(path))


def render_variance_figure(ticks, series: dict, path) -> Path:
    """Cross-resource loading variance over time, one line per label."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for label in sorted(series):
        ax.plot(ticks, series[label], label=label, linewidth=1.2)
    ax.set_xlabel("tick")
    ax.set_ylabel("loading variance")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    return _save(fig, Path(path))


def variance_points(report: RunReport) -> tuple[list[int], list[float]]:
    """(ticks, variances) convenience split for plotting."""
    series = loading_variance_series(report.loading)
    return [t for t, _ in series], [v for _, v in series]
