"""Plot-ready exports: delimited CSV projections of persisted summaries
plus matplotlib renderings of the same data.  Exports never re-simulate."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["FIGURES", "export_figure"]

FIGURES = ("cost-curves", "latency-curves", "boxplot", "convergence")

_STRATEGY_ORDER = ("eager", "incremental", "predictive", "lazy")
_COLORS = {
    "eager": "#d62728",
    "incremental": "#ff7f0e",
    "predictive": "#2ca02c",
    "lazy": "#1f77b4",
}


def _strategies(summary: dict) -> list[str]:
    present = summary["stats"].keys()
    ordered = [s for s in _STRATEGY_ORDER if s in present]
    return ordered + sorted(set(present) - set(ordered))


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _curves(summary: dict, metric: str, out_dir: Path, stem: str, ylabel: str) -> list[Path]:
    rows = []
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for strategy in _strategies(summary):
        per_release = summary["stats"][strategy][metric]
        releases = list(range(1, len(per_release) + 1))
        means = [s["mean"] for s in per_release]
        medians = [s["median"] for s in per_release]
        for rel, mean, median in zip(releases, means, medians):
            rows.append([rel, strategy, mean, median])
        ax.plot(releases, means, marker="o", markersize=3, label=strategy,
                color=_COLORS.get(strategy))
    ax.set_xlabel("release")
    ax.set_ylabel(ylabel)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    csv_path = out_dir / f"{stem}.csv"
    png_path = out_dir / f"{stem}.png"
    _write_csv(csv_path, ["release", "strategy", "mean", "median"], rows)
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]


def _boxplot(summary: dict, out_dir: Path) -> list[Path]:
    metric = "cumulated_cost"
    rows = []
    strategies = _strategies(summary)
    fig, axes = plt.subplots(
        len(strategies), 1, figsize=(7, 2.6 * len(strategies)), sharex=True, squeeze=False
    )
    for ax, strategy in zip(axes[:, 0], strategies):
        per_release = summary["stats"][strategy][metric]
        boxes = []
        for rel, s in enumerate(per_release, start=1):
            rows.append(
                [
                    rel,
                    strategy,
                    s["q1"],
                    s["median"],
                    s["q3"],
                    s["whisker_lo"],
                    s["whisker_hi"],
                    ";".join(repr(x) for x in s["outliers"]),
                ]
            )
            boxes.append(
                {
                    "med": s["median"],
                    "q1": s["q1"],
                    "q3": s["q3"],
                    "whislo": max(s["whisker_lo"], s["min"]),
                    "whishi": min(s["whisker_hi"], s["max"]),
                    "fliers": s["outliers"],
                    "label": str(rel),
                }
            )
        ax.bxp(boxes, showfliers=True)
        ax.set_ylabel(f"{strategy}\ncumulated cost (USD)")
        ax.grid(alpha=0.3)
    axes[-1, 0].set_xlabel("release")
    fig.tight_layout()
    csv_path = out_dir / "boxplot.csv"
    png_path = out_dir / "boxplot.png"
    _write_csv(
        csv_path,
        ["release", "strategy", "q1", "median", "q3", "whisker_lo", "whisker_hi", "outlier_csv"],
        rows,
    )
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]


def _convergence(summary: dict, out_dir: Path) -> list[Path]:
    metric = "cumulated_cost"
    conv = summary["convergence"]
    checkpoints = conv["checkpoints"]
    rows = []
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for strategy in _strategies(summary):
        per_release = conv["deviation"][strategy][metric]
        for rel, devs in enumerate(per_release, start=1):
            for checkpoint, dev in zip(checkpoints, devs):
                rows.append([checkpoint, strategy, rel, dev])
        final = per_release[-1]
        ax.plot(checkpoints, final, marker="o", label=strategy, color=_COLORS.get(strategy))
    ax.set_xlabel("runs checkpoint")
    ax.set_ylabel("relative deviation of running mean (final release)")
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    csv_path = out_dir / "convergence.csv"
    png_path = out_dir / "convergence.png"
    _write_csv(csv_path, ["checkpoint", "strategy", "release", "deviation"], rows)
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]


def export_figure(summary: dict, figure: str, out_dir: Path) -> list[Path]:
    """Write the CSV and PNG for one figure kind; returns the paths."""
    out_dir.mkdir(parents=True, exist_ok=True)
    if figure == "cost-curves":
        return _curves(summary, "cumulated_cost", out_dir, "cost_curves", "cumulated cost (USD)")
    if figure == "latency-curves":
        return _curves(summary, "mean_latency", out_dir, "latency_curves", "mean latency (ms)")
    if figure == "boxplot":
        return _boxplot(summary, out_dir)
    if figure == "convergence":
        return _convergence(summary, out_dir)
    raise ValueError(f"unknown figure {figure!r}; expected one of {FIGURES}")
