"""Seeded batch execution across runs and strategies plus distribution
summaries (mean/median/quartiles/whiskers/outliers) and convergence
reporting."""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field

from . import rng as rngmod
from .domain import ScenarioConfig, config_digest
from .simulator import RunResult, run_scenario
from .strategies import STRATEGY_NAMES, StrategyKind

__all__ = [
    "Stats",
    "summarize",
    "BatchResult",
    "run_batch",
    "convergence_report",
    "METRICS",
    "DEFAULT_CHECKPOINTS",
]

METRICS = ("on_read_cost", "on_release_cost", "cumulated_cost", "mean_latency")
DEFAULT_CHECKPOINTS = (10, 20, 40, 80)


class EmptySampleError(ValueError):
    pass


@dataclass(frozen=True)
class Stats:
    n: int
    mean: float
    median: float
    q1: float
    q3: float
    iqr: float
    whisker_lo: float
    whisker_hi: float
    outliers: list[float]
    min: float
    max: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "iqr": self.iqr,
            "whisker_lo": self.whisker_lo,
            "whisker_hi": self.whisker_hi,
            "outliers": self.outliers,
            "min": self.min,
            "max": self.max,
        }


def _quantile(values: list[float], q: float) -> float:
    """Linear interpolation between closest order statistics (inputs sorted)."""
    n = len(values)
    pos = q * (n - 1)
    lo = int(pos)
    hi = min(lo + 1, n - 1)
    frac = pos - lo
    # lo + frac*(hi-lo) rather than a convex combination: the latter can
    # underflow to zero on subnormal ties
    return values[lo] + frac * (values[hi] - values[lo])


def summarize(values: list[float]) -> Stats:
    """Box-plot summary; outliers lie outside the 1.5-IQR whiskers but
    still count towards the mean and median."""
    if not values:
        raise EmptySampleError("cannot summarize an empty sample")
    data = sorted(values)
    n = len(data)
    q1 = _quantile(data, 0.25)
    median = _quantile(data, 0.5)
    q3 = _quantile(data, 0.75)
    iqr = q3 - q1
    lo = q1 - 1.5 * abs(iqr)
    hi = q3 + 1.5 * abs(iqr)
    outliers = [x for x in data if x < lo or x > hi]
    return Stats(
        n=n,
        mean=sum(data) / n,
        median=median,
        q1=q1,
        q3=q3,
        iqr=iqr,
        whisker_lo=lo,
        whisker_hi=hi,
        outliers=outliers,
        min=data[0],
        max=data[-1],
    )


@dataclass
class BatchResult:
    config: ScenarioConfig
    digest: str
    runs: int
    seeds: list[int]
    # values[strategy][metric][release_index] -> per-run list, run-index order
    values: dict[str, dict[str, list[list[float]]]]
    stats: dict[str, dict[str, list[Stats]]]
    raw_runs: dict[str, list[RunResult]] = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "config_digest": self.digest,
            "runs": self.runs,
            "seeds": self.seeds,
            "stats": {
                strategy: {
                    metric: [s.to_dict() for s in per_release]
                    for metric, per_release in metrics.items()
                }
                for strategy, metrics in self.stats.items()
            },
            "convergence": convergence_report(self),
        }


def _metric_value(record: dict | object, metric: str) -> float:
    if isinstance(record, dict):
        if metric.endswith("_cost"):
            return record[f"{metric}_micro"] / 1_000_000
        return record["mean_latency_ms"]
    if metric == "mean_latency":
        return record.mean_latency_ms
    return getattr(record, metric)


def _run_one(args: tuple) -> tuple[str, int, RunResult]:
    config, strategy_name, run_index, master_seed = args
    result = run_scenario(config, strategy_name, run_index, master_seed)
    return strategy_name, run_index, result


def run_batch(
    config: ScenarioConfig,
    strategies: tuple[str, ...] = STRATEGY_NAMES,
    runs: int | None = None,
    master_seed: int | None = None,
    processes: int = 1,
) -> BatchResult:
    """Execute `runs` paired seeds for every strategy and aggregate.
    Output is independent of `processes` and of completion order."""
    if runs is None:
        runs = config.effective_runs()
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if master_seed is None:
        master_seed = config.master_seed

    tasks = [
        (config, strategy, run_index, master_seed)
        for strategy in strategies
        for run_index in range(runs)
    ]
    results: dict[tuple[str, int], RunResult] = {}
    if processes > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=processes) as pool:
            for strategy, run_index, result in pool.map(_run_one, tasks, chunksize=4):
                results[(strategy, run_index)] = result
    else:
        for task in tasks:
            strategy, run_index, result = _run_one(task)
            results[(strategy, run_index)] = result

    releases = config.releases
    values: dict[str, dict[str, list[list[float]]]] = {}
    stats: dict[str, dict[str, list[Stats]]] = {}
    raw: dict[str, list[RunResult]] = {}
    for strategy in strategies:
        ordered = [results[(strategy, i)] for i in range(runs)]
        raw[strategy] = ordered
        values[strategy] = {
            metric: [
                [_metric_value(run.releases[r], metric) for run in ordered]
                for r in range(releases)
            ]
            for metric in METRICS
        }
        stats[strategy] = {
            metric: [summarize(per_run) for per_run in values[strategy][metric]]
            for metric in METRICS
        }

    return BatchResult(
        config=config,
        digest=config_digest(config),
        runs=runs,
        seeds=[rngmod.run_seed(master_seed, i) for i in range(runs)],
        values=values,
        stats=stats,
        raw_runs=raw,
    )


def convergence_report(
    batch: BatchResult, checkpoints: tuple[int, ...] = DEFAULT_CHECKPOINTS
) -> dict:
    """Relative deviation of the running mean over the first k runs from
    the all-runs mean, per (strategy, release, metric).  Checkpoints
    beyond the batch size are omitted."""
    usable = [k for k in checkpoints if k <= batch.runs]
    report: dict = {"checkpoints": usable, "deviation": {}}
    for strategy, metrics in batch.values.items():
        report["deviation"][strategy] = {}
        for metric, per_release in metrics.items():
            rows = []
            for per_run in per_release:
                full_mean = sum(per_run) / len(per_run)
                row = []
                for k in usable:
                    partial = sum(per_run[:k]) / k
                    if full_mean == 0.0:
                        row.append(0.0 if partial == 0.0 else float("inf"))
                    else:
                        row.append(abs(partial - full_mean) / abs(full_mean))
                rows.append(row)
            report["deviation"][strategy][metric] = rows
    return report
