"""Requirement/tendency catalog evaluated over batch results, with
traffic-light findings.  Requirements turn Red when violated; tendencies
only ever turn Yellow."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .costing import money_micro
from .domain import ScenarioConfig
from .store import growth_path

__all__ = ["Kind", "Status", "Finding", "check_batch", "check_runs", "register_invariant"]


class Kind(enum.Enum):
    REQUIREMENT = "requirement"
    TENDENCY = "tendency"


class Status(enum.Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"


@dataclass(frozen=True)
class Finding:
    invariant_id: str
    kind: Kind
    status: Status
    scope: str
    message: str

    def to_dict(self) -> dict:
        return {
            "invariant_id": self.invariant_id,
            "kind": self.kind.value,
            "status": self.status.value,
            "scope": self.scope,
            "message": self.message,
        }


# checker(config, runs_by_strategy) -> list of (scope, message) violations
Checker = Callable[[ScenarioConfig, dict[str, list[dict]]], list[tuple[str, str]]]

_CATALOG: list[tuple[str, Kind, str, Checker]] = []


def register_invariant(invariant_id: str, kind: Kind, description: str):
    def wrap(fn: Checker) -> Checker:
        _CATALOG.append((invariant_id, kind, description, fn))
        return fn

    return wrap


def _releases(runs_by_strategy, strategy):
    for run in runs_by_strategy.get(strategy, []):
        for rec in run["releases"]:
            yield run, rec


def _scope(run, rec=None) -> str:
    base = f"strategy={run['strategy']} run={run['run_index']}"
    if rec is not None:
        base += f" release={rec['release_no']}"
    return base


@register_invariant("R1", Kind.REQUIREMENT, "eager charges no on-read I/O")
def _r1(config, runs):
    return [
        (_scope(run, rec), f"on_read_io={rec['on_read_io']}")
        for run, rec in _releases(runs, "eager")
        if rec["on_read_io"] != 0
    ]


@register_invariant("R2", Kind.REQUIREMENT, "lazy charges no on-release I/O")
def _r2(config, runs):
    return [
        (_scope(run, rec), f"on_release_io={rec['on_release_io']}")
        for run, rec in _releases(runs, "lazy")
        if rec["on_release_io"] != 0
    ]


@register_invariant("R3", Kind.REQUIREMENT, "incremental charges on-release I/O only on schedule")
def _r3(config, runs):
    schedule = config.incremental_schedule
    return [
        (_scope(run, rec), f"off-schedule on_release_io={rec['on_release_io']}")
        for run, rec in _releases(runs, "incremental")
        if rec["release_no"] not in schedule and rec["on_release_io"] != 0
    ]


@register_invariant("R4", Kind.REQUIREMENT, "population follows the rounded growth path")
def _r4(config, runs):
    expected = growth_path(config.initial_entities, config.growth_rate, config.releases)
    bad = []
    for strategy in runs:
        for run, rec in _releases(runs, strategy):
            want = expected[rec["release_no"] - 1]
            if rec["population"] != want:
                bad.append((_scope(run, rec), f"population={rec['population']}, expected {want}"))
    return bad


@register_invariant("R5", Kind.REQUIREMENT, "migrated entities conform to the catalog schema")
def _r5(config, runs):
    return [
        (_scope(run), "conformance scan failed")
        for strategy in runs
        for run in runs[strategy]
        if not run.get("conforms", True)
    ]


@register_invariant("R6", Kind.REQUIREMENT, "cumulated I/O is monotone non-decreasing")
def _r6(config, runs):
    bad = []
    for strategy in runs:
        for run in runs[strategy]:
            prev = 0
            for rec in run["releases"]:
                if rec["cumulated_io"] < prev:
                    bad.append((_scope(run, rec), f"cumulated_io dropped to {rec['cumulated_io']}"))
                prev = rec["cumulated_io"]
    return bad


@register_invariant("R7", Kind.REQUIREMENT, "money equals io x scale / 1e6 x price exactly")
def _r7(config, runs):
    price, scale = config.price_per_million_io, config.scale_factor
    bad = []
    for strategy in runs:
        for run, rec in _releases(runs, strategy):
            for io_field, cost_field in (
                ("on_read_io", "on_read_cost_micro"),
                ("on_release_io", "on_release_cost_micro"),
                ("cumulated_io", "cumulated_cost_micro"),
            ):
                want = money_micro(rec[io_field], price, scale)
                if rec[cost_field] != want:
                    bad.append(
                        (_scope(run, rec), f"{cost_field}={rec[cost_field]}, expected {want}")
                    )
    return bad


def _final_cumulated(runs, strategy, run_index):
    run = runs[strategy][run_index]
    return run["releases"][-1]["cumulated_io"]


@register_invariant("R8", Kind.REQUIREMENT, "paired-seed cumulated-cost ordering lazy <= proactive <= eager")
def _r8(config, runs):
    needed = {"lazy", "eager"}
    if not needed <= set(runs):
        return []
    n = min(len(runs[s]) for s in runs)
    bad = []
    for i in range(n):
        lazy = _final_cumulated(runs, "lazy", i)
        eager = _final_cumulated(runs, "eager", i)
        for mid_name in ("incremental", "predictive"):
            if mid_name not in runs:
                continue
            mid = _final_cumulated(runs, mid_name, i)
            if not lazy <= mid <= eager:
                bad.append(
                    (
                        f"run={i}",
                        f"lazy={lazy} {mid_name}={mid} eager={eager} ordering violated",
                    )
                )
        if lazy > eager:
            bad.append((f"run={i}", f"lazy={lazy} > eager={eager}"))
    return bad


@register_invariant("R9", Kind.REQUIREMENT, "eager per-access latency equals the base constant")
def _r9(config, runs):
    base = config.latency_base_ms
    return [
        (_scope(run, rec), f"latency mean={rec['mean_latency_ms']} max={rec['max_latency_ms']}")
        for run, rec in _releases(runs, "eager")
        if rec["on_read_io"] == 0
        and (abs(rec["mean_latency_ms"] - base) > 1e-9 or rec["max_latency_ms"] != base)
        and rec["mean_latency_ms"] != 0.0  # empty workload yields zero stats
    ]


@register_invariant("T1", Kind.TENDENCY, "per-release mean latency: eager at most every other strategy")
def _t1(config, runs):
    if "eager" not in runs:
        return []
    bad = []
    for strategy in runs:
        if strategy == "eager":
            continue
        n = min(len(runs["eager"]), len(runs[strategy]))
        for i in range(n):
            eager_rel = runs["eager"][i]["releases"]
            other_rel = runs[strategy][i]["releases"]
            for e_rec, o_rec in zip(eager_rel, other_rel):
                if o_rec["mean_latency_ms"] < e_rec["mean_latency_ms"] - 1e-12:
                    bad.append(
                        (
                            f"strategy={strategy} run={i} release={e_rec['release_no']}",
                            f"{o_rec['mean_latency_ms']:.4f} < eager {e_rec['mean_latency_ms']:.4f}",
                        )
                    )
    return bad


@register_invariant("T2", Kind.TENDENCY, "predictive per-release mean latency at most lazy's")
def _t2(config, runs):
    if "predictive" not in runs or "lazy" not in runs:
        return []
    n_runs = min(len(runs["predictive"]), len(runs["lazy"]))
    bad = []
    for r in range(config.releases):
        pred = sum(runs["predictive"][i]["releases"][r]["mean_latency_ms"] for i in range(n_runs))
        lazy = sum(runs["lazy"][i]["releases"][r]["mean_latency_ms"] for i in range(n_runs))
        if pred > lazy + 1e-9:
            bad.append(
                (f"release={r + 1}", f"predictive mean {pred / n_runs:.4f} > lazy {lazy / n_runs:.4f}")
            )
    return bad


@register_invariant("T3", Kind.TENDENCY, "zero prediction fraction reproduces lazy I/O")
def _t3(config, runs):
    if config.prediction_fraction != 0.0:
        return []
    if "predictive" not in runs or "lazy" not in runs:
        return []
    n = min(len(runs["predictive"]), len(runs["lazy"]))
    bad = []
    for i in range(n):
        for p_rec, l_rec in zip(runs["predictive"][i]["releases"], runs["lazy"][i]["releases"]):
            if (
                p_rec["on_read_io"] != l_rec["on_read_io"]
                or p_rec["on_release_io"] != l_rec["on_release_io"]
            ):
                bad.append(
                    (
                        f"run={i} release={p_rec['release_no']}",
                        "predictive I/O differs from lazy with empty prediction set",
                    )
                )
    return bad


def check_runs(config: ScenarioConfig, runs_by_strategy: dict[str, list[dict]]) -> list[Finding]:
    """Evaluate every registered invariant over raw per-run records.
    Pure: same inputs, same findings."""
    findings: list[Finding] = []
    for invariant_id, kind, description, checker in _CATALOG:
        violations = checker(config, runs_by_strategy)
        if not violations:
            findings.append(Finding(invariant_id, kind, Status.GREEN, "batch", description))
            continue
        status = Status.RED if kind is Kind.REQUIREMENT else Status.YELLOW
        scope, message = violations[0]
        suffix = "" if len(violations) == 1 else f" (+{len(violations) - 1} more)"
        findings.append(
            Finding(invariant_id, kind, status, scope, f"{description}: {message}{suffix}")
        )
    return findings


def check_batch(batch) -> list[Finding]:
    """Evaluate the catalog over an in-memory batch result."""
    runs_by_strategy = {
        strategy: [run.to_dict() for run in ordered]
        for strategy, ordered in batch.raw_runs.items()
    }
    return check_runs(batch.config, runs_by_strategy)
