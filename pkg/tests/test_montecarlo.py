"""Batch execution, box-plot statistics against an independent oracle, and
convergence reporting."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from migsim.domain import ScenarioConfig, config_digest
from migsim.montecarlo import (
    BatchResult,
    EmptySampleError,
    METRICS,
    convergence_report,
    run_batch,
    summarize,
)


def test_summarize_five_point_example():
    stats = summarize([1, 2, 3, 4, 5])
    assert stats.median == 3
    assert stats.q1 == 2
    assert stats.q3 == 4
    assert stats.iqr == 2
    assert (stats.whisker_lo, stats.whisker_hi) == (-1, 7)
    assert stats.outliers == []
    assert stats.mean == 3


def test_summarize_singleton():
    stats = summarize([5])
    assert (stats.mean, stats.median, stats.q1, stats.q3) == (5, 5, 5, 5)
    assert stats.iqr == 0
    assert stats.outliers == []
    assert (stats.min, stats.max) == (5, 5)


def test_summarize_collapsed_whiskers_flag_the_outlier():
    stats = summarize([1, 1, 1, 1, 100])
    assert stats.iqr == 0
    assert (stats.whisker_lo, stats.whisker_hi) == (1, 1)
    assert stats.outliers == [100]
    # outliers still count toward the center statistics
    assert stats.mean == pytest.approx(20.8)
    assert stats.median == 1


def test_summarize_rejects_empty_input():
    with pytest.raises(EmptySampleError):
        summarize([])


def _oracle(values):
    """Independent reference: sorted-order statistics via numpy's linear
    interpolation, whiskers and outliers recomputed from scratch."""
    data = np.sort(np.asarray(values, dtype=float))
    q1, median, q3 = (float(np.quantile(data, q, method="linear")) for q in (0.25, 0.5, 0.75))
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * abs(iqr), q3 + 1.5 * abs(iqr)
    outliers = [float(x) for x in data if x < lo or x > hi]
    return q1, median, q3, lo, hi, outliers


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=200))
@settings(max_examples=300, deadline=None)
def test_summarize_matches_the_oracle(values):
    stats = summarize(values)
    q1, median, q3, lo, hi, outliers = _oracle(values)
    assert stats.q1 == pytest.approx(q1, abs=1e-7)
    assert stats.median == pytest.approx(median, abs=1e-7)
    assert stats.q3 == pytest.approx(q3, abs=1e-7)
    assert stats.whisker_lo == pytest.approx(lo, abs=1e-7)
    assert stats.whisker_hi == pytest.approx(hi, abs=1e-7)
    assert stats.outliers == pytest.approx(outliers)
    assert stats.n == len(values)
    assert stats.min == min(values) and stats.max == max(values)
    assert stats.q1 <= stats.median <= stats.q3


def test_single_run_batch_has_degenerate_stats():
    config = ScenarioConfig(releases=2)
    batch = run_batch(config, ("eager", "lazy"), runs=1)
    for strategy in ("eager", "lazy"):
        for metric in METRICS:
            for stats in batch.stats[strategy][metric]:
                assert stats.n == 1
                assert stats.mean == stats.median == stats.min == stats.max
                assert stats.outliers == []


def test_batch_stats_have_n_equal_to_runs(tiny_config):
    batch = run_batch(tiny_config, ("lazy",), runs=3)
    assert batch.runs == 3
    assert len(batch.seeds) == 3
    for metric in METRICS:
        per_release = batch.stats["lazy"][metric]
        assert len(per_release) == tiny_config.releases
        assert all(s.n == 3 for s in per_release)


def test_batch_is_deterministic(tiny_config):
    a = run_batch(tiny_config, ("eager", "lazy"), runs=2)
    b = run_batch(tiny_config, ("eager", "lazy"), runs=2)
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
    assert a.digest == config_digest(tiny_config)


def test_parallel_execution_changes_nothing(tiny_config):
    serial = run_batch(tiny_config, ("eager", "lazy"), runs=2, processes=1)
    parallel = run_batch(tiny_config, ("eager", "lazy"), runs=2, processes=2)
    assert json.dumps(serial.to_dict(), sort_keys=True) == json.dumps(
        parallel.to_dict(), sort_keys=True
    )


def test_batch_rejects_zero_runs(tiny_config):
    with pytest.raises(ValueError):
        run_batch(tiny_config, ("lazy",), runs=0)


def test_mean_cumulated_cost_is_monotone(tiny_config):
    batch = run_batch(tiny_config, ("predictive",), runs=3)
    means = [s.mean for s in batch.stats["predictive"]["cumulated_cost"]]
    assert means == sorted(means)


def _manual_batch(per_run_values, runs):
    config = ScenarioConfig(releases=1, runs=runs)
    return BatchResult(
        config=config,
        digest=config_digest(config),
        runs=runs,
        seeds=[],
        values={"eager": {"cumulated_cost": [per_run_values]}},
        stats={},
    )


def test_convergence_of_identical_values_is_zero():
    batch = _manual_batch([5.0, 5.0, 5.0, 5.0], runs=4)
    report = convergence_report(batch, checkpoints=(2, 4))
    assert report["checkpoints"] == [2, 4]
    assert report["deviation"]["eager"]["cumulated_cost"] == [[0.0, 0.0]]


def test_convergence_measures_running_mean_deviation():
    batch = _manual_batch([1.0, 3.0, 5.0, 7.0], runs=4)
    report = convergence_report(batch, checkpoints=(2, 4))
    # mean of all four is 4; first two average to 2 -> deviation 0.5
    assert report["deviation"]["eager"]["cumulated_cost"] == [[0.5, 0.0]]


def test_convergence_omits_unreachable_checkpoints():
    batch = _manual_batch([1.0, 2.0], runs=2)
    report = convergence_report(batch)  # default checkpoints start at 10
    assert report["checkpoints"] == []


def test_aggregation_covers_all_metrics(tiny_config):
    batch = run_batch(tiny_config, ("eager",), runs=2)
    assert set(batch.values["eager"]) == set(METRICS)
    summary = batch.to_dict()
    assert set(summary["stats"]["eager"]) == set(METRICS)
    assert "convergence" in summary
    assert not math.isnan(summary["stats"]["eager"]["cumulated_cost"][-1]["mean"])
