"""Access sampling under both distributions, the smoothing tracker, and
prediction-set selection."""

import pytest

from migsim import rng
from migsim.domain import Distribution, ScenarioConfig, SchemaCatalog
from migsim.store import seed_population
from migsim.workload import WeightTracker, prediction_set, sample_access


def _store(config, seed=42):
    return seed_population(config, SchemaCatalog(), rng.substream(seed, 0, "population"))


def test_uniform_hit_frequencies_are_multinomial():
    config = ScenarioConfig(distribution=Distribution.UNIFORM)
    store = _store(config)
    stream = rng.substream(13, 0, "workload")
    hits = [0] * 1000
    for _ in range(100_000):
        hits[sample_access(stream, config, store)] += 1
    # each entity: Binomial(1e5, 1/1000), sigma ~ 10.  With 1000 entities
    # tested at once a 3-sigma band is expected to fail ~2.7 times, so
    # bound the extremes at 4.5 sigma (family-wise miss chance ~1e-2).
    assert all(55 <= h <= 145 for h in hits)
    assert sum(hits) == 100_000


def test_pareto_hot_share_is_80_percent():
    config = ScenarioConfig()
    store = _store(config)
    hot = set(store.hot_ids)
    stream = rng.substream(13, 1, "workload")
    draws = 100_000
    in_hot = sum(sample_access(stream, config, store) in hot for _ in range(draws))
    assert in_hot / draws == pytest.approx(0.80, abs=0.01)


def test_empty_hot_set_falls_back_to_uniform():
    config = ScenarioConfig(pareto_hot_fraction=0.0)
    store = _store(config)
    assert store.hot_ids == []
    stream = rng.substream(13, 2, "workload")
    hits = [0] * 1000
    for _ in range(50_000):
        hits[sample_access(stream, config, store)] += 1
    assert min(hits) > 0  # every entity reachable despite the empty hot set


def test_sampling_an_empty_store_fails():
    from migsim.store import EntityStore

    with pytest.raises(ValueError):
        sample_access(rng.substream(0, 0, "workload"), ScenarioConfig(), EntityStore())


def test_never_accessed_entity_has_zero_weight():
    tracker = WeightTracker(0.5)
    assert tracker.weight(123) == 0.0


def test_weight_recurrence_closed_form():
    tracker = WeightTracker(0.5)
    tracker.update_weight(1)
    for _ in range(3):
        tracker.decay_all()
    assert tracker.weight(1) == pytest.approx(0.5 * 0.5**3)  # 0.0625


def test_recent_access_outranks_stale_frequency():
    # A: 10 accesses five releases ago; B: 2 accesses this release.
    tracker = WeightTracker(0.5)
    for _ in range(10):
        tracker.update_weight(1)
    for _ in range(5):
        tracker.decay_all()
    for _ in range(2):
        tracker.update_weight(2)
    assert tracker.weight(1) == pytest.approx(10 * 0.5 * 0.5**5)  # 0.15625
    assert tracker.weight(2) == pytest.approx(1.0)
    assert tracker.weight(2) > tracker.weight(1)


def test_full_decay_clears_all_weights():
    tracker = WeightTracker(1.0)
    tracker.update_weight(7)
    tracker.decay_all()
    assert tracker.weight(7) == 0.0


def test_prediction_set_sizes():
    config = ScenarioConfig()
    store = _store(config)
    tracker = WeightTracker(0.5)
    assert prediction_set(tracker, store, 0.0) == []
    assert sorted(prediction_set(tracker, store, 1.0)) == list(range(1000))
    with pytest.raises(ValueError):
        prediction_set(tracker, store, 1.5)


def test_prediction_set_ranks_by_weight_with_id_tiebreak():
    config = ScenarioConfig()
    store = _store(config)
    tracker = WeightTracker(0.5)
    for entity_id in (990, 5, 300):
        tracker.update_weight(entity_id)
    tracker.update_weight(300)  # heaviest
    chosen = prediction_set(tracker, store, 0.3)
    assert len(chosen) == 300
    assert chosen[0] == 300
    assert set(chosen[1:3]) == {5, 990}
    assert chosen[1] == 5  # equal weights resolve by ascending id
    # zero-weight fill takes the lowest remaining ids
    weighted = {300, 5, 990}
    fill = [i for i in chosen if i not in weighted]
    assert fill == sorted(fill)
    assert fill[0] == 0
    # every chosen weight >= every excluded weight
    excluded = set(range(1000)) - set(chosen)
    min_chosen = min(tracker.weight(i) for i in chosen)
    assert all(tracker.weight(i) <= min_chosen for i in excluded)


def test_prediction_set_rounds_up():
    config = ScenarioConfig(initial_entities=10)
    store = _store(config)
    assert len(prediction_set(WeightTracker(0.5), store, 0.25)) == 3  # ceil(2.5)
