"""Per-release workload generation and access-frequency tracking.

Accesses are point reads.  A stale entity read under a delaying strategy
triggers on-the-fly catch-up, which is the only I/O counted for the
workload; serving an up-to-date entity is free in the cost model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .costing import access_latency
from .domain import Distribution, Entity, ScenarioConfig

__all__ = ["AccessLog", "WeightTracker", "sample_access", "execute_workload", "prediction_set"]


@dataclass(slots=True)
class AccessLog:
    release_no: int
    accesses: list[tuple[int, float, int]] = field(default_factory=list)

    def latencies(self) -> list[float]:
        return [lat for _, lat, _ in self.accesses]


class WeightTracker:
    """Exponential-smoothing access scores: +alpha per access, times
    (1 - alpha) at every release boundary."""

    def __init__(self, alpha: float) -> None:
        self.alpha = alpha
        self.weights: dict[int, float] = {}

    def update_weight(self, entity_id: int) -> None:
        self.weights[entity_id] = self.weights.get(entity_id, 0.0) + self.alpha

    def decay_all(self) -> None:
        keep = 1.0 - self.alpha
        if keep == 0.0:
            self.weights.clear()
            return
        for k in self.weights:
            self.weights[k] *= keep

    def weight(self, entity_id: int) -> float:
        return self.weights.get(entity_id, 0.0)


def sample_access(rng: np.random.Generator, config: ScenarioConfig, store) -> int:
    """Draw one entity id.  Uniform: uniform over all ids.  Pareto: with
    probability hot_access_share uniform over the hot set (falling back to
    all ids when no entity is hot), else uniform over the cold set."""
    if len(store) == 0:
        raise ValueError("cannot sample from an empty store")
    if config.distribution is Distribution.PARETO:
        if rng.random() < config.hot_access_share:
            hot = store.hot_ids
            if hot:
                return hot[rng.integers(len(hot))]
            # ids are dense 0..next_id-1 (entities are never deleted)
            return int(rng.integers(store.next_id))
        cold = store.cold_ids
        if cold:
            return cold[rng.integers(len(cold))]
        return int(rng.integers(store.next_id))
    return int(rng.integers(store.next_id))


def execute_workload(state, strategy, rng: np.random.Generator) -> AccessLog:
    """Serve the configured number of accesses for the current release.

    Each access runs the strategy's on-access hook (catch-up for stale
    entities under delaying strategies, charged on-read), records the
    model latency, and bumps the smoothing tracker.
    """
    config: ScenarioConfig = state.config
    log = AccessLog(state.release_no)
    count = config.accesses_per_release()
    store = state.store
    tracker = state.tracker
    for _ in range(count):
        entity_id = sample_access(rng, config, store)
        entity: Entity = store.entities[entity_id]
        result = strategy.on_access(state, entity)
        latency = access_latency(
            result.k_single + result.k_multi_src, result.k_multi_dest, config
        )
        log.accesses.append((entity_id, latency, result.reads + result.writes))
        tracker.update_weight(entity_id)
    return log


def prediction_set(tracker: WeightTracker, store, fraction: float) -> list[int]:
    """The ceil(fraction x population) ids with the highest weights; ties
    and the zero-weight tail are resolved by ascending id."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    size = math.ceil(fraction * len(store))
    if size == 0:
        return []
    weighted = sorted(tracker.weights.items(), key=lambda kv: (-kv[1], kv[0]))
    chosen = [entity_id for entity_id, w in weighted[:size] if w > 0.0]
    if len(chosen) < size:
        chosen_set = set(chosen)
        # ids are dense and ascending; fill with the lowest unweighted ids
        for entity_id in range(store.next_id):
            if entity_id not in chosen_set:
                chosen.append(entity_id)
                if len(chosen) == size:
                    break
    return chosen
