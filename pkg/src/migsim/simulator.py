"""One full simulation run: per release, workload -> schema change ->
strategy on-release hook -> weight decay -> data growth."""

from __future__ import annotations

from dataclasses import dataclass

from . import rng as rngmod
from .costing import IoLedger, ReleaseMetrics, money_micro, release_latency_stats
from .domain import ENTITY_TYPES, ScenarioConfig, SchemaCatalog, config_digest
from .evolution import InternalConsistencyError, apply_smo_to_catalog, sample_smo
from .store import EntityStore, grow_population, seed_population
from .strategies import Strategy, StrategyKind, make_strategy
from .workload import WeightTracker, execute_workload

__all__ = ["SimulationState", "RunResult", "run_release", "run_scenario"]


class SimulationState:
    """Run-local mutable state shared by the release phases."""

    def __init__(self, config: ScenarioConfig, master_seed: int, run_index: int) -> None:
        self.config = config
        self.run_index = run_index
        self.catalog = SchemaCatalog()
        self.ledger = IoLedger()
        self.tracker = WeightTracker(config.smoothing_alpha)
        self.release_no = 0
        self.pop_rng = rngmod.substream(master_seed, run_index, "population")
        self.workload_rng = rngmod.substream(master_seed, run_index, "workload")
        self.smo_rng = rngmod.substream(master_seed, run_index, "smo")
        self.store: EntityStore = seed_population(config, self.catalog, self.pop_rng)


@dataclass(frozen=True)
class RunResult:
    strategy: StrategyKind
    run_index: int
    seed: int
    releases: list[ReleaseMetrics]
    final_population: int
    conforms: bool
    config_digest: str

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "run_index": self.run_index,
            "seed": self.seed,
            "releases": [r.to_dict() for r in self.releases],
            "final_population": self.final_population,
            "conforms": self.conforms,
            "config_digest": self.config_digest,
        }


def run_release(state: SimulationState, strategy: Strategy, release_no: int) -> ReleaseMetrics:
    if release_no != state.release_no + 1:
        raise ValueError("releases must be executed in order")
    state.release_no = release_no
    config = state.config
    state.ledger.open_release(release_no)

    # 1. workload (on-read charges and latency log)
    log = execute_workload(state, strategy, state.workload_rng)

    # 2. one schema change per release
    smo = sample_smo(state.smo_rng, config.multi_type_share, state.catalog, release_no)
    apply_smo_to_catalog(state.catalog, smo)

    # 3. strategy's release-time migration (on-release charges)
    strategy.on_release(state, smo)

    # 4. access-score aging
    state.tracker.decay_all()

    # 5. data growth at the new schema version
    grow_population(
        state.store,
        state.catalog,
        config.growth_rate,
        config.cardinality_n,
        config.pareto_hot_fraction,
        state.pop_rng,
    )

    buckets = state.ledger.releases[-1]
    cum_io = sum(b.on_read_io + b.on_release_io for b in state.ledger.releases)
    mean, median, p75, mx = release_latency_stats(log.latencies())
    price = config.price_per_million_io
    scale = config.scale_factor
    return ReleaseMetrics(
        release_no=release_no,
        on_read_io=buckets.on_read_io,
        on_release_io=buckets.on_release_io,
        cumulated_io=cum_io,
        on_read_cost_micro=money_micro(buckets.on_read_io, price, scale),
        on_release_cost_micro=money_micro(buckets.on_release_io, price, scale),
        cumulated_cost_micro=money_micro(cum_io, price, scale),
        mean_latency_ms=mean,
        median_latency_ms=median,
        p75_latency_ms=p75,
        max_latency_ms=mx,
        population=len(state.store),
        stale_count=_stale_count(state),
    )


def _stale_count(state: SimulationState) -> int:
    """Entities with at least one pending schema-change step that affects
    their type.  A version-lagging entity whose pending steps all concern
    other types already conforms and is not counted."""
    catalog = state.catalog
    lagging: dict[tuple, int] = {}
    for entity in state.store.entities.values():
        key = (entity.etype, entity.version_no)
        lagging[key] = lagging.get(key, 0) + 1
    return sum(
        count
        for (etype, version_no), count in lagging.items()
        if any(catalog.pending_counts(etype, version_no))
    )


def _check_conformance(state: SimulationState) -> bool:
    catalog = state.catalog
    for entity in state.store.entities.values():
        if entity.properties != catalog.properties_at(entity.etype, entity.version_no):
            return False
    return True


def run_scenario(
    config: ScenarioConfig,
    strategy: Strategy | StrategyKind | str,
    run_index: int = 0,
    master_seed: int | None = None,
) -> RunResult:
    """Deterministic: identical (config, strategy, seed, run index) give
    an identical result.  The change and access streams depend only on
    (master_seed, run_index), never on the strategy."""
    if not isinstance(strategy, Strategy):
        strategy = make_strategy(strategy)
    if master_seed is None:
        master_seed = config.master_seed
    state = SimulationState(config, master_seed, run_index)
    metrics: list[ReleaseMetrics] = []
    for release_no in range(1, config.releases + 1):
        metrics.append(run_release(state, strategy, release_no))
    conforms = _check_conformance(state)
    if not conforms:
        raise InternalConsistencyError(
            f"entity/catalog property mismatch (strategy={strategy.kind.value}, run={run_index})"
        )
    return RunResult(
        strategy=strategy.kind,
        run_index=run_index,
        seed=rngmod.run_seed(master_seed, run_index),
        releases=metrics,
        final_population=len(state.store),
        conforms=conforms,
        config_digest=config_digest(config),
    )
