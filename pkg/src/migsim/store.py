"""In-memory versioned entity population with type-partitioned indexes."""

from __future__ import annotations

import numpy as np

from .domain import (
    ENTITY_TYPES,
    Entity,
    EntityType,
    ScenarioConfig,
    SchemaCatalog,
    round_half_up,
)

__all__ = ["EntityStore", "allocate_population", "seed_population", "grow_population"]


def allocate_population(total: int, cardinality_n: int) -> tuple[int, int, int]:
    """Split `total` entities over Player:Mission:Place in ratio 1:n:n^2,
    using largest-remainder apportionment.  Ties go to the earlier type,
    which sends the 1:1 remainder to Player."""
    if total < 0:
        raise ValueError("total must be >= 0")
    n = cardinality_n
    weights = (1, n, n * n)
    denom = sum(weights)
    # Exact integer arithmetic: float shares could mis-order exact ties.
    counts = [total * w // denom for w in weights]
    remainders = [total * w % denom for w in weights]
    remainder = total - sum(counts)
    # Highest fractional part first; index breaks ties in type order.
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts[0], counts[1], counts[2]


class EntityStore:
    def __init__(self) -> None:
        self.entities: dict[int, Entity] = {}
        self.by_type: dict[EntityType, list[int]] = {t: [] for t in ENTITY_TYPES}
        self.hot_ids: list[int] = []
        self.cold_ids: list[int] = []
        self.next_id: int = 0

    def __len__(self) -> int:
        return len(self.entities)

    def add_entity(self, etype: EntityType, version_no: int, properties: frozenset[str], hot: bool) -> Entity:
        entity = Entity(self.next_id, etype, version_no, properties, hot)
        self.next_id += 1
        self.entities[entity.id] = entity
        self.by_type[etype].append(entity.id)
        (self.hot_ids if hot else self.cold_ids).append(entity.id)
        return entity

    def stale_entities(self, etype: EntityType, current_version: int) -> list[int]:
        """Ids of `etype` entities lagging behind `current_version`, ordered by id."""
        entities = self.entities
        return [i for i in self.by_type[etype] if entities[i].version_no < current_version]

    def all_stale(self, current_version: int) -> list[int]:
        return [e.id for e in self.entities.values() if e.version_no < current_version]

    def stale_count(self, current_version: int) -> int:
        return sum(1 for e in self.entities.values() if e.version_no < current_version)


def _spawn(
    store: EntityStore,
    catalog: SchemaCatalog,
    counts: tuple[int, int, int],
    version_no: int,
    hot_fraction: float,
    rng: np.random.Generator,
) -> None:
    for etype, count in zip(ENTITY_TYPES, counts):
        if count == 0:
            continue
        props = catalog.properties_at(etype, version_no)
        hot_draws = rng.random(count) < hot_fraction
        for hot in hot_draws:
            store.add_entity(etype, version_no, props, bool(hot))


def seed_population(config: ScenarioConfig, catalog: SchemaCatalog, rng: np.random.Generator) -> EntityStore:
    """Initial population at schema version 0; hot tags are independent
    Bernoulli(pareto_hot_fraction) draws."""
    store = EntityStore()
    counts = allocate_population(config.initial_entities, config.cardinality_n)
    _spawn(store, catalog, counts, 0, config.pareto_hot_fraction, rng)
    return store


def grow_population(
    store: EntityStore,
    catalog: SchemaCatalog,
    growth_rate: float,
    cardinality_n: int,
    hot_fraction: float,
    rng: np.random.Generator,
) -> int:
    """Append round(rate x population) entities at the current schema
    version; the increment is apportioned over types like the seed."""
    if growth_rate < 0:
        raise ValueError("growth_rate must be >= 0")
    increment = round_half_up(growth_rate * len(store))
    if increment == 0:
        return 0
    counts = allocate_population(increment, cardinality_n)
    _spawn(store, catalog, counts, catalog.current(), hot_fraction, rng)
    return increment


def growth_path(initial: int, growth_rate: float, releases: int) -> list[int]:
    """Expected population after each release under the rounding rule."""
    path = []
    pop = initial
    for _ in range(releases):
        pop += round_half_up(growth_rate * pop)
        path.append(pop)
    return path
