"""The four migration policies behind one two-hook contract:
on_access(state, entity) during the workload phase and
on_release(state, smo) after the catalog has advanced.

Strategies never consume randomness and never touch the smoothing
tracker, so paired runs stay comparable across strategies.
"""

from __future__ import annotations

import enum

from .costing import ON_READ, ON_RELEASE
from .domain import Entity, Smo
from .evolution import CatchUpResult, catch_up_entity
from .workload import prediction_set

__all__ = ["StrategyKind", "Strategy", "Eager", "Lazy", "Incremental", "Predictive", "make_strategy", "STRATEGY_NAMES"]

_NO_OP = CatchUpResult(0, 0, 0, 0, 0)


class StrategyKind(enum.Enum):
    EAGER = "eager"
    INCREMENTAL = "incremental"
    PREDICTIVE = "predictive"
    LAZY = "lazy"


STRATEGY_NAMES = tuple(k.value for k in StrategyKind)


class Strategy:
    kind: StrategyKind

    def on_access(self, state, entity: Entity) -> CatchUpResult:
        return _NO_OP

    def on_release(self, state, smo: Smo) -> None:
        pass


class Eager(Strategy):
    kind = StrategyKind.EAGER

    def on_release(self, state, smo: Smo) -> None:
        # Every entity lags exactly this one change; entities of
        # unaffected types advance their version number free of charge.
        catalog = state.catalog
        ledger = state.ledger
        for entity in state.store.entities.values():
            catch_up_entity(entity, catalog, ledger, ON_RELEASE)


class Lazy(Strategy):
    kind = StrategyKind.LAZY

    def on_access(self, state, entity: Entity) -> CatchUpResult:
        return catch_up_entity(entity, state.catalog, state.ledger, ON_READ)


class Incremental(Lazy):
    kind = StrategyKind.INCREMENTAL

    def on_release(self, state, smo: Smo) -> None:
        if state.release_no not in state.config.incremental_schedule:
            return
        catalog = state.catalog
        ledger = state.ledger
        cur = catalog.current()
        for entity in state.store.entities.values():
            if entity.version_no < cur:
                catch_up_entity(entity, catalog, ledger, ON_RELEASE)


class Predictive(Lazy):
    kind = StrategyKind.PREDICTIVE

    def on_release(self, state, smo: Smo) -> None:
        fraction = state.config.prediction_fraction
        if fraction == 0.0:
            return
        catalog = state.catalog
        ledger = state.ledger
        store = state.store
        cur = catalog.current()
        for entity_id in prediction_set(state.tracker, store, fraction):
            entity = store.entities[entity_id]
            if entity.version_no < cur:
                catch_up_entity(entity, catalog, ledger, ON_RELEASE)


_REGISTRY = {
    StrategyKind.EAGER: Eager,
    StrategyKind.LAZY: Lazy,
    StrategyKind.INCREMENTAL: Incremental,
    StrategyKind.PREDICTIVE: Predictive,
}


def make_strategy(kind: StrategyKind | str) -> Strategy:
    if isinstance(kind, str):
        kind = StrategyKind(kind.lower())
    return _REGISTRY[kind]()
