"""Random schema-change generation and its application to catalog and entities.

The I/O cost rule: catching an entity up costs one read and one write no
matter how many pending changes are applied in the batch, plus one extra
read for every pending multi-type change in which the entity's type is the
destination (the related-entity lookup of copy/move).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import (
    ENTITY_TYPES,
    MULTI_TYPE_KINDS,
    MULTI_TYPE_PAIRS,
    SINGLE_TYPE_KINDS,
    Entity,
    EntityType,
    SchemaCatalog,
    SchemaVersion,
    Smo,
    SmoKind,
)

__all__ = [
    "SmoCostProfile",
    "SINGLE_TYPE_PROFILE",
    "MULTI_TYPE_PROFILE",
    "sample_smo",
    "affected_types",
    "apply_smo_to_catalog",
    "catch_up_entity",
    "CatchUpResult",
]

_RESAMPLE_LIMIT = 8


@dataclass(frozen=True, slots=True)
class SmoCostProfile:
    per_entity_reads: int
    per_entity_writes: int
    extra_dest_reads: int


SINGLE_TYPE_PROFILE = SmoCostProfile(1, 1, 0)
MULTI_TYPE_PROFILE = SmoCostProfile(1, 1, 1)


class InternalConsistencyError(RuntimeError):
    """A generated change violated its own precondition; generator bug."""


def affected_types(smo: Smo) -> frozenset[EntityType]:
    return smo.affected_types()


def sample_smo(
    rng: np.random.Generator,
    multi_type_share: float,
    catalog: SchemaCatalog,
    release_no: int,
) -> Smo:
    """Draw one schema change.  Multi-type with probability
    `multi_type_share`: kind uniform over copy/move, pair and direction
    uniform.  Otherwise kind uniform over add/delete/rename with the type
    uniform over all three."""
    if rng.random() < multi_type_share:
        kind = MULTI_TYPE_KINDS[rng.integers(len(MULTI_TYPE_KINDS))]
        source, dest = MULTI_TYPE_PAIRS[rng.integers(len(MULTI_TYPE_PAIRS))]
        prop = _pick_property(rng, catalog, source)
        return Smo(
            kind=kind,
            source_type=source,
            dest_type=dest,
            property=prop,
            new_property=catalog.fresh_property_name(),
            release_no=release_no,
        )

    for _ in range(_RESAMPLE_LIMIT):
        kind = SINGLE_TYPE_KINDS[rng.integers(len(SINGLE_TYPE_KINDS))]
        etype = ENTITY_TYPES[rng.integers(len(ENTITY_TYPES))]
        props = catalog.current_properties(etype)
        if kind is SmoKind.ADD:
            return Smo(kind, etype, catalog.fresh_property_name(), release_no)
        if kind is SmoKind.DELETE and len(props) <= 1:
            continue  # would empty the type's schema; resample
        prop = _pick_property(rng, catalog, etype)
        new_name = catalog.fresh_property_name() if kind is SmoKind.RENAME else None
        return Smo(kind, etype, prop, release_no, new_property=new_name)

    # Resampling exhausted; add always succeeds and keeps one change per release.
    etype = ENTITY_TYPES[rng.integers(len(ENTITY_TYPES))]
    return Smo(SmoKind.ADD, etype, catalog.fresh_property_name(), release_no)


def _pick_property(rng: np.random.Generator, catalog: SchemaCatalog, etype: EntityType) -> str:
    props = sorted(catalog.current_properties(etype))
    if not props:
        raise InternalConsistencyError(f"{etype.label} has no properties to pick from")
    return props[rng.integers(len(props))]


def apply_smo_to_catalog(catalog: SchemaCatalog, smo: Smo) -> SchemaVersion:
    """Advance the catalog by one version; hard fault on inconsistent input."""
    new_props = {t: catalog.current_properties(t) for t in ENTITY_TYPES}
    src = smo.source_type
    kind = smo.kind

    if kind is SmoKind.ADD:
        if smo.property in new_props[src]:
            raise InternalConsistencyError(f"add of existing property {smo.property}")
        new_props[src] = new_props[src] | {smo.property}
    else:
        if smo.property not in new_props[src]:
            raise InternalConsistencyError(
                f"{kind.value} of missing property {smo.property} on {src.label}"
            )
        if kind is SmoKind.DELETE:
            new_props[src] = new_props[src] - {smo.property}
        elif kind is SmoKind.RENAME:
            new_props[src] = (new_props[src] - {smo.property}) | {smo.new_property}
        elif kind is SmoKind.COPY:
            new_props[smo.dest_type] = new_props[smo.dest_type] | {smo.new_property}
        elif kind is SmoKind.MOVE:
            new_props[src] = new_props[src] - {smo.property}
            new_props[smo.dest_type] = new_props[smo.dest_type] | {smo.new_property}

    version = SchemaVersion(catalog.current() + 1, new_props, smo)
    catalog.append(version)
    return version


@dataclass(frozen=True, slots=True)
class CatchUpResult:
    k_single: int
    k_multi_dest: int
    k_multi_src: int
    reads: int
    writes: int

    @property
    def applied_steps(self) -> int:
        return self.k_single + self.k_multi_dest + self.k_multi_src


_NO_OP = CatchUpResult(0, 0, 0, 0, 0)


def catch_up_entity(entity: Entity, catalog: SchemaCatalog, ledger, bucket: str) -> CatchUpResult:
    """Bring `entity` to the current schema version, charging `bucket`.

    Changes that never touched the entity's type advance its version for
    free.  If at least one pending change applies, the batch costs one
    read plus one write, plus one extra read per multi-type change with
    the entity's type as destination.
    """
    cur = catalog.current()
    if entity.version_no >= cur:
        return _NO_OP
    k_single, k_dest, k_src = catalog.pending_counts(entity.etype, entity.version_no)
    entity.version_no = cur
    entity.properties = catalog.current_properties(entity.etype)
    if k_single + k_dest + k_src == 0:
        return _NO_OP
    reads = 1 + k_dest
    ledger.charge(bucket, reads, 1)
    return CatchUpResult(k_single, k_dest, k_src, reads, 1)
