"""Shared vocabulary types: entity types, schema changes, schema history,
entities, and the scenario configuration.

These types carry no simulation behaviour beyond validation; the store,
evolution, and simulator modules operate on them.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field, fields, replace

__all__ = [
    "EntityType",
    "ENTITY_TYPES",
    "MULTI_TYPE_PAIRS",
    "SmoKind",
    "Smo",
    "SchemaVersion",
    "SchemaCatalog",
    "Entity",
    "Distribution",
    "ScenarioConfig",
    "Violation",
    "validate_config",
    "config_digest",
    "round_half_up",
    "INITIAL_PROPERTY_COUNT",
    "MULTI_TYPE_SHARE_GRID",
]

INITIAL_PROPERTY_COUNT = 10

MULTI_TYPE_SHARE_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def round_half_up(x: float) -> int:
    """Deterministic commercial rounding; Python's round() would round half to even."""
    return int(math.floor(x + 0.5))


class EntityType(enum.IntEnum):
    PLAYER = 0
    MISSION = 1
    PLACE = 2

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def from_label(cls, label: str) -> "EntityType":
        return cls[label.upper()]


ENTITY_TYPES = (EntityType.PLAYER, EntityType.MISSION, EntityType.PLACE)

# Multi-type changes only ever connect adjacent types of the data model,
# in either direction: (source, destination).
MULTI_TYPE_PAIRS = (
    (EntityType.PLAYER, EntityType.MISSION),
    (EntityType.MISSION, EntityType.PLAYER),
    (EntityType.MISSION, EntityType.PLACE),
    (EntityType.PLACE, EntityType.MISSION),
)


class SmoKind(enum.Enum):
    ADD = "add"
    DELETE = "delete"
    RENAME = "rename"
    COPY = "copy"
    MOVE = "move"

    @property
    def is_multi_type(self) -> bool:
        return self in (SmoKind.COPY, SmoKind.MOVE)


SINGLE_TYPE_KINDS = (SmoKind.ADD, SmoKind.DELETE, SmoKind.RENAME)
MULTI_TYPE_KINDS = (SmoKind.COPY, SmoKind.MOVE)


@dataclass(frozen=True, slots=True)
class Smo:
    """One atomic schema change, applied at one release."""

    kind: SmoKind
    source_type: EntityType
    property: str
    release_no: int
    dest_type: EntityType | None = None
    new_property: str | None = None

    def __post_init__(self) -> None:
        if self.kind.is_multi_type:
            if self.dest_type is None or self.dest_type == self.source_type:
                raise ValueError("multi-type change needs a distinct destination type")
            if (self.source_type, self.dest_type) not in MULTI_TYPE_PAIRS:
                raise ValueError(
                    f"disallowed type pair {self.source_type.label}->{self.dest_type.label}"
                )
            if self.new_property is None:
                raise ValueError("multi-type change needs a destination property name")
        else:
            if self.dest_type is not None:
                raise ValueError("single-type change cannot have a destination type")
        if self.release_no < 1:
            raise ValueError("release_no must be >= 1")

    def affected_types(self) -> frozenset[EntityType]:
        if self.dest_type is None:
            return frozenset((self.source_type,))
        return frozenset((self.source_type, self.dest_type))


@dataclass(frozen=True, slots=True)
class SchemaVersion:
    version_no: int
    properties: dict[EntityType, frozenset[str]]
    producing_smo: Smo | None = None


class SchemaCatalog:
    """Ordered schema history plus per-type prefix sums over the change
    stream, so entity catch-up cost is O(1) regardless of lag."""

    def __init__(self, initial_properties: dict[EntityType, frozenset[str]] | None = None):
        if initial_properties is None:
            initial_properties = {
                t: frozenset(f"{t.label.lower()[0]}p{i}" for i in range(INITIAL_PROPERTY_COUNT))
                for t in ENTITY_TYPES
            }
        for t in ENTITY_TYPES:
            if not initial_properties.get(t):
                raise ValueError(f"empty version-0 property set for {t.label}")
        self.versions: list[SchemaVersion] = [SchemaVersion(0, dict(initial_properties))]
        # prefix[t][v] = number of changes among versions 1..v that touch
        # entities of type t; dest/src count only multi-type changes.
        self._affect = {t: [0] for t in ENTITY_TYPES}
        self._multi_dest = {t: [0] for t in ENTITY_TYPES}
        self._multi_src = {t: [0] for t in ENTITY_TYPES}
        self._name_counter = 0

    def current(self) -> int:
        return len(self.versions) - 1

    def properties_at(self, etype: EntityType, version_no: int) -> frozenset[str]:
        return self.versions[version_no].properties[etype]

    def current_properties(self, etype: EntityType) -> frozenset[str]:
        return self.versions[-1].properties[etype]

    def fresh_property_name(self) -> str:
        self._name_counter += 1
        return f"q{self._name_counter}"

    def pending_counts(self, etype: EntityType, version_no: int) -> tuple[int, int, int]:
        """(single, multi_dest, multi_src) change counts affecting `etype`
        between `version_no` and the current version."""
        cur = self.current()
        affect = self._affect[etype]
        total = affect[cur] - affect[version_no]
        if total == 0:
            return 0, 0, 0
        dest = self._multi_dest[etype]
        src = self._multi_src[etype]
        k_dest = dest[cur] - dest[version_no]
        k_src = src[cur] - src[version_no]
        return total - k_dest - k_src, k_dest, k_src

    def append(self, version: SchemaVersion) -> None:
        if version.version_no != len(self.versions):
            raise ValueError("schema version numbering must be gapless")
        smo = version.producing_smo
        if smo is None:
            raise ValueError("only version 0 may lack a producing change")
        affected = smo.affected_types()
        for t in ENTITY_TYPES:
            self._affect[t].append(self._affect[t][-1] + (1 if t in affected else 0))
            self._multi_dest[t].append(
                self._multi_dest[t][-1] + (1 if smo.kind.is_multi_type and t == smo.dest_type else 0)
            )
            self._multi_src[t].append(
                self._multi_src[t][-1]
                + (1 if smo.kind.is_multi_type and t == smo.source_type else 0)
            )
        self.versions.append(version)


@dataclass(slots=True)
class Entity:
    id: int
    etype: EntityType
    version_no: int
    properties: frozenset[str]
    hot: bool
    weight: float = 0.0


class Distribution(enum.Enum):
    UNIFORM = "uniform"
    PARETO = "pareto"


@dataclass(frozen=True)
class ScenarioConfig:
    """Full parameterization of one simulated migration scenario."""

    initial_entities: int = 1000
    scale_factor: int = 10000
    growth_rate: float = 0.10
    cardinality_n: int = 1
    distribution: Distribution = Distribution.PARETO
    pareto_hot_fraction: float = 0.20
    hot_access_share: float = 0.80
    workload_executions: int = 2
    access_fraction: float = 0.10
    releases: int = 12
    multi_type_share: float = 0.25
    price_per_million_io: float = 0.2
    latency_base_ms: float = 4.2
    latency_single_ms: float = 1.3
    latency_multi_ms: float = 2.6
    incremental_schedule: frozenset[int] = frozenset({5, 10})
    prediction_fraction: float = 0.30
    smoothing_alpha: float = 0.5
    master_seed: int = 42
    runs: int | None = None

    def effective_runs(self) -> int:
        if self.runs is not None:
            return self.runs
        return 80 if self.cardinality_n > 1 else 40

    def accesses_per_release(self) -> int:
        return self.workload_executions * round_half_up(
            self.access_fraction * self.initial_entities
        )

    def with_values(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Distribution):
                v = v.value
            elif isinstance(v, frozenset):
                v = sorted(v)
            out[f.name] = v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "distribution" in kwargs and not isinstance(kwargs["distribution"], Distribution):
            kwargs["distribution"] = Distribution(str(kwargs["distribution"]).lower())
        if "incremental_schedule" in kwargs:
            kwargs["incremental_schedule"] = frozenset(
                int(x) for x in kwargs["incremental_schedule"]
            )
        for name in (
            "initial_entities",
            "scale_factor",
            "cardinality_n",
            "workload_executions",
            "releases",
            "master_seed",
        ):
            if name in kwargs and kwargs[name] is not None:
                kwargs[name] = int(kwargs[name])
        if "runs" in kwargs and kwargs["runs"] is not None:
            kwargs["runs"] = int(kwargs["runs"])
        for name in (
            "growth_rate",
            "pareto_hot_fraction",
            "hot_access_share",
            "access_fraction",
            "multi_type_share",
            "price_per_million_io",
            "latency_base_ms",
            "latency_single_ms",
            "latency_multi_ms",
            "prediction_fraction",
            "smoothing_alpha",
        ):
            if name in kwargs:
                kwargs[name] = float(kwargs[name])
        return cls(**kwargs)


@dataclass(frozen=True, slots=True)
class Violation:
    field: str
    reason: str

    def __str__(self) -> str:
        return f"{self.field}: {self.reason}"


def validate_config(config: ScenarioConfig, strict_grid: bool = False) -> list[Violation]:
    """Collect every constraint violation; an empty list means valid."""
    v: list[Violation] = []

    def fraction(name: str) -> None:
        x = getattr(config, name)
        if not 0.0 <= x <= 1.0:
            v.append(Violation(name, f"must be in [0, 1], got {x}"))

    for name in (
        "growth_rate",
        "pareto_hot_fraction",
        "hot_access_share",
        "access_fraction",
        "multi_type_share",
        "prediction_fraction",
    ):
        fraction(name)
    if not 0.0 < config.smoothing_alpha <= 1.0:
        v.append(Violation("smoothing_alpha", f"must be in (0, 1], got {config.smoothing_alpha}"))
    for name in ("initial_entities", "scale_factor", "workload_executions"):
        if getattr(config, name) < 0:
            v.append(Violation(name, "must be >= 0"))
    if config.releases < 1:
        v.append(Violation("releases", "must be >= 1"))
    if config.cardinality_n not in (1, 10, 25):
        v.append(Violation("cardinality_n", f"must be one of 1, 10, 25, got {config.cardinality_n}"))
    if config.price_per_million_io < 0:
        v.append(Violation("price_per_million_io", "must be >= 0"))
    for name in ("latency_base_ms", "latency_single_ms", "latency_multi_ms"):
        if getattr(config, name) < 0:
            v.append(Violation(name, "must be >= 0"))
    if config.runs is not None and config.runs < 1:
        v.append(Violation("runs", "must be >= 1"))
    bad = [r for r in config.incremental_schedule if not 1 <= r <= config.releases]
    if bad:
        v.append(
            Violation("incremental_schedule", f"release numbers {sorted(bad)} outside 1..{config.releases}")
        )
    if strict_grid and config.multi_type_share not in MULTI_TYPE_SHARE_GRID:
        v.append(
            Violation(
                "multi_type_share",
                f"{config.multi_type_share} not on the grid {list(MULTI_TYPE_SHARE_GRID)}",
            )
        )
    return v


def config_digest(config: ScenarioConfig) -> str:
    """Stable hash of the canonicalized resolved configuration."""
    resolved = config.to_dict()
    resolved["runs"] = config.effective_runs()
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]
