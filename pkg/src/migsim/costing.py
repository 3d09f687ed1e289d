"""I/O ledger, money conversion, and the parametric latency model.

Money is kept in integer micro-USD so that identical runs produce
bit-identical serialized costs on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .domain import ScenarioConfig

__all__ = [
    "IoLedger",
    "ReleaseBuckets",
    "ReleaseMetrics",
    "money_micro",
    "money",
    "access_latency",
    "release_latency_stats",
]

ON_READ = "on_read"
ON_RELEASE = "on_release"


def money_micro(io_count: int, price_per_million_io: float, scale_factor: int) -> int:
    """io x scale / 1e6 x price, in integer micro-USD (exact fixed-point)."""
    if io_count < 0 or scale_factor < 0 or price_per_million_io < 0:
        raise ValueError("money inputs must be non-negative")
    price_micro = round(price_per_million_io * 1_000_000)
    return io_count * scale_factor * price_micro // 1_000_000


def money(io_count: int, price_per_million_io: float, scale_factor: int) -> float:
    return money_micro(io_count, price_per_million_io, scale_factor) / 1_000_000


def access_latency(k_single_pending: int, k_multi_dest_pending: int, config: ScenarioConfig) -> float:
    """Affine latency model: base plus per-applied-step penalties."""
    if k_single_pending < 0 or k_multi_dest_pending < 0:
        raise ValueError("pending counts must be non-negative")
    return (
        config.latency_base_ms
        + k_single_pending * config.latency_single_ms
        + k_multi_dest_pending * config.latency_multi_ms
    )


def release_latency_stats(latencies: list[float]) -> tuple[float, float, float, float]:
    """(mean, median, p75, max) over one release's access latencies.
    Quantiles use linear interpolation between order statistics; an empty
    log yields all zeros."""
    if not latencies:
        return 0.0, 0.0, 0.0, 0.0
    values = sorted(latencies)
    n = len(values)
    mean = math.fsum(values) / n

    def quantile(q: float) -> float:
        pos = q * (n - 1)
        lo = int(pos)
        hi = min(lo + 1, n - 1)
        frac = pos - lo
        return values[lo] * (1 - frac) + values[hi] * frac

    return mean, quantile(0.5), quantile(0.75), values[-1]


@dataclass(slots=True)
class ReleaseBuckets:
    release_no: int
    on_read_reads: int = 0
    on_read_writes: int = 0
    on_release_reads: int = 0
    on_release_writes: int = 0
    _release_phase_started: bool = field(default=False, repr=False)

    @property
    def on_read_io(self) -> int:
        return self.on_read_reads + self.on_read_writes

    @property
    def on_release_io(self) -> int:
        return self.on_release_reads + self.on_release_writes


class IoLedger:
    """Append-only per-release I/O buckets.  Within a release, on-read
    charges must precede on-release charges (the event order guarantees
    it; the ledger asserts it)."""

    def __init__(self) -> None:
        self.releases: list[ReleaseBuckets] = []

    def open_release(self, release_no: int) -> ReleaseBuckets:
        if self.releases and self.releases[-1].release_no + 1 != release_no:
            raise ValueError("release numbers must be contiguous")
        bucket = ReleaseBuckets(release_no)
        self.releases.append(bucket)
        return bucket

    def charge(self, bucket: str, reads: int, writes: int) -> None:
        if reads < 0 or writes < 0:
            raise ValueError("charges must be non-negative")
        rec = self.releases[-1]
        if bucket == ON_READ:
            if rec._release_phase_started:
                raise RuntimeError("on-read charge after on-release phase began")
            rec.on_read_reads += reads
            rec.on_read_writes += writes
        elif bucket == ON_RELEASE:
            rec._release_phase_started = True
            rec.on_release_reads += reads
            rec.on_release_writes += writes
        else:
            raise ValueError(f"unknown bucket {bucket!r}")


@dataclass(frozen=True, slots=True)
class ReleaseMetrics:
    release_no: int
    on_read_io: int
    on_release_io: int
    cumulated_io: int
    on_read_cost_micro: int
    on_release_cost_micro: int
    cumulated_cost_micro: int
    mean_latency_ms: float
    median_latency_ms: float
    p75_latency_ms: float
    max_latency_ms: float
    population: int
    stale_count: int

    @property
    def on_read_cost(self) -> float:
        return self.on_read_cost_micro / 1_000_000

    @property
    def on_release_cost(self) -> float:
        return self.on_release_cost_micro / 1_000_000

    @property
    def cumulated_cost(self) -> float:
        return self.cumulated_cost_micro / 1_000_000

    def to_dict(self) -> dict:
        return {
            "release_no": self.release_no,
            "on_read_io": self.on_read_io,
            "on_release_io": self.on_release_io,
            "cumulated_io": self.cumulated_io,
            "on_read_cost_micro": self.on_read_cost_micro,
            "on_release_cost_micro": self.on_release_cost_micro,
            "cumulated_cost_micro": self.cumulated_cost_micro,
            "mean_latency_ms": self.mean_latency_ms,
            "median_latency_ms": self.median_latency_ms,
            "p75_latency_ms": self.p75_latency_ms,
            "max_latency_ms": self.max_latency_ms,
            "population": self.population,
            "stale_count": self.stale_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReleaseMetrics":
        return cls(**{k: data[k] for k in (
            "release_no",
            "on_read_io",
            "on_release_io",
            "cumulated_io",
            "on_read_cost_micro",
            "on_release_cost_micro",
            "cumulated_cost_micro",
            "mean_latency_ms",
            "median_latency_ms",
            "p75_latency_ms",
            "max_latency_ms",
            "population",
            "stale_count",
        )})
