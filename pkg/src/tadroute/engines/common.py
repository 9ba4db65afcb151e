"""Query requests/results, label storage and transfer-mode plumbing shared by the engines."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from ..model import UNREACHABLE, Network
from ..preprocessing import (
    DEFAULT_MAX_AVG_CORE_DEGREE,
    Buckets,
    CHData,
    CoreCHData,
    build_buckets,
    build_ch,
    build_core_ch,
)

PLAIN = "plain"
CORE_CH = "core-ch"
BUCKET_CH = "bucket-ch"
TRANSFER_MODES = (PLAIN, CORE_CH, BUCKET_CH)


@dataclass(frozen=True)
class QueryRequest:
    source: int
    target: int | None
    departure: int
    transfer_mode: str = PLAIN
    pruning: bool = True


@dataclass
class QueryStats:
    settled: int = 0
    scanned_trips: int = 0
    relaxed_edges: int = 0
    rounds: int = 0
    wall_time_us: float = 0.0


@dataclass
class QueryResult:
    arrival: float
    stats: QueryStats = field(default_factory=QueryStats)
    # one-to-all queries only: vertex -> arrival for every labelled vertex
    arrivals: dict[int, float] | None = None


class Labels:
    """Tentative arrival per vertex with O(1) reset via a generation counter."""

    __slots__ = ("value", "stamp", "generation", "touched")

    def __init__(self, size: int):
        self.value: list[float] = [UNREACHABLE] * size
        self.stamp = [0] * size
        self.generation = 1
        self.touched: list[int] = []

    def __len__(self) -> int:
        return len(self.value)

    def reset(self) -> None:
        self.generation += 1
        self.touched = []

    def __getitem__(self, v: int) -> float:
        return self.value[v] if self.stamp[v] == self.generation else UNREACHABLE

    def improve(self, v: int, t: float) -> bool:
        """Lower the label of ``v`` to ``t``; labels never increase."""
        if self.stamp[v] != self.generation:
            self.stamp[v] = self.generation
            self.value[v] = t
            self.touched.append(v)
            return True
        if t < self.value[v]:
            self.value[v] = t
            return True
        return False

    def as_dict(self) -> dict[int, float]:
        return {v: self.value[v] for v in sorted(self.touched)}


def relax(labels: Labels, queue: list, v: int, t: float) -> bool:
    if t < labels[v]:
        labels.improve(v, t)
        heapq.heappush(queue, (t, v))
        return True
    return False


@dataclass
class BucketIndex:
    """Full CH plus buckets targeting every stop vertex."""

    ch: CHData
    buckets: Buckets


def prepare_transfers(network: Network, mode: str, max_avg_core_degree: float = DEFAULT_MAX_AVG_CORE_DEGREE):
    """Build the preprocessed transfer data a mode needs (``None`` for plain)."""
    if mode == PLAIN:
        return None
    if mode == CORE_CH:
        return build_core_ch(network.graph, network.stop_vertices, max_avg_core_degree)
    if mode == BUCKET_CH:
        ch = build_ch(network.graph)
        return BucketIndex(ch, build_buckets(ch, network.stop_vertices))
    raise ValueError(f"unknown transfer mode {mode!r}; expected one of {', '.join(TRANSFER_MODES)}")


def check_transfer_data(network: Network, mode: str, data) -> None:
    if mode == PLAIN:
        return
    if mode == CORE_CH:
        if not isinstance(data, CoreCHData) or data.vertex_count != network.vertex_count:
            raise ValueError("core-ch mode needs Core-CH data built for this network's graph")
        if not all(data.is_core[v] for v in network.stop_vertices):
            raise ValueError("Core-CH data contracted a stop vertex")
        return
    if mode == BUCKET_CH:
        if not isinstance(data, BucketIndex) or data.ch.vertex_count != network.vertex_count:
            raise ValueError("bucket-ch mode needs a BucketIndex built for this network's graph")
        if not set(network.stop_vertices) <= set(data.buckets.targets):
            raise ValueError("buckets do not cover every stop vertex")
        return
    raise ValueError(f"unknown transfer mode {mode!r}; expected one of {', '.join(TRANSFER_MODES)}")


def check_request(network: Network, request: QueryRequest) -> None:
    n = network.vertex_count
    if not 0 <= request.source < n:
        raise ValueError(f"source vertex {request.source} outside 0..{n - 1}")
    if request.target is not None and not 0 <= request.target < n:
        raise ValueError(f"target vertex {request.target} outside 0..{n - 1}")
    if request.departure < 0:
        raise ValueError("departure time must be non-negative")
