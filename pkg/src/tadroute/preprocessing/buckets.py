"""Bucket-CH: per-vertex target-distance buckets for one-to-many queries."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..model import UNREACHABLE
from .ch import CHData, downward_search, upward_search


@dataclass
class Buckets:
    """``entries[v]`` lists ``(target, dist)`` from the downward search of each target that settled ``v``."""

    targets: tuple[int, ...]
    entries: list[list[tuple[int, int]]]

    def __len__(self) -> int:
        return sum(len(e) for e in self.entries)


def build_buckets(ch: CHData, targets: Iterable[int]) -> Buckets:
    targets = tuple(dict.fromkeys(targets))
    entries: list[list[tuple[int, int]]] = [[] for _ in range(ch.vertex_count)]
    for t in targets:
        if not 0 <= t < ch.vertex_count:
            raise ValueError(f"target {t} outside the graph")
        for v, d in downward_search(ch, t).items():
            entries[v].append((t, d))
    return Buckets(targets, entries)


def bucket_one_to_many(ch: CHData, buckets: Buckets, source: int,
                       extra: dict[int, int] | None = None) -> dict[int, float]:
    """Distances from ``source`` to every bucket target.

    ``extra`` is an optional ``vertex -> dist`` map from one more downward
    search; its best meeting distance is returned under key ``-1``.
    """
    if not 0 <= source < ch.vertex_count:
        raise ValueError(f"source {source} outside the graph")
    dist: dict[int, float] = dict.fromkeys(buckets.targets, UNREACHABLE)
    best_extra = UNREACHABLE
    entries = buckets.entries
    for v, d in upward_search(ch, source).items():
        for t, dt in entries[v]:
            if d + dt < dist[t]:
                dist[t] = d + dt
        if extra is not None and v in extra and d + extra[v] < best_extra:
            best_extra = d + extra[v]
    if extra is not None:
        dist[-1] = best_extra
    return dist
