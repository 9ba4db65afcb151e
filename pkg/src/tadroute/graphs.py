"""Plain Dijkstra over adjacency lists."""
from __future__ import annotations

import heapq

from .model import UNREACHABLE


def dijkstra(adj, source: int, limit: float = UNREACHABLE) -> list[float]:
    """Distances from ``source`` over ``adj[u] = [(v, w), ...]``; unreached stay UNREACHABLE.

    Vertices farther than ``limit`` are not expanded.
    """
    dist = [UNREACHABLE] * len(adj)
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u] or d > limit:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def multi_source_dijkstra(adj, seeds: dict[int, float]) -> list[float]:
    dist = [UNREACHABLE] * len(adj)
    heap = []
    for v, d in seeds.items():
        if d < dist[v]:
            dist[v] = d
            heap.append((d, v))
    heapq.heapify(heap)
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist
