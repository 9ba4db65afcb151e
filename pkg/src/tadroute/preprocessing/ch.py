"""Contraction Hierarchies on directed graphs, with an optional uncontracted core.

Vertices are contracted in order of a lazily-updated priority
(edge difference plus number of already-contracted neighbours, ties by vertex
index). Witness searches are capped by a settled-vertex budget; when the cap
is hit the shortcut is inserted anyway, so distances stay exact.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable

from ..graphs import multi_source_dijkstra
from ..model import UNREACHABLE, TransferGraph

WITNESS_SETTLE_LIMIT = 500
DEFAULT_MAX_AVG_CORE_DEGREE = 14.0

Adjacency = list[list[tuple[int, int]]]


@dataclass
class CHData:
    """Hierarchy produced by contraction.

    ``up[v]`` holds edges ``v -> w`` with ``rank[w] > rank[v]``; ``down[v]``
    holds ``(u, weight)`` for edges ``u -> v`` with ``rank[u] > rank[v]``, so a
    backward search from a target walks ``down``. Uncontracted vertices share
    the top rank ``vertex_count``.
    """

    vertex_count: int
    rank: list[int]
    order: list[int]
    up: Adjacency
    down: Adjacency
    middle: dict[tuple[int, int], int] = field(default_factory=dict)

    @property
    def shortcut_count(self) -> int:
        return len(self.middle)

    def dump(self) -> str:
        """Text dump of the contraction order and the shortcut list."""
        lines = [f"order {' '.join(map(str, self.order))}"]
        for (u, w), v in sorted(self.middle.items()):
            lines.append(f"shortcut {u} {w} via {v}")
        return "\n".join(lines)


@dataclass
class CoreCHData(CHData):
    """Partial hierarchy plus the core graph over the uncontracted vertices."""

    is_core: list[bool] = field(default_factory=list)
    core_graph: Adjacency = field(default_factory=list)

    @property
    def core_vertices(self) -> list[int]:
        return [v for v, c in enumerate(self.is_core) if c]

    @property
    def core_edge_count(self) -> int:
        return sum(len(a) for a in self.core_graph)


class _Contractor:
    def __init__(self, graph: TransferGraph, settle_limit: int):
        n = graph.vertex_count
        self.n = n
        self.settle_limit = settle_limit
        self.out: list[dict[int, int]] = [{} for _ in range(n)]
        self.inc: list[dict[int, int]] = [{} for _ in range(n)]
        self.edge_count = 0
        for u, v, w in graph.edges():
            if u == v:
                continue
            old = self.out[u].get(v)
            if old is None:
                self.edge_count += 1
            if old is None or w < old:
                self.out[u][v] = w
                self.inc[v][u] = w
        self.contracted = [False] * n
        self.contracted_neighbors = [0] * n
        self.rank = [n] * n
        self.order: list[int] = []
        self.up: Adjacency = [[] for _ in range(n)]
        self.down: Adjacency = [[] for _ in range(n)]
        self.middle: dict[tuple[int, int], int] = {}
        # shortcuts of the last vertex evaluated; valid until the next contraction
        self._cached: tuple[int, list] | None = None

    def _witness(self, source: int, avoid: int, max_dist: int, targets: set[int]) -> dict[int, int]:
        dist = {source: 0}
        heap = [(0, source)]
        settled = 0
        left = len(targets)
        out = self.out
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            settled += 1
            if d > max_dist or settled > self.settle_limit:
                break
            if u in targets:
                left -= 1
                if not left:
                    break
            for v, w in out[u].items():
                if v == avoid:
                    continue
                nd = d + w
                if nd < dist.get(v, UNREACHABLE):
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        return dist

    def shortcuts(self, v: int) -> list[tuple[int, int, int]]:
        if self._cached is not None and self._cached[0] == v:
            return self._cached[1]
        needed = []
        out_v = self.out[v]
        for u, wu in self.inc[v].items():
            targets = [(x, wu + wx) for x, wx in out_v.items() if x != u]
            if not targets:
                continue
            dist = self._witness(u, v, max(c for _, c in targets), {x for x, _ in targets})
            for x, cand in targets:
                if dist.get(x, UNREACHABLE) > cand:
                    needed.append((u, x, cand))
        self._cached = (v, needed)
        return needed

    def priority(self, v: int) -> int:
        return len(self.shortcuts(v)) - len(self.inc[v]) - len(self.out[v]) + self.contracted_neighbors[v]

    def contract(self, v: int) -> None:
        added = self.shortcuts(v)
        self._cached = None
        self.rank[v] = len(self.order)
        self.order.append(v)
        self.up[v] = sorted(self.out[v].items())
        self.down[v] = sorted(self.inc[v].items())
        for x in self.out[v]:
            del self.inc[x][v]
            self.contracted_neighbors[x] += 1
        for u in self.inc[v]:
            del self.out[u][v]
            self.contracted_neighbors[u] += 1
        self.edge_count -= len(self.out[v]) + len(self.inc[v])
        self.out[v] = {}
        self.inc[v] = {}
        for u, x, w in added:
            old = self.out[u].get(x)
            if old is None:
                self.edge_count += 1
            if old is None or w < old:
                self.out[u][x] = w
                self.inc[x][u] = w
                self.middle[(u, x)] = v
        self.contracted[v] = True

    def run(self, candidates: Iterable[int], avg_degree_limit: float | None) -> None:
        heap = [(self.priority(v), v) for v in candidates]
        heapq.heapify(heap)
        remaining = self.n
        while heap:
            if avg_degree_limit is not None and remaining and self.edge_count / remaining > avg_degree_limit:
                break
            _, v = heapq.heappop(heap)
            prio = self.priority(v)
            if heap and (prio, v) > heap[0]:
                heapq.heappush(heap, (prio, v))
                continue
            self.contract(v)
            remaining -= 1


def build_ch(
    graph: TransferGraph,
    avg_degree_limit: float | None = None,
    settle_limit: int = WITNESS_SETTLE_LIMIT,
    order: Iterable[int] | None = None,
) -> CHData:
    """Contract every vertex (or stop early once the remaining graph gets denser than ``avg_degree_limit``).

    ``order`` fixes the contraction order instead of the priority heuristic;
    it must list every vertex once.
    """
    c = _Contractor(graph, settle_limit)
    if order is None:
        c.run(range(graph.vertex_count), avg_degree_limit)
    else:
        order = list(order)
        if sorted(order) != list(range(graph.vertex_count)):
            raise ValueError("order must be a permutation of the vertices")
        for v in order:
            c.contract(v)
    if not all(c.contracted):
        return _core_data(c)
    return CHData(graph.vertex_count, c.rank, c.order, c.up, c.down, c.middle)


def build_core_ch(
    graph: TransferGraph,
    protected_vertices: Iterable[int],
    max_avg_core_degree: float = DEFAULT_MAX_AVG_CORE_DEGREE,
    settle_limit: int = WITNESS_SETTLE_LIMIT,
) -> CoreCHData:
    """Contract all unprotected vertices until the core's average degree exceeds the limit."""
    protected = set(protected_vertices)
    for v in protected:
        if not 0 <= v < graph.vertex_count:
            raise ValueError(f"protected vertex {v} outside the graph")
    c = _Contractor(graph, settle_limit)
    c.run((v for v in range(graph.vertex_count) if v not in protected), max_avg_core_degree)
    return _core_data(c)


def _core_data(c: _Contractor) -> CoreCHData:
    is_core = [not x for x in c.contracted]
    core_graph = [sorted(c.out[v].items()) if is_core[v] else [] for v in range(c.n)]
    return CoreCHData(c.n, c.rank, c.order, c.up, c.down, c.middle, is_core, core_graph)


def upward_search(ch: CHData, source: int, core: list[bool] | None = None) -> dict[int, int]:
    """Forward search on the upward graph; with ``core`` given, core vertices are reached but not expanded."""
    return _search(ch.up, source, core)


def downward_search(ch: CHData, target: int, core: list[bool] | None = None) -> dict[int, int]:
    """Backward search from ``target`` on the downward graph."""
    return _search(ch.down, target, core)


def _search(adj: Adjacency, source: int, core: list[bool] | None) -> dict[int, int]:
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if core is not None and core[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist.get(v, UNREACHABLE):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def _check_vertex(ch: CHData, v: int) -> None:
    if not 0 <= v < ch.vertex_count:
        raise ValueError(f"vertex {v} outside the graph")


def ch_query(ch: CHData, s: int, t: int) -> float:
    """Shortest-path distance from ``s`` to ``t``; UNREACHABLE if disconnected."""
    _check_vertex(ch, s)
    _check_vertex(ch, t)
    fwd = upward_search(ch, s)
    bwd = downward_search(ch, t)
    if len(fwd) > len(bwd):
        fwd, bwd = bwd, fwd
    return min((d + bwd[v] for v, d in fwd.items() if v in bwd), default=UNREACHABLE)


def _search_with_parents(adj: Adjacency, source: int) -> tuple[dict[int, int], dict[int, int]]:
    dist = {source: 0}
    parent: dict[int, int] = {}
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in adj[u]:
            nd = d + w
            if nd < dist.get(v, UNREACHABLE):
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def ch_path(ch: CHData, s: int, t: int) -> list[int] | None:
    """Vertex sequence of a shortest ``s``-``t`` path with shortcuts unpacked."""
    fwd, fpar = _search_with_parents(ch.up, s)
    bwd, bpar = _search_with_parents(ch.down, t)
    meet = min((v for v in fwd if v in bwd), key=lambda v: (fwd[v] + bwd[v], v), default=None)
    if meet is None:
        return None
    head = [meet]
    while head[-1] != s:
        head.append(fpar[head[-1]])
    head.reverse()
    tail = [meet]
    while tail[-1] != t:
        tail.append(bpar[tail[-1]])
    hops = head + tail[1:]
    path = [hops[0]]
    for a, b in zip(hops, hops[1:]):
        path.extend(_unpack(ch, a, b)[1:])
    return path


def _unpack(ch: CHData, a: int, b: int) -> list[int]:
    mid = ch.middle.get((a, b))
    if mid is None:
        return [a, b]
    return _unpack(ch, a, mid) + _unpack(ch, mid, b)[1:]


def core_distances(core: CoreCHData, source: int) -> list[float]:
    """Distances from ``source`` to every core vertex (other entries are not meaningful)."""
    _check_vertex(core, source)
    seeds = {v: d for v, d in upward_search(core, source, core.is_core).items() if core.is_core[v]}
    return multi_source_dijkstra(core.core_graph, seeds)


def core_query(core: CoreCHData, s: int, t: int) -> float:
    """Exact ``s``-``t`` distance through the partial hierarchy and the core."""
    _check_vertex(core, s)
    _check_vertex(core, t)
    fwd = upward_search(core, s, core.is_core)
    bwd = downward_search(core, t, core.is_core)
    best = min((d + bwd[v] for v, d in fwd.items() if v in bwd), default=UNREACHABLE)
    exits = {v: d for v, d in bwd.items() if core.is_core[v]}
    if not exits:
        return best
    dist = multi_source_dijkstra(core.core_graph, {v: d for v, d in fwd.items() if core.is_core[v]})
    return min(best, min(dist[v] + d for v, d in exits.items()))


def average_degree(adj: Adjacency, vertices: Iterable[int]) -> float:
    vs = list(vertices)
    if not vs:
        return 0.0
    return sum(len(adj[v]) for v in vs) / len(vs)


__all__ = [
    "CHData",
    "CoreCHData",
    "DEFAULT_MAX_AVG_CORE_DEGREE",
    "average_degree",
    "build_ch",
    "build_core_ch",
    "ch_path",
    "ch_query",
    "core_distances",
    "core_query",
    "downward_search",
    "upward_search",
]
