"""Exhaustive earliest-arrival computation for small networks.

Nothing here shares code with the engines: walking is relaxed edge by edge,
trips are read straight from their stop events, and labels are corrected
until nothing changes.
"""
from __future__ import annotations

from collections import deque

from .model import UNREACHABLE, Network

MAX_VERTICES = 2000
MAX_CONNECTIONS = 5000


class OracleSizeError(ValueError):
    pass


def _guard(network: Network, max_vertices: int = MAX_VERTICES, max_connections: int = MAX_CONNECTIONS) -> None:
    if network.graph.vertex_count > max_vertices or network.connection_count > max_connections:
        raise OracleSizeError(
            f"network too large for the oracle ({network.graph.vertex_count} vertices, "
            f"{network.connection_count} connections)"
        )


def oracle_arrivals(network: Network, source: int, departure: int) -> list[float]:
    """Earliest arrival at every vertex."""
    _guard(network)
    n = network.graph.vertex_count
    vertex_of = [s.vertex for s in network.stops]
    buffer_at = {s.vertex: s.buffer for s in network.stops}
    # every (trip, position) that boards at a vertex
    boardings: dict[int, list[tuple[int, int]]] = {}
    for k, trip in enumerate(network.trips):
        for i, e in enumerate(trip.events[:-1]):
            boardings.setdefault(vertex_of[e.stop], []).append((k, i))

    best: list[float] = [UNREACHABLE] * n
    best[source] = departure
    work = deque([source])
    queued = [False] * n
    queued[source] = True
    while work:
        u = work.popleft()
        queued[u] = False
        here = best[u]
        changed = []
        for v, w in network.graph.adj[u]:
            if here + w < best[v]:
                best[v] = here + w
                changed.append(v)
        ready = here + buffer_at.get(u, 0)
        for k, i in boardings.get(u, ()):
            events = network.trips[k].events
            if events[i].dep < ready:
                continue
            for e in events[i + 1:]:
                v = vertex_of[e.stop]
                if e.arr < best[v]:
                    best[v] = e.arr
                    changed.append(v)
        for v in changed:
            if not queued[v]:
                queued[v] = True
                work.append(v)
    return best


def oracle_query(network: Network, source: int, target: int, departure: int) -> float:
    return oracle_arrivals(network, source, departure)[target]


def _all_pairs_walk(network: Network) -> list[list[float]]:
    n = network.graph.vertex_count
    dist = [[UNREACHABLE] * n for _ in range(n)]
    for v in range(n):
        dist[v][v] = 0
    for u, v, w in network.graph.edges():
        if w < dist[u][v]:
            dist[u][v] = w
    for k in range(n):
        dk = dist[k]
        for i in range(n):
            dik = dist[i][k]
            if dik == UNREACHABLE:
                continue
            di = dist[i]
            for j in range(n):
                if dik + dk[j] < di[j]:
                    di[j] = dik + dk[j]
    return dist


def enumerate_journeys(network: Network, source: int, target: int, departure: int,
                       max_trips: int, max_vertices: int = 60) -> list[tuple[str, float]]:
    """Every journey with at most ``max_trips`` trip segments, walking legs taken as shortest walks.

    A trip is used at most once per journey: getting off and back on the same
    trip never beats staying seated. Descriptions read like
    ``walk 0->1 | T1 1->3 | walk 3->4``.
    """
    _guard(network, max_vertices=max_vertices, max_connections=400)
    walk = _all_pairs_walk(network)
    vertex_of = [s.vertex for s in network.stops]
    buffer_at = {s.vertex: s.buffer for s in network.stops}
    results: list[tuple[str, float]] = []

    def finish(at: int, time: float, legs: list[str]) -> None:
        d = walk[at][target]
        if d == UNREACHABLE:
            return
        tail = [f"walk {at}->{target}"] if at != target else []
        results.append((" | ".join(legs + tail) or "stay", time + d))

    def extend(at: int, time: float, legs: list[str], used: frozenset) -> None:
        finish(at, time, legs)
        if len(used) >= max_trips:
            return
        for k, trip in enumerate(network.trips):
            if k in used:
                continue
            events = trip.events
            for i in range(len(events) - 1):
                board = vertex_of[events[i].stop]
                d = walk[at][board]
                if d == UNREACHABLE or events[i].dep < time + d + buffer_at.get(board, 0):
                    continue
                pre = [f"walk {at}->{board}"] if board != at else []
                for j in range(i + 1, len(events)):
                    alight = vertex_of[events[j].stop]
                    extend(alight, events[j].arr, legs + pre + [f"{trip.trip_id} {board}->{alight}"], used | {k})

    extend(source, departure, [], frozenset())
    return results


def dominated_pairwise(connections) -> list:
    """Quadratic reference for domination filtering.

    ``c`` survives unless some other connection departs no earlier and
    arrives no later with one of the two strict, or is an exact duplicate
    with a smaller ``(trip, pos)``.
    """
    conns = list(connections)
    kept = []
    for c in conns:
        beaten = False
        for o in conns:
            if o is c:
                continue
            if o.dep >= c.dep and o.arr <= c.arr and (o.dep > c.dep or o.arr < c.arr):
                beaten = True
            elif o.dep == c.dep and o.arr == c.arr and (o.trip, o.pos) < (c.trip, c.pos):
                beaten = True
            if beaten:
                break
        if not beaten:
            kept.append(c)
    return sorted(kept, key=lambda c: c.dep)
