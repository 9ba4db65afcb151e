"""Trip-aware Connection Scan.

Classic CSA only relaxes one footpath hop after each arrival, so it needs
stop-to-stop footpaths to be transitively closed: every walkable stop pair
must have a direct edge whose weight is the shortest walking distance.
Walking from the source and to the target uses plain Dijkstra on the
transfer graph.
"""
from __future__ import annotations

import time
from bisect import bisect_left
from dataclasses import dataclass

from ..graphs import dijkstra
from ..model import UNREACHABLE, Network
from .common import QueryRequest, QueryResult, QueryStats, check_request


class ClosureError(ValueError):
    """The network's stop footpaths are not transitively closed."""


def closure_violations(network: Network, limit: int = 10) -> list[str]:
    """Stop pairs reachable on foot without a direct shortest footpath edge."""
    problems = []
    stop_vertices = network.stop_vertices
    adj = network.graph.adj
    for a in stop_vertices:
        dist = dijkstra(adj, a)
        direct: dict[int, int] = {}
        for v, w in adj[a]:
            if v not in direct or w < direct[v]:
                direct[v] = w
        for b in stop_vertices:
            if b == a or dist[b] == UNREACHABLE:
                continue
            if direct.get(b) != dist[b]:
                problems.append(f"stops at vertices {a}->{b}: walk {dist[b]} s, direct edge {direct.get(b)}")
                if len(problems) >= limit:
                    return problems
    return problems


def has_footpath_closure(network: Network) -> bool:
    return not closure_violations(network, limit=1)


@dataclass
class CSAData:
    departures: list[int]
    connections: list[tuple[int, int, int, int, int]]  # dep, arr, trip, from vertex, to vertex
    footpaths: list[list[tuple[int, int]]]


def prepare_csa(network: Network, check_closure: bool = True) -> CSAData:
    if check_closure:
        problems = closure_violations(network, limit=3)
        if problems:
            raise ClosureError("stop footpaths are not transitively closed: " + "; ".join(problems))
    conns = []
    for trip, vertices in enumerate(network.trip_vertices):
        arr = network.trip_arrivals[trip]
        dep = network.trip_departures[trip]
        for i in range(len(vertices) - 1):
            conns.append((dep[i], arr[i + 1], trip, i, vertices[i], vertices[i + 1]))
    conns.sort()
    is_stop = network.vertex_stop
    footpaths = [
        [(v, w) for v, w in network.graph.adj[u] if is_stop[v] >= 0 and v != u] if is_stop[u] >= 0 else []
        for u in range(network.vertex_count)
    ]
    return CSAData([c[0] for c in conns], [(c[0], c[1], c[2], c[4], c[5]) for c in conns], footpaths)


def csa_query(network: Network, request: QueryRequest, data: CSAData | None = None) -> QueryResult:
    """Earliest arrival by scanning connections in departure order.

    A connection is usable if its trip is already boarded, or if the
    passenger is at its departure stop a buffer ahead of it.
    """
    check_request(network, request)
    if request.target is None:
        raise ValueError("csa_query answers one-to-one queries only")
    if data is None:
        data = prepare_csa(network)
    start = time.perf_counter_ns()
    stats = QueryStats()
    s, t, tau = request.source, request.target, request.departure
    from_source = dijkstra(network.graph.adj, s)
    to_target = dijkstra(network.graph.reverse_adj, t)
    buffer = network.vertex_buffer
    arrival = [tau + d for d in from_source]
    best = arrival[t]
    boarded = [False] * len(network.trips)
    footpaths = data.footpaths
    for dep, arr, trip, u, v in data.connections[bisect_left(data.departures, tau):]:
        if dep >= best:
            break
        if boarded[trip] or arrival[u] + buffer[u] <= dep:
            boarded[trip] = True
            stats.scanned_trips += 1
            if arr < arrival[v]:
                arrival[v] = arr
                best = min(best, arr + to_target[v])
                for w, wt in footpaths[v]:
                    stats.relaxed_edges += 1
                    if arr + wt < arrival[w]:
                        arrival[w] = arr + wt
                        best = min(best, arrival[w] + to_target[w])
    stats.wall_time_us = (time.perf_counter_ns() - start) / 1000
    return QueryResult(best, stats)
