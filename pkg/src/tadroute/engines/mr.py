"""Round-based earliest-arrival engine with Core-CH transfers (MR without the Pareto bags).

Round ``k`` boards trips at stops improved in round ``k - 1`` (paying the
stop's buffer), rides each boarded trip from its earliest boarding position,
then relaxes transfers with a multi-source Dijkstra on the core graph seeded
by every stop the trips improved.
"""
from __future__ import annotations

import heapq
import logging
import time
from bisect import bisect_left

from ..model import UNREACHABLE, Network
from ..preprocessing import CoreCHData, downward_search, upward_search
from .common import CORE_CH, QueryRequest, QueryResult, QueryStats, check_request, check_transfer_data

log = logging.getLogger(__name__)

MAX_ROUNDS = 16


def mr_query(network: Network, core: CoreCHData, request: QueryRequest, max_rounds: int = MAX_ROUNDS) -> QueryResult:
    check_request(network, request)
    check_transfer_data(network, CORE_CH, core)
    if request.target is None:
        raise ValueError("mr_query answers one-to-one queries only")
    start = time.perf_counter_ns()
    stats = QueryStats()
    s, t, tau = request.source, request.target, request.departure
    is_core = core.is_core
    is_stop = network.vertex_stop
    core_adj = core.core_graph
    trip_vertices = network.trip_vertices
    trip_arrivals = network.trip_arrivals
    departures_at = network.departures_at

    best = [UNREACHABLE] * network.vertex_count
    fwd = upward_search(core, s, is_core)
    bwd = downward_search(core, t, is_core)
    target = tau + min((d + bwd[v] for v, d in fwd.items() if v in bwd), default=UNREACHABLE)
    exits = {v: d for v, d in bwd.items() if is_core[v]}

    def transfer(seeds: dict[int, float]) -> list[int]:
        """Dijkstra on the core from ``seeds`` (already written to ``best``); returns improved vertices."""
        nonlocal target
        heap = [(a, v) for v, a in seeds.items()]
        heapq.heapify(heap)
        improved = list(seeds)
        while heap:
            a, u = heapq.heappop(heap)
            if a > best[u]:
                continue
            stats.settled += 1
            if u in exits and a + exits[u] < target:
                target = a + exits[u]
            for v, w in core_adj[u]:
                stats.relaxed_edges += 1
                nd = a + w
                if nd < best[v] and nd < target:
                    best[v] = nd
                    improved.append(v)
                    heapq.heappush(heap, (nd, v))
        return improved

    seeds = {}
    for v, d in fwd.items():
        if is_core[v] and tau + d < best[v]:
            best[v] = tau + d
            seeds[v] = tau + d
    marked = sorted({v for v in transfer(seeds) if is_stop[v] >= 0})

    rounds = 0
    while marked and rounds < max_rounds:
        rounds += 1
        board_from: dict[int, int] = {}
        for u in marked:
            adjusted, trips, positions = departures_at[u]
            for k in range(bisect_left(adjusted, best[u]), len(adjusted)):
                trip = trips[k]
                if positions[k] < board_from.get(trip, len(trip_vertices[trip])):
                    board_from[trip] = positions[k]
        improved: dict[int, float] = {}
        for trip, pos in board_from.items():
            stats.scanned_trips += 1
            vertices = trip_vertices[trip]
            arrivals = trip_arrivals[trip]
            for i in range(pos + 1, len(vertices)):
                v, a = vertices[i], arrivals[i]
                if a < best[v] and a < target:
                    best[v] = a
                    improved[v] = a
        marked = sorted({v for v in transfer(improved) if is_stop[v] >= 0})
    if marked:
        log.warning("round cap %d reached for query %s -> %s @ %s", max_rounds, s, t, tau)
    stats.rounds = rounds
    stats.wall_time_us = (time.perf_counter_ns() - start) / 1000
    return QueryResult(target, stats)
