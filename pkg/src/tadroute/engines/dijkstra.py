"""Transfer Aware Dijkstra and filtered TD-Dijkstra.

Both run the same label-setting search; they differ only in how a settled
stop relaxes its transit edges. TAD boards every trip leaving after the
buffer and relaxes all later stops of that trip at timetable arrival times,
so a seated passenger never pays a buffer. TD-Dijkstra takes the first
departure on each filtered (FIFO) edge and relaxes only the next stop.

Walking is resolved according to the transfer mode:

``plain``
    every transfer-graph vertex is searched.
``core-ch``
    the search runs over core vertices; a contracted source is seeded by an
    upward search and a contracted target is reached through a downward one.
``bucket-ch``
    the search runs over stops only; walking from each settled stop to every
    other stop (and to the target) is one Bucket-CH one-to-many query.
"""
from __future__ import annotations

import heapq
import time
from bisect import bisect_left

from ..model import UNREACHABLE, DepartureBoard, Network
from ..preprocessing import bucket_one_to_many, downward_search, upward_search
from .common import (
    BUCKET_CH,
    CORE_CH,
    PLAIN,
    Labels,
    QueryRequest,
    QueryResult,
    QueryStats,
    check_request,
    check_transfer_data,
)


def should_prune(suffix_min_arrival, j: int, best: float, dest_buffer: int) -> bool:
    """Trip pruning: no trip from ``j`` on can beat ``best`` once the destination buffer is allowed for."""
    return suffix_min_arrival[j] > best + dest_buffer


def scan_trip(network: Network, trip: int, start_index: int, labels: Labels, queue: list,
              end_index: int | None = None) -> int:
    """Relax every stop after ``start_index`` on ``trip`` at its timetable arrival.

    Returns the number of labels improved (each improved vertex is pushed on
    ``queue``).
    """
    vertices = network.trip_vertices[trip]
    arrivals = network.trip_arrivals[trip]
    end = len(vertices) if end_index is None else end_index
    updated = 0
    for i in range(start_index + 1, end):
        v = vertices[i]
        t = arrivals[i]
        if t < labels[v]:
            labels.improve(v, t)
            heapq.heappush(queue, (t, v))
            updated += 1
    return updated


def trip_pruning_trace(network: Network, edge: tuple[int, int], board_time: int,
                       dest_buffer: int | None = None) -> list[tuple[str, str]]:
    """Scan/skip decision for each trip on ``edge`` departing at or after ``board_time``.

    Only the per-edge loop is simulated; ``best`` is the arrival at the edge's
    head, as in the search itself.
    """
    board: DepartureBoard = network.boards[edge]
    beta = network.vertex_buffer[edge[1]] if dest_buffer is None else dest_buffer
    best = UNREACHABLE
    trace = []
    i = bisect_left(board.departure, board_time)
    for j in range(i, len(board)):
        trip_id = network.trips[board.trip_handle[j]].trip_id
        if best != UNREACHABLE and should_prune(board.suffix_min_arrival, j, best, beta):
            trace.extend((network.trips[board.trip_handle[k]].trip_id, "skipped") for k in range(j, len(board)))
            break
        trace.append((trip_id, "scanned"))
        best = min(best, board.arrival_next[j])
    return trace


class _Search:
    """One label-setting query; ``transit`` relaxes the departures of a settled stop."""

    def __init__(self, network: Network, request: QueryRequest, labels: Labels | None):
        self.network = network
        self.request = request
        self.labels = labels if labels is not None else Labels(network.vertex_count)
        self.labels.reset()
        self.queue: list = []
        self.stats = QueryStats()
        self.scanned_from: dict[int, int] = {}

    def relax(self, v: int, t: float) -> None:
        if t < self.labels[v]:
            self.labels.improve(v, t)
            heapq.heappush(self.queue, (t, v))

    # transit relaxations

    def tad_transit(self, u: int, arrival: float) -> None:
        net = self.network
        vbuf = net.vertex_buffer
        pruning = self.request.pruning
        stats = self.stats
        scanned_from = self.scanned_from
        for board in net.transit_out[u]:
            i = bisect_left(board.boarding_adjusted_departure, arrival)
            n = len(board.departure)
            if i == n:
                continue
            beta = vbuf[board.v]
            suffix = board.suffix_min_arrival
            best = UNREACHABLE
            for j in range(i, n):
                if pruning and best != UNREACHABLE and should_prune(suffix, j, best, beta):
                    break
                trip = board.trip_handle[j]
                pos = board.pos_in_trip[j]
                end = scanned_from.get(trip)
                if end is None or pos < end:
                    # stops past an earlier boarding of this trip are already relaxed
                    stats.scanned_trips += 1
                    stop_at = None if end is None else end + 1
                    stats.relaxed_edges += scan_trip(net, trip, pos, self.labels, self.queue, stop_at)
                    scanned_from[trip] = pos
                if board.arrival_next[j] < best:
                    best = board.arrival_next[j]

    def td_transit(self, u: int, arrival: float) -> None:
        for board in self.network.transit_out[u]:
            i = bisect_left(board.boarding_adjusted_departure, arrival)
            if i < len(board.departure):
                self.stats.relaxed_edges += 1
                self.relax(board.v, board.arrival_next[i])

    # transfer modes

    def run_plain(self, transit) -> float:
        req, net = self.request, self.network
        labels, queue, stats = self.labels, self.queue, self.stats
        adj = net.graph.adj
        is_stop = net.vertex_stop
        target = req.target
        self.relax(req.source, req.departure)
        while queue:
            a, u = heapq.heappop(queue)
            if a > labels[u]:
                continue
            stats.settled += 1
            if u == target:
                break
            if is_stop[u] >= 0:
                transit(u, a)
            for v, w in adj[u]:
                stats.relaxed_edges += 1
                self.relax(v, a + w)
        return UNREACHABLE if target is None else labels[target]

    def run_core(self, transit, core) -> float:
        req, net = self.request, self.network
        labels, queue, stats = self.labels, self.queue, self.stats
        is_core = core.is_core
        is_stop = net.vertex_stop
        adj = core.core_graph
        s, target, tau = req.source, req.target, req.departure
        fwd = upward_search(core, s, is_core)
        best_target = UNREACHABLE
        exits: dict[int, int] = {}
        if target is not None:
            bwd = downward_search(core, target, is_core)
            best_target = tau + min((d + bwd[v] for v, d in fwd.items() if v in bwd), default=UNREACHABLE)
            exits = {v: d for v, d in bwd.items() if is_core[v]}
        for v, d in fwd.items():
            if is_core[v]:
                self.relax(v, tau + d)
        while queue:
            a, u = heapq.heappop(queue)
            if a > labels[u]:
                continue
            if a >= best_target:
                break
            stats.settled += 1
            if u in exits:
                best_target = min(best_target, a + exits[u])
                if u == target:
                    break
            if is_stop[u] >= 0:
                transit(u, a)
            for v, w in adj[u]:
                stats.relaxed_edges += 1
                self.relax(v, a + w)
        return best_target

    def run_bucket(self, transit, index) -> float:
        req, net = self.request, self.network
        labels, queue, stats = self.labels, self.queue, self.stats
        ch, buckets = index.ch, index.buckets
        s, target, tau = req.source, req.target, req.departure
        back = downward_search(ch, target) if target is not None else None

        def walk(u: int, at: float) -> float:
            dist = bucket_one_to_many(ch, buckets, u, back)
            for v, d in dist.items():
                if v >= 0:
                    stats.relaxed_edges += 1
                    self.relax(v, at + d)
            return at + dist[-1] if back is not None else UNREACHABLE

        best_target = walk(s, tau)
        while queue:
            a, u = heapq.heappop(queue)
            if a > labels[u]:
                continue
            if a >= best_target:
                break
            stats.settled += 1
            if u == target:
                best_target = a
                break
            transit(u, a)
            best_target = min(best_target, walk(u, a))
        return best_target


def _query(network: Network, request: QueryRequest, transfer_data, labels, td: bool) -> QueryResult:
    check_request(network, request)
    check_transfer_data(network, request.transfer_mode, transfer_data)
    start = time.perf_counter_ns()
    search = _Search(network, request, labels)
    transit = search.td_transit if td else search.tad_transit
    mode = request.transfer_mode
    if mode == PLAIN:
        arrival = search.run_plain(transit)
    elif mode == CORE_CH:
        arrival = search.run_core(transit, transfer_data)
    else:
        assert mode == BUCKET_CH
        arrival = search.run_bucket(transit, transfer_data)
    search.stats.wall_time_us = (time.perf_counter_ns() - start) / 1000
    arrivals = search.labels.as_dict() if request.target is None else None
    return QueryResult(arrival, search.stats, arrivals)


def tad_query(network: Network, request: QueryRequest, transfer_data=None, labels: Labels | None = None) -> QueryResult:
    """Earliest arrival respecting buffers (the buffer is paid at every boarding, including at the source)."""
    return _query(network, request, transfer_data, labels, td=False)


def td_query(network_filtered: Network, request: QueryRequest, transfer_data=None,
             labels: Labels | None = None) -> QueryResult:
    """TD-Dijkstra over dominance-filtered boards.

    Exact only when no stop has a buffer; on buffered networks the answer may
    be later than the true earliest arrival.
    """
    if not network_filtered.filtered:
        raise ValueError("td_query needs a network passed through filter_network")
    return _query(network_filtered, request, transfer_data, labels, td=True)
