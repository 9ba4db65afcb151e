"""Network data model: stops, trips, the transfer graph and departure boards.

Times are integer seconds since service-day midnight. Values past 86400 are
kept as-is (GTFS over-midnight trips). :data:`UNREACHABLE` is ``math.inf`` so
it compares greater than every finite time and absorbs additions.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

UNREACHABLE = math.inf

DAY = 86400


class ModelError(ValueError):
    """Raised when a network cannot be assembled from its parts."""


def parse_time(text: str) -> int:
    """Parse ``H:MM:SS`` (or ``H:MM``) into seconds; hours may exceed 23."""
    parts = text.strip().split(":")
    if len(parts) not in (2, 3) or not all(p.isdigit() for p in parts):
        raise ValueError(f"malformed time string {text!r}")
    h, m = int(parts[0]), int(parts[1])
    s = int(parts[2]) if len(parts) == 3 else 0
    if m > 59 or s > 59:
        raise ValueError(f"malformed time string {text!r}")
    return h * 3600 + m * 60 + s


def format_gtfs_time(seconds: int) -> str:
    h, rem = divmod(int(seconds), 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


def format_clock(t: float) -> str:
    """Human clock: ``10:30:00``, ``01:10:00+1`` past midnight, or ``UNREACHABLE``."""
    if t == UNREACHABLE:
        return "UNREACHABLE"
    days, rem = divmod(int(t), DAY)
    text = format_gtfs_time(rem)
    return f"{text}+{days}" if days else text


@dataclass(frozen=True)
class Stop:
    stop_id: str
    vertex: int
    buffer: int = 0
    lat: float = 0.0
    lon: float = 0.0


@dataclass(frozen=True)
class StopEvent:
    stop: int
    arr: int
    dep: int


@dataclass(frozen=True)
class Trip:
    trip_id: str
    route_id: str
    events: tuple[StopEvent, ...]

    def __len__(self) -> int:
        return len(self.events)


@dataclass(frozen=True)
class TransferGraph:
    """Directed walking graph; ``adj[u]`` holds ``(target, weight)`` pairs."""

    vertex_count: int
    adj: tuple[tuple[tuple[int, int], ...], ...]

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Sequence[tuple[int, int, int]]) -> "TransferGraph":
        lists: list[list[tuple[int, int]]] = [[] for _ in range(vertex_count)]
        for u, v, w in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ModelError(f"edge ({u}, {v}) out of range for {vertex_count} vertices")
            if w < 0 or not math.isfinite(w):
                raise ModelError(f"edge ({u}, {v}) has invalid weight {w}")
            lists[u].append((v, int(w)))
        return cls(vertex_count, tuple(tuple(sorted(lst)) for lst in lists))

    def edges(self):
        for u, out in enumerate(self.adj):
            for v, w in out:
                yield u, v, w

    @property
    def edge_count(self) -> int:
        return sum(len(out) for out in self.adj)

    @cached_property
    def reverse_adj(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        lists: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for u, v, w in self.edges():
            lists[v].append((u, w))
        return tuple(tuple(lst) for lst in lists)


class Connection(NamedTuple):
    dep: int
    arr: int
    trip: int
    pos: int


@dataclass(frozen=True)
class DepartureBoard:
    """All departures over one transit edge ``u -> v``, index-aligned.

    ``boarding_adjusted_departure`` is ``departure - buffer(u)`` so the
    boarding test needs no addition at query time.
    """

    u: int
    v: int
    departure: tuple[int, ...]
    boarding_adjusted_departure: tuple[int, ...]
    arrival_next: tuple[int, ...]
    trip_handle: tuple[int, ...]
    pos_in_trip: tuple[int, ...]
    suffix_min_arrival: tuple[int, ...]

    @classmethod
    def from_connections(cls, u: int, v: int, connections: Sequence[Connection], buffer: int) -> "DepartureBoard":
        conns = sorted(connections)
        suffix: list[int] = [0] * len(conns)
        best = UNREACHABLE
        for i in range(len(conns) - 1, -1, -1):
            best = min(best, conns[i].arr)
            suffix[i] = best
        return cls(
            u=u,
            v=v,
            departure=tuple(c.dep for c in conns),
            boarding_adjusted_departure=tuple(c.dep - buffer for c in conns),
            arrival_next=tuple(c.arr for c in conns),
            trip_handle=tuple(c.trip for c in conns),
            pos_in_trip=tuple(c.pos for c in conns),
            suffix_min_arrival=tuple(suffix),
        )

    def __len__(self) -> int:
        return len(self.departure)

    def connections(self) -> list[Connection]:
        return [Connection(*row) for row in zip(self.departure, self.arrival_next, self.trip_handle, self.pos_in_trip)]

    def first_boardable(self, arrival: float) -> int:
        """Index of the first departure reachable by a passenger at ``u`` at ``arrival``."""
        return bisect_left(self.boarding_adjusted_departure, arrival)


@dataclass(frozen=True)
class Timetable:
    """Parsed timetable before it is attached to a transfer graph."""

    stop_ids: tuple[str, ...]
    buffers: tuple[int, ...]
    coords: tuple[tuple[float, float], ...]
    trips: tuple[Trip, ...]


@dataclass(frozen=True)
class Network:
    stops: tuple[Stop, ...]
    trips: tuple[Trip, ...]
    graph: TransferGraph
    boards: dict[tuple[int, int], DepartureBoard]
    stop_of_vertex: dict[int, int]
    filtered: bool = False

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @cached_property
    def stop_index(self) -> dict[str, int]:
        return {s.stop_id: i for i, s in enumerate(self.stops)}

    @cached_property
    def vertex_stop(self) -> list[int]:
        """Dense vertex -> stop index lookup, -1 for non-stop vertices."""
        lookup = [-1] * self.graph.vertex_count
        for v, s in self.stop_of_vertex.items():
            if 0 <= v < len(lookup):
                lookup[v] = s
        return lookup

    @cached_property
    def vertex_buffer(self) -> list[int]:
        lookup = [0] * self.graph.vertex_count
        for s in self.stops:
            if 0 <= s.vertex < len(lookup):
                lookup[s.vertex] = s.buffer
        return lookup

    @cached_property
    def stop_vertices(self) -> list[int]:
        return [s.vertex for s in self.stops]

    @cached_property
    def transit_out(self) -> list[list[DepartureBoard]]:
        out: list[list[DepartureBoard]] = [[] for _ in range(self.graph.vertex_count)]
        for key in sorted(self.boards):
            out[key[0]].append(self.boards[key])
        return out

    @cached_property
    def departures_at(self) -> list[tuple[list[int], list[int], list[int]]]:
        """Per vertex: boarding-adjusted departures (sorted), trip handles, positions."""
        out: list[tuple[list[int], list[int], list[int]]] = []
        for boards in self.transit_out:
            rows = sorted(
                (b.boarding_adjusted_departure[i], b.trip_handle[i], b.pos_in_trip[i])
                for b in boards
                for i in range(len(b))
            )
            out.append(([r[0] for r in rows], [r[1] for r in rows], [r[2] for r in rows]))
        return out

    @cached_property
    def trip_vertices(self) -> list[list[int]]:
        return [[self.stops[e.stop].vertex for e in t.events] for t in self.trips]

    @cached_property
    def trip_arrivals(self) -> list[list[int]]:
        return [[e.arr for e in t.events] for t in self.trips]

    @cached_property
    def trip_departures(self) -> list[list[int]]:
        return [[e.dep for e in t.events] for t in self.trips]

    @property
    def has_buffers(self) -> bool:
        return any(s.buffer > 0 for s in self.stops)

    @property
    def connection_count(self) -> int:
        return sum(len(t.events) - 1 for t in self.trips)


def _trip_connections(trips: Sequence[Trip], vertex_of_stop: Sequence[int]):
    per_edge: dict[tuple[int, int], list[Connection]] = {}
    for handle, trip in enumerate(trips):
        ev = trip.events
        for pos in range(len(ev) - 1):
            key = (vertex_of_stop[ev[pos].stop], vertex_of_stop[ev[pos + 1].stop])
            per_edge.setdefault(key, []).append(Connection(ev[pos].dep, ev[pos + 1].arr, handle, pos))
    return per_edge


def assemble_network(
    timetable: Timetable,
    graph: TransferGraph,
    stop_vertex_mapping: Sequence[int] | dict[str, int] | None = None,
) -> Network:
    """Attach a timetable to a transfer graph and build the departure boards.

    ``stop_vertex_mapping`` is either a sequence indexed like
    ``timetable.stop_ids``, a dict keyed by stop id, or ``None`` for identity.
    """
    n_stops = len(timetable.stop_ids)
    if stop_vertex_mapping is None:
        vertices = list(range(n_stops))
    elif isinstance(stop_vertex_mapping, dict):
        missing = [sid for sid in timetable.stop_ids if sid not in stop_vertex_mapping]
        if missing:
            raise ModelError(f"stops without a vertex mapping: {', '.join(missing[:5])}")
        vertices = [int(stop_vertex_mapping[sid]) for sid in timetable.stop_ids]
    else:
        vertices = [int(v) for v in stop_vertex_mapping]
        if len(vertices) != n_stops:
            raise ModelError(f"mapping covers {len(vertices)} of {n_stops} stops")

    stop_of_vertex: dict[int, int] = {}
    for i, v in enumerate(vertices):
        if not 0 <= v < graph.vertex_count:
            raise ModelError(f"stop {timetable.stop_ids[i]!r} mapped to vertex {v} outside the graph")
        if v in stop_of_vertex:
            other = timetable.stop_ids[stop_of_vertex[v]]
            raise ModelError(f"mapping collision: stops {other!r} and {timetable.stop_ids[i]!r} share vertex {v}")
        stop_of_vertex[v] = i

    for trip in timetable.trips:
        for e in trip.events:
            if not 0 <= e.stop < n_stops:
                raise ModelError(f"trip {trip.trip_id!r} references unmapped stop index {e.stop}")

    stops = tuple(
        Stop(sid, vertices[i], timetable.buffers[i], *timetable.coords[i])
        for i, sid in enumerate(timetable.stop_ids)
    )
    per_edge = _trip_connections(timetable.trips, vertices)
    boards = {
        key: DepartureBoard.from_connections(key[0], key[1], conns, stops[stop_of_vertex[key[0]]].buffer)
        for key, conns in sorted(per_edge.items())
    }
    return Network(stops, tuple(timetable.trips), graph, boards, stop_of_vertex)


def timetable_of(network: Network) -> Timetable:
    return Timetable(
        stop_ids=tuple(s.stop_id for s in network.stops),
        buffers=tuple(s.buffer for s in network.stops),
        coords=tuple((s.lat, s.lon) for s in network.stops),
        trips=network.trips,
    )


def validate_network(network: Network) -> list[str]:
    """Return one message per invariant violation; empty means valid."""
    report: list[str] = []
    n = network.graph.vertex_count

    for u, v, w in network.graph.edges():
        if w < 0:
            report.append(f"graph edge ({u}, {v}) has negative weight {w}")

    unmapped: set[int] = set()
    for i, stop in enumerate(network.stops):
        if stop.buffer < 0 or not math.isfinite(stop.buffer):
            report.append(f"stop {stop.stop_id!r} has invalid buffer {stop.buffer}")
        if not 0 <= stop.vertex < n:
            report.append(f"stop {stop.stop_id!r} mapped to out-of-range vertex {stop.vertex}")
            unmapped.add(i)
        elif network.stop_of_vertex.get(stop.vertex) != i:
            report.append(f"stop {stop.stop_id!r} vertex {stop.vertex} does not map back to it")
    for v, s in network.stop_of_vertex.items():
        if not 0 <= s < len(network.stops):
            report.append(f"vertex {v} maps to dangling stop index {s}")

    for trip in network.trips:
        ev = trip.events
        if len(ev) < 2:
            report.append(f"trip {trip.trip_id!r} has fewer than two stop events")
        for i, e in enumerate(ev):
            if not 0 <= e.stop < len(network.stops):
                report.append(f"trip {trip.trip_id!r} event {i} references unknown stop {e.stop}")
            if e.arr > e.dep:
                report.append(f"trip {trip.trip_id!r} event {i} departs before it arrives")
            if e.arr < 0:
                report.append(f"trip {trip.trip_id!r} event {i} has negative time")
            if i + 1 < len(ev) and ev[i + 1].arr < e.dep:
                report.append(f"trip {trip.trip_id!r} travels back in time between events {i} and {i + 1}")

    for key, board in network.boards.items():
        if any(a > b for a, b in zip(board.departure, board.departure[1:])):
            report.append(f"board {key} departures not sorted")
        beta = network.stops[network.stop_of_vertex[key[0]]].buffer if key[0] in network.stop_of_vertex else 0
        if any(a != d - beta for a, d in zip(board.boarding_adjusted_departure, board.departure)):
            report.append(f"board {key} boarding-adjusted departures inconsistent with buffer {beta}")
        best = UNREACHABLE
        for i in range(len(board) - 1, -1, -1):
            best = min(best, board.arrival_next[i])
            if board.suffix_min_arrival[i] != best:
                report.append(f"board {key} suffix minimum wrong at {i}")
                break
        for h, p in zip(board.trip_handle, board.pos_in_trip):
            ok = 0 <= h < len(network.trips) and p + 1 < len(network.trips[h].events)
            if ok:
                ev = network.trips[h].events
                try:
                    if ev[p].stop in unmapped or ev[p + 1].stop in unmapped:
                        continue  # already reported with the stop
                    ok = (network.stops[ev[p].stop].vertex, network.stops[ev[p + 1].stop].vertex) == key
                except IndexError:
                    ok = False
            if not ok:
                report.append(f"board {key} entry (trip {h}, pos {p}) does not match a trip leg")
                break
    return report
