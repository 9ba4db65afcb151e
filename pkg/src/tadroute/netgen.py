"""Seeded random networks and the worked-example fixtures.

Walking graphs are random geometric graphs over a square, with weights set
by walking speed 4.5 km/h. Timetables come from a handful of stop patterns;
a share of trips are "express" clones that leave later and arrive earlier on
their first leg, so overtaking (non-FIFO) pairs are guaranteed.
"""
from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass

from .graphs import dijkstra
from .model import Network, StopEvent, Timetable, TransferGraph, Trip, assemble_network, parse_time

WALK_SPEED_MPS = 4.5 / 3.6


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    stop_count: int = 12
    extra_vertex_count: int = 8
    trip_count: int = 20
    trip_length: tuple[int, int] = (2, 6)
    horizon: tuple[int, int] = (6 * 3600, 10 * 3600)
    non_fifo_rate: float = 0.3
    buffer_rate: float = 0.5
    buffer_range: tuple[int, int] = (60, 600)
    walk_radius: float = 0.25
    oneway_rate: float = 0.1
    area_m: float = 3000.0
    leg_seconds: tuple[int, int] = (120, 900)
    closure_mode: bool = False

    def __post_init__(self):
        for name in ("non_fifo_rate", "buffer_rate", "oneway_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("trip_length", "horizon", "buffer_range", "leg_seconds"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} range is empty")
        if self.horizon[1] <= 0:
            raise ValueError("horizon must be positive")
        if self.stop_count < 1 or self.extra_vertex_count < 0 or self.trip_count < 0:
            raise ValueError("counts must be non-negative and stop_count at least 1")
        if self.trip_count and (self.trip_length[0] < 2 or self.trip_length[0] > self.stop_count):
            raise ValueError(
                f"trip_length {self.trip_length} infeasible with {self.stop_count} stops (need 2 <= min <= stop_count)"
            )
        if self.leg_seconds[0] < 3 or self.buffer_range[0] < 0:
            raise ValueError("leg_seconds must be at least 3 s and buffers non-negative")

    def to_dict(self) -> dict:
        return asdict(self)


def _walk_graph(rng: random.Random, p: GenParams) -> tuple[TransferGraph, list[tuple[float, float]]]:
    n = p.stop_count + p.extra_vertex_count
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            d = math.dist(pts[a], pts[b])
            if d > p.walk_radius:
                continue
            w = max(1, round(d * p.area_m / WALK_SPEED_MPS))
            r = rng.random()
            if r < p.oneway_rate / 2:
                edges.append((a, b, w))
            elif r < p.oneway_rate:
                edges.append((b, a, w))
            else:
                edges += [(a, b, w), (b, a, w)]
    graph = TransferGraph.from_edges(n, edges)
    if p.closure_mode:
        graph = close_stop_footpaths(graph, range(p.stop_count))
    return graph, pts


def close_stop_footpaths(graph: TransferGraph, stop_vertices) -> TransferGraph:
    """Replace stop-to-stop edges by a direct shortest-walk edge for every walkable stop pair."""
    stops = list(stop_vertices)
    is_stop = set(stops)
    edges = [(u, v, w) for u, v, w in graph.edges() if not (u in is_stop and v in is_stop)]
    for a in stops:
        dist = dijkstra(graph.adj, a)
        edges += [(a, b, int(dist[b])) for b in stops if b != a and math.isfinite(dist[b])]
    return TransferGraph.from_edges(graph.vertex_count, edges)


def _timetable(rng: random.Random, p: GenParams) -> list[Trip]:
    trips: list[Trip] = []
    if not p.trip_count:
        return trips
    n_clones = round(p.non_fifo_rate * p.trip_count)
    if p.non_fifo_rate > 0 and p.trip_count >= 2:
        n_clones = max(1, n_clones)
    n_clones = min(n_clones, p.trip_count - 1)
    n_base = p.trip_count - n_clones

    n_routes = max(1, n_base // 4)
    routes = []
    for _ in range(n_routes):
        length = rng.randint(p.trip_length[0], min(p.trip_length[1], p.stop_count))
        stops = rng.sample(range(p.stop_count), length)
        legs = [rng.randint(*p.leg_seconds) for _ in range(length - 1)]
        routes.append((stops, legs))

    for k in range(n_base):
        r = rng.randrange(n_routes)
        stops, legs = routes[r]
        t = rng.randint(*p.horizon)
        events = []
        for i, s in enumerate(stops):
            arr = t
            dep = arr + (rng.randint(0, 90) if 0 < i < len(stops) - 1 else 0)
            events.append(StopEvent(s, arr, dep))
            if i < len(legs):
                t = dep + max(3, round(legs[i] * rng.uniform(0.8, 1.25)))
        trips.append(Trip(f"T{k}", f"R{r}", tuple(events)))

    for c in range(n_clones):
        base = trips[rng.randrange(n_base)]
        ev = base.events
        first_leg = ev[1].arr - ev[0].dep
        delta = rng.randint(1, max(1, (first_leg - 1) // 2))
        t = ev[0].dep + delta
        events = [StopEvent(ev[0].stop, t, t)]
        for i in range(1, len(ev)):
            leg = ev[i].arr - ev[i - 1].dep
            faster = max(1, leg - 2 * delta) if i == 1 else max(1, round(leg * rng.uniform(0.5, 0.95)))
            t += faster
            events.append(StopEvent(ev[i].stop, t, t))
        trips.append(Trip(f"X{c}", base.route_id + "x", tuple(events)))
    return trips


def generate(params: GenParams) -> Network:
    """Deterministic random network for ``params`` (identity stop -> vertex mapping)."""
    rng = random.Random(params.seed)
    graph, pts = _walk_graph(rng, params)
    # both draws always happen, so changing buffer_rate leaves the rest of the network alone
    draws = [(rng.randint(*params.buffer_range), rng.random()) for _ in range(params.stop_count)]
    buffers = tuple(b if r < params.buffer_rate else 0 for b, r in draws)
    trips = _timetable(rng, params)
    timetable = Timetable(
        stop_ids=tuple(f"S{i}" for i in range(params.stop_count)),
        buffers=buffers,
        coords=tuple((round(y, 6), round(x, 6)) for x, y in pts[: params.stop_count]),
        trips=tuple(trips),
    )
    return assemble_network(timetable, graph)


def random_params(seed: int, **overrides) -> GenParams:
    """Draw a small, varied parameter set from ``seed`` (used by test grids)."""
    rng = random.Random(seed * 7919 + 17)
    stops = rng.randint(3, 18)
    values = dict(
        seed=seed,
        stop_count=stops,
        extra_vertex_count=rng.randint(0, 14),
        trip_count=rng.randint(2, 40),
        trip_length=(2, min(stops, rng.randint(2, 7))),
        horizon=(6 * 3600, rng.choice([7, 8, 10]) * 3600),
        walk_radius=rng.uniform(0.12, 0.45),
        leg_seconds=(60, rng.choice([600, 1200])),
    )
    values.update(overrides)
    return GenParams(**values)


def _hm(text: str) -> int:
    return parse_time(text)


def _fixture(stop_ids, buffers, trips) -> Network:
    index = {s: i for i, s in enumerate(stop_ids)}
    built = []
    for tid, rows in trips:
        events = tuple(StopEvent(index[s], _hm(a), _hm(d)) for s, a, d in rows)
        built.append(Trip(tid, tid, events))
    timetable = Timetable(tuple(stop_ids), tuple(buffers), tuple((0.0, 0.0) for _ in stop_ids), tuple(built))
    return assemble_network(timetable, TransferGraph.from_edges(len(stop_ids), []))


def paper_fixture(name: str) -> Network:
    """The worked examples: ``motivating``, ``pruning`` or ``nonfifo_intro``."""
    if name == "motivating":
        return _fixture(
            ["A", "B", "C"],
            [0, 1200, 0],
            [
                ("T1", [("A", "8:00", "8:00"), ("B", "9:40", "9:40"), ("C", "10:30", "10:30")]),
                ("T2", [("A", "8:30", "8:30"), ("B", "9:30", "9:30")]),
            ],
        )
    if name == "nonfifo_intro":
        return _fixture(
            ["A", "B"],
            [0, 0],
            [
                ("T1", [("A", "8:00", "8:00"), ("B", "9:30", "9:30")]),
                ("T2", [("A", "8:30", "8:30"), ("B", "9:00", "9:00")]),
            ],
        )
    if name == "pruning":
        return _fixture(
            ["A", "B"],
            [0, 0],
            [
                ("T1", [("A", "8:00", "8:00"), ("B", "9:30", "9:30")]),
                ("T2", [("A", "8:10", "8:10"), ("B", "9:00", "9:00")]),
                ("T3", [("A", "8:20", "8:20"), ("B", "10:00", "10:00")]),
                ("T4", [("A", "8:30", "8:30"), ("B", "9:30", "9:30")]),
            ],
        )
    raise ValueError(f"unknown fixture {name!r}; expected motivating, pruning or nonfifo_intro")
