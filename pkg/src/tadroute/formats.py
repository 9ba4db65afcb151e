"""Readers and writers: GTFS subset, transfer-graph text, mappings, network JSON."""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .model import (
    Network,
    StopEvent,
    Timetable,
    TransferGraph,
    Trip,
    assemble_network,
    format_gtfs_time,
    parse_time,
    timetable_of,
)

NETWORK_FORMAT = "tadroute-network"
NETWORK_VERSION = 1


class FormatError(ValueError):
    """Malformed input file; carries the file name and line number."""

    def __init__(self, path, line: int | None, message: str):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")


def _read_csv(path: Path, required: tuple[str, ...]):
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise FormatError(path, 1, f"missing column(s): {', '.join(missing)}")
        for row in reader:
            # header is line 1
            yield reader.line_num, {k: (v or "").strip() for k, v in row.items() if k is not None}


def parse_gtfs(directory) -> Timetable:
    """Read ``stops.txt``, ``trips.txt``, ``stop_times.txt`` and optional ``transfers.txt``.

    Same-stop rows of ``transfers.txt`` become buffer times; rows with
    distinct stops are ignored.
    """
    d = Path(directory)
    for name in ("stops.txt", "trips.txt", "stop_times.txt"):
        if not (d / name).is_file():
            raise FormatError(d / name, None, "required GTFS file is missing")

    stop_ids: list[str] = []
    coords: list[tuple[float, float]] = []
    index: dict[str, int] = {}
    path = d / "stops.txt"
    for line, row in _read_csv(path, ("stop_id",)):
        sid = row["stop_id"]
        if not sid or sid in index:
            raise FormatError(path, line, f"empty or duplicate stop_id {sid!r}")
        try:
            lat = float(row.get("stop_lat") or 0.0)
            lon = float(row.get("stop_lon") or 0.0)
        except ValueError:
            raise FormatError(path, line, "malformed coordinates") from None
        index[sid] = len(stop_ids)
        stop_ids.append(sid)
        coords.append((lat, lon))

    trip_order: list[str] = []
    routes: dict[str, str] = {}
    path = d / "trips.txt"
    for line, row in _read_csv(path, ("trip_id", "route_id")):
        tid = row["trip_id"]
        if not tid or tid in routes:
            raise FormatError(path, line, f"empty or duplicate trip_id {tid!r}")
        routes[tid] = row["route_id"]
        trip_order.append(tid)

    rows: dict[str, list[tuple[int, int, StopEvent]]] = {tid: [] for tid in trip_order}
    path = d / "stop_times.txt"
    for line, row in _read_csv(path, ("trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence")):
        tid, sid = row["trip_id"], row["stop_id"]
        if tid not in rows:
            raise FormatError(path, line, f"unknown trip_id {tid!r}")
        if sid not in index:
            raise FormatError(path, line, f"unknown stop_id {sid!r}")
        try:
            arr = parse_time(row["arrival_time"] or row["departure_time"])
            dep = parse_time(row["departure_time"] or row["arrival_time"])
        except ValueError as exc:
            raise FormatError(path, line, str(exc)) from None
        try:
            seq = int(row["stop_sequence"])
        except ValueError:
            raise FormatError(path, line, f"malformed stop_sequence {row['stop_sequence']!r}") from None
        rows[tid].append((seq, line, StopEvent(index[sid], arr, dep)))

    trips: list[Trip] = []
    for tid in trip_order:
        events = sorted(rows[tid], key=lambda r: r[0])
        for a, b in zip(events, events[1:]):
            if a[0] == b[0]:
                raise FormatError(path, b[1], f"trip {tid!r} repeats stop_sequence {b[0]}")
        if len(events) < 2:
            continue
        trips.append(Trip(tid, routes[tid], tuple(e[2] for e in events)))

    buffers = [0] * len(stop_ids)
    path = d / "transfers.txt"
    if path.is_file():
        for line, row in _read_csv(path, ("from_stop_id", "to_stop_id", "min_transfer_time")):
            if row["from_stop_id"] != row["to_stop_id"]:
                continue
            sid = row["from_stop_id"]
            if sid not in index:
                raise FormatError(path, line, f"unknown stop_id {sid!r}")
            try:
                seconds = int(row["min_transfer_time"] or 0)
            except ValueError:
                raise FormatError(path, line, "malformed min_transfer_time") from None
            if seconds < 0:
                raise FormatError(path, line, "negative min_transfer_time")
            buffers[index[sid]] = seconds

    return Timetable(tuple(stop_ids), tuple(buffers), tuple(coords), tuple(trips))


def write_gtfs(timetable: Timetable | Network, directory) -> None:
    """Write the GTFS subset in canonical order (inverse of :func:`parse_gtfs`)."""
    if isinstance(timetable, Network):
        timetable = timetable_of(timetable)
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "stops.txt", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["stop_id", "stop_lat", "stop_lon"])
        for sid, (lat, lon) in zip(timetable.stop_ids, timetable.coords):
            w.writerow([sid, repr(float(lat)), repr(float(lon))])
    with open(d / "trips.txt", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trip_id", "route_id"])
        for trip in timetable.trips:
            w.writerow([trip.trip_id, trip.route_id])
    with open(d / "stop_times.txt", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"])
        for trip in timetable.trips:
            for seq, e in enumerate(trip.events):
                w.writerow([trip.trip_id, format_gtfs_time(e.arr), format_gtfs_time(e.dep),
                            timetable.stop_ids[e.stop], seq])
    with open(d / "transfers.txt", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["from_stop_id", "to_stop_id", "min_transfer_time"])
        for sid, beta in zip(timetable.stop_ids, timetable.buffers):
            if beta:
                w.writerow([sid, sid, beta])


def parse_transfer_graph(path) -> TransferGraph:
    """Read ``p <vertex_count> <edge_count>`` followed by ``u v weight`` lines.

    Blank lines and lines starting with ``c`` or ``#`` are skipped.
    """
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int, int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            parts = raw.split()
            if not parts or parts[0] in ("c", "#") or parts[0].startswith("#"):
                continue
            if header is None:
                if parts[0] != "p" or len(parts) != 3:
                    raise FormatError(path, lineno, "expected header 'p <vertex_count> <edge_count>'")
                try:
                    header = (int(parts[1]), int(parts[2]))
                except ValueError:
                    raise FormatError(path, lineno, "non-integer header counts") from None
                if header[0] < 0 or header[1] < 0:
                    raise FormatError(path, lineno, "negative header counts")
                continue
            if len(parts) != 3:
                raise FormatError(path, lineno, "expected '<u> <v> <weight>'")
            try:
                u, v, w = (int(x) for x in parts)
            except ValueError:
                raise FormatError(path, lineno, "non-integer edge field") from None
            if not (0 <= u < header[0] and 0 <= v < header[0]):
                raise FormatError(path, lineno, f"vertex index out of range in edge ({u}, {v})")
            if w < 0:
                raise FormatError(path, lineno, f"negative weight {w}")
            edges.append((u, v, w))
    if header is None:
        raise FormatError(path, None, "empty transfer graph file")
    if len(edges) != header[1]:
        raise FormatError(path, None, f"header declares {header[1]} edges, found {len(edges)}")
    return TransferGraph.from_edges(header[0], edges)


def write_transfer_graph(graph: TransferGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"p {graph.vertex_count} {graph.edge_count}\n")
        for u, v, w in graph.edges():
            fh.write(f"{u} {v} {w}\n")


def parse_mapping(path) -> dict[str, int]:
    """CSV with ``stop_id,vertex`` columns."""
    mapping: dict[str, int] = {}
    for line, row in _read_csv(Path(path), ("stop_id", "vertex")):
        try:
            mapping[row["stop_id"]] = int(row["vertex"])
        except ValueError:
            raise FormatError(path, line, f"malformed vertex {row['vertex']!r}") from None
    return mapping


def network_to_dict(network: Network, **header) -> dict:
    return {
        "format": NETWORK_FORMAT,
        "version": NETWORK_VERSION,
        **header,
        "stops": [[s.stop_id, s.vertex, s.buffer, s.lat, s.lon] for s in network.stops],
        "trips": [
            [t.trip_id, t.route_id, [[e.stop, e.arr, e.dep] for e in t.events]] for t in network.trips
        ],
        "graph": {"vertex_count": network.graph.vertex_count, "edges": [list(e) for e in network.graph.edges()]},
    }


def network_from_dict(data: dict) -> Network:
    if data.get("format") != NETWORK_FORMAT:
        raise FormatError("<network>", None, f"not a {NETWORK_FORMAT} document")
    if data.get("version") != NETWORK_VERSION:
        raise FormatError("<network>", None, f"unsupported version {data.get('version')!r}")
    stops = data["stops"]
    timetable = Timetable(
        stop_ids=tuple(s[0] for s in stops),
        buffers=tuple(int(s[2]) for s in stops),
        coords=tuple((float(s[3]), float(s[4])) for s in stops),
        trips=tuple(
            Trip(tid, rid, tuple(StopEvent(*map(int, e)) for e in events)) for tid, rid, events in data["trips"]
        ),
    )
    graph = TransferGraph.from_edges(data["graph"]["vertex_count"], [tuple(e) for e in data["graph"]["edges"]])
    return assemble_network(timetable, graph, [int(s[1]) for s in stops])


def save_network(network: Network, path, **header) -> None:
    """Write the network as versioned JSON; ``header`` adds top-level flags."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_dict(network, **header), fh, separators=(",", ":"))


def load_network(path) -> tuple[Network, dict]:
    """Return the network and its header flags (everything but the payload)."""
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(path, exc.lineno, f"invalid JSON: {exc.msg}") from None
    header = {k: v for k, v in data.items() if k not in ("stops", "trips", "graph")}
    return network_from_dict(data), header
