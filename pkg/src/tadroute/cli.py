"""Command line: ``tadroute {gen,build,query,bench,verify}``."""
from __future__ import annotations

import argparse
import logging
import pickle
import random
import sys
import time
from pathlib import Path

from . import __version__
from .bench import BenchConfig, run_bench, write_csv
from .engines import BUCKET_CH, CORE_CH, TRANSFER_MODES, ClosureError, has_footpath_closure, prepare_transfers
from .estimators import ENGINES, UnsoundConfigurationError, make_router
from .formats import (
    FormatError,
    load_network,
    parse_gtfs,
    parse_mapping,
    parse_transfer_graph,
    save_network,
    write_gtfs,
    write_transfer_graph,
)
from .graphs import dijkstra
from .model import ModelError, Network, assemble_network, format_clock, parse_time, validate_network
from .netgen import GenParams, generate, paper_fixture
from .preprocessing import DEFAULT_MAX_AVG_CORE_DEGREE, core_distances
from .verify import default_grid, injected_pruning_fault, run_battery

log = logging.getLogger("tadroute")


class CLIError(Exception):
    pass


def _artifact_path(network_path: Path, name: str) -> Path:
    return network_path.with_name(f"{network_path.stem}.{name}.pkl")


def _timed(label: str, fn, *args, **kwargs):
    start = time.perf_counter()
    value = fn(*args, **kwargs)
    print(f"{label:<24}{(time.perf_counter() - start) * 1000:10.1f} ms")
    return value


# gen


def cmd_gen(args) -> int:
    if args.fixture:
        network = paper_fixture(args.fixture)
    else:
        params = GenParams(
            seed=args.seed,
            stop_count=args.stops,
            extra_vertex_count=args.extra_vertices,
            trip_count=args.trips,
            non_fifo_rate=args.non_fifo_rate,
            buffer_rate=args.buffer_rate,
            closure_mode=args.closure,
        )
        network = generate(params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_gtfs(network, out)
    write_transfer_graph(network.graph, out / "graph.txt")
    print(f"wrote {len(network.stops)} stops, {len(network.trips)} trips, "
          f"{network.vertex_count} vertices to {out}")
    return 0


# build


def cmd_build(args) -> int:
    out = Path(args.out)
    timetable = _timed("parse GTFS", parse_gtfs, args.gtfs_dir)
    graph = _timed("parse transfer graph", parse_transfer_graph, args.graph)
    mapping = parse_mapping(args.mapping) if args.mapping else None
    try:
        network = _timed("assemble network", assemble_network, timetable, graph, mapping)
    except ModelError as exc:
        raise CLIError(str(exc)) from None
    problems = validate_network(network)
    if problems:
        for p in problems:
            print(f"invalid: {p}", file=sys.stderr)
        return 1
    print("validation: ok")
    closure = _timed("footpath closure check", has_footpath_closure, network)
    artifacts = {}
    if args.core_ch:
        core = _timed("Core-CH construction", prepare_transfers, network, CORE_CH, args.max_avg_core_degree)
        _spot_check_core(network, core)
        artifacts[CORE_CH] = _dump(out, CORE_CH, core)
    if args.bucket_ch:
        index = _timed("CH + buckets", prepare_transfers, network, BUCKET_CH)
        artifacts[BUCKET_CH] = _dump(out, BUCKET_CH, index)
    save_network(network, out, footpath_closure=closure, buffered=network.has_buffers,
                 max_avg_core_degree=args.max_avg_core_degree, artifacts=artifacts)
    print(f"wrote {out} (footpath closure: {'yes' if closure else 'no'}; "
          f"artifacts: {', '.join(artifacts) or 'none'})")
    return 0


def _dump(out: Path, name: str, data) -> str:
    path = _artifact_path(out, name)
    with open(path, "wb") as fh:
        pickle.dump(data, fh, protocol=pickle.HIGHEST_PROTOCOL)
    return path.name


def _spot_check_core(network: Network, core, samples: int = 5) -> None:
    rng = random.Random(0)
    stops = network.stop_vertices
    pairs = 0
    for s in rng.sample(stops, min(samples, len(stops))):
        ref = dijkstra(network.graph.adj, s)
        got = core_distances(core, s)
        bad = [t for t in stops if got[t] != ref[t]]
        if bad:
            raise CLIError(f"Core-CH stop-to-stop distance {s}->{bad[0]} disagrees with Dijkstra")
        pairs += len(stops)
    print(f"Core-CH spot check: {pairs} stop pairs match Dijkstra")


def _load(path: str) -> tuple[Network, dict, dict]:
    network, header = load_network(path)
    artifacts = {}
    for mode, name in (header.get("artifacts") or {}).items():
        with open(Path(path).with_name(name), "rb") as fh:
            artifacts[mode] = pickle.load(fh)
    return network, header, artifacts


def _router(engine: str, mode: str, network: Network, header: dict, artifacts: dict, allow_unsound: bool,
            pruning: bool = True):
    if engine == "csa" and not header.get("footpath_closure", False):
        raise CLIError("csa needs transitively closed stop footpaths; this network was built without them")
    params = {"validate": False}
    if engine == "td":
        params["allow_unsound"] = allow_unsound
    if engine == "tad":
        params["pruning"] = pruning
    if engine in ("tad", "td", "mr"):
        params["max_avg_core_degree"] = header.get("max_avg_core_degree", DEFAULT_MAX_AVG_CORE_DEGREE)
    try:
        router = make_router(engine, mode, **params)
        return router.fit(network, transfer_data=artifacts.get(mode) if engine != "csa" else None)
    except (UnsoundConfigurationError, ClosureError, ValueError) as exc:
        raise CLIError(str(exc)) from None


# query


def _vertex(network: Network, text: str) -> int:
    if text in network.stop_index:
        return network.stops[network.stop_index[text]].vertex
    try:
        v = int(text)
    except ValueError:
        raise CLIError(f"unknown stop id {text!r}") from None
    if not 0 <= v < network.vertex_count:
        raise CLIError(f"vertex {v} outside 0..{network.vertex_count - 1}")
    return v


def _clock(text: str) -> int:
    if text.isdigit():
        return int(text)
    try:
        return parse_time(text)
    except ValueError as exc:
        raise CLIError(str(exc)) from None


def cmd_query(args) -> int:
    network, header, artifacts = _load(args.network)
    mode = args.mode or ("core-ch" if args.engine == "mr" else "plain")
    router = _router(args.engine, mode, network, header, artifacts, args.allow_unsound, not args.no_pruning)
    result = router.query(_vertex(network, args.source), _vertex(network, args.target), _clock(args.time))
    print(format_clock(result.arrival))
    st = result.stats
    print(f"settled={st.settled} scanned_trips={st.scanned_trips} relaxed_edges={st.relaxed_edges} "
          f"rounds={st.rounds} time_us={st.wall_time_us:.0f}")
    return 0


# bench


def cmd_bench(args) -> int:
    network, header, artifacts = _load(args.network)
    engines = tuple(args.engines.split(","))
    if "csa" in engines and not header.get("footpath_closure", False):
        raise CLIError("csa needs transitively closed stop footpaths; this network was built without them")
    try:
        config = BenchConfig(
            query_count=args.queries,
            seed=args.seed,
            engines=engines,
            modes=tuple(args.modes.split(",")),
            warmup=args.warmup,
            output=args.output,
            allow_unsound=args.allow_unsound,
        )
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    for mode in config.modes:
        if mode not in TRANSFER_MODES:
            raise CLIError(f"unknown transfer mode {mode!r}")
    try:
        rows = run_bench(network, config, artifacts)
    except (UnsoundConfigurationError, ClosureError) as exc:
        raise CLIError(str(exc)) from None
    if config.output:
        with open(config.output, "w", newline="", encoding="utf-8") as fh:
            write_csv(rows, fh)
        print(f"wrote {config.output}")
    else:
        sys.stdout.write(write_csv(rows))
    bad = [r for r in rows if r.mismatches]
    for r in bad:
        print(f"warning: {r.engine} ({r.mode}) disagrees with tad (plain) on {r.mismatches} queries", file=sys.stderr)
    return 1 if bad and args.strict else 0


# verify


def cmd_verify(args) -> int:
    grid = default_grid(args.networks, args.seed)
    start = time.perf_counter()
    if args.inject_fault:
        with injected_pruning_fault():
            report = run_battery(grid, args.queries)
    else:
        report = run_battery(grid, args.queries)
    for w in report.warnings:
        print(f"warning: {w}")
    for f in report.failures:
        print(f"FAIL {f.describe()}")
    status = "PASS" if report.passed else "FAIL"
    print(f"{status}: {report.networks} networks, {report.queries} queries, "
          f"{len(report.failures)} failures in {time.perf_counter() - start:.1f} s")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tadroute", description="Earliest-arrival transit routing with buffer times.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random network (or a worked-example fixture) as GTFS + graph")
    p.add_argument("out", help="output directory")
    p.add_argument("--fixture", choices=("motivating", "pruning", "nonfifo_intro"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stops", type=int, default=12)
    p.add_argument("--extra-vertices", type=int, default=8)
    p.add_argument("--trips", type=int, default=20)
    p.add_argument("--non-fifo-rate", type=float, default=0.3)
    p.add_argument("--buffer-rate", type=float, default=0.5)
    p.add_argument("--closure", action="store_true", help="close stop footpaths transitively (needed by csa)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="parse, validate and preprocess a network")
    p.add_argument("gtfs_dir")
    p.add_argument("graph", help="transfer graph text file")
    p.add_argument("-o", "--out", required=True, help="network JSON to write")
    p.add_argument("--mapping", help="CSV of stop_id,vertex (identity when omitted)")
    p.add_argument("--core-ch", action="store_true", help="also build Core-CH data")
    p.add_argument("--bucket-ch", action="store_true", help="also build CH + stop buckets")
    p.add_argument("--max-avg-core-degree", type=float, default=DEFAULT_MAX_AVG_CORE_DEGREE)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer one earliest-arrival query")
    p.add_argument("network")
    p.add_argument("source", help="stop id or vertex index")
    p.add_argument("target", help="stop id or vertex index")
    p.add_argument("time", help="departure as H:MM[:SS] or seconds")
    p.add_argument("--engine", choices=sorted(ENGINES), default="tad")
    p.add_argument("--mode", choices=TRANSFER_MODES)
    p.add_argument("--no-pruning", action="store_true")
    p.add_argument("--allow-unsound", action="store_true", help="let td run on a network with buffer times")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="time engines on random queries and write CSV")
    p.add_argument("network")
    p.add_argument("--queries", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engines", default="tad")
    p.add_argument("--modes", default="plain")
    p.add_argument("--warmup", type=int, default=10)
    p.add_argument("-o", "--output")
    p.add_argument("--strict", action="store_true", help="exit 1 when any engine disagrees with tad (plain)")
    p.add_argument("--allow-unsound", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the property battery on seeded random networks")
    p.add_argument("--networks", type=int, default=50)
    p.add_argument("--queries", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (FormatError, CLIError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
