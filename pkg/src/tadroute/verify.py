"""Property battery over seeded random networks, with shrinking of failing cases.

Each grid entry is a :class:`GenParams`. For every network the battery
checks oracle equivalence (TAD, MR, and CSA when footpaths are closed),
pruning invariance, transfer-mode invariance, zero-buffer collapse of
TD-Dijkstra, domination filtering and the CH family against Dijkstra. The
worked-example fixtures are checked once per run.
"""
from __future__ import annotations

import logging
import random
from contextlib import contextmanager
from dataclasses import dataclass, field, replace

from .engines import (
    BUCKET_CH,
    CORE_CH,
    QueryRequest,
    csa_query,
    mr_query,
    prepare_csa,
    prepare_transfers,
    tad_query,
    td_query,
    trip_pruning_trace,
)
from .engines import dijkstra as _tad_module
from .graphs import dijkstra
from .model import UNREACHABLE, Network, validate_network
from .netgen import GenParams, generate, paper_fixture, random_params
from .oracle import dominated_pairwise, oracle_query
from .preprocessing import (
    bucket_one_to_many,
    build_buckets,
    build_ch,
    ch_query,
    core_distances,
    filter_dominated,
    filter_network,
)

log = logging.getLogger(__name__)

MOTIVATING_ARRIVAL = 10 * 3600 + 30 * 60


@dataclass
class Failure:
    check: str
    params: GenParams | None
    detail: str

    def describe(self) -> str:
        where = f"seed {self.params.seed} ({self.params})" if self.params else "fixture"
        return f"[{self.check}] {where}: {self.detail}"


@dataclass
class VerifyReport:
    networks: int = 0
    queries: int = 0
    failures: list[Failure] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def default_grid(count: int = 50, seed: int = 0) -> list[GenParams]:
    """Small varied networks; every other one has closed stop footpaths."""
    return [random_params(seed + i, closure_mode=(i % 2 == 0)) for i in range(count)]


def sample_network_queries(network: Network, params: GenParams, count: int) -> list[tuple[int, int, int]]:
    rng = random.Random(params.seed * 31 + 7)
    n = network.vertex_count
    lo, hi = params.horizon
    return [(rng.randrange(n), rng.randrange(n), rng.randint(max(0, lo - 3600), hi)) for _ in range(count)]


def check_fixtures() -> list[Failure]:
    out = []
    net = paper_fixture("motivating")
    tau = 7 * 3600 + 50 * 60
    core = prepare_transfers(net, CORE_CH)
    got = {
        "tad": tad_query(net, QueryRequest(0, 2, tau)).arrival,
        "csa": csa_query(net, QueryRequest(0, 2, tau)).arrival,
        "mr": mr_query(net, core, QueryRequest(0, 2, tau, CORE_CH)).arrival,
        "oracle": oracle_query(net, 0, 2, tau),
    }
    for name, value in got.items():
        if value != MOTIVATING_ARRIVAL:
            out.append(Failure("fixture:motivating", None, f"{name} returned {value}, expected {MOTIVATING_ARRIVAL}"))
    td = td_query(filter_network(net), QueryRequest(0, 2, tau)).arrival
    if td != UNREACHABLE:
        out.append(Failure("fixture:motivating", None, f"td on the filtered network returned {td}, expected UNREACHABLE"))

    prune = paper_fixture("pruning")
    trace = trip_pruning_trace(prune, (0, 1), 8 * 3600)
    scanned = [trip for trip, decision in trace if decision == "scanned"]
    if scanned != ["T1", "T2"]:
        out.append(Failure("fixture:pruning", None, f"scanned {scanned}, expected ['T1', 'T2']"))
    return out


def _ch_failure(network: Network, rng: random.Random, pairs: int) -> str | None:
    graph = network.graph
    n = graph.vertex_count
    ch = build_ch(graph)
    stops = network.stop_vertices
    buckets = build_buckets(ch, stops)
    core = prepare_transfers(network, CORE_CH)
    for _ in range(max(1, pairs // 10)):
        s = rng.randrange(n)
        ref = dijkstra(graph.adj, s)
        for t in (rng.randrange(n) for _ in range(10)):
            if ch_query(ch, s, t) != ref[t]:
                return f"ch_query({s},{t}) = {ch_query(ch, s, t)}, Dijkstra {ref[t]}"
        got = bucket_one_to_many(ch, buckets, s)
        for t in stops:
            if got[t] != ref[t]:
                return f"bucket_one_to_many({s})[{t}] = {got[t]}, Dijkstra {ref[t]}"
    for s in rng.sample(stops, min(5, len(stops))):
        ref = dijkstra(graph.adj, s)
        got = core_distances(core, s)
        for t in stops:
            if got[t] != ref[t]:
                return f"Core-CH {s}->{t} = {got[t]}, Dijkstra {ref[t]}"
    return None


def check_params(params: GenParams, queries: int = 10, checks: frozenset | None = None) -> list[Failure]:
    """Run the battery on one generated network; returns at most one failure per check."""
    def on(name: str) -> bool:
        return checks is None or name in checks

    failures: list[Failure] = []
    network = generate(params)
    problems = validate_network(network)
    if problems:
        return [Failure("validate", params, problems[0])]
    qs = sample_network_queries(network, params, queries)
    core = prepare_transfers(network, CORE_CH)
    bucket = prepare_transfers(network, BUCKET_CH)
    csa = prepare_csa(network, check_closure=False) if params.closure_mode else None
    seen: set[str] = set()

    def fail(check: str, detail: str) -> None:
        if check not in seen:
            seen.add(check)
            failures.append(Failure(check, params, detail))

    for s, t, tau in qs:
        q = f"{s}->{t} @ {tau}"
        tad = tad_query(network, QueryRequest(s, t, tau)).arrival
        if on("oracle"):
            expected = oracle_query(network, s, t, tau)
            mr = mr_query(network, core, QueryRequest(s, t, tau, CORE_CH)).arrival
            if tad != expected or mr != expected:
                fail("oracle", f"{q}: tad {tad}, mr {mr}, oracle {expected}")
            if csa is not None:
                got = csa_query(network, QueryRequest(s, t, tau), csa).arrival
                if got != expected:
                    fail("oracle", f"{q}: csa {got}, oracle {expected}")
        if on("pruning"):
            off = tad_query(network, QueryRequest(s, t, tau, pruning=False)).arrival
            if off != tad:
                fail("pruning", f"{q}: pruning on {tad}, off {off}")
        if on("transfer-modes"):
            c = tad_query(network, QueryRequest(s, t, tau, CORE_CH), core).arrival
            b = tad_query(network, QueryRequest(s, t, tau, BUCKET_CH), bucket).arrival
            if not tad == c == b:
                fail("transfer-modes", f"{q}: plain {tad}, core-ch {c}, bucket-ch {b}")

    if on("zero-buffer"):
        flat = generate(replace(params, buffer_rate=0.0))
        flat_filtered = filter_network(flat)
        for s, t, tau in qs:
            a = tad_query(flat, QueryRequest(s, t, tau)).arrival
            b = td_query(flat_filtered, QueryRequest(s, t, tau)).arrival
            if a != b:
                fail("zero-buffer", f"{s}->{t} @ {tau}: tad {a}, td {b}")
                break

    if on("filtering"):
        for key, board in sorted(network.boards.items()):
            conns = board.connections()
            got = filter_dominated(conns)
            if got != dominated_pairwise(conns):
                fail("filtering", f"board {key}: filter disagrees with the pairwise reference")
                break
            if any(a.dep >= b.dep or a.arr >= b.arr for a, b in zip(got, got[1:])):
                fail("filtering", f"board {key}: output not FIFO")
                break
            if filter_dominated(got) != got:
                fail("filtering", f"board {key}: filter not idempotent")
                break

    if on("ch"):
        detail = _ch_failure(network, random.Random(params.seed), 50)
        if detail:
            fail("ch", detail)
    return failures


_SHRINK_FIELDS = ("trip_count", "extra_vertex_count", "stop_count")


def shrink(params: GenParams, still_fails, budget: int = 60) -> GenParams:
    """Greedily lower counts while ``still_fails(params)`` stays true."""
    current = params
    progress = True
    while progress and budget > 0:
        progress = False
        for name in _SHRINK_FIELDS:
            value = getattr(current, name)
            for smaller in (value // 2, value - 1):
                if smaller < 0 or smaller == value or budget <= 0:
                    continue
                changes = {name: smaller}
                if name == "stop_count":
                    lo, hi = current.trip_length
                    changes["trip_length"] = (min(lo, smaller), min(hi, smaller))
                try:
                    candidate = replace(current, **changes)
                except ValueError:
                    continue
                budget -= 1
                if still_fails(candidate):
                    current = candidate
                    progress = True
                    break
    return current


def run_battery(grid: list[GenParams], queries: int = 10, minimize: bool = True) -> VerifyReport:
    report = VerifyReport()
    report.failures.extend(check_fixtures())
    if not grid:
        msg = "empty parameter grid: no random networks checked"
        log.warning(msg)
        report.warnings.append(msg)
        return report
    for params in grid:
        report.networks += 1
        report.queries += queries
        found = check_params(params, queries)
        if found and minimize:
            first = found[0]
            small = shrink(params, lambda p: bool(check_params(p, queries, frozenset({first.check}))))
            if small != params:
                again = check_params(small, queries, frozenset({first.check}))
                if again:
                    found[0] = Failure(first.check, small, again[0].detail + f" (shrunk from seed {params.seed})")
        report.failures.extend(found)
    return report


@contextmanager
def injected_pruning_fault():
    """Test-only mutation: compare against the next suffix minimum, skipping one trip too early."""
    original = _tad_module.should_prune

    def faulty(suffix, j, best, dest_buffer):
        k = j + 1 if j + 1 < len(suffix) else j
        return suffix[k] > best + dest_buffer

    _tad_module.should_prune = faulty
    try:
        yield
    finally:
        _tad_module.should_prune = original
