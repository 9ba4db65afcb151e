import heapq
import random

import pytest

from conftest import hm
from tadroute.engines import (
    BUCKET_CH,
    CORE_CH,
    PLAIN,
    ClosureError,
    Labels,
    QueryRequest,
    closure_violations,
    csa_query,
    mr_query,
    prepare_csa,
    prepare_transfers,
    scan_trip,
    tad_query,
    td_query,
    trip_pruning_trace,
)
from tadroute.graphs import dijkstra
from tadroute.model import UNREACHABLE, StopEvent, Timetable, TransferGraph, Trip, assemble_network
from tadroute.netgen import GenParams, generate, random_params
from tadroute.oracle import oracle_arrivals, oracle_query
from tadroute.preprocessing import filter_network

A, B, C = 0, 1, 2
T0750 = hm("7:50")


def tad(net, s, t, tau, mode=PLAIN, **kw):
    return tad_query(net, QueryRequest(s, t, tau, mode, **kw), prepare_transfers(net, mode)).arrival


@pytest.mark.parametrize("mode", [PLAIN, CORE_CH, BUCKET_CH])
def test_motivating_tad(motivating, mode):
    assert tad(motivating, A, C, T0750, mode) == hm("10:30")


def test_motivating_other_engines(motivating):
    core = prepare_transfers(motivating, CORE_CH)
    res = mr_query(motivating, core, QueryRequest(A, C, T0750, CORE_CH))
    assert res.arrival == hm("10:30")
    assert csa_query(motivating, QueryRequest(A, C, T0750)).arrival == hm("10:30")


def test_filtering_fails_with_buffers(motivating):
    filtered = filter_network(motivating)
    got = td_query(filtered, QueryRequest(A, C, T0750)).arrival
    assert got == UNREACHABLE
    # TD-Dijkstra sees each surviving connection as a separate vehicle; the oracle agrees
    # that no journey exists on that connection-level network
    legs = [
        Trip(f"c{i}", "c", (StopEvent(u, d, d), StopEvent(v, a, a)))
        for i, ((u, v), b) in enumerate(sorted(filtered.boards.items()))
        for d, a in zip(b.departure, b.arrival_next)
    ]
    tt = Timetable(("A", "B", "C"), tuple(s.buffer for s in motivating.stops), ((0.0, 0.0),) * 3, tuple(legs))
    assert oracle_query(assemble_network(tt, motivating.graph), A, C, T0750) == UNREACHABLE
    assert got > tad(motivating, A, C, T0750)


def test_td_requires_filtered_network(motivating):
    with pytest.raises(ValueError, match="filter_network"):
        td_query(motivating, QueryRequest(A, C, T0750))


def test_source_equals_target(motivating):
    for mode in (PLAIN, CORE_CH, BUCKET_CH):
        assert tad(motivating, B, B, 1234, mode) == 1234
    assert csa_query(motivating, QueryRequest(B, B, 1234)).arrival == 1234
    assert mr_query(motivating, prepare_transfers(motivating, CORE_CH), QueryRequest(B, B, 1234)).arrival == 1234


def test_scan_trip_updates_before_settling(motivating):
    labels = Labels(3)
    queue = []
    labels.improve(A, T0750)
    assert scan_trip(motivating, 0, 0, labels, queue) == 2
    assert labels[B] == hm("9:40") and labels[C] == hm("10:30")
    assert sorted(queue) == [(hm("9:40"), B), (hm("10:30"), C)]


def test_scan_trip_edges(motivating):
    labels, queue = Labels(3), []
    assert scan_trip(motivating, 0, 2, labels, queue) == 0
    labels.improve(B, 0)
    labels.improve(C, 0)
    assert scan_trip(motivating, 0, 0, labels, queue) == 0 and queue == []


def test_pruning_trace_worked_example(pruning_net):
    trace = trip_pruning_trace(pruning_net, (0, 1), hm("8:00"))
    assert trace == [("T1", "scanned"), ("T2", "scanned"), ("T3", "skipped"), ("T4", "skipped")]
    board = pruning_net.boards[(0, 1)]
    assert [a for a in board.arrival_next] == [hm("9:30"), hm("9:00"), hm("10:00"), hm("9:30")]
    assert list(board.suffix_min_arrival) == [hm("9:00"), hm("9:00"), hm("9:30"), hm("9:30")]


def test_pruning_trace_large_buffer(pruning_net):
    trace = trip_pruning_trace(pruning_net, (0, 1), hm("8:00"), dest_buffer=3600)
    assert [d for _, d in trace] == ["scanned"] * 4


def test_pruning_trace_single_trip(motivating):
    assert trip_pruning_trace(motivating, (B, C), 0) == [("T1", "scanned")]


def test_pre_decrement_equivalence():
    rng = random.Random(2)
    for _ in range(200):
        net = generate(random_params(rng.randrange(10**6)))
        for board in net.boards.values():
            beta = net.vertex_buffer[board.u]
            arrival = rng.randint(0, 11 * 3600)
            by_adjusted = {j for j in range(len(board)) if board.boarding_adjusted_departure[j] >= arrival}
            by_sum = {j for j in range(len(board)) if board.departure[j] >= arrival + beta}
            assert by_adjusted == by_sum
            assert by_adjusted == set(range(board.first_boardable(arrival), len(board)))


class RecordingLabels(Labels):
    def improve(self, v, t):
        before = self[v]
        assert t <= before, f"label of {v} rose from {before} to {t}"
        return super().improve(v, t)


def test_labels_never_increase():
    for seed in range(30):
        net = generate(random_params(seed))
        rng = random.Random(seed)
        for _ in range(5):
            s, t = rng.randrange(net.vertex_count), rng.randrange(net.vertex_count)
            tad_query(net, QueryRequest(s, t, rng.randint(6 * 3600, 9 * 3600)), labels=RecordingLabels(net.vertex_count))


def test_labels_reuse_across_queries():
    net = generate(GenParams(seed=4))
    labels = Labels(net.vertex_count)
    first = tad_query(net, QueryRequest(0, 5, 7 * 3600), labels=labels).arrival
    tad_query(net, QueryRequest(3, 1, 6 * 3600), labels=labels)
    assert tad_query(net, QueryRequest(0, 5, 7 * 3600), labels=labels).arrival == first


def test_one_to_all_matches_oracle():
    for seed in range(20):
        net = generate(random_params(seed))
        res = tad_query(net, QueryRequest(0, None, 7 * 3600))
        ref = oracle_arrivals(net, 0, 7 * 3600)
        assert {v: ref[v] for v in range(net.vertex_count) if ref[v] != UNREACHABLE} == res.arrivals


def test_no_departures_and_no_walk():
    tt = Timetable(("A", "B"), (0, 0), ((0.0, 0.0),) * 2,
                   (Trip("T", "R", (StopEvent(0, 100, 100), StopEvent(1, 200, 200))),))
    net = assemble_network(tt, TransferGraph.from_edges(3, [(1, 2, 10)]))
    assert td_query(filter_network(net), QueryRequest(0, 1, 500)).arrival == UNREACHABLE
    assert tad(net, 0, 2, 0) == 210
    assert tad(net, 0, 2, 101) == UNREACHABLE


def test_walk_only_and_empty_timetable():
    graph = TransferGraph.from_edges(4, [(0, 3, 30), (3, 1, 40), (0, 1, 70)])
    net = assemble_network(Timetable(("A", "B"), (0, 0), ((0.0, 0.0),) * 2, ()), graph)
    core = prepare_transfers(net, CORE_CH)
    assert csa_query(net, QueryRequest(0, 1, 1000)).arrival == 1070
    assert mr_query(net, core, QueryRequest(0, 1, 1000)).arrival == 1070
    assert mr_query(net, core, QueryRequest(3, 2, 1000)).arrival == UNREACHABLE
    assert tad(net, 0, 1, 1000, BUCKET_CH) == 1070


def test_source_buffer_is_paid():
    # boarding at the source also waits out the buffer
    tt = Timetable(("A", "B"), (300, 0), ((0.0, 0.0),) * 2,
                   (Trip("T", "R", (StopEvent(0, 1000, 1000), StopEvent(1, 1500, 1500))),))
    net = assemble_network(tt, TransferGraph.from_edges(2, []))
    assert tad(net, 0, 1, 700) == 1500
    assert tad(net, 0, 1, 701) == UNREACHABLE
    assert oracle_query(net, 0, 1, 701) == UNREACHABLE


def test_csa_rejects_open_footpaths():
    graph = TransferGraph.from_edges(3, [(0, 1, 10), (1, 2, 10)])
    tt = Timetable(("A", "B", "C"), (0, 0, 0), ((0.0, 0.0),) * 3, ())
    net = assemble_network(tt, graph)
    assert closure_violations(net)
    with pytest.raises(ClosureError):
        prepare_csa(net)


def test_request_validation(motivating):
    with pytest.raises(ValueError, match="source"):
        tad_query(motivating, QueryRequest(9, 0, 0))
    with pytest.raises(ValueError, match="departure"):
        tad_query(motivating, QueryRequest(0, 1, -5))
    with pytest.raises(ValueError, match="core-ch"):
        tad_query(motivating, QueryRequest(0, 1, 0, CORE_CH))
    with pytest.raises(ValueError, match="unknown transfer mode"):
        prepare_transfers(motivating, "fast")


def test_stats_are_filled(motivating):
    res = tad_query(motivating, QueryRequest(A, C, T0750))
    assert res.stats.settled >= 1 and res.stats.scanned_trips >= 1
    assert res.stats.wall_time_us > 0


def _grid(count, **overrides):
    return [random_params(seed, **overrides) for seed in range(count)]


@pytest.mark.parametrize("params", _grid(40, closure_mode=True), ids=lambda p: f"seed{p.seed}")
def test_engines_match_oracle(params):
    net = generate(params)
    core = prepare_transfers(net, CORE_CH)
    bucket = prepare_transfers(net, BUCKET_CH)
    csa = prepare_csa(net)
    rng = random.Random(params.seed)
    for _ in range(8):
        s, t = rng.randrange(net.vertex_count), rng.randrange(net.vertex_count)
        tau = rng.randint(5 * 3600, 10 * 3600)
        expected = oracle_query(net, s, t, tau)
        assert tad_query(net, QueryRequest(s, t, tau)).arrival == expected
        assert tad_query(net, QueryRequest(s, t, tau, pruning=False)).arrival == expected
        assert tad_query(net, QueryRequest(s, t, tau, CORE_CH), core).arrival == expected
        assert tad_query(net, QueryRequest(s, t, tau, BUCKET_CH), bucket).arrival == expected
        assert mr_query(net, core, QueryRequest(s, t, tau)).arrival == expected
        assert csa_query(net, QueryRequest(s, t, tau), csa).arrival == expected


@pytest.mark.parametrize("params", _grid(20, buffer_rate=0.0), ids=lambda p: f"seed{p.seed}")
def test_td_equals_tad_without_buffers(params):
    net = generate(params)
    assert not net.has_buffers
    filtered = filter_network(net)
    rng = random.Random(params.seed)
    for mode in (PLAIN, CORE_CH, BUCKET_CH):
        data = prepare_transfers(net, mode)
        for _ in range(5):
            s, t = rng.randrange(net.vertex_count), rng.randrange(net.vertex_count)
            tau = rng.randint(5 * 3600, 10 * 3600)
            assert td_query(filtered, QueryRequest(s, t, tau, mode), data).arrival == \
                tad_query(net, QueryRequest(s, t, tau, mode), data).arrival


def test_mr_round_cap_not_hit(caplog):
    for seed in range(30):
        net = generate(random_params(seed))
        core = prepare_transfers(net, CORE_CH)
        res = mr_query(net, core, QueryRequest(0, net.vertex_count - 1, 6 * 3600))
        assert res.stats.rounds < 16
    assert "round cap" not in caplog.text


def test_mr_round_cap_warns(caplog):
    net = generate(GenParams(seed=2, trip_count=30))
    core = prepare_transfers(net, CORE_CH)
    full = mr_query(net, core, QueryRequest(0, 5, 6 * 3600))
    if full.stats.rounds > 1:
        mr_query(net, core, QueryRequest(0, 5, 6 * 3600), max_rounds=1)
        assert "round cap" in caplog.text


def test_tad_plain_equals_dijkstra_without_trips():
    net = generate(GenParams(seed=9, trip_count=0))
    for s in range(0, net.vertex_count, 3):
        ref = dijkstra(net.graph.adj, s)
        res = tad_query(net, QueryRequest(s, None, 100))
        assert res.arrivals == {v: 100 + d for v, d in enumerate(ref) if d != UNREACHABLE}
