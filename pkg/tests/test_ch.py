import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tadroute.graphs import dijkstra
from tadroute.model import UNREACHABLE, TransferGraph
from tadroute.netgen import GenParams, generate
from tadroute.oracle import _all_pairs_walk
from tadroute.preprocessing import (
    bucket_one_to_many,
    build_buckets,
    build_ch,
    build_core_ch,
    ch_path,
    ch_query,
    core_distances,
    core_query,
)


def random_graph(seed, n=None):
    rng = random.Random(seed)
    n = n or rng.randint(1, 25)
    edges = [(rng.randrange(n), rng.randrange(n), rng.randint(0, 50)) for _ in range(rng.randint(0, 4 * n))]
    return TransferGraph.from_edges(n, edges)


def geometric(seed):
    return generate(GenParams(seed=seed, stop_count=10, extra_vertex_count=15, trip_count=0)).graph


def test_path_graph_shortcut():
    g = TransferGraph.from_edges(3, [(0, 1, 10), (1, 0, 10), (1, 2, 20), (2, 1, 20)])
    ch = build_ch(g, order=[1, 0, 2])
    assert ch.middle == {(0, 2): 1, (2, 0): 1}
    assert (2, 30) in ch.up[0] and (2, 30) in ch.down[0]
    assert ch_query(ch, 0, 2) == 30 and ch_query(ch, 2, 0) == 30
    with pytest.raises(ValueError):
        build_ch(g, order=[0, 1])


def test_trivial_queries():
    g = TransferGraph.from_edges(3, [(0, 1, 4)])
    ch = build_ch(g)
    assert ch_query(ch, 2, 2) == 0
    assert ch_query(ch, 0, 2) == UNREACHABLE
    assert ch_query(ch, 1, 0) == UNREACHABLE


def test_up_and_down_respect_rank():
    ch = build_ch(geometric(3))
    for v in range(ch.vertex_count):
        assert all(ch.rank[x] > ch.rank[v] for x, _ in ch.up[v])
        assert all(ch.rank[x] > ch.rank[v] for x, _ in ch.down[v])


def test_dijkstra_matches_floyd_warshall():
    from tadroute.netgen import paper_fixture
    from dataclasses import replace

    for seed in range(10):
        g = random_graph(seed)
        net = replace(paper_fixture("motivating"), graph=g)
        fw = _all_pairs_walk(net)
        for s in range(g.vertex_count):
            assert dijkstra(g.adj, s) == fw[s]


@pytest.mark.parametrize("seed", range(20))
def test_ch_equals_dijkstra(seed):
    g = random_graph(seed) if seed % 2 else geometric(seed)
    ch = build_ch(g)
    for s in range(g.vertex_count):
        ref = dijkstra(g.adj, s)
        assert [ch_query(ch, s, t) for t in range(g.vertex_count)] == ref


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_ch_path_unpacks_to_distance(seed):
    g = random_graph(seed)
    ch = build_ch(g)
    weight = {}
    for u, v, w in g.edges():
        weight[(u, v)] = min(w, weight.get((u, v), w))
    rng = random.Random(seed)
    for _ in range(5):
        s, t = rng.randrange(g.vertex_count), rng.randrange(g.vertex_count)
        path = ch_path(ch, s, t)
        d = ch_query(ch, s, t)
        if d == UNREACHABLE:
            assert path is None
            continue
        assert path[0] == s and path[-1] == t
        assert sum(weight[(a, b)] for a, b in zip(path, path[1:])) == d


def test_core_all_protected_is_original():
    g = geometric(4)
    core = build_core_ch(g, range(g.vertex_count))
    assert core.order == []
    assert sorted(core.core_graph[0]) == sorted({v: w for v, w in g.adj[0]}.items())


def test_core_zero_degree_limit_stops_immediately():
    g = geometric(5)
    core = build_core_ch(g, range(3), max_avg_core_degree=0)
    assert core.order == []
    assert all(core.is_core)


@pytest.mark.parametrize("seed", range(15))
def test_core_stop_distances(seed):
    g = random_graph(seed, n=20) if seed % 2 else geometric(seed)
    stops = random.Random(seed).sample(range(g.vertex_count), min(6, g.vertex_count))
    core = build_core_ch(g, stops)
    assert all(core.is_core[s] for s in stops)
    for s in stops:
        ref = dijkstra(g.adj, s)
        got = core_distances(core, s)
        assert [got[t] for t in stops] == [ref[t] for t in stops]
    for s in range(g.vertex_count):
        ref = dijkstra(g.adj, s)
        assert [core_query(core, s, t) for t in range(g.vertex_count)] == ref


def test_bucket_examples():
    g = TransferGraph.from_edges(1, [])
    ch = build_ch(g)
    b = build_buckets(ch, [0])
    assert b.entries[0] == [(0, 0)]
    assert bucket_one_to_many(ch, b, 0) == {0: 0}

    g = TransferGraph.from_edges(3, [(0, 1, 5)])
    ch = build_ch(g)
    b = build_buckets(ch, [1, 2])
    got = bucket_one_to_many(ch, b, 0)
    assert got[1] == 5 and got[2] == UNREACHABLE
    assert bucket_one_to_many(ch, b, 2)[2] == 0


@pytest.mark.parametrize("seed", range(15))
def test_buckets_equal_repeated_dijkstra(seed):
    g = random_graph(seed, n=22) if seed % 2 else geometric(seed)
    targets = random.Random(seed).sample(range(g.vertex_count), 8)
    ch = build_ch(g)
    b = build_buckets(ch, targets)
    for s in range(g.vertex_count):
        ref = dijkstra(g.adj, s)
        assert bucket_one_to_many(ch, b, s) == {t: ref[t] for t in targets}


def test_degree_limited_full_ch_returns_core():
    g = geometric(8)
    data = build_ch(g, avg_degree_limit=0)
    assert hasattr(data, "core_graph")


def test_dump_lists_order_and_shortcuts():
    text = build_ch(TransferGraph.from_edges(3, [(0, 1, 1), (1, 2, 1)])).dump()
    assert "order" in text.lower()
