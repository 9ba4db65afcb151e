from dataclasses import replace

from tadroute.netgen import GenParams
from tadroute.verify import (
    check_fixtures,
    check_params,
    default_grid,
    injected_pruning_fault,
    run_battery,
    shrink,
)
from tadroute.engines import dijkstra as tad_module


def test_fixtures_pass():
    assert check_fixtures() == []


def test_default_grid_passes():
    report = run_battery(default_grid(15), queries=6)
    assert report.passed, [f.describe() for f in report.failures]
    assert report.networks == 15 and report.queries == 90


def test_fault_is_caught_and_restored():
    original = tad_module.should_prune
    with injected_pruning_fault():
        # the worked example happens to give the same trace under this mutation
        assert check_fixtures() == []
        report = run_battery(default_grid(10), queries=10)
    assert tad_module.should_prune is original
    assert not report.passed
    assert {"oracle", "pruning"} <= {f.check for f in report.failures}


def test_shrink_reduces_counts():
    start = GenParams(seed=1, stop_count=12, extra_vertex_count=8, trip_count=20)
    small = shrink(start, lambda p: p.trip_count >= 3)
    assert small.trip_count == 3
    assert small.stop_count <= start.stop_count


def test_check_params_subset():
    p = replace(default_grid(1)[0], seed=5)
    assert check_params(p, queries=3, checks=frozenset({"filtering"})) == []
