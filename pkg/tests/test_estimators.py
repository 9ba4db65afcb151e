import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from conftest import hm
from tadroute.estimators import (
    ConnectionScan,
    MultimodalRaptor,
    OracleRouter,
    TimeDependentDijkstra,
    TransferAwareDijkstra,
    UnsoundConfigurationError,
    make_router,
)
from tadroute.netgen import random_params, generate
from tadroute.validation import check_network, check_queries

X_MOT = [[0, 2, hm("7:50")], [1, 1, 500], [2, 0, 0]]


def test_get_params_and_clone():
    est = TransferAwareDijkstra(transfer_mode="core-ch", pruning=False)
    assert est.get_params() == {"transfer_mode": "core-ch", "pruning": False, "max_avg_core_degree": 14.0,
                                "validate": True}
    twin = clone(est).set_params(pruning=True)
    assert twin.pruning and not est.pruning


@pytest.mark.parametrize("router", [
    TransferAwareDijkstra(),
    TransferAwareDijkstra(transfer_mode="bucket-ch"),
    ConnectionScan(),
    MultimodalRaptor(),
    OracleRouter(),
])
def test_predict_motivating(router, motivating):
    out = router.fit(motivating).predict(X_MOT)
    assert out.dtype == float and out.shape == (3,)
    assert out[0] == hm("10:30") and out[1] == 500 and np.isinf(out[2])


def test_predict_before_fit():
    with pytest.raises(NotFittedError):
        TransferAwareDijkstra().predict(X_MOT)


def test_td_refuses_buffers(motivating):
    with pytest.raises(UnsoundConfigurationError, match="allow_unsound"):
        TimeDependentDijkstra().fit(motivating)
    out = TimeDependentDijkstra(allow_unsound=True).fit(motivating).predict(X_MOT[:1])
    assert np.isinf(out[0])


def test_estimators_agree_on_random_network():
    net = generate(random_params(12, closure_mode=True))
    rng = np.random.default_rng(0)
    X = np.column_stack([rng.integers(0, net.vertex_count, 40), rng.integers(0, net.vertex_count, 40),
                         rng.integers(6 * 3600, 9 * 3600, 40)])
    ref = OracleRouter().fit(net).predict(X)
    for est in (TransferAwareDijkstra(), TransferAwareDijkstra(transfer_mode="core-ch"), MultimodalRaptor(),
                ConnectionScan()):
        np.testing.assert_array_equal(est.fit(net).predict(X), ref)


def test_unsupported_mode(motivating):
    with pytest.raises(ValueError, match="supports transfer modes"):
        TransferAwareDijkstra(transfer_mode="warp").fit(motivating)
    with pytest.raises(ValueError, match="core-ch"):
        make_router("mr", "plain")
    with pytest.raises(ValueError, match="unknown engine"):
        make_router("astar")


@pytest.mark.parametrize("X, needle", [
    ([[0, 1]], "3 columns"),
    ([[0, 9, 10]], "vertex outside"),
    ([[0, 1, -4]], "non-negative"),
    ([[0, 1.5, 3]], "integers"),
    ([["a", "b", "c"]], "integers"),
])
def test_check_queries_errors(X, needle):
    with pytest.raises(ValueError, match=needle):
        check_queries(X, 3)


def test_check_queries_accepts_integral_floats_and_empty():
    assert check_queries(np.array([[0.0, 1.0, 30.0]]), 3).dtype == np.int64
    assert check_queries(np.zeros((0, 3), dtype=int), 3).shape == (0, 3)


def test_check_network():
    with pytest.raises(TypeError):
        check_network("nope")
