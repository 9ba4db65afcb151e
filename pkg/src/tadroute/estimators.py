"""Estimator-style wrappers around the engines.

``fit(network)`` does the preprocessing an engine needs and ``predict(X)``
answers a batch of ``(source, target, departure)`` rows, returning arrival
times as floats (``inf`` for unreachable). Hyper-parameters live in
``__init__`` so ``get_params``/``set_params``/``clone`` behave as usual.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .engines import (
    CORE_CH,
    MAX_ROUNDS,
    PLAIN,
    TRANSFER_MODES,
    Labels,
    QueryRequest,
    QueryResult,
    csa_query,
    mr_query,
    prepare_csa,
    prepare_transfers,
    tad_query,
    td_query,
)
from .oracle import oracle_query
from .preprocessing import DEFAULT_MAX_AVG_CORE_DEGREE, filter_network
from .validation import check_network, check_queries


class UnsoundConfigurationError(ValueError):
    """The engine cannot give exact answers on this network."""


class _Router(BaseEstimator):
    supported_modes: tuple[str, ...] = (PLAIN,)

    def fit(self, network, y=None, transfer_data=None):
        check_network(network, validate=getattr(self, "validate", True))
        mode = getattr(self, "transfer_mode", self.supported_modes[0])
        if mode not in self.supported_modes:
            raise ValueError(
                f"{type(self).__name__} supports transfer modes {', '.join(self.supported_modes)}, not {mode!r}"
            )
        self.network_ = network
        self.n_vertices_ = network.vertex_count
        self._prepare(network, transfer_data)
        return self

    def _prepare(self, network, transfer_data) -> None:
        pass

    def query(self, source: int, target: int, departure: int) -> QueryResult:
        check_is_fitted(self, "network_")
        return self._query(int(source), int(target), int(departure))

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "network_")
        rows = check_queries(X, self.n_vertices_)
        out = np.empty(len(rows), dtype=float)
        for i, (s, t, tau) in enumerate(rows.tolist()):
            out[i] = self._query(s, t, tau).arrival
        return out

    def _query(self, s: int, t: int, tau: int) -> QueryResult:
        raise NotImplementedError


class TransferAwareDijkstra(_Router):
    """Buffer-aware time-dependent Dijkstra that scans whole trips on boarding."""

    supported_modes = TRANSFER_MODES

    def __init__(self, transfer_mode: str = PLAIN, pruning: bool = True,
                 max_avg_core_degree: float = DEFAULT_MAX_AVG_CORE_DEGREE, validate: bool = True):
        self.transfer_mode = transfer_mode
        self.pruning = pruning
        self.max_avg_core_degree = max_avg_core_degree
        self.validate = validate

    def _prepare(self, network, transfer_data):
        if transfer_data is None:
            transfer_data = prepare_transfers(network, self.transfer_mode, self.max_avg_core_degree)
        self.transfer_data_ = transfer_data
        self.labels_ = Labels(network.vertex_count)

    def _query(self, s, t, tau):
        request = QueryRequest(s, t, tau, self.transfer_mode, self.pruning)
        return tad_query(self.network_, request, self.transfer_data_, self.labels_)


class TimeDependentDijkstra(_Router):
    """TD-Dijkstra on dominance-filtered boards.

    Exact only without buffers. Fitting a buffered network raises unless
    ``allow_unsound`` is set, because filtering may drop the only connection
    a passenger can still catch once the buffer is paid.
    """

    supported_modes = TRANSFER_MODES

    def __init__(self, transfer_mode: str = PLAIN, allow_unsound: bool = False,
                 max_avg_core_degree: float = DEFAULT_MAX_AVG_CORE_DEGREE, validate: bool = True):
        self.transfer_mode = transfer_mode
        self.allow_unsound = allow_unsound
        self.max_avg_core_degree = max_avg_core_degree
        self.validate = validate

    def _prepare(self, network, transfer_data):
        if network.has_buffers and not self.allow_unsound:
            raise UnsoundConfigurationError(
                "td filters dominated connections, which is unsound once stops have buffer times: "
                "a dominated connection may be the only one still catchable after the buffer. "
                "Pass allow_unsound=True to run it anyway."
            )
        self.filtered_ = network if network.filtered else filter_network(network)
        if transfer_data is None:
            transfer_data = prepare_transfers(network, self.transfer_mode, self.max_avg_core_degree)
        self.transfer_data_ = transfer_data
        self.labels_ = Labels(network.vertex_count)

    def _query(self, s, t, tau):
        request = QueryRequest(s, t, tau, self.transfer_mode)
        return td_query(self.filtered_, request, self.transfer_data_, self.labels_)


class ConnectionScan(_Router):
    """Trip-aware CSA; needs transitively closed stop footpaths."""

    def __init__(self, check_closure: bool = True, validate: bool = True):
        self.check_closure = check_closure
        self.validate = validate

    def _prepare(self, network, transfer_data):
        self.csa_data_ = transfer_data if transfer_data is not None else prepare_csa(network, self.check_closure)

    def _query(self, s, t, tau):
        return csa_query(self.network_, QueryRequest(s, t, tau), self.csa_data_)


class MultimodalRaptor(_Router):
    """Round-based engine with transfers on a Core-CH core graph (earliest arrival only)."""

    supported_modes = (CORE_CH,)

    def __init__(self, max_avg_core_degree: float = DEFAULT_MAX_AVG_CORE_DEGREE, max_rounds: int = MAX_ROUNDS,
                 validate: bool = True):
        self.max_avg_core_degree = max_avg_core_degree
        self.max_rounds = max_rounds
        self.validate = validate

    def _prepare(self, network, transfer_data):
        if transfer_data is None:
            transfer_data = prepare_transfers(network, CORE_CH, self.max_avg_core_degree)
        self.transfer_data_ = transfer_data

    def _query(self, s, t, tau):
        return mr_query(self.network_, self.transfer_data_, QueryRequest(s, t, tau, CORE_CH), self.max_rounds)


class OracleRouter(_Router):
    """Exhaustive label-correcting reference; small networks only."""

    def __init__(self, validate: bool = True):
        self.validate = validate

    def _query(self, s, t, tau):
        return QueryResult(oracle_query(self.network_, s, t, tau))


ENGINES = {
    "tad": TransferAwareDijkstra,
    "td": TimeDependentDijkstra,
    "csa": ConnectionScan,
    "mr": MultimodalRaptor,
    "oracle": OracleRouter,
}


def engine_modes(engine: str) -> tuple[str, ...]:
    try:
        return ENGINES[engine].supported_modes
    except KeyError:
        raise ValueError(f"unknown engine {engine!r}; expected one of {', '.join(ENGINES)}") from None


def make_router(engine: str, mode: str = PLAIN, **params) -> _Router:
    """Unfitted router for ``engine`` in transfer ``mode``."""
    modes = engine_modes(engine)
    if mode not in modes:
        raise ValueError(f"engine {engine!r} runs in transfer mode(s) {', '.join(modes)}, not {mode!r}")
    if engine in ("tad", "td"):
        params["transfer_mode"] = mode
    return ENGINES[engine](**params)
