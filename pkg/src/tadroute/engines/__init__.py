from .common import (
    BUCKET_CH,
    CORE_CH,
    PLAIN,
    TRANSFER_MODES,
    BucketIndex,
    Labels,
    QueryRequest,
    QueryResult,
    QueryStats,
    prepare_transfers,
)
from .csa import ClosureError, CSAData, closure_violations, csa_query, has_footpath_closure, prepare_csa
from .dijkstra import scan_trip, should_prune, tad_query, td_query, trip_pruning_trace
from .mr import MAX_ROUNDS, mr_query

__all__ = [
    "BUCKET_CH",
    "CORE_CH",
    "CSAData",
    "ClosureError",
    "BucketIndex",
    "Labels",
    "MAX_ROUNDS",
    "PLAIN",
    "QueryRequest",
    "QueryResult",
    "QueryStats",
    "TRANSFER_MODES",
    "closure_violations",
    "csa_query",
    "has_footpath_closure",
    "mr_query",
    "prepare_csa",
    "prepare_transfers",
    "scan_trip",
    "should_prune",
    "tad_query",
    "td_query",
    "trip_pruning_trace",
]
