from .buckets import Buckets, bucket_one_to_many, build_buckets
from .ch import (
    DEFAULT_MAX_AVG_CORE_DEGREE,
    CHData,
    CoreCHData,
    build_ch,
    build_core_ch,
    ch_path,
    ch_query,
    core_distances,
    core_query,
    downward_search,
    upward_search,
)
from .filtering import filter_dominated, filter_network

__all__ = [
    "Buckets",
    "CHData",
    "CoreCHData",
    "DEFAULT_MAX_AVG_CORE_DEGREE",
    "bucket_one_to_many",
    "build_buckets",
    "build_ch",
    "build_core_ch",
    "ch_path",
    "ch_query",
    "core_distances",
    "core_query",
    "downward_search",
    "filter_dominated",
    "filter_network",
    "upward_search",
]
