"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .model import Network, validate_network


def check_network(network, validate: bool = True) -> Network:
    if not isinstance(network, Network):
        raise TypeError(f"expected a Network, got {type(network).__name__}")
    if validate:
        problems = validate_network(network)
        if problems:
            shown = "; ".join(problems[:5])
            more = f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""
            raise ValueError(f"invalid network: {shown}{more}")
    return network


def check_queries(X, vertex_count: int) -> np.ndarray:
    """Coerce ``X`` to an ``(n, 3)`` int64 array of (source, target, departure) rows."""
    arr = check_array(X, dtype=None, ensure_2d=True, ensure_all_finite=True, ensure_min_samples=0)
    if arr.shape[1] != 3:
        raise ValueError(f"queries need 3 columns (source, target, departure), got {arr.shape[1]}")
    if arr.dtype.kind == "f":
        if not np.all(arr == np.round(arr)):
            raise ValueError("query columns must hold integers")
    elif arr.dtype.kind not in "iu":
        raise ValueError(f"query columns must be integers, got dtype {arr.dtype}")
    arr = arr.astype(np.int64)
    if arr.size:
        bad = (arr[:, :2] < 0) | (arr[:, :2] >= vertex_count)
        if bad.any():
            row = int(np.argwhere(bad)[0][0])
            raise ValueError(f"query row {row}: vertex outside 0..{vertex_count - 1}")
        if (arr[:, 2] < 0).any():
            raise ValueError("departure times must be non-negative")
    return arr
