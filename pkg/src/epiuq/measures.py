"""Measure registry and per-sample dispatch.

Measure ids: mi, lwv, wd operate on the prediction set itself; hdiff, gh,
mmi operate on its interval envelope.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np

from .credal import (
    DEFAULT_SUBSET_CAP,
    entropy_difference,
    generalized_hartley,
    max_mean_imprecision,
)
from .distribution import label_wise_variance, mutual_information, wasserstein_dispersion
from .intervals import DEFAULT_VERTEX_CAP, build_intervals
from .simplex import check_prediction_set

DISTRIBUTION_MEASURES = ("mi", "lwv", "wd")
CREDAL_MEASURES = ("hdiff", "gh", "mmi")
MEASURE_IDS = DISTRIBUTION_MEASURES + CREDAL_MEASURES

_GROUPS = {
    "all": MEASURE_IDS,
    "dist": DISTRIBUTION_MEASURES,
    "credal": CREDAL_MEASURES,
}


def resolve_measures(spec: str | Iterable[str] | None) -> tuple[str, ...]:
    """Normalize a measure selection: group name, comma string, or iterable."""
    if spec is None:
        return MEASURE_IDS
    if isinstance(spec, str):
        if spec in _GROUPS:
            return _GROUPS[spec]
        parts = [s.strip() for s in spec.split(",") if s.strip()]
    else:
        parts = list(spec)
    if not parts:
        raise ValueError("empty measure selection")
    bad = [p for p in parts if p not in MEASURE_IDS]
    if bad:
        raise ValueError(f"unknown measure ids {bad}; known: {list(MEASURE_IDS)}")
    if len(set(parts)) != len(parts):
        raise ValueError(f"duplicate measure ids in {parts}")
    return tuple(parts)


def score_prediction_set(
    b,
    measures: str | Iterable[str] | None = None,
    *,
    wd_method: str = "auto",
    vertex_cap: int = DEFAULT_VERTEX_CAP,
    subset_cap: int = DEFAULT_SUBSET_CAP,
) -> dict[str, float]:
    """Compute the requested measures for one prediction set."""
    names = resolve_measures(measures)
    arr = check_prediction_set(b)
    iv = build_intervals(arr) if any(n in CREDAL_MEASURES for n in names) else None
    out: dict[str, float] = {}
    for name in names:
        if name == "mi":
            out[name] = mutual_information(arr)
        elif name == "lwv":
            out[name] = label_wise_variance(arr)
        elif name == "wd":
            out[name] = wasserstein_dispersion(arr, method=wd_method)
        elif name == "hdiff":
            out[name] = entropy_difference(iv, vertex_cap=vertex_cap)
        elif name == "gh":
            out[name] = generalized_hartley(iv, subset_cap=subset_cap)
        else:
            out[name] = max_mean_imprecision(iv, subset_cap=subset_cap)
    return out


def score_stack(
    X,
    measures: str | Iterable[str] | None = None,
    **kwargs,
) -> np.ndarray:
    """Score every prediction set in a stack; rows follow the input order.

    Accepts an (N, M, K) array or a sequence of (M_i, K) arrays.
    """
    names = resolve_measures(measures)
    if isinstance(X, np.ndarray) and X.ndim == 3:
        sets: Iterable = X
    else:
        try:
            arr = np.asarray(X, dtype=float)
        except (ValueError, TypeError):
            arr = None
        sets = arr if arr is not None and arr.ndim == 3 else list(X)
    rows = [
        [score_prediction_set(s, names, **kwargs)[n] for n in names]
        for s in sets
    ]
    return np.asarray(rows, dtype=float).reshape(-1, len(names))
