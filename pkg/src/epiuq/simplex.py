"""Probability vectors, prediction sets, and the pooled mean prediction.

A prediction set collects the M categorical distributions that a model
(or model family) proposes for one input; everything downstream consumes
the validated (M, K) array produced here.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

# Raw rows whose sum deviates from 1 by more than this are rejected
# instead of silently renormalized.
RENORM_TOL = 1e-4
# Validated vectors must sum to 1 within this.
SUM_TOL = 1e-6
# Entries this far below zero are treated as float noise and clipped.
NEG_TOL = 1e-12
# Sums this close to 1 are left untouched; dividing by a factor within
# rounding error of 1 perturbs entries without improving them, and the
# skip makes validation idempotent.
NOOP_TOL = 1e-13


class MeanPrediction(NamedTuple):
    """Uniform average of a prediction set and its top class."""

    mean: np.ndarray
    argmax_class: int


def check_probability_vector(p, *, renormalize: bool = True, name: str = "p") -> np.ndarray:
    """Validate a single categorical distribution.

    Accepts entries summing to 1 within ``RENORM_TOL`` and renormalizes by
    the sum; anything further off is an error, as are negative entries,
    non-finite values, or K < 2.
    """
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    return check_prediction_set(arr[None, :], renormalize=renormalize, name=name)[0]


def check_prediction_set(b, *, renormalize: bool = True, name: str = "b") -> np.ndarray:
    """Validate an (M, K) stack of categorical distributions.

    Returns a float copy with each row summing to 1. Rows are renormalized
    when their raw sum is within ``RENORM_TOL`` of 1 and rejected otherwise.
    """
    arr = np.asarray(b, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (members x classes), got shape {arr.shape}")
    m, k = arr.shape
    if m < 1:
        raise ValueError(f"{name} needs at least one member distribution")
    if k < 2:
        raise ValueError(f"{name} needs at least two classes, got {k}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    if (arr < -NEG_TOL).any():
        raise ValueError(f"{name} contains negative probabilities")
    arr = np.where(arr < 0.0, 0.0, arr)
    sums = arr.sum(axis=1)
    off = np.abs(sums - 1.0)
    if (off > RENORM_TOL).any():
        row = int(np.argmax(off))
        raise ValueError(
            f"{name} row {row} sums to {sums[row]!r}, "
            f"more than {RENORM_TOL} away from 1"
        )
    if renormalize:
        need = off > NOOP_TOL
        if need.any():
            arr[need] /= sums[need, None]
    return arr


def check_prediction_stack(X, *, name: str = "X") -> np.ndarray:
    """Validate an (N, M, K) array of prediction sets."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 3:
        raise ValueError(f"{name} must be 3-D (samples x members x classes), got shape {arr.shape}")
    n, m, k = arr.shape
    flat = check_prediction_set(arr.reshape(n * m, k), name=name)
    return flat.reshape(n, m, k)


def entropy(p) -> float:
    """Shannon entropy in bits with the 0*log(0) = 0 convention."""
    arr = np.asarray(p, dtype=float)
    pos = arr[arr > 0.0]
    return float(-(pos * np.log2(pos)).sum())


def binary_entropy(x: float) -> float:
    """Entropy in bits of the distribution (x, 1 - x)."""
    return entropy((x, 1.0 - x))


def mean_prediction(b) -> MeanPrediction:
    """Pool a prediction set into its uniform mixture.

    Ties in the argmax resolve to the lowest class index.
    """
    arr = check_prediction_set(b)
    mean = arr.mean(axis=0)
    return MeanPrediction(mean=mean, argmax_class=int(np.argmax(mean)))
