"""Synthetic prediction-set generator with a planted difficulty signal.

Member dispersion grows with a per-sample hardness draw; misclassified
samples get a hardness boost controlled by ``separation``, so dispersion-
sensitive uncertainty scores recover the error ranking. separation = 0
plants no signal; separation -> infinity makes every error's members
almost pure noise.
"""
from __future__ import annotations

import numpy as np

from .dataio import PredictionRecord


def synth_generate(
    k: int,
    m: int,
    n: int,
    error_rate: float,
    separation: float,
    seed: int,
) -> list[PredictionRecord]:
    """Draw ``n`` labelled prediction sets of shape (m, k).

    Each sample mixes a one-hot anchor (the true class, or a wrong class
    for planted errors) with Dirichlet noise. Correct samples keep every
    mixing weight below 1/2, which pins their pooled argmax to the true
    class; error weights approach 1 as ``separation`` grows.
    """
    if k < 2:
        raise ValueError(f"need at least two classes, got k={k}")
    if m < 1:
        raise ValueError(f"need at least one member, got m={m}")
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    if not 0.0 <= error_rate <= 1.0:
        raise ValueError(f"error_rate must lie in [0, 1], got {error_rate}")
    if separation < 0.0:
        raise ValueError(f"separation must be nonnegative, got {separation}")

    rng = np.random.default_rng(int(seed))
    eye = np.eye(k)
    records: list[PredictionRecord] = []
    for i in range(n):
        label = int(rng.integers(k))
        is_error = bool(rng.random() < error_rate)
        if is_error:
            anchor = (label + 1 + int(rng.integers(k - 1))) % k
        else:
            anchor = label
        hardness = float(rng.uniform(0.05, 0.45))
        if is_error:
            hardness = 1.0 - (1.0 - hardness) / (1.0 + separation)
        weights = hardness * rng.uniform(0.5, 1.0, size=m)
        noise = rng.dirichlet(np.ones(k), size=m)
        probs = (1.0 - weights)[:, None] * eye[anchor] + weights[:, None] * noise
        probs /= probs.sum(axis=1, keepdims=True)
        records.append(PredictionRecord(f"s{i:06d}", label, probs))
    return records
