"""Downstream evaluations: selective prediction and OOD detection.

Both consume per-sample uncertainty scores; higher score = more uncertain.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class EvaluationRecord:
    """One benchmark sample: labels plus its uncertainty scores."""

    sample_id: str
    true_label: int
    predicted_label: int
    scores: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class AccuracyRejectionCurve:
    """Accuracy over the retained fraction as rejection grows."""

    measure: str
    betas: tuple[float, ...]
    accuracies: tuple[float, ...]
    auarc: float
    n_samples: int

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.betas, self.accuracies))


@dataclass(frozen=True)
class DetectionResult:
    """Separability of two score samples, as rank AUROC."""

    measure: str
    auroc: float
    n_id: int
    n_ood: int


def default_beta_grid() -> np.ndarray:
    """Rejection rates 0.00, 0.01, ..., 0.50."""
    return np.round(np.arange(0, 51) * 0.01, 2)


def _check_betas(betas) -> np.ndarray:
    arr = default_beta_grid() if betas is None else np.asarray(betas, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("betas must be a nonempty 1-D sequence")
    if (arr < 0.0).any() or (arr >= 1.0).any():
        raise ValueError("rejection rates must lie in [0, 1)")
    if (np.diff(arr) <= 0.0).any():
        raise ValueError("rejection rates must be strictly increasing")
    return arr


def auarc(betas, accuracies) -> float:
    """Trapezoidal mean of the curve over its beta range."""
    b = np.asarray(betas, dtype=float)
    a = np.asarray(accuracies, dtype=float)
    if b.size == 1:
        return float(a[0])
    span = b[-1] - b[0]
    return float(np.trapezoid(a, b) / span)


def selective_prediction(
    records: Sequence[EvaluationRecord],
    measure: str,
    betas=None,
) -> AccuracyRejectionCurve:
    """Reject the most-uncertain fraction beta and score the rest.

    Samples are ordered by ascending score with ties kept in input order;
    at each beta the floor((1 - beta) * N) most-certain samples remain.
    Betas that would retain nothing are dropped with a warning.
    """
    if not records:
        raise ValueError("no evaluation records")
    grid = _check_betas(betas)
    try:
        scores = np.array([r.scores[measure] for r in records], dtype=float)
    except KeyError:
        raise ValueError(f"records lack scores for measure {measure!r}") from None
    correct = np.array([r.predicted_label == r.true_label for r in records], dtype=float)
    order = np.argsort(scores, kind="stable")
    correct = correct[order]
    n = len(records)

    kept_betas = []
    accs = []
    for beta in grid:
        n_keep = int(np.floor((1.0 - beta) * n))
        if n_keep == 0:
            warnings.warn(
                f"beta={beta} retains no samples out of {n}; point dropped",
                stacklevel=2,
            )
            continue
        kept_betas.append(float(beta))
        accs.append(float(correct[:n_keep].mean()))
    if not kept_betas:
        raise ValueError("every rejection rate retained zero samples")
    return AccuracyRejectionCurve(
        measure=measure,
        betas=tuple(kept_betas),
        accuracies=tuple(accs),
        auarc=auarc(kept_betas, accs),
        n_samples=n,
    )


def ood_detection(id_scores, ood_scores, measure: str = "") -> DetectionResult:
    """AUROC for separating the two samples, scoring OOD as positive.

    Tie-aware rank (Mann-Whitney) form: midranks of the pooled scores,
    (sum of OOD ranks - n_ood(n_ood + 1)/2) / (n_id * n_ood).
    """
    ids = np.asarray(id_scores, dtype=float)
    oods = np.asarray(ood_scores, dtype=float)
    if ids.ndim != 1 or oods.ndim != 1 or ids.size == 0 or oods.size == 0:
        raise ValueError("both score samples must be nonempty 1-D sequences")
    if not (np.isfinite(ids).all() and np.isfinite(oods).all()):
        raise ValueError("scores must be finite")
    ranks = rankdata(np.concatenate([ids, oods]), method="average")
    n_id, n_ood = ids.size, oods.size
    rank_sum = ranks[n_id:].sum()
    value = (rank_sum - n_ood * (n_ood + 1) / 2.0) / (n_id * n_ood)
    return DetectionResult(measure=measure, auroc=float(value), n_id=n_id, n_ood=n_ood)
