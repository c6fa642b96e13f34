"""Pairwise one-sided Wilcoxon tests and net-win ranking tables.

A measure "wins" an ordered pair when its paired per-run performance is
significantly larger; net = wins - losses sums to zero over any complete
pairing scope.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.stats import rankdata

from .measures import CREDAL_MEASURES, DISTRIBUTION_MEASURES, MEASURE_IDS

DEFAULT_ALPHA = 0.05
# Largest effective n for the exact signed-rank null.
EXACT_CUTOFF = 25

SCOPE_MEASURES: dict[str, tuple[str, ...]] = {
    "intra-dist": DISTRIBUTION_MEASURES,
    "intra-credal": CREDAL_MEASURES,
    "inter": MEASURE_IDS,
}


class WilcoxonResult(NamedTuple):
    p_value: float
    significant: bool
    n_effective: int
    statistic: float  # signed-rank sum of positive differences


class PairTest(NamedTuple):
    first: str
    second: str
    p_value: float
    significant: bool


def _doubled_ranks(diffs: np.ndarray) -> tuple[np.ndarray, float]:
    """Midranks of |diffs| doubled to exact integers, plus the W+ statistic."""
    ranks = rankdata(np.abs(diffs), method="average")
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    w2 = float(np.rint(2.0 * ranks[diffs > 0].sum()))
    return doubled, w2


def _exact_tail_count(doubled: np.ndarray, w2: int) -> int:
    """#{sign patterns with doubled rank sum >= w2} via subset-sum counts."""
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.int64)
    counts[0] = 1
    for r in doubled:
        r = int(r)
        counts[r:] = counts[r:] + counts[: total + 1 - r]
    if w2 <= 0:
        return int(counts.sum())
    return int(counts[w2:].sum())


def wilcoxon_one_sided(
    x,
    y,
    alpha: float = DEFAULT_ALPHA,
    *,
    exact_cutoff: int = EXACT_CUTOFF,
) -> WilcoxonResult:
    """Test whether paired sample x is stochastically larger than y.

    Zero differences are dropped (the effective n is reported); ties in
    |difference| take midranks. Up to ``exact_cutoff`` nonzero pairs the
    p-value is the exact tail of the signed-rank null conditional on the
    observed midranks; beyond that a normal approximation with the
    tie-corrected variance Var = sum(rank^2)/4 and a 0.5 continuity
    correction is used. All-zero differences give p = 1.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape or xa.ndim != 1 or xa.size == 0:
        raise ValueError("x and y must be equal-length nonempty 1-D samples")
    if not (np.isfinite(xa).all() and np.isfinite(ya).all()):
        raise ValueError("samples must be finite")
    diffs = xa - ya
    diffs = diffs[diffs != 0.0]
    n = int(diffs.size)
    if n == 0:
        return WilcoxonResult(p_value=1.0, significant=False, n_effective=0, statistic=0.0)
    doubled, w2 = _doubled_ranks(diffs)
    w_plus = w2 / 2.0
    if n <= exact_cutoff:
        tail = _exact_tail_count(doubled, int(w2))
        p = tail / float(2**n)
    else:
        ranks = doubled / 2.0
        mu = ranks.sum() / 2.0
        sigma = math.sqrt(float((ranks**2).sum()) / 4.0)
        z = (w_plus - 0.5 - mu) / sigma
        p = 0.5 * math.erfc(z / math.sqrt(2.0))
    p = min(max(p, 0.0), 1.0)
    return WilcoxonResult(p_value=p, significant=p < alpha, n_effective=n, statistic=w_plus)


@dataclass(frozen=True)
class RunMatrix:
    """Per-run performance scores for several measures on one setup."""

    scores: Mapping[str, Sequence[float]]
    dataset: str = ""
    model: str = ""
    task: str = ""

    def __post_init__(self):
        lengths = {m: len(v) for m, v in self.scores.items()}
        if not lengths:
            raise ValueError("RunMatrix needs at least one measure")
        if len(set(lengths.values())) != 1:
            raise ValueError(f"unequal run counts per measure: {lengths}")
        if next(iter(lengths.values())) < 2:
            raise ValueError("need at least two paired runs")

    @property
    def n_runs(self) -> int:
        return len(next(iter(self.scores.values())))


@dataclass(frozen=True)
class NetWinTable:
    """Win/loss bookkeeping for one scope on one model (or an aggregate)."""

    scope: str
    alpha: float
    measures: tuple[str, ...]
    wins: Mapping[str, int]
    losses: Mapping[str, int]
    net: Mapping[str, int]
    pairs: tuple[PairTest, ...] = ()
    dataset: str = ""
    model: str = ""
    task: str = ""
    n_models: int = 1


def net_wins(
    matrix: RunMatrix,
    measures: Sequence[str] | None = None,
    alpha: float = DEFAULT_ALPHA,
    scope: str = "",
) -> NetWinTable:
    """Run every ordered pairwise one-sided test among the measures."""
    if measures is None:
        measures = tuple(matrix.scores.keys())
    measures = tuple(measures)
    if len(measures) < 2:
        raise ValueError("need at least two measures to rank")
    missing = [m for m in measures if m not in matrix.scores]
    if missing:
        raise ValueError(f"RunMatrix lacks scores for {missing}")
    wins = {m: 0 for m in measures}
    losses = {m: 0 for m in measures}
    pairs = []
    for a in measures:
        for b in measures:
            if a == b:
                continue
            res = wilcoxon_one_sided(matrix.scores[a], matrix.scores[b], alpha=alpha)
            pairs.append(PairTest(a, b, res.p_value, res.significant))
            if res.significant:
                wins[a] += 1
                losses[b] += 1
    net = {m: wins[m] - losses[m] for m in measures}
    return NetWinTable(
        scope=scope,
        alpha=alpha,
        measures=measures,
        wins=wins,
        losses=losses,
        net=net,
        pairs=tuple(pairs),
        dataset=matrix.dataset,
        model=matrix.model,
        task=matrix.task,
    )


def aggregate_net_wins(tables: Iterable[NetWinTable]) -> NetWinTable:
    """Componentwise sum of per-model tables sharing scope and measures."""
    tables = list(tables)
    if not tables:
        raise ValueError("nothing to aggregate")
    first = tables[0]
    for t in tables[1:]:
        if t.scope != first.scope or t.measures != first.measures:
            raise ValueError(
                f"cannot aggregate {t.scope}/{t.measures} with {first.scope}/{first.measures}"
            )
        if t.alpha != first.alpha:
            raise ValueError("cannot aggregate tables tested at different alphas")
    wins = {m: sum(t.wins[m] for t in tables) for m in first.measures}
    losses = {m: sum(t.losses[m] for t in tables) for m in first.measures}
    net = {m: wins[m] - losses[m] for m in first.measures}
    return NetWinTable(
        scope=first.scope,
        alpha=first.alpha,
        measures=first.measures,
        wins=wins,
        losses=losses,
        net=net,
        pairs=(),
        dataset=first.dataset,
        model="aggregate",
        task=first.task,
        n_models=sum(t.n_models for t in tables),
    )
