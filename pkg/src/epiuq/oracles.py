"""Brute-force reference implementations.

These trade speed for obviousness and share no code with the production
routes; they back the test suite and the CLI's --oracle cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .exceptions import EnumerationCapError
from .intervals import ProbabilityIntervals

# Default lattice steps per class count: fine enough to pin solver values,
# coarse enough to enumerate quickly.
DEFAULT_GRID_STEPS = {2: 0.001, 3: 0.005, 4: 0.02}
# Sign-pattern enumeration is 2^n; past this n use the production test.
WILCOXON_ENUM_CAP = 16


def default_grid_step(k: int) -> float:
    try:
        return DEFAULT_GRID_STEPS[k]
    except KeyError:
        raise ValueError(f"no default lattice step for K={k}; supply one") from None


@dataclass(frozen=True)
class SimplexGrid:
    """Regular lattice on the probability simplex.

    Enumerates every composition of round(1/step) units into K parts, in
    lexicographic order of the class-0, class-1, ... unit counts.
    """

    k: int
    step: float

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("need at least two classes")
        units = round(1.0 / self.step)
        if units < 1 or abs(units * self.step - 1.0) > 1e-9:
            raise ValueError(f"step {self.step!r} does not evenly divide 1")

    @property
    def units(self) -> int:
        return round(1.0 / self.step)

    def __len__(self) -> int:
        import math

        return math.comb(self.units + self.k - 1, self.k - 1)

    def points(self) -> np.ndarray:
        """All lattice points, shape (len(self), K)."""
        rows: list[tuple[int, ...]] = []

        def rec(prefix: tuple[int, ...], left: int, parts: int) -> None:
            if parts == 1:
                rows.append(prefix + (left,))
                return
            for c in range(left + 1):
                rec(prefix + (c,), left - c, parts - 1)

        rec((), self.units, self.k)
        return np.asarray(rows, dtype=float) * self.step


class GridOptimum(NamedTuple):
    value: float
    point: np.ndarray


def grid_minimize(
    objective: Callable[[np.ndarray], float],
    grid: SimplexGrid,
    intervals: ProbabilityIntervals | None = None,
    *,
    vectorized: bool = False,
) -> GridOptimum:
    """Exhaustive minimization over the lattice.

    Lattice points outside ``intervals`` are skipped (1e-12 slack); an
    empty feasible lattice is an error (refine the step). Ties go to the
    earliest point in enumeration order. With ``vectorized=True`` the
    objective receives the whole (P, K) lattice and returns P values.
    """
    pts = grid.points()
    if intervals is not None:
        if intervals.k != grid.k:
            raise ValueError("intervals and grid disagree on K")
        keep = (
            (pts >= intervals.lower - 1e-12).all(axis=1)
            & (pts <= intervals.upper + 1e-12).all(axis=1)
        )
        pts = pts[keep]
        if pts.shape[0] == 0:
            raise ValueError("no lattice point lies inside the intervals; refine the grid")
    if vectorized:
        vals = np.asarray(objective(pts), dtype=float)
    else:
        vals = np.array([float(objective(p)) for p in pts])
    i = int(np.argmin(vals))
    return GridOptimum(value=float(vals[i]), point=pts[i])


def auroc_pair_count(id_scores, ood_scores) -> float:
    """AUROC as the literal pair count: P(ood > id) + P(ood == id)/2."""
    ids = np.asarray(id_scores, dtype=float)
    oods = np.asarray(ood_scores, dtype=float)
    gt = (oods[:, None] > ids[None, :]).sum()
    eq = (oods[:, None] == ids[None, :]).sum()
    return float((gt + 0.5 * eq) / (ids.size * oods.size))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    sorted_vals = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_exact_enum(x, y, cap: int = WILCOXON_ENUM_CAP) -> float:
    """One-sided p as a literal count over all 2^n sign assignments.

    Same convention as the production test: zero differences dropped,
    midranks on |difference|, tail of the positive-rank sum.
    """
    diffs = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    diffs = diffs[diffs != 0.0]
    n = int(diffs.size)
    if n == 0:
        return 1.0
    if n > cap:
        raise EnumerationCapError(f"sign enumeration is 2^{n} patterns; cap is n <= {cap}")
    doubled = np.rint(2.0 * _midranks(np.abs(diffs))).astype(np.int64)
    observed = int(doubled[diffs > 0].sum())
    signs = (np.arange(2**n, dtype=np.int64)[:, None] >> np.arange(n)) & 1
    sums = signs @ doubled
    return float((sums >= observed).sum() / float(2**n))


def moebius_direct(iv: ProbabilityIntervals, cap: int = 12) -> dict[int, float]:
    """Moebius masses by the alternating-sign submask walk, per subset."""
    k = iv.k
    if k > cap:
        raise EnumerationCapError(f"submask walk is 3^{k} steps; cap is K <= {cap}")

    def lower_prob(mask: int) -> float:
        inside = [j for j in range(k) if mask >> j & 1]
        outside = [j for j in range(k) if not mask >> j & 1]
        return max(
            sum(iv.lower[j] for j in inside),
            1.0 - sum(iv.upper[j] for j in outside),
        )

    masses: dict[int, float] = {}
    for q in range(1 << k):
        total = 0.0
        sub = q
        while True:
            sign = -1.0 if (q ^ sub).bit_count() % 2 else 1.0
            total += sign * lower_prob(sub)
            if sub == 0:
                break
            sub = (sub - 1) & q
        masses[q] = total
    return masses


def gh_direct(iv: ProbabilityIntervals, cap: int = 12) -> float:
    """Generalized-Hartley value from the per-subset submask walk."""
    masses = moebius_direct(iv, cap=cap)
    return sum(
        m * np.log2(q.bit_count()) for q, m in masses.items() if q.bit_count() >= 2
    )


def mmi_direct(iv: ProbabilityIntervals, cap: int = 16) -> float:
    """Max imprecision by looping every subset with the interval formulas."""
    k = iv.k
    if k > cap:
        raise EnumerationCapError(f"subset loop is 2^{k} steps; cap is K <= {cap}")

    def lower_prob(mask: int) -> float:
        inside = [j for j in range(k) if mask >> j & 1]
        outside = [j for j in range(k) if not mask >> j & 1]
        return max(
            sum(iv.lower[j] for j in inside),
            1.0 - sum(iv.upper[j] for j in outside),
        )

    full = (1 << k) - 1
    best = 0.0
    for mask in range(1 << k):
        upper = 1.0 - lower_prob(full ^ mask)
        best = max(best, upper - lower_prob(mask))
    return best
