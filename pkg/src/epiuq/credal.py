"""Epistemic-uncertainty measures on interval-induced credal sets.

Entropy extremes use exact solvers (concave maximization by a clipped
common level, concave minimization over the vertices); the set-function
measures work on the full 2^K lower-probability table, so K is capped.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._num import clamp_score
from .exceptions import EnumerationCapError
from .intervals import DEFAULT_VERTEX_CAP, ProbabilityIntervals, credal_vertices
from .simplex import binary_entropy, entropy

# The set-function measures build 2^K tables; past this K refuse.
DEFAULT_SUBSET_CAP = 20


class EntropyExtremum(NamedTuple):
    """An entropy bound together with a distribution attaining it."""

    value: float
    p: np.ndarray


class MoebiusMass(NamedTuple):
    """Moebius inverse of the lower probability, indexed by subset bitmask."""

    masses: np.ndarray  # shape (2^K,)
    k: int

    def mass(self, mask: int) -> float:
        return float(self.masses[int(mask)])

    def to_dict(self) -> dict[int, float]:
        return {mask: float(v) for mask, v in enumerate(self.masses)}


def _check_subset_cap(k: int, cap: int) -> None:
    if k > cap:
        raise EnumerationCapError(
            f"subset enumeration needs 2^{k} entries; cap is K <= {cap}"
        )


def max_entropy(iv: ProbabilityIntervals) -> EntropyExtremum:
    """Entropy maximizer over the credal set.

    The optimum clips a common level c into every interval with
    sum_k clip(c, l_k, u_k) = 1; this is the water-filling schedule
    (raise the smallest free coordinates together) run to completion,
    located here directly on the sorted breakpoints.
    """
    lo, hi = iv.lower, iv.upper
    k = iv.k
    uniform = 1.0 / k
    if (lo <= uniform).all() and (hi >= uniform).all():
        # Uniform is feasible, so the maximum is exactly log2 K.
        return EntropyExtremum(float(np.log2(k)), np.full(k, uniform))
    bps = np.unique(np.concatenate([lo, hi]))
    g = np.clip(bps[:, None], lo, hi).sum(axis=1)
    j = int(np.searchsorted(g, 1.0, side="left"))
    if j == 0:
        c = bps[0]
    elif j == len(bps):
        c = bps[-1]
    elif g[j] == 1.0:
        c = bps[j]
    else:
        a, b = bps[j - 1], bps[j]
        free = (lo <= a) & (hi >= b)
        fixed = np.where(hi <= a, hi, 0.0).sum() + np.where(lo >= b, lo, 0.0).sum()
        n_free = int(free.sum())
        if n_free == 0:
            c = a
        else:
            c = min(max((1.0 - fixed) / n_free, a), b)
    p = np.clip(c, lo, hi)
    return EntropyExtremum(entropy(p), p)


def min_entropy(iv: ProbabilityIntervals, vertex_cap: int = DEFAULT_VERTEX_CAP) -> EntropyExtremum:
    """Entropy minimizer over the credal set.

    Entropy is strictly concave, so the minimum sits at a vertex.
    """
    verts = credal_vertices(iv, cap=vertex_cap)
    logs = np.zeros_like(verts)
    np.log2(verts, out=logs, where=verts > 0.0)
    ents = -(verts * logs).sum(axis=1)
    i = int(np.argmin(ents))
    return EntropyExtremum(float(ents[i]), verts[i])


def entropy_difference(iv: ProbabilityIntervals, vertex_cap: int = DEFAULT_VERTEX_CAP) -> float:
    """Spread of Shannon entropy over the credal set (bits)."""
    hi = max_entropy(iv).value
    lo = min_entropy(iv, vertex_cap=vertex_cap).value
    return clamp_score(hi - lo, "hdiff")


def binary_entropy_difference(iv: ProbabilityIntervals) -> float:
    """Closed form for K = 2 on the effective class-0 interval.

    The 1/2 entropy peak enters the maximum only when the interval
    actually contains 1/2 (the clip handles both branches).
    """
    if iv.k != 2:
        raise ValueError("binary closed form needs K = 2")
    lo = max(iv.lower[0], 1.0 - iv.upper[1])
    hi = min(iv.upper[0], 1.0 - iv.lower[1])
    h_max = binary_entropy(min(max(0.5, lo), hi))
    h_min = min(binary_entropy(lo), binary_entropy(hi))
    return clamp_score(h_max - h_min, "hdiff")


def _lower_probability_table(iv: ProbabilityIntervals) -> np.ndarray:
    """Lower probability of every class subset, indexed by bitmask."""
    k = iv.k
    shape = (2,) * k
    sum_lo = np.zeros(shape)
    sum_hi = np.zeros(shape)
    for j in range(k):
        sel: list = [slice(None)] * k
        sel[k - 1 - j] = 1  # axis for bit j in C-order flattening
        sum_lo[tuple(sel)] += iv.lower[j]
        sum_hi[tuple(sel)] += iv.upper[j]
    sum_lo = sum_lo.ravel()
    sum_hi = sum_hi.ravel()
    return np.maximum(sum_lo, 1.0 - (iv.upper.sum() - sum_hi))


def _moebius_transform(values: np.ndarray, k: int) -> np.ndarray:
    """In-place subset Moebius transform over the bit lattice.

    Equivalent to the per-subset alternating-sign submask sum, computed
    in K passes instead of 3^K steps.
    """
    m = values.reshape((2,) * k).copy()
    for axis in range(k):
        hi: list = [slice(None)] * k
        lo: list = [slice(None)] * k
        hi[axis] = 1
        lo[axis] = 0
        m[tuple(hi)] -= m[tuple(lo)]
    return m.ravel()


def _popcounts(k: int) -> np.ndarray:
    pc = np.zeros(1, dtype=np.int64)
    for _ in range(k):
        pc = np.concatenate([pc, pc + 1])
    return pc


def moebius_mass(iv: ProbabilityIntervals, subset_cap: int = DEFAULT_SUBSET_CAP) -> MoebiusMass:
    """Moebius inverse of the lower probability (may carry negative mass)."""
    _check_subset_cap(iv.k, subset_cap)
    nu = _lower_probability_table(iv)
    return MoebiusMass(_moebius_transform(nu, iv.k), iv.k)


def generalized_hartley(iv: ProbabilityIntervals, subset_cap: int = DEFAULT_SUBSET_CAP) -> float:
    """Moebius-mass-weighted log cardinality over subsets of size >= 2 (bits)."""
    mm = moebius_mass(iv, subset_cap=subset_cap)
    sizes = _popcounts(iv.k)
    multi = sizes >= 2
    value = (mm.masses[multi] * np.log2(sizes[multi])).sum()
    return clamp_score(value, "gh")


def max_mean_imprecision(iv: ProbabilityIntervals, subset_cap: int = DEFAULT_SUBSET_CAP) -> float:
    """Largest upper-minus-lower probability gap over all class subsets.

    Upper probabilities come from conjugacy, so the reversed table is the
    complement's lower probability.
    """
    _check_subset_cap(iv.k, subset_cap)
    nu = _lower_probability_table(iv)
    imprecision = 1.0 - nu[::-1] - nu
    return clamp_score(imprecision.max(), "mmi")
