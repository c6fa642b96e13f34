"""Class-wise probability intervals and the credal set they induce.

The intervals [lower_k, upper_k] are coordinatewise envelopes of a
prediction set; the credal set is every distribution on the simplex
honouring all K intervals. Events (class subsets) are integer bitmasks,
bit j <-> class j.
"""
from __future__ import annotations

import numpy as np

from .exceptions import EnumerationCapError, InfeasibleIntervalsError

# Vertex-candidate enumeration is K * 2^(K-1); past this K use sampling
# or the closed forms instead.
DEFAULT_VERTEX_CAP = 16
# Bound-feasibility slack and vertex dedupe resolution.
FEAS_TOL = 1e-9


def subset_mask(indices, k: int) -> int:
    """Bitmask for an iterable of class indices."""
    mask = 0
    for i in indices:
        if not 0 <= i < k:
            raise ValueError(f"class index {i} outside 0..{k - 1}")
        mask |= 1 << i
    return mask


def subset_indices(mask: int) -> tuple[int, ...]:
    """Class indices contained in a bitmask, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subset_size(mask: int) -> int:
    return int(mask).bit_count()


def subset_complement(mask: int, k: int) -> int:
    return ((1 << k) - 1) ^ mask


class ProbabilityIntervals:
    """Per-class probability bounds with the induced lower/upper probability.

    Parameters
    ----------
    lower, upper : array-like, shape (K,)
        Bounds with 0 <= lower <= upper <= 1. The feasible set
        {p on the simplex : lower <= p <= upper} must be nonempty,
        i.e. sum(lower) <= 1 <= sum(upper).
    """

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lo = np.asarray(lower, dtype=float).copy()
        hi = np.asarray(upper, dtype=float).copy()
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if lo.shape[0] < 2:
            raise ValueError("need at least two classes")
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("interval bounds must be finite")
        if (lo < -FEAS_TOL).any() or (hi > 1.0 + FEAS_TOL).any():
            raise ValueError("interval bounds must lie in [0, 1]")
        # Squash float noise only; real violations were rejected above.
        lo = np.clip(lo, 0.0, 1.0)
        hi = np.clip(hi, 0.0, 1.0)
        if (lo > hi + FEAS_TOL).any():
            raise ValueError("lower bound exceeds upper bound")
        hi = np.maximum(hi, lo)
        if lo.sum() > 1.0 + FEAS_TOL or hi.sum() < 1.0 - FEAS_TOL:
            raise InfeasibleIntervalsError(
                f"empty credal set: sum(lower)={lo.sum()!r}, sum(upper)={hi.sum()!r}"
            )
        lo.setflags(write=False)
        hi.setflags(write=False)
        self.lower = lo
        self.upper = hi

    @property
    def k(self) -> int:
        return self.lower.shape[0]

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def is_degenerate(self) -> bool:
        """True when every interval is a single point."""
        return bool((self.lower == self.upper).all())

    def is_vacuous(self) -> bool:
        """True when every interval is [0, 1] (no information)."""
        return bool((self.lower == 0.0).all() and (self.upper == 1.0).all())

    def contains(self, p, tol: float = FEAS_TOL) -> bool:
        arr = np.asarray(p, dtype=float)
        return bool(
            arr.shape == self.lower.shape
            and (arr >= self.lower - tol).all()
            and (arr <= self.upper + tol).all()
            and abs(arr.sum() - 1.0) <= tol
        )

    def _check_mask(self, mask: int) -> int:
        mask = int(mask)
        if not 0 <= mask < (1 << self.k):
            raise ValueError(f"subset mask {mask} outside 0..{(1 << self.k) - 1}")
        return mask

    def lower_probability(self, mask: int) -> float:
        """Tightest lower bound on P(A) over the credal set.

        max(sum of lower bounds inside A, 1 - sum of upper bounds outside A).
        """
        mask = self._check_mask(mask)
        inside = _mask_to_bool(mask, self.k)
        return float(max(self.lower[inside].sum(), 1.0 - self.upper[~inside].sum()))

    def upper_probability(self, mask: int) -> float:
        """Conjugate upper bound: 1 - lower probability of the complement."""
        mask = self._check_mask(mask)
        return 1.0 - self.lower_probability(subset_complement(mask, self.k))

    def vertices(self, cap: int = DEFAULT_VERTEX_CAP) -> np.ndarray:
        return credal_vertices(self, cap=cap)

    def __repr__(self) -> str:
        pairs = ", ".join(f"[{lo:.4g}, {hi:.4g}]" for lo, hi in zip(self.lower, self.upper))
        return f"ProbabilityIntervals({pairs})"


def _mask_to_bool(mask: int, k: int) -> np.ndarray:
    return (mask >> np.arange(k)) & 1 == 1


def build_intervals(b) -> ProbabilityIntervals:
    """Coordinatewise [min, max] envelope of a prediction set.

    Envelopes of valid prediction sets are automatically reachable: every
    bound is attained by some member, so no repair step is needed.
    """
    from .simplex import check_prediction_set

    arr = check_prediction_set(b)
    return ProbabilityIntervals(arr.min(axis=0), arr.max(axis=0))


def credal_vertices(iv: ProbabilityIntervals, cap: int = DEFAULT_VERTEX_CAP) -> np.ndarray:
    """Extreme points of the credal set, deduplicated at 1e-9.

    At a vertex at most one class sits strictly inside its interval, so
    each class in turn is designated free while the others take a bound;
    the free coordinate absorbs 1 minus the rest and candidates violating
    the free class's own interval are dropped. K * 2^(K-1) candidates.
    """
    k = iv.k
    if k > cap:
        raise EnumerationCapError(
            f"vertex enumeration needs {k} * 2^{k - 1} candidates; cap is K <= {cap}"
        )
    n_pat = 1 << (k - 1)
    patterns = (np.arange(n_pat)[:, None] >> np.arange(k - 1)) & 1  # (2^(K-1), K-1)

    out: list[np.ndarray] = []
    seen: set[tuple] = set()
    for free in range(k):
        others = [j for j in range(k) if j != free]
        lo = iv.lower[others]
        hi = iv.upper[others]
        vals = np.where(patterns == 1, hi, lo)  # (2^(K-1), K-1)
        rest = vals.sum(axis=1)
        free_val = 1.0 - rest
        ok = (free_val >= iv.lower[free] - FEAS_TOL) & (free_val <= iv.upper[free] + FEAS_TOL)
        if not ok.any():
            continue
        cand = np.empty((int(ok.sum()), k))
        cand[:, others] = vals[ok]
        cand[:, free] = free_val[ok]
        for row in cand:
            key = tuple(np.round(row / FEAS_TOL).astype(np.int64))
            if key not in seen:
                seen.add(key)
                out.append(row)
    if not out:
        raise InfeasibleIntervalsError("no credal vertex found; intervals infeasible")
    return np.array(out)
