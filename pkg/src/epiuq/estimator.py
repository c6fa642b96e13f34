"""scikit-learn style front end for the uncertainty measures."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .credal import DEFAULT_SUBSET_CAP
from .intervals import DEFAULT_VERTEX_CAP
from .measures import resolve_measures, score_stack
from .simplex import check_prediction_set, check_prediction_stack, mean_prediction


class EpistemicUncertaintyScorer(BaseEstimator, TransformerMixin):
    """Turn stacks of prediction sets into per-sample uncertainty scores.

    The transform is stateless; ``fit`` only validates the input shape and
    pins the number of classes. ``X`` is an (N, M, K) array (N samples,
    M member distributions, K classes) or a sequence of (M_i, K) arrays
    when the member count varies per sample.

    Parameters
    ----------
    measures : str or sequence of str, default "all"
        Measure ids or a group name ("all", "dist", "credal").
    wd_method : {"auto", "dual", "median"}
        Solver for the Wasserstein measure; "auto" uses the binary
        median closed form when K = 2.
    vertex_cap, subset_cap : int
        Enumeration limits for the credal measures.
    """

    def __init__(
        self,
        measures="all",
        wd_method: str = "auto",
        vertex_cap: int = DEFAULT_VERTEX_CAP,
        subset_cap: int = DEFAULT_SUBSET_CAP,
    ):
        self.measures = measures
        self.wd_method = wd_method
        self.vertex_cap = vertex_cap
        self.subset_cap = subset_cap

    def _as_sets(self, X) -> list[np.ndarray]:
        if isinstance(X, np.ndarray) and X.ndim == 3:
            return list(check_prediction_stack(X))
        try:
            arr = np.asarray(X, dtype=float)
        except (ValueError, TypeError):
            arr = None
        if arr is not None and arr.ndim == 3:
            return list(check_prediction_stack(arr))
        return [check_prediction_set(s) for s in X]

    def fit(self, X, y=None):
        sets = self._as_sets(X)
        ks = {s.shape[1] for s in sets}
        if len(ks) != 1:
            raise ValueError(f"inconsistent class counts across samples: {sorted(ks)}")
        self.measures_ = resolve_measures(self.measures)
        self.n_classes_ = ks.pop()
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "measures_")
        sets = self._as_sets(X)
        for s in sets:
            if s.shape[1] != self.n_classes_:
                raise ValueError(
                    f"sample has {s.shape[1]} classes, fitted for {self.n_classes_}"
                )
        return score_stack(
            sets,
            self.measures_,
            wd_method=self.wd_method,
            vertex_cap=self.vertex_cap,
            subset_cap=self.subset_cap,
        )

    def predict(self, X) -> np.ndarray:
        """Top class of each sample's pooled mean prediction."""
        check_is_fitted(self, "measures_")
        return np.array([mean_prediction(s).argmax_class for s in self._as_sets(X)])

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "measures_")
        return np.asarray(self.measures_, dtype=object)
