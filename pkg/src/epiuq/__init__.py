"""Second-order uncertainty toolkit.

Builds two representations of a finite set of predictive distributions
(the set itself, and the credal set induced by its class-wise probability
envelope), scores both with epistemic-uncertainty measures, evaluates the
scores on selective prediction and OOD detection, and ranks measures with
pairwise one-sided Wilcoxon net wins.
"""

__version__ = "0.1.0"

from .benchmarks import (
    AccuracyRejectionCurve,
    DetectionResult,
    EvaluationRecord,
    auarc,
    default_beta_grid,
    ood_detection,
    selective_prediction,
)
from .credal import (
    DEFAULT_SUBSET_CAP,
    EntropyExtremum,
    MoebiusMass,
    binary_entropy_difference,
    entropy_difference,
    generalized_hartley,
    max_entropy,
    max_mean_imprecision,
    min_entropy,
    moebius_mass,
)
from .distribution import (
    label_wise_variance,
    mutual_information,
    wasserstein_dispersion,
)
from .estimator import EpistemicUncertaintyScorer
from .exceptions import (
    DataFormatError,
    EnumerationCapError,
    InfeasibleIntervalsError,
    NumericalError,
)
from .intervals import (
    DEFAULT_VERTEX_CAP,
    ProbabilityIntervals,
    build_intervals,
    credal_vertices,
    subset_complement,
    subset_indices,
    subset_mask,
    subset_size,
)
from .measures import (
    CREDAL_MEASURES,
    DISTRIBUTION_MEASURES,
    MEASURE_IDS,
    resolve_measures,
    score_prediction_set,
    score_stack,
)
from .oracles import (
    SimplexGrid,
    auroc_pair_count,
    default_grid_step,
    grid_minimize,
    wilcoxon_exact_enum,
)
from .ranking import (
    SCOPE_MEASURES,
    NetWinTable,
    PairTest,
    RunMatrix,
    WilcoxonResult,
    aggregate_net_wins,
    net_wins,
    wilcoxon_one_sided,
)
from .simplex import (
    MeanPrediction,
    check_prediction_set,
    check_prediction_stack,
    check_probability_vector,
    entropy,
    mean_prediction,
)
from .synth import synth_generate

__all__ = [
    "__version__",
    "AccuracyRejectionCurve",
    "DetectionResult",
    "EvaluationRecord",
    "auarc",
    "default_beta_grid",
    "ood_detection",
    "selective_prediction",
    "DEFAULT_SUBSET_CAP",
    "EntropyExtremum",
    "MoebiusMass",
    "binary_entropy_difference",
    "entropy_difference",
    "generalized_hartley",
    "max_entropy",
    "max_mean_imprecision",
    "min_entropy",
    "moebius_mass",
    "label_wise_variance",
    "mutual_information",
    "wasserstein_dispersion",
    "EpistemicUncertaintyScorer",
    "DataFormatError",
    "EnumerationCapError",
    "InfeasibleIntervalsError",
    "NumericalError",
    "DEFAULT_VERTEX_CAP",
    "ProbabilityIntervals",
    "build_intervals",
    "credal_vertices",
    "subset_complement",
    "subset_indices",
    "subset_mask",
    "subset_size",
    "CREDAL_MEASURES",
    "DISTRIBUTION_MEASURES",
    "MEASURE_IDS",
    "resolve_measures",
    "score_prediction_set",
    "score_stack",
    "SimplexGrid",
    "auroc_pair_count",
    "default_grid_step",
    "grid_minimize",
    "wilcoxon_exact_enum",
    "SCOPE_MEASURES",
    "NetWinTable",
    "PairTest",
    "RunMatrix",
    "WilcoxonResult",
    "aggregate_net_wins",
    "net_wins",
    "wilcoxon_one_sided",
    "MeanPrediction",
    "check_prediction_set",
    "check_prediction_stack",
    "check_probability_vector",
    "entropy",
    "mean_prediction",
    "synth_generate",
]
