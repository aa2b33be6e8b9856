"""Feature-selection evaluation: FSDEM score and stability, plus comparison metrics."""

__version__ = "0.1.0"

from .data import Dataset, NoiseSpec, ColumnSpec, generate_wealth_dummy, load_csv  # noqa: E402
from .evaluators import EvaluatorConfig, clustering_accuracy, hungarian_assignment, measure_curve  # noqa: E402
from .metrics import (  # noqa: E402
    FitnessWeights,
    MetricRange,
    ObservationCurve,
    bfi,
    build_curve,
    consistency_index,
    finite_differences,
    fitness,
    fsdem_score,
    kuncheva_stability,
    nogueira_stability,
    stability_score,
    subsample_observations,
    trapezoid_integral,
)
from .selectors import FeatureRanking, SelectorConfig, rank  # noqa: E402
