"""Utility-theoretic ranking and evaluation engine for semi-automated
text classification.

Given an external classifier's signed confidence scores over a
multi-label document set, this package ranks documents so that human
validation of a top-ranked prefix maximizes the expected error
reduction, and measures ranking quality with expected normalized error
reduction under an annotator-persistence user model.
"""

__version__ = "0.1.0"

from .model import ContingencyTable, LabelSet, ScoreMatrix, e_measure, f_beta, merge_tables
from .calibration import (
    CalibrationModel,
    CvScores,
    calibrate_sigma_macro,
    calibrate_sigma_micro,
    default_grid,
    membership_probability,
    misclassification_probability,
)
from .estimation import EstimatedTable, TrainingEstimates, ml_estimate, smooth_on_demand
from .ranking import (
    GainRule,
    ProbabilitySource,
    RankingConfig,
    Strategy,
    TableSource,
    ValidationSession,
    average_gains,
    document_utility,
    method_config,
    micro_gains,
    pointwise_gains,
    rank_static,
    round_robin_split,
    true_tables,
    utilities,
)
from .evaluation import (
    ErrorCurve,
    EvaluationReport,
    PersistenceModel,
    ener,
    error_reduction,
    evaluate_order,
    monte_carlo_random_ener,
    normalized_error_reduction,
    persistence_from_xi,
    residual_error_curve,
    stoppage_distribution,
)
from .simulation import SimulationRun, SplitSimulationRun, simulate, split_simulate
