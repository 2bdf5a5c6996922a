"""Mapping classifier confidence scores to probabilities.

A generalized logistic curve with growth rate sigma turns the signed
score into a class-membership probability; the misclassification
probability is its complement folded onto [0, 0.5]. Sigma is fitted on
cross-validated training scores by matching the expected number of
positive examples per class against the true number, either class by
class (macro) or on the global total (micro).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, DataError
from .model import LabelSet, ScoreMatrix

__all__ = [
    "CalibrationModel",
    "CvScores",
    "calibrate_sigma_macro",
    "calibrate_sigma_micro",
    "default_grid",
    "expected_positives",
    "macro_objective",
    "membership_probability",
    "micro_objective",
    "misclassification_probability",
]


@dataclass(frozen=True)
class CalibrationModel:
    """Fitted growth rate of the generalized logistic curve."""

    sigma: float

    def __post_init__(self) -> None:
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ConfigurationError(f"sigma must be positive and finite, got {self.sigma!r}")


@dataclass(frozen=True)
class CvScores:
    """Scores over training documents pooled from k-fold cross-validation,
    together with the training labels. k is informational only."""

    scores: ScoreMatrix
    labels: LabelSet
    folds: int = 10

    def __post_init__(self) -> None:
        if self.folds < 2:
            raise ConfigurationError(f"cross-validation folds must be >= 2, got {self.folds}")
        self.labels.check_universe(self.scores.docs, self.scores.classes)


def membership_probability(score, model: CalibrationModel):
    """Probability of class membership for a signed score: the logistic
    of sigma * score. Accepts scalars or arrays."""
    return expit(model.sigma * np.asarray(score, dtype=np.float64))


def misclassification_probability(score, model: CalibrationModel):
    """Probability that the sign decision is wrong, in (0, 0.5].

    This is 1 - logistic(sigma * |score|), computed directly as
    logistic(-sigma * |score|) so very confident scores underflow to 0
    instead of overflowing.
    """
    s = np.asarray(score, dtype=np.float64)
    return expit(-model.sigma * np.abs(s))


def default_grid(low: float = 1e-3, high: float = 1e3, count: int = 100) -> np.ndarray:
    """Log-spaced sigma candidates for the grid search."""
    if not (0 < low <= high) or count < 1:
        raise ConfigurationError("grid requires 0 < low <= high and count >= 1")
    return np.geomspace(low, high, count)


def expected_positives(cv: CvScores, sigma: float) -> np.ndarray:
    """Per-class expected number of positive training examples under
    sigma: the column sums of the membership probabilities."""
    return expit(sigma * cv.scores.values).sum(axis=0)


def _true_positives_per_class(cv: CvScores) -> np.ndarray:
    return cv.labels.to_matrix(cv.scores.docs, cv.scores.classes).sum(axis=0).astype(np.float64)


def macro_objective(true_pos: Sequence[float], expected_pos: Sequence[float]) -> float:
    """Mean absolute per-class residual between the true and expected
    positive counts."""
    t = np.asarray(true_pos, dtype=np.float64)
    e = np.asarray(expected_pos, dtype=np.float64)
    if t.shape != e.shape or t.size == 0:
        raise DataError("true and expected positive counts must be equally-sized, non-empty")
    return float(np.mean(np.abs(t - e)))

def micro_objective(true_pos: Sequence[float], expected_pos: Sequence[float]) -> float:
    """Absolute residual between the global true and expected positive
    totals."""
    t = np.asarray(true_pos, dtype=np.float64)
    e = np.asarray(expected_pos, dtype=np.float64)
    if t.shape != e.shape or t.size == 0:
        raise DataError("true and expected positive counts must be equally-sized, non-empty")
    return float(abs(t.sum() - e.sum()))


def _grid_search(cv: CvScores, grid: Sequence[float], objective) -> CalibrationModel:
    candidates = np.asarray(list(grid), dtype=np.float64)
    if candidates.size == 0:
        raise ConfigurationError("sigma grid is empty")
    if np.any(candidates <= 0) or not np.all(np.isfinite(candidates)):
        raise ConfigurationError("sigma grid candidates must all be positive and finite")
    true_pos = _true_positives_per_class(cv)
    best_sigma = None
    best_value = math.inf
    # Ties resolve to the smallest sigma: flatter probabilities are the
    # more conservative choice.
    for sigma in sorted(candidates):
        value = objective(true_pos, expected_positives(cv, sigma))
        if value < best_value:
            best_sigma, best_value = sigma, value
    return CalibrationModel(float(best_sigma))


def calibrate_sigma_macro(cv: CvScores, grid: Sequence[float]) -> CalibrationModel:
    """Pick the grid candidate minimizing the macro (per-class averaged)
    positive-count residual."""
    return _grid_search(cv, grid, macro_objective)


def calibrate_sigma_micro(cv: CvScores, grid: Sequence[float]) -> CalibrationModel:
    """Pick the grid candidate minimizing the micro (global total)
    positive-count residual."""
    return _grid_search(cv, grid, micro_objective)
