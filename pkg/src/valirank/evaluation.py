"""Ranking-quality measures: residual-error curves, error reduction (ER),
its random-ranker-normalized form (NER), the annotator stoppage
distribution, and the expected normalized error reduction (ENER), plus a
Monte Carlo estimate of the random ranker's reference curve."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DataError, DegenerateInputError
from .model import LabelSet, ScoreMatrix

__all__ = [
    "ErrorCurve",
    "EvaluationReport",
    "PersistenceModel",
    "ener",
    "error_reduction",
    "evaluate_order",
    "monte_carlo_random_ener",
    "normalized_error_reduction",
    "persistence_from_xi",
    "residual_error_curve",
    "stoppage_distribution",
]


def persistence_from_xi(xi: float, n_docs: int) -> float:
    """Per-step continuation probability for an annotator expected to
    validate the fraction xi of n_docs: p = 1 - 1/(xi * n_docs)."""
    if n_docs < 1:
        raise ConfigurationError(f"n_docs must be >= 1, got {n_docs}")
    if not (0 < xi <= 1) or xi * n_docs < 1:
        raise ConfigurationError(
            f"xi={xi} needs xi in (0, 1] and xi * n_docs >= 1 (n_docs={n_docs})"
        )
    return 1.0 - 1.0 / (xi * n_docs)


@dataclass(frozen=True)
class PersistenceModel:
    """Continuation probability p, optionally derived from a target
    validated fraction xi."""

    p: float
    xi: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0):
            raise ConfigurationError(f"persistence p={self.p!r} must be in [0, 1]")

    @classmethod
    def from_xi(cls, xi: float, n_docs: int) -> "PersistenceModel":
        return cls(persistence_from_xi(xi, n_docs), xi)


def stoppage_distribution(p: float, n_docs: int) -> np.ndarray:
    """Probability of stopping exactly after the n-th document, for
    n = 1..n_docs: p^(n-1) * (1-p), with all remaining mass at n_docs.
    Sums to 1 exactly by telescoping."""
    if not (0.0 <= p <= 1.0):
        raise ConfigurationError(f"persistence p={p!r} must be in [0, 1]")
    if n_docs < 1:
        raise ConfigurationError(f"n_docs must be >= 1, got {n_docs}")
    powers = np.empty(n_docs)
    acc = 1.0
    for n in range(n_docs):
        powers[n] = acc
        acc *= p
    out = powers * (1.0 - p)
    out[-1] = powers[-1]
    return out


def ener(ner_values: Sequence[float], p: float) -> float:
    """Expectation of NER(n) under the stoppage distribution.

    `ner_values` holds NER(n) for n = 1..|Te|. The p^(n-1) weights are
    accumulated multiplicatively in double precision.
    """
    values = np.asarray(ner_values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DataError("NER values must be a non-empty 1-D sequence")
    weights = stoppage_distribution(p, values.size)
    return float(np.dot(weights, values))


@dataclass(frozen=True)
class ErrorCurve:
    """Residual error E(n) for n = 0..|Te|. Macro curves retain the
    per-class curves (one column per class, in class order)."""

    values: np.ndarray
    averaging: str
    classes: tuple[str, ...] = ()
    per_class: np.ndarray | None = None

    @property
    def n_docs(self) -> int:
        return self.values.size - 1


@dataclass(frozen=True)
class EvaluationReport:
    """ER/NER curves and ENER values for one ranking on one instance."""

    averaging: str
    er: np.ndarray
    ner: np.ndarray
    ener_by_xi: dict[float, float]
    excluded_classes: tuple[str, ...] = ()


def _correction_deltas(scores: ScoreMatrix, truth: LabelSet) -> tuple[np.ndarray, np.ndarray]:
    """Boolean doc-by-class masks of false positives and false negatives."""
    truth.check_universe(scores.docs, scores.classes)
    pred = scores.decisions()
    gold = truth.to_matrix(scores.docs, scores.classes)
    return pred & ~gold, ~pred & gold


def _order_indices(scores: ScoreMatrix, ranking: Sequence[str]) -> np.ndarray:
    idx = np.array([scores.doc_index(d) for d in ranking], dtype=np.intp)
    if idx.size != scores.n_docs or np.unique(idx).size != idx.size:
        raise DataError("ranking must be a permutation of the score matrix docs")
    return idx


def _table_trace(scores: ScoreMatrix, order: np.ndarray, fp_mask: np.ndarray,
                 fn_mask: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-class tp/fp/fn counts after each prefix of the ranking has
    been corrected; arrays of shape (n_docs + 1, n_classes)."""
    tp0 = ((scores.decisions() & ~fp_mask).sum(axis=0)).astype(np.float64)
    fp0 = fp_mask.sum(axis=0).astype(np.float64)
    fn0 = fn_mask.sum(axis=0).astype(np.float64)
    cum_fp = np.vstack([np.zeros(scores.n_classes), np.cumsum(fp_mask[order], axis=0)])
    cum_fn = np.vstack([np.zeros(scores.n_classes), np.cumsum(fn_mask[order], axis=0)])
    return tp0 + cum_fn, fp0 - cum_fp, fn0 - cum_fn


def _f_beta_array(tp: np.ndarray, fp: np.ndarray, fn: np.ndarray, beta: float) -> np.ndarray:
    b2 = beta * beta
    num = (1.0 + b2) * tp
    denom = num + fp + b2 * fn
    with np.errstate(invalid="ignore"):
        out = np.where(denom > 0, num / np.where(denom > 0, denom, 1.0), 1.0)
    return out


def residual_error_curve(
    ranking: Sequence[str],
    scores: ScoreMatrix,
    truth: LabelSet,
    averaging: str = "macro",
    beta: float = 1.0,
) -> ErrorCurve:
    """Error left in the test set after the first n ranked documents have
    been fully corrected, for n = 0..|Te|."""
    if averaging not in ("macro", "micro"):
        raise ConfigurationError(f"unknown averaging {averaging!r}")
    order = _order_indices(scores, ranking)
    fp_mask, fn_mask = _correction_deltas(scores, truth)
    tp, fp, fn = _table_trace(scores, order, fp_mask, fn_mask)
    if averaging == "micro":
        e = 1.0 - _f_beta_array(tp.sum(axis=1), fp.sum(axis=1), fn.sum(axis=1), beta)
        return ErrorCurve(e, "micro", scores.classes)
    per_class = 1.0 - _f_beta_array(tp, fp, fn, beta)
    return ErrorCurve(per_class.mean(axis=1), "macro", scores.classes, per_class)


def error_reduction(curve: ErrorCurve) -> tuple[np.ndarray, tuple[str, ...]]:
    """ER(n) = (E(0) - E(n)) / E(0).

    Micro curves with zero initial error are degenerate. Macro ER is the
    mean of the per-class ER curves; classes that start with zero error
    are excluded and reported alongside the curve.
    """
    if curve.averaging == "micro" or curve.per_class is None:
        e0 = curve.values[0]
        if e0 <= 0.0:
            raise DegenerateInputError("initial error is zero; error reduction is undefined")
        return (curve.values[0] - curve.values) / e0, ()
    e0 = curve.per_class[0]
    included = e0 > 0.0
    if not included.any():
        raise DegenerateInputError("every class starts with zero error")
    er_per_class = (e0[included] - curve.per_class[:, included]) / e0[included]
    excluded = tuple(c for c, keep in zip(curve.classes, included) if not keep)
    return er_per_class.mean(axis=1), excluded


def normalized_error_reduction(er: np.ndarray, n_docs: int) -> np.ndarray:
    """NER(n) = ER(n) - n/|Te|: the margin over the random ranker's
    expected reduction."""
    er = np.asarray(er, dtype=np.float64)
    if er.size != n_docs + 1:
        raise DataError(f"ER curve must have {n_docs + 1} entries, got {er.size}")
    return er - np.arange(n_docs + 1) / n_docs


def evaluate_order(
    ranking: Sequence[str],
    scores: ScoreMatrix,
    truth: LabelSet,
    averaging: str,
    xis: Sequence[float],
    beta: float = 1.0,
) -> EvaluationReport:
    """Full evaluation of one ranking: ER/NER curves and ENER per xi."""
    curve = residual_error_curve(ranking, scores, truth, averaging, beta)
    er, excluded = error_reduction(curve)
    ner = normalized_error_reduction(er, curve.n_docs)
    ener_by_xi = {
        float(xi): ener(ner[1:], persistence_from_xi(xi, curve.n_docs)) for xi in xis
    }
    return EvaluationReport(averaging, er, ner, ener_by_xi, excluded)


def monte_carlo_random_ener(
    scores: ScoreMatrix,
    truth: LabelSet,
    xis: Sequence[float],
    trials: int = 100,
    seed: int = 0,
    averaging: str = "micro",
    beta: float = 1.0,
) -> tuple[np.ndarray, dict[float, float]]:
    """Mean ER curve and mean ENER of uniformly random rankings, from a
    seeded generator. Returns (mean ER over n = 0..|Te|, {xi: mean ENER})."""
    if trials < 1:
        raise ConfigurationError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    n = scores.n_docs
    persistences = {float(xi): persistence_from_xi(xi, n) for xi in xis}
    er_sum = np.zeros(n + 1)
    ener_sums = {xi: 0.0 for xi in persistences}
    docs = list(scores.docs)
    for _ in range(trials):
        perm = rng.permutation(n)
        ranking = [docs[i] for i in perm]
        curve = residual_error_curve(ranking, scores, truth, averaging, beta)
        er, _ = error_reduction(curve)
        ner = normalized_error_reduction(er, n)
        er_sum += er
        for xi, p in persistences.items():
            ener_sums[xi] += ener(ner[1:], p)
    return er_sum / trials, {xi: s / trials for xi, s in ener_sums.items()}
