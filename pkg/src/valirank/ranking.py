"""Validation gains, per-document expected utilities, and the static and
dynamic ranking strategies (baseline, utility-theoretic, and oracle
variants, in macro- and micro-oriented flavors).

The expected utility of validating a document is, summed over classes,
the probability that its label for the class is wrong times the gain
from correcting that kind of error. Correct labels contribute nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence, TypeVar

import numpy as np

from .calibration import CalibrationModel, misclassification_probability
from .errors import ConfigurationError, DataError, ProtocolError
from .estimation import EstimatedTable, TrainingEstimates, ml_estimate, smooth_on_demand
from .model import ContingencyTable, LabelSet, ScoreMatrix, f_beta, merge_tables

__all__ = [
    "GainRule",
    "ProbabilitySource",
    "RankingConfig",
    "Strategy",
    "TableSource",
    "ValidationSession",
    "average_gains",
    "document_utility",
    "method_config",
    "micro_gains",
    "pointwise_gains",
    "rank_static",
    "round_robin_split",
    "true_tables",
    "utilities",
]

T = TypeVar("T")


class GainRule(str, Enum):
    UNIT = "unit"
    AVERAGE = "average"
    POINTWISE = "pointwise"
    MICRO_AVERAGE = "micro_average"
    MICRO_POINTWISE = "micro_pointwise"

    @property
    def is_micro(self) -> bool:
        return self in (GainRule.MICRO_AVERAGE, GainRule.MICRO_POINTWISE)


class Strategy(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@dataclass(frozen=True)
class ProbabilitySource:
    """Where misclassification probabilities come from: a calibrated
    logistic model, or the gold labels themselves (0/1 probabilities)."""

    model: CalibrationModel | None = None
    truth: LabelSet | None = None

    def __post_init__(self) -> None:
        if (self.model is None) == (self.truth is None):
            raise ConfigurationError(
                "probability source needs exactly one of a calibration model or gold labels"
            )

    @classmethod
    def calibrated(cls, model: CalibrationModel) -> "ProbabilitySource":
        return cls(model=model)

    @classmethod
    def oracle_truth(cls, truth: LabelSet) -> "ProbabilitySource":
        return cls(truth=truth)


@dataclass(frozen=True)
class TableSource:
    """Where contingency tables come from: training-set estimates, or the
    true counts read off the gold labels."""

    estimates: TrainingEstimates | None = None
    truth: LabelSet | None = None

    def __post_init__(self) -> None:
        if (self.estimates is None) == (self.truth is None):
            raise ConfigurationError(
                "table source needs exactly one of training estimates or gold labels"
            )

    @classmethod
    def estimated(cls, estimates: TrainingEstimates) -> "TableSource":
        return cls(estimates=estimates)

    @classmethod
    def oracle_counts(cls, truth: LabelSet) -> "TableSource":
        return cls(truth=truth)


@dataclass(frozen=True)
class RankingConfig:
    gain_rule: GainRule
    prob_source: ProbabilitySource
    strategy: Strategy = Strategy.STATIC
    table_source: TableSource | None = None
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigurationError(f"beta must be positive and finite, got {self.beta!r}")
        if self.gain_rule is not GainRule.UNIT and self.table_source is None:
            raise ConfigurationError(f"gain rule {self.gain_rule.value} requires a table source")


def method_config(
    method: str,
    strategy: Strategy,
    averaging: str,
    *,
    beta: float = 1.0,
    model: CalibrationModel | None = None,
    estimates: TrainingEstimates | None = None,
    gold: LabelSet | None = None,
) -> RankingConfig:
    """Assemble the configuration for one of the named ranking methods.

    baseline ranks by summed misclassification probability (unit gains);
    utheoretic uses estimated tables; oracle1 swaps in true counts;
    oracle2 additionally swaps in true 0/1 error indicators.
    """
    if averaging not in ("macro", "micro"):
        raise ConfigurationError(f"unknown averaging {averaging!r}")
    if method == "baseline":
        if model is None:
            raise ConfigurationError("baseline requires a calibration model")
        return RankingConfig(GainRule.UNIT, ProbabilitySource.calibrated(model), Strategy.STATIC, beta=beta)
    if strategy is Strategy.STATIC:
        rule = GainRule.AVERAGE if averaging == "macro" else GainRule.MICRO_AVERAGE
    else:
        rule = GainRule.POINTWISE if averaging == "macro" else GainRule.MICRO_POINTWISE
    if method == "utheoretic":
        if model is None or estimates is None:
            raise ConfigurationError("utheoretic requires a calibration model and estimates")
        return RankingConfig(rule, ProbabilitySource.calibrated(model), strategy,
                             TableSource.estimated(estimates), beta)
    if method == "oracle1":
        if model is None or gold is None:
            raise ConfigurationError("oracle1 requires a calibration model and gold labels")
        return RankingConfig(rule, ProbabilitySource.calibrated(model), strategy,
                             TableSource.oracle_counts(gold), beta)
    if method == "oracle2":
        if gold is None:
            raise ConfigurationError("oracle2 requires gold labels")
        return RankingConfig(rule, ProbabilitySource.oracle_truth(gold), strategy,
                             TableSource.oracle_counts(gold), beta)
    raise ConfigurationError(f"unknown method {method!r}")


def _require_smoothed(est: EstimatedTable) -> ContingencyTable:
    t = est.table
    if min(t.tp, t.fp, t.fn) < 1.0:
        raise DataError(
            f"gain formulas need tp, fp, fn >= 1; got ({t.tp}, {t.fp}, {t.fn}) "
            "(apply smooth_on_demand first)"
        )
    return t


def average_gains(est: EstimatedTable, beta: float = 1.0) -> tuple[float, float]:
    """Average gain per corrected error: the effectiveness improvement
    from fixing every false positive (resp. negative), divided by their
    count."""
    t = _require_smoothed(est)
    base = f_beta(t, beta)
    g_fp = (f_beta(ContingencyTable(t.tp, 0.0, t.fn), beta) - base) / t.fp
    g_fn = (f_beta(ContingencyTable(t.tp + t.fn, t.fp, 0.0), beta) - base) / t.fn
    return g_fp, g_fn


def pointwise_gains(est: EstimatedTable, beta: float = 1.0) -> tuple[float, float]:
    """Marginal gain of the next single correction of each error type."""
    t = _require_smoothed(est)
    base = f_beta(t, beta)
    g_fp = f_beta(ContingencyTable(t.tp, t.fp - 1.0, t.fn), beta) - base
    g_fn = f_beta(ContingencyTable(t.tp + 1.0, t.fp, t.fn - 1.0), beta) - base
    return g_fp, g_fn


def micro_gains(global_est: EstimatedTable, beta: float = 1.0,
                flavor: str = "average") -> tuple[float, float]:
    """Gains computed on the single merged table; one pair shared by all
    classes."""
    if flavor == "average":
        return average_gains(global_est, beta)
    if flavor == "pointwise":
        return pointwise_gains(global_est, beta)
    raise ConfigurationError(f"unknown micro gain flavor {flavor!r}")


def true_tables(scores: ScoreMatrix, gold: LabelSet) -> dict[str, ContingencyTable]:
    """Per-class contingency tables of the decisions against gold labels
    (tn included; it is actually known here)."""
    gold.check_universe(scores.docs, scores.classes)
    pred = scores.decisions()
    truth = gold.to_matrix(scores.docs, scores.classes)
    tp = (pred & truth).sum(axis=0)
    fp = (pred & ~truth).sum(axis=0)
    fn = (~pred & truth).sum(axis=0)
    tn = (~pred & ~truth).sum(axis=0)
    return {
        cls: ContingencyTable(float(tp[j]), float(fp[j]), float(fn[j]), float(tn[j]))
        for j, cls in enumerate(scores.classes)
    }


def _raw_tables(scores: ScoreMatrix, config: RankingConfig) -> dict[str, ContingencyTable]:
    source = config.table_source
    assert source is not None
    if source.truth is not None:
        return true_tables(scores, source.truth)
    tables = {}
    for cls in scores.classes:
        tables[cls] = ml_estimate(source.estimates, cls)
    return tables


def probability_matrix(scores: ScoreMatrix, prob_source: ProbabilitySource) -> np.ndarray:
    """Docs-by-classes matrix of error probabilities: P(fp) where the
    decision is positive, P(fn) where it is negative."""
    if prob_source.model is not None:
        return misclassification_probability(scores.values, prob_source.model)
    prob_source.truth.check_universe(scores.docs, scores.classes)
    wrong = scores.decisions() != prob_source.truth.to_matrix(scores.docs, scores.classes)
    return wrong.astype(np.float64)


def _gain_vectors(scores: ScoreMatrix, config: RankingConfig) -> tuple[np.ndarray, np.ndarray]:
    n = scores.n_classes
    if n == 0:
        return np.zeros(0), np.zeros(0)
    if config.gain_rule is GainRule.UNIT:
        return np.ones(n), np.ones(n)
    raw = _raw_tables(scores, config)
    if config.gain_rule.is_micro:
        merged = smooth_on_demand(merge_tables(raw.values()))
        flavor = "average" if config.gain_rule is GainRule.MICRO_AVERAGE else "pointwise"
        g_fp, g_fn = micro_gains(merged, config.beta, flavor)
        return np.full(n, g_fp), np.full(n, g_fn)
    gain_of = average_gains if config.gain_rule is GainRule.AVERAGE else pointwise_gains
    pairs = [gain_of(smooth_on_demand(raw[cls]), config.beta) for cls in scores.classes]
    arr = np.array(pairs, dtype=np.float64)
    return arr[:, 0], arr[:, 1]


def utilities(scores: ScoreMatrix, config: RankingConfig) -> np.ndarray:
    """Expected utility of validating each document, aligned with
    scores.docs."""
    g_fp, g_fn = _gain_vectors(scores, config)
    p = probability_matrix(scores, config.prob_source)
    pos = scores.decisions()
    return (p * pos) @ g_fp + (p * ~pos) @ g_fn


def document_utility(
    doc: str,
    scores: ScoreMatrix,
    gains: Mapping[str, tuple[float, float]],
    prob_source: ProbabilitySource,
) -> float:
    """Expected utility of validating one document given per-class
    (g_fp, g_fn) gains."""
    i = scores.doc_index(doc)
    p = probability_matrix(scores, prob_source)[i]
    total = 0.0
    for j, cls in enumerate(scores.classes):
        try:
            g_fp, g_fn = gains[cls]
        except KeyError:
            raise DataError(f"no gains for class {cls!r}") from None
        total += p[j] * (g_fp if scores.values[i, j] > 0.0 else g_fn)
    return total


def rank_static(scores: ScoreMatrix, config: RankingConfig) -> list[tuple[str, float]]:
    """Rank all documents by descending utility, ties broken by ascending
    doc id. Deterministic."""
    u = utilities(scores, config)
    # Rows are stored in lexicographic doc order, so a stable sort on -u
    # breaks ties by ascending doc id.
    order = np.argsort(-u, kind="stable")
    return [(scores.docs[i], float(u[i])) for i in order]


def round_robin_split(ranking: Sequence[T], k: int) -> list[list[T]]:
    """Split a ranking among k annotators: annotator i gets the items at
    global positions r with r mod k == i, order preserved."""
    if k < 1:
        raise ConfigurationError(f"round-robin split needs k >= 1, got {k}")
    return [list(ranking[i::k]) for i in range(k)]


class ValidationSession:
    """Mutable state of an annotator working down a ranking.

    Single-writer: next_document / apply_correction must be called
    serially. Static sessions serve a precomputed order; dynamic sessions
    re-select the argmax-utility document after every correction.
    Probabilities are calibrated once and never recomputed here.
    """

    def __init__(self, scores: ScoreMatrix, config: RankingConfig):
        self.scores = scores
        self.config = config
        self._pos = scores.decisions()
        p = probability_matrix(scores, config.prob_source)
        self._a = p * self._pos  # contribution weights toward g_fp
        self._b = p * ~self._pos  # contribution weights toward g_fn
        self._row_a = self._a.sum(axis=1)
        self._row_b = self._b.sum(axis=1)

        if config.gain_rule is GainRule.UNIT or scores.n_classes == 0:
            self._tables: dict[str, EstimatedTable] = {}
            self._global: EstimatedTable | None = None
        else:
            raw = _raw_tables(scores, config)
            self._tables = {cls: smooth_on_demand(t) for cls, t in raw.items()}
            self._global = smooth_on_demand(merge_tables(raw.values()))
        self._g_fp, self._g_fn = _gain_vectors(scores, config)
        self._utility = (self._a @ self._g_fp) + (self._b @ self._g_fn)

        self._validated = np.zeros(scores.n_docs, dtype=bool)
        self._remaining = scores.n_docs
        self._pending: str | None = None
        self.visited: list[str] = []
        if config.strategy is Strategy.STATIC:
            self._static_order = [doc for doc, _ in rank_static(scores, config)]
        else:
            self._static_order = None

    @property
    def exhausted(self) -> bool:
        return self._remaining == 0

    @property
    def remaining(self) -> int:
        return self._remaining

    def next_document(self) -> str | None:
        """The document to validate next, or None when exhausted.
        Idempotent until the document is consumed by apply_correction."""
        if self._remaining == 0:
            return None
        if self._pending is None:
            if self._static_order is not None:
                self._pending = self._static_order[len(self.visited)]
            else:
                live = np.flatnonzero(~self._validated)
                # argmax returns the first maximum; rows are in
                # lexicographic doc order, so ties break by ascending id.
                best = live[int(np.argmax(self._utility[live]))]
                self._pending = self.scores.docs[best]
        return self._pending

    def utility_of(self, doc: str) -> float:
        return float(self._utility[self.scores.doc_index(doc)])

    def error_probabilities(self, doc: str) -> dict[str, float]:
        """Per-class probability that the document's label is wrong."""
        i = self.scores.doc_index(doc)
        row = self._a[i] + self._b[i]
        return {cls: float(row[j]) for j, cls in enumerate(self.scores.classes)}

    def predicted_labels(self, doc: str) -> dict[str, int]:
        i = self.scores.doc_index(doc)
        return {cls: (1 if self._pos[i, j] else -1) for j, cls in enumerate(self.scores.classes)}

    def apply_correction(self, doc: str, flipped: set[str]) -> None:
        """Record the annotator's verdict on the pending document: the
        labels of the classes in `flipped` were wrong. Updates contingency
        tables, re-smooths on demand, and recomputes gains."""
        if doc != self.next_document():
            raise ProtocolError(f"doc {doc!r} is not the pending document")
        i = self.scores.doc_index(doc)
        for cls in flipped:
            j = self.scores.class_index(cls)
            self._apply_class_flip(i, j, cls)
        self._validated[i] = True
        self._remaining -= 1
        self.visited.append(doc)
        self._pending = None

    def _apply_class_flip(self, i: int, j: int, cls: str) -> None:
        if self.config.gain_rule is GainRule.UNIT:
            return  # unit gains never change; dynamic updates are no-ops
        positive = bool(self._pos[i, j])
        self._tables[cls] = self._bump(self._tables[cls], positive)
        self._global = self._bump(self._global, positive)
        if self._static_order is not None:
            return  # static sessions track estimates but never re-rank
        if self.config.gain_rule.is_micro:
            flavor = "average" if self.config.gain_rule is GainRule.MICRO_AVERAGE else "pointwise"
            g_fp, g_fn = micro_gains(self._global, self.config.beta, flavor)
            self._utility += self._row_a * (g_fp - self._g_fp[0])
            self._utility += self._row_b * (g_fn - self._g_fn[0])
            self._g_fp[:] = g_fp
            self._g_fn[:] = g_fn
        else:
            gain_of = (
                average_gains if self.config.gain_rule is GainRule.AVERAGE else pointwise_gains
            )
            g_fp, g_fn = gain_of(self._tables[cls], self.config.beta)
            self._utility += self._a[:, j] * (g_fp - self._g_fp[j])
            self._utility += self._b[:, j] * (g_fn - self._g_fn[j])
            self._g_fp[j] = g_fp
            self._g_fn[j] = g_fn

    @staticmethod
    def _bump(est: EstimatedTable, was_positive: bool) -> EstimatedTable:
        t = est.table
        if was_positive:  # a false positive was corrected
            updated = ContingencyTable(t.tp, t.fp - 1.0, t.fn, t.tn)
        else:  # a false negative became a true positive
            updated = ContingencyTable(t.tp + 1.0, t.fp, t.fn - 1.0, t.tn)
        return smooth_on_demand(updated)

    def current_tables(self) -> dict[str, ContingencyTable]:
        return {cls: est.table for cls, est in self._tables.items()}

    def estimated_f_beta(self) -> dict[str, float]:
        """Live estimate of effectiveness from the current tables, both
        macro and micro averaged. Unit-gain sessions track no tables."""
        if not self._tables:
            return {}
        beta = self.config.beta
        per_class = [f_beta(est.table, beta) for est in self._tables.values()]
        merged = merge_tables(est.table for est in self._tables.values())
        return {
            "macro": float(np.mean(per_class)),
            "micro": f_beta(merged, beta),
        }
