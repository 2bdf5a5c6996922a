"""Replaying gold labels as a perfect annotator over a ranking strategy,
producing full evaluation curves; includes the randomized test-set split
variant that averages curves across equally-sized parts."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DegenerateInputError
from .estimation import TrainingEstimates
from .evaluation import EvaluationReport, evaluate_order
from .model import LabelSet, ScoreMatrix
from .ranking import (
    ProbabilitySource,
    RankingConfig,
    Strategy,
    TableSource,
    ValidationSession,
    rank_static,
)

__all__ = ["SimulationRun", "SplitSimulationRun", "simulate", "split_simulate"]


@dataclass(frozen=True)
class SimulationRun:
    """Outcome of one simulated validation pass: the visit order, one
    evaluation report per averaging mode, and wall-clock timings for the
    ranking and sweep phases."""

    config: RankingConfig
    visit_order: tuple[str, ...]
    reports: dict[str, EvaluationReport]
    timings: dict[str, float]


@dataclass(frozen=True)
class SplitSimulationRun:
    """Averaged outcome over k random test-set parts. Curves live on a
    common prefix-fraction grid; ENER values are means across parts."""

    config: RankingConfig
    parts: int
    seed: int
    fractions: np.ndarray
    er: dict[str, np.ndarray]
    ener_by_xi: dict[str, dict[float, float]]
    part_runs: tuple[SimulationRun, ...]
    skipped_parts: tuple[int, ...] = ()


def _visit_order(scores: ScoreMatrix, gold: LabelSet, config: RankingConfig) -> tuple[list[str], dict[str, float]]:
    timings: dict[str, float] = {}
    if config.strategy is Strategy.STATIC:
        t0 = time.perf_counter()
        order = [doc for doc, _ in rank_static(scores, config)]
        timings["rank"] = time.perf_counter() - t0
        return order, timings
    pred = scores.decisions()
    truth = gold.to_matrix(scores.docs, scores.classes)
    wrong = pred != truth
    t0 = time.perf_counter()
    session = ValidationSession(scores, config)
    order: list[str] = []
    while (doc := session.next_document()) is not None:
        i = scores.doc_index(doc)
        flipped = {scores.classes[j] for j in np.flatnonzero(wrong[i])}
        session.apply_correction(doc, flipped)
        order.append(doc)
    timings["rank"] = time.perf_counter() - t0
    return order, timings


def simulate(
    scores: ScoreMatrix,
    gold: LabelSet,
    config: RankingConfig,
    xis: Sequence[float],
) -> SimulationRun:
    """Run the full protocol: rank (or drive the dynamic loop with an
    infallible annotator), then sweep the visit order computing ER/NER
    curves and ENER for every requested xi, macro and micro."""
    if gold is None or len(scores.docs) == 0:
        raise ConfigurationError("simulation requires gold labels and a non-empty test set")
    gold.check_universe(scores.docs, scores.classes)
    order, timings = _visit_order(scores, gold, config)
    t0 = time.perf_counter()
    reports = {
        mode: evaluate_order(order, scores, gold, mode, xis, config.beta)
        for mode in ("macro", "micro")
    }
    timings["sweep"] = time.perf_counter() - t0
    return SimulationRun(config, tuple(order), reports, timings)


def _subset(scores: ScoreMatrix, gold: LabelSet, doc_ids: Sequence[str]) -> tuple[ScoreMatrix, LabelSet]:
    keep = set(doc_ids)
    rows = [scores.doc_index(d) for d in doc_ids]
    sub = ScoreMatrix(doc_ids, scores.classes, scores.values[rows])
    sub_gold = LabelSet((d, c) for d, c in gold.pairs if d in keep)
    return sub, sub_gold


def _part_config(config: RankingConfig, sub_gold: LabelSet, part_size: int) -> RankingConfig:
    """Retarget a configuration at one part of the split: oracle sources
    point at the part's gold labels, and estimated tables scale to the
    part size rather than the whole test set."""
    cfg = config
    if config.prob_source.truth is not None:
        cfg = replace(cfg, prob_source=ProbabilitySource.oracle_truth(sub_gold))
    source = config.table_source
    if source is not None:
        if source.truth is not None:
            cfg = replace(cfg, table_source=TableSource.oracle_counts(sub_gold))
        else:
            est = source.estimates
            rescaled = TrainingEstimates(dict(est.counts), est.train_size, part_size)
            cfg = replace(cfg, table_source=TableSource.estimated(rescaled))
    return cfg


def split_simulate(
    scores: ScoreMatrix,
    gold: LabelSet,
    config: RankingConfig,
    xis: Sequence[float],
    parts: int,
    seed: int = 0,
) -> SplitSimulationRun:
    """Randomly partition the test set into `parts` near-equal parts,
    simulate each independently, and average the ER curves pointwise on a
    common prefix-fraction axis (linear interpolation when part sizes
    differ). Parts with zero initial error are skipped and recorded."""
    if parts < 1:
        raise ConfigurationError(f"parts must be >= 1, got {parts}")
    if parts > scores.n_docs:
        raise ConfigurationError(f"cannot split {scores.n_docs} docs into {parts} parts")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(scores.n_docs)
    chunks = np.array_split(perm, parts)

    runs: list[SimulationRun] = []
    skipped: list[int] = []
    for k, chunk in enumerate(chunks):
        part_docs = [scores.docs[i] for i in chunk]
        sub, sub_gold = _subset(scores, gold, part_docs)
        try:
            runs.append(simulate(sub, sub_gold, _part_config(config, sub_gold, sub.n_docs), xis))
        except DegenerateInputError:
            # a part whose initial error is zero contributes no curve
            skipped.append(k)
    if not runs:
        raise ConfigurationError("every part of the split was degenerate")

    grid_len = min(run.reports["micro"].er.size for run in runs)
    fractions = np.linspace(0.0, 1.0, grid_len)
    er: dict[str, np.ndarray] = {}
    ener_by_xi: dict[str, dict[float, float]] = {}
    for mode in ("macro", "micro"):
        stacked = []
        for run in runs:
            rep = run.reports[mode]
            part_frac = np.linspace(0.0, 1.0, rep.er.size)
            stacked.append(np.interp(fractions, part_frac, rep.er))
        er[mode] = np.mean(stacked, axis=0)
        ener_by_xi[mode] = {
            float(xi): float(np.mean([run.reports[mode].ener_by_xi[float(xi)] for run in runs]))
            for xi in xis
        }
    return SplitSimulationRun(
        config, parts, seed, fractions, er, ener_by_xi, tuple(runs), tuple(skipped)
    )
