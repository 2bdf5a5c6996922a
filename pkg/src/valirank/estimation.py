"""Estimating test-set contingency tables from cross-validated training
counts, and the on-demand additive smoothing that keeps every gain
formula well-defined."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

from .errors import DataError
from .model import ContingencyTable

__all__ = ["EstimatedTable", "TrainingEstimates", "ml_estimate", "smooth_on_demand"]


@dataclass(frozen=True)
class TrainingEstimates:
    """Per-class tp/fp/fn counts observed in cross-validation on the
    training set, plus the train and test sizes used for scaling."""

    counts: Mapping[str, ContingencyTable]
    train_size: int
    test_size: int

    def __post_init__(self) -> None:
        if self.train_size < 1 or self.test_size < 1:
            raise DataError(
                f"train/test sizes must be >= 1, got {self.train_size}/{self.test_size}"
            )
        object.__setattr__(self, "counts", MappingProxyType(dict(self.counts)))

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(sorted(self.counts))


@dataclass(frozen=True)
class EstimatedTable:
    """A contingency table plus a flag recording whether additive
    smoothing was applied. Smoothed tables have tp, fp, fn all >= 1."""

    table: ContingencyTable
    smoothed: bool


def ml_estimate(estimates: TrainingEstimates, cls: str) -> ContingencyTable:
    """Maximum-likelihood test-set table for one class: each training
    count scaled by test_size / train_size. tn is never estimated."""
    try:
        counts = estimates.counts[cls]
    except KeyError:
        raise DataError(f"no training estimates for class {cls!r}") from None
    scale = estimates.test_size / estimates.train_size
    return ContingencyTable(counts.tp * scale, counts.fp * scale, counts.fn * scale)


def smooth_on_demand(table: ContingencyTable) -> EstimatedTable:
    """Add 1 to each of tp, fp, fn, but only when some cell is below 1.

    Compliant tables pass through untouched so repeated smoothing never
    disrupts the estimated cell proportions; the operation is idempotent.
    """
    if min(table.tp, table.fp, table.fn) < 1.0:
        return EstimatedTable(
            ContingencyTable(table.tp + 1.0, table.fp + 1.0, table.fn + 1.0, table.tn),
            smoothed=True,
        )
    return EstimatedTable(table, smoothed=False)
