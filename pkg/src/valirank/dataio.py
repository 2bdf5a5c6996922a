"""File formats and dataset bundling.

Formats (all UTF-8 text, TAB-separated, '.' decimal separator):

* scores:    header ``doc<TAB>class<TAB>score``, one record per line.
* labels:    no header, ``doc<TAB>class`` for every positive pair.
* estimates: header ``class<TAB>tp<TAB>fp<TAB>fn``.
* ranking:   header ``rank<TAB>doc_id<TAB>utility``, rank starting at 1.
* curves:    comma-separated, header ``n,fraction,value``.
* reports:   YAML (key-value with nested sections), keys sorted.

Writers are deterministic byte-for-byte for identical inputs.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
import yaml

from .calibration import CvScores
from .errors import ConfigurationError, DataError
from .estimation import TrainingEstimates
from .model import ContingencyTable, LabelSet, ScoreMatrix

__all__ = [
    "DatasetBundle",
    "derive_training_estimates",
    "format_float",
    "load_estimates",
    "load_labels",
    "load_ranking",
    "load_report",
    "load_scores",
    "write_curve",
    "write_estimates",
    "write_labels",
    "write_ranking",
    "write_report",
    "write_scores",
]

SCORES_HEADER = "doc\tclass\tscore"
ESTIMATES_HEADER = "class\ttp\tfp\tfn"
RANKING_HEADER = "rank\tdoc_id\tutility"
CURVE_HEADER = "n,fraction,value"


def format_float(value: float) -> str:
    """Canonical decimal rendering used by every writer: the shortest
    string that parses back to exactly the same double."""
    return repr(float(value))


def load_scores(path: str | Path) -> ScoreMatrix:
    """Parse a scores file, rejecting duplicates and non-finite values."""
    path = Path(path)
    seen: dict[tuple[str, str], float] = {}
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != SCORES_HEADER:
            raise DataError(f"{path}:1: expected header {SCORES_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
            doc, cls, raw = parts
            try:
                score = float(raw)
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad score {raw!r}") from None
            if not np.isfinite(score):
                raise DataError(f"{path}:{lineno}: score must be finite, got {raw}")
            if (doc, cls) in seen:
                raise DataError(f"{path}:{lineno}: duplicate pair ({doc!r}, {cls!r})")
            seen[(doc, cls)] = score
    if not seen:
        # header-only file: an empty (zero-doc) dataset
        return ScoreMatrix((), (), np.zeros((0, 0)))
    return ScoreMatrix.from_mapping(seen)


def write_scores(scores: ScoreMatrix, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(SCORES_HEADER + "\n")
        for i, doc in enumerate(scores.docs):
            for j, cls in enumerate(scores.classes):
                fh.write(f"{doc}\t{cls}\t{format_float(scores.values[i, j])}\n")


def load_labels(path: str | Path) -> LabelSet:
    """Parse a positives-only label file. An empty file means all-negative."""
    path = Path(path)
    pairs = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 tab-separated fields")
            pairs.append((parts[0], parts[1]))
    return LabelSet(pairs)


def write_labels(labels: LabelSet, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc, cls in sorted(labels.pairs):
            fh.write(f"{doc}\t{cls}\n")


def load_estimates(path: str | Path, train_size: int, test_size: int) -> TrainingEstimates:
    path = Path(path)
    counts: dict[str, ContingencyTable] = {}
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != ESTIMATES_HEADER:
            raise DataError(f"{path}:1: expected header {ESTIMATES_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 tab-separated fields")
            cls = parts[0]
            if cls in counts:
                raise DataError(f"{path}:{lineno}: duplicate class {cls!r}")
            try:
                tp, fp, fn = (float(x) for x in parts[1:])
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad count") from None
            counts[cls] = ContingencyTable(tp, fp, fn)
    if not counts:
        raise DataError(f"{path}: no estimate records")
    return TrainingEstimates(counts, train_size, test_size)


def write_estimates(estimates: TrainingEstimates, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(ESTIMATES_HEADER + "\n")
        for cls in estimates.classes:
            t = estimates.counts[cls]
            fh.write(
                f"{cls}\t{format_float(t.tp)}\t{format_float(t.fp)}\t{format_float(t.fn)}\n"
            )


def derive_training_estimates(
    cv: CvScores, train_labels: LabelSet, test_size: int
) -> TrainingEstimates:
    """Tally cross-validated decisions against the training labels into
    per-class tp/fp/fn counts. Train size is the number of CV documents."""
    train_labels.check_universe(cv.scores.docs, cv.scores.classes)
    pred = cv.scores.decisions()
    gold = train_labels.to_matrix(cv.scores.docs, cv.scores.classes)
    tp = (pred & gold).sum(axis=0)
    fp = (pred & ~gold).sum(axis=0)
    fn = (~pred & gold).sum(axis=0)
    counts = {
        cls: ContingencyTable(float(tp[j]), float(fp[j]), float(fn[j]))
        for j, cls in enumerate(cv.scores.classes)
    }
    return TrainingEstimates(counts, cv.scores.n_docs, test_size)


def write_ranking(ranking: Sequence[tuple[str, float]], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(RANKING_HEADER + "\n")
        for rank, (doc, utility) in enumerate(ranking, start=1):
            fh.write(f"{rank}\t{doc}\t{format_float(utility)}\n")


def load_ranking(path: str | Path) -> list[tuple[str, float]]:
    path = Path(path)
    out: list[tuple[str, float]] = []
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != RANKING_HEADER:
            raise DataError(f"{path}:1: expected header {RANKING_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields")
            out.append((parts[1], float(parts[2])))
    return out


def write_curve(values: Sequence[float], path: str | Path) -> None:
    """Write a curve indexed by validation depth n = 0..|Te| with its
    prefix fraction."""
    values = np.asarray(values, dtype=np.float64)
    n_docs = values.size - 1
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write(CURVE_HEADER + "\n")
        for n, v in enumerate(values):
            fh.write(f"{n},{format_float(n / n_docs)},{format_float(v)}\n")


def write_report(report: Mapping, path: str | Path) -> None:
    """Serialize a report as sorted-key YAML; deterministic for identical
    content."""
    with Path(path).open("w", encoding="utf-8") as fh:
        yaml.safe_dump(_plain(report), fh, sort_keys=True, default_flow_style=False)


def load_report(path: str | Path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        return yaml.safe_load(fh)


def _plain(value):
    """Recursively convert numpy scalars/arrays for YAML serialization."""
    if isinstance(value, Mapping):
        return {_plain(k): _plain(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


@dataclass(frozen=True)
class DatasetBundle:
    """Everything one experiment needs: test scores, optional gold test
    labels, and exactly one contingency-table source (direct estimates or
    CV scores plus training labels)."""

    scores: ScoreMatrix
    gold: LabelSet | None = None
    estimates: TrainingEstimates | None = None
    cv: CvScores | None = None
    train_labels: LabelSet | None = None
    name: str = "dataset"

    def __post_init__(self) -> None:
        if self.estimates is not None and self.cv is not None:
            raise ConfigurationError("provide estimates or CV scores, not both")
        if (self.cv is None) != (self.train_labels is None):
            raise ConfigurationError("CV scores and training labels go together")
        if self.gold is not None:
            self.gold.check_universe(self.scores.docs, self.scores.classes)

    def training_estimates(self) -> TrainingEstimates:
        if self.estimates is not None:
            return self.estimates
        if self.cv is not None:
            return derive_training_estimates(self.cv, self.train_labels, self.scores.n_docs)
        raise ConfigurationError("bundle has no table source (estimates or CV scores)")
