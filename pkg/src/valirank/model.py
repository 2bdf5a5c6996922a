"""Core domain types: score matrices, label sets, contingency tables,
and the F-beta effectiveness measure they all feed into.

Doc and class identifiers are plain strings (non-empty, no tabs or
newlines); their lexicographic order is the tie-breaking order used
everywhere in the package. All types here are immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError

__all__ = [
    "ContingencyTable",
    "LabelSet",
    "ScoreMatrix",
    "check_identifier",
    "e_measure",
    "f_beta",
    "merge_tables",
]


def check_identifier(value: str, kind: str = "identifier") -> str:
    """Validate a doc or class id: non-empty, no tab or newline."""
    if not isinstance(value, str) or not value:
        raise DataError(f"{kind} must be a non-empty string, got {value!r}")
    if "\t" in value or "\n" in value or "\r" in value:
        raise DataError(f"{kind} {value!r} contains a tab or newline")
    return value


@dataclass(frozen=True)
class ContingencyTable:
    """Nonnegative real counts of true positives, false positives and
    false negatives. True negatives are optional: F-beta never reads them,
    so they are carried only when a caller happens to know them."""

    tp: float
    fp: float
    fn: float
    tn: float | None = None

    def __post_init__(self) -> None:
        for name in ("tp", "fp", "fn"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise DataError(f"contingency cell {name}={v!r} must be finite and >= 0")
        if self.tn is not None and (not math.isfinite(self.tn) or self.tn < 0):
            raise DataError(f"contingency cell tn={self.tn!r} must be finite and >= 0")


def merge_tables(tables: Iterable[ContingencyTable]) -> ContingencyTable:
    """Cell-wise sum of contingency tables (the global, micro-averaged
    table). tn is kept only if every input carries it."""
    tp = fp = fn = 0.0
    tn: float | None = 0.0
    seen = False
    for t in tables:
        seen = True
        tp += t.tp
        fp += t.fp
        fn += t.fn
        tn = None if (tn is None or t.tn is None) else tn + t.tn
    if not seen:
        raise DataError("cannot merge an empty collection of tables")
    return ContingencyTable(tp, fp, fn, tn)


def f_beta(table: ContingencyTable, beta: float = 1.0) -> float:
    """F-beta computed from a contingency table.

    Equals (1 + beta^2) * tp / ((1 + beta^2) * tp + fp + beta^2 * fn).
    The degenerate all-zero table scores 1: everything was correctly
    classified as negative.
    """
    if not (beta > 0 and math.isfinite(beta)):
        raise DataError(f"beta must be a positive finite real, got {beta!r}")
    b2 = beta * beta
    denom = (1.0 + b2) * table.tp + table.fp + b2 * table.fn
    if denom == 0.0:
        return 1.0
    return (1.0 + b2) * table.tp / denom


def e_measure(table: ContingencyTable, beta: float = 1.0) -> float:
    """Classification error, the complement of F-beta."""
    return 1.0 - f_beta(table, beta)


class LabelSet:
    """A set of (doc_id, class_id) pairs marked positive; absent pairs
    are negative."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable[tuple[str, str]] = ()):
        checked = set()
        for doc, cls in pairs:
            checked.add((check_identifier(doc, "doc id"), check_identifier(cls, "class id")))
        self.pairs: frozenset[tuple[str, str]] = frozenset(checked)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LabelSet) and self.pairs == other.pairs

    def __hash__(self) -> int:
        return hash(self.pairs)

    def check_universe(self, docs: Iterable[str], classes: Iterable[str]) -> None:
        """Raise if any pair references an unknown doc or class."""
        doc_set, cls_set = set(docs), set(classes)
        for doc, cls in self.pairs:
            if doc not in doc_set:
                raise DataError(f"label references unknown doc {doc!r}")
            if cls not in cls_set:
                raise DataError(f"label references unknown class {cls!r}")

    def to_matrix(self, docs: tuple[str, ...], classes: tuple[str, ...]) -> np.ndarray:
        """Boolean membership matrix aligned with the given doc/class order."""
        doc_index = {d: i for i, d in enumerate(docs)}
        cls_index = {c: j for j, c in enumerate(classes)}
        out = np.zeros((len(docs), len(classes)), dtype=bool)
        for doc, cls in self.pairs:
            i = doc_index.get(doc)
            j = cls_index.get(cls)
            if i is not None and j is not None:
                out[i, j] = True
        return out


class ScoreMatrix:
    """Per-(doc, class) signed classifier confidence.

    The sign of a score is the binary decision (a score of exactly 0 is
    read as the negative decision), its magnitude the confidence. Docs
    and classes are stored in lexicographic order, so row index order is
    also the tie-breaking order.
    """

    __slots__ = ("docs", "classes", "values", "_doc_index", "_cls_index")

    def __init__(self, docs: Iterable[str], classes: Iterable[str], values: np.ndarray):
        docs = tuple(check_identifier(d, "doc id") for d in docs)
        classes = tuple(check_identifier(c, "class id") for c in classes)
        if len(set(docs)) != len(docs):
            raise DataError("duplicate doc ids in score matrix")
        if len(set(classes)) != len(classes):
            raise DataError("duplicate class ids in score matrix")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(docs), len(classes)):
            raise DataError(
                f"score array shape {values.shape} does not match "
                f"{len(docs)} docs x {len(classes)} classes"
            )
        if not np.all(np.isfinite(values)):
            raise DataError("scores must all be finite")
        doc_order = np.argsort(np.array(docs, dtype=object))
        cls_order = np.argsort(np.array(classes, dtype=object))
        self.docs: tuple[str, ...] = tuple(docs[i] for i in doc_order)
        self.classes: tuple[str, ...] = tuple(classes[j] for j in cls_order)
        self.values: np.ndarray = values[np.ix_(doc_order, cls_order)]
        self.values.flags.writeable = False
        self._doc_index = {d: i for i, d in enumerate(self.docs)}
        self._cls_index = {c: j for j, c in enumerate(self.classes)}

    @classmethod
    def from_mapping(cls, scores: Mapping[tuple[str, str], float]) -> "ScoreMatrix":
        """Build a matrix from a complete {(doc, class): score} mapping."""
        docs = sorted({d for d, _ in scores})
        classes = sorted({c for _, c in scores})
        values = np.empty((len(docs), len(classes)))
        for i, d in enumerate(docs):
            for j, c in enumerate(classes):
                try:
                    values[i, j] = scores[(d, c)]
                except KeyError:
                    raise DataError(f"missing score for ({d!r}, {c!r})") from None
        return cls(docs, classes, values)

    def score(self, doc: str, cls: str) -> float:
        try:
            return float(self.values[self._doc_index[doc], self._cls_index[cls]])
        except KeyError:
            raise DataError(f"unknown (doc, class) pair ({doc!r}, {cls!r})") from None

    def doc_index(self, doc: str) -> int:
        try:
            return self._doc_index[doc]
        except KeyError:
            raise DataError(f"unknown doc {doc!r}") from None

    def class_index(self, cls: str) -> int:
        try:
            return self._cls_index[cls]
        except KeyError:
            raise DataError(f"unknown class {cls!r}") from None

    @property
    def n_docs(self) -> int:
        return len(self.docs)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def decisions(self) -> np.ndarray:
        """Boolean matrix of positive decisions (score > 0; 0 is negative)."""
        return self.values > 0.0

    def confidences(self) -> np.ndarray:
        return np.abs(self.values)

    def decision(self, doc: str, cls: str) -> int:
        return 1 if self.score(doc, cls) > 0.0 else -1

    def confidence(self, doc: str, cls: str) -> float:
        return abs(self.score(doc, cls))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ScoreMatrix)
            and self.docs == other.docs
            and self.classes == other.classes
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self) -> int:  # identity-level hash; equality is structural
        return hash((self.docs, self.classes, self.values.tobytes()))
