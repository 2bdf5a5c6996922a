"""Write a small deterministic dataset for the UI integration test and
the reference outcome computed by the simulation engine.

Usage: python3 fixture.py OUT_DIR
Writes scores.tsv, gold.tsv, estimates.tsv, and expected.json (the
dynamic visit order plus the per-document gold flips).
"""

import json
import sys
from pathlib import Path

import numpy as np

from valirank import (
    CalibrationModel,
    LabelSet,
    ScoreMatrix,
    Strategy,
    TrainingEstimates,
    method_config,
    simulate,
)
from valirank.dataio import write_estimates, write_labels, write_scores
from valirank.model import ContingencyTable

N_DOCS, N_CLASSES, SIGMA = 10, 3, 1.0


def main(out_dir: Path) -> None:
    rng = np.random.default_rng(424242)
    docs = [f"d{i:02d}" for i in range(N_DOCS)]
    classes = [f"c{j}" for j in range(N_CLASSES)]
    gold_matrix = rng.random((N_DOCS, N_CLASSES)) < 0.4
    correct = rng.random((N_DOCS, N_CLASSES)) >= 0.3
    decisions = np.where(correct, gold_matrix, ~gold_matrix)
    values = np.where(decisions, 1.0, -1.0) * rng.uniform(0.1, 2.5, (N_DOCS, N_CLASSES))
    scores = ScoreMatrix(docs, classes, values)
    gold = LabelSet(
        (docs[i], classes[j]) for i, j in zip(*np.nonzero(gold_matrix))
    )

    counts = {}
    for j, cls in enumerate(classes):
        pred = scores.decisions()[:, j]
        truth = gold_matrix[:, j]
        counts[cls] = ContingencyTable(
            2.0 * float((pred & truth).sum()),
            2.0 * float((pred & ~truth).sum()),
            2.0 * float((~pred & truth).sum()),
        )
    estimates = TrainingEstimates(counts, 2 * N_DOCS, N_DOCS)

    write_scores(scores, out_dir / "scores.tsv")
    write_labels(gold, out_dir / "gold.tsv")
    write_estimates(estimates, out_dir / "estimates.tsv")

    config = method_config(
        "utheoretic", Strategy.DYNAMIC, "macro",
        model=CalibrationModel(SIGMA), estimates=estimates, gold=gold,
    )
    run = simulate(scores, gold, config, xis=[0.2])
    wrong = scores.decisions() != gold_matrix
    flips = {
        doc: sorted(classes[j] for j in np.flatnonzero(wrong[scores.doc_index(doc)]))
        for doc in docs
    }
    (out_dir / "expected.json").write_text(json.dumps({
        "visit_order": list(run.visit_order),
        "flips": flips,
        "train_size": 2 * N_DOCS,
        "sigma": SIGMA,
    }))


if __name__ == "__main__":
    main(Path(sys.argv[1]))
