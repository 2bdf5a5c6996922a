"""Rendering of evaluation curves to figure files, next to the delimited
curve tables the CLI emits."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_curves"]


def render_curves(
    curves: Mapping[str, Sequence[float]],
    path: str | Path,
    title: str,
    ylabel: str = "error reduction",
) -> None:
    """Plot one or more curves against the validated prefix fraction and
    save the figure. Curve values are indexed by depth n = 0..|Te|."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, values in curves.items():
        values = np.asarray(values, dtype=np.float64)
        fractions = np.linspace(0.0, 1.0, values.size)
        ax.plot(fractions, values, label=label, linewidth=1.5)
    ax.set_xlabel("fraction of test set validated")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
