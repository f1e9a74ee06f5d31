"""Report figures rendered straight to image files (headless backend)."""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .boost import RoundRecord  # noqa: E402


def plot_training_curves(curves: Mapping[str, List[RoundRecord]], path) -> Path:
    """Training error and edge per round, one line per labeled run."""
    fig, (ax_err, ax_edge) = plt.subplots(1, 2, figsize=(11, 4.2))
    for label, records in curves.items():
        rounds = [r.round for r in records]
        ax_err.plot(rounds, [r.train_err_so_far for r in records], label=label, lw=1.2)
        ax_edge.plot(rounds, [r.edge for r in records], label=label, lw=1.2)
    ax_err.set_xlabel("round")
    ax_err.set_ylabel("training error of the vote")
    ax_edge.set_xlabel("round")
    ax_edge.set_ylabel("weak-learner edge")
    ax_edge.axhline(0.0, color="gray", lw=0.8, ls=":")
    for ax in (ax_err, ax_edge):
        ax.grid(alpha=0.3)
        if curves:
            ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_comm_scaling(rows: Sequence[Dict], path) -> Path:
    """Words against n for each sweep mode, with a k log^2 n reference curve.

    Expects dicts with keys mode, n, k, eps, words (commscan CSV rows).
    """
    fig, ax = plt.subplots(figsize=(6.2, 4.4))
    modes = sorted({(r["mode"], r["k"], r["eps"]) for r in rows})
    for mode, k, eps in modes:
        pts = sorted((r["n"], r["words"]) for r in rows
                     if (r["mode"], r["k"], r["eps"]) == (mode, k, eps))
        ns = [p[0] for p in pts]
        words = [p[1] for p in pts]
        ax.plot(ns, words, marker="o", ms=3.5, lw=1.2,
                label=f"{mode} (k={k}, eps={eps:g})")
    if rows:
        ns = np.array(sorted({r["n"] for r in rows}), dtype=np.float64)
        k = max(r["k"] for r in rows)
        ref = k * np.log2(ns) ** 2
        ax.plot(ns, ref, color="gray", ls="--", lw=1.0, label="k log2(n)^2")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel("words")
    ax.grid(alpha=0.3, which="both")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
