"""Figure rendering for experiment tables and estimate reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SERIES = [
    ("atc_mc", "ATC-MC", "tab:blue"),
    ("atc_ne", "ATC-NE", "tab:cyan"),
    ("ac", "AC", "tab:orange"),
    ("doc", "DOC", "tab:green"),
    ("im", "IM", "tab:purple"),
    ("gde", "GDE", "tab:red"),
]


def plot_consistency_rows(rows, path) -> None:
    """Estimated vs true accuracy as the target agreement probability sweeps."""
    p = [r.p_target for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(p, [r.true_acc for r in rows], "k--", lw=2, label="true accuracy")
    for attr, label, color in _SERIES:
        ax.plot(p, [getattr(r, attr) for r in rows], marker="o", ms=3, color=color, label=label)
    ax.set_xlabel("target agreement probability")
    ax.set_ylabel("accuracy")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_predicted_vs_true(entries_by_method, path, fit=None) -> None:
    """Scatter of predicted vs true accuracy per method, with y=x reference.

    entries_by_method maps a method name to a list of (predicted, true) pairs.
    """
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, 1], [0, 1], "k--", lw=1, label="y = x")
    for method, pairs in entries_by_method.items():
        pred = [p for p, _ in pairs]
        true = [t for _, t in pairs]
        ax.scatter(true, pred, s=14, label=method)
    if fit is not None:
        xs = [0.0, 1.0]
        ax.plot(xs, [fit.slope * x + fit.intercept for x in xs], lw=1, label="robust fit")
    ax.set_xlabel("true accuracy")
    ax.set_ylabel("predicted accuracy")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
