"""Matplotlib figures rendered next to the delimited report outputs."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluation import ReportRow

# Keep PNG bytes identical across reruns of the same command.
_PNG_METADATA = {"Software": "extsum"}


def save_loss_curve(epoch_losses: list[float], path: str | Path, title: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    epochs = np.arange(1, len(epoch_losses) + 1)
    ax.plot(epochs, epoch_losses, marker="o", markersize=3)
    ax.set_xlabel("epoch")
    ax.set_ylabel("mean weighted BCE loss")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)


def save_metric_bars(rows: list[ReportRow], path: str | Path, title: str) -> None:
    """Grouped F1/Recall/Precision bars, one group per model, two panels."""
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5), sharey=True)
    panels = (
        ("Sentence classification", lambda r: r.report.classification),
        ("ROUGE-1", lambda r: r.report.rouge1),
    )
    x = np.arange(len(rows))
    width = 0.25
    for ax, (panel_title, pick) in zip(axes, panels):
        scores = [pick(r) for r in rows]
        ax.bar(x - width, [s.f1 for s in scores], width, label="F1")
        ax.bar(x, [s.recall for s in scores], width, label="Recall")
        ax.bar(x + width, [s.precision for s in scores], width, label="Precision")
        ax.set_xticks(x)
        ax.set_xticklabels([r.model for r in rows], rotation=20, ha="right")
        ax.set_ylim(0.0, 1.05)
        ax.set_title(panel_title)
        ax.grid(True, axis="y", alpha=0.3)
    axes[0].set_ylabel("score")
    axes[0].legend(loc="upper left", fontsize=8)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_PNG_METADATA)
    plt.close(fig)
