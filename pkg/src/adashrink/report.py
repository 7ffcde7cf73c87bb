"""Figure rendering for the CLI report paths.

Figures are a convenience layer written next to the delimited outputs; the
CSV files remain the machine-readable contract.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["risk_curve_figure", "selection_figure", "denoise_figure"]

_METHOD_LABELS = {
    "lst": "LST",
    "ssp": "LST-SSP",
    "adaptive": "LST-AS",
    "universal": "UST",
}


def risk_curve_figure(summary, path) -> None:
    """Mean loss per method, plus criterion-vs-loss tracking for one method."""
    track = "adaptive" if "adaptive" in summary.curves else None
    ncols = 2 if track else 1
    fig, axes = plt.subplots(1, ncols, figsize=(4.8 * ncols, 3.6), squeeze=False)
    ax = axes[0][0]
    for method, curve in summary.curves.items():
        ax.plot(summary.k, curve["mean_loss"], label=_METHOD_LABELS.get(method, method))
    ax.set_xlabel("components kept (k)")
    ax.set_ylabel("mean loss")
    ax.legend()
    ax.set_title("risk curves")
    if track:
        ax2 = axes[0][1]
        curve = summary.curves[track]
        ax2.plot(summary.k, curve["mean_loss"], label="loss")
        ax2.plot(summary.k, curve["mean_criterion"], "--", label="criterion")
        ax2.set_xlabel("components kept (k)")
        ax2.legend()
        ax2.set_title(f"{_METHOD_LABELS[track]}: criterion tracks loss")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def selection_figure(summary, path) -> None:
    """Selected-size histograms and loss at the selected size per method."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.6, 3.6))
    for method, counts in summary.selected_counts.items():
        ax1.step(
            summary.k,
            counts,
            where="mid",
            label=_METHOD_LABELS.get(method, method),
        )
    ax1.set_xlabel("selected k")
    ax1.set_ylabel("replications")
    ax1.legend()
    ax1.set_title("selected model size")
    methods = list(summary.selection)
    means = [summary.selection[m]["mean_loss_at_selected"] for m in methods]
    sds = [summary.selection[m]["sd_loss_at_selected"] for m in methods]
    xs = np.arange(len(methods))
    ax2.bar(xs, means, yerr=sds, capsize=4)
    ax2.set_xticks(xs, [_METHOD_LABELS.get(m, m) for m in methods])
    ax2.set_ylabel("mean loss at selected k")
    ax2.set_title("loss at the selected size")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def denoise_figure(noisy, denoised, path, truth=None) -> None:
    """Overlay of the input and the denoised output."""
    fig, ax = plt.subplots(figsize=(8.0, 3.6))
    ax.plot(noisy, color="0.8", lw=0.8, label="input")
    if truth is not None:
        ax.plot(truth, color="tab:green", lw=1.0, label="truth")
    ax.plot(denoised, color="tab:blue", lw=1.2, label="denoised")
    ax.set_xlabel("sample index")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
