"""Report figures written next to the CSV/JSON outputs.

Uses the non-interactive Agg backend; PNG metadata is stripped so that
re-running a command reproduces the file byte for byte.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "svg.hashsalt": "grayscale",
}


def _save(fig, path):
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_alpha_sweep(rows, path, metric_name="F1", title=None):
    """Dev and test score against alpha, one marker per sweep point."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 2.8))
        alphas = [r["alpha"] for r in rows]
        for split, marker in (("dev", "o"), ("test", "s")):
            ys = [r.get(split) for r in rows]
            if all(y is None for y in ys):
                continue
            ys = [np.nan if y is None else y for y in ys]
            ax.plot(alphas, ys, marker=marker, label=split)
        ax.set_xlabel("alpha")
        ax.set_ylabel(metric_name)
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        _save(fig, path)


def plot_confusion(result, path, title=None):
    cm = np.asarray(result.confusion)
    names = list(result.inventory.names) if result.inventory is not None else [str(i) for i in range(len(cm))]
    with plt.rc_context(STYLE):
        size = 1.2 + 0.45 * len(names)
        fig, ax = plt.subplots(figsize=(size + 0.8, size))
        im = ax.imshow(cm, cmap="Greys", vmin=0)
        ax.set_xticks(range(len(names)), names, rotation=45, ha="right")
        ax.set_yticks(range(len(names)), names)
        ax.set_xlabel("predicted")
        ax.set_ylabel("gold")
        peak = cm.max() if cm.size else 0
        for (i, j), v in np.ndenumerate(cm):
            ax.text(j, i, str(v), ha="center", va="center", color="white" if v > peak / 2 else "black")
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        if title:
            ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)
