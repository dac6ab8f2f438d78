"""Figures written next to the CSV/JSON outputs of a run."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiment import SETUPS  # noqa: E402

SETUP_STYLE = {
    "baseline": dict(color="tab:blue", label="Baseline"),
    "nmf": dict(color="tab:green", label="NMF"),
    "nncp": dict(color="tab:red", label="nnCP"),
}

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
}


def _savefig(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_roc_curves(rows, summary, out_dir):
    """One ROC figure per (machine, id, snr), the best-K curve of each setup.

    All seeds are drawn; the legend carries the seed-mean AUC.
    """
    written = []
    best = {(s["machine"], s["machine_id"], s["snr"], s["setup"]): s for s in summary}
    groups = sorted({(r.machine, r.machine_id, r.snr) for r in rows})
    with plt.rc_context(RC):
        for machine, mid, snr in groups:
            fig, ax = plt.subplots(figsize=(3.4, 3.2))
            ax.plot([0, 1], [0, 1], color="0.7", lw=0.8, ls="--")
            for setup in SETUPS:
                s = best.get((machine, mid, snr, setup))
                if s is None:
                    continue
                k = s["best_K"] if s["best_K"] != "" else None
                style = SETUP_STYLE[setup]
                runs = [r for r in rows if (r.machine, r.machine_id, r.snr, r.setup, r.K)
                        == (machine, mid, snr, setup, k) and r.roc is not None]
                for i, r in enumerate(runs):
                    label = None
                    if i == 0:
                        kk = "" if k is None else f", K={k}"
                        label = f"{style['label']}{kk} (AUC {s['mean_auc']:.2f})"
                    ax.step(r.roc.fpr, r.roc.tpr, where="post", color=style["color"],
                            lw=1.0, alpha=0.8 if i == 0 else 0.3, label=label)
            ax.set_xlabel("False positive rate")
            ax.set_ylabel("True positive rate")
            ax.set_xlim(0, 1)
            ax.set_ylim(0, 1.01)
            ax.set_title(f"{machine} {mid} {snr}")
            ax.legend(loc="lower right", frameon=False)
            written.append(_savefig(fig, Path(out_dir) / f"roc_{machine}_{mid}_{snr}.png"))
    return written


def plot_auc_summary(summary, path):
    """Grouped bars of mean AUC per dataset and setup."""
    datasets = sorted({(s["machine"], s["machine_id"], s["snr"]) for s in summary})
    if not datasets:
        return None
    lookup = {(s["machine"], s["machine_id"], s["snr"], s["setup"]): s for s in summary}
    width = 0.8 / len(SETUPS)
    x = np.arange(len(datasets))
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(max(3.4, 1.1 * len(datasets) + 1.5), 2.8))
        for i, setup in enumerate(SETUPS):
            vals = [lookup.get(d + (setup,)) for d in datasets]
            if all(v is None for v in vals):
                continue
            means = [np.nan if v is None else v["mean_auc"] for v in vals]
            errs = [0.0 if v is None else v["std_auc"] for v in vals]
            ax.bar(x + (i - 1) * width, means, width, yerr=errs, capsize=2,
                   **SETUP_STYLE[setup])
        ax.set_xticks(x)
        ax.set_xticklabels([f"{m}\n{mid} {snr}" for m, mid, snr in datasets])
        ax.set_ylabel("Mean AUC")
        ax.set_ylim(0, 1.05)
        ax.axhline(0.5, color="0.7", lw=0.8, ls="--")
        ax.legend(frameon=False, ncol=3, loc="upper center", bbox_to_anchor=(0.5, 1.18))
        return _savefig(fig, path)
