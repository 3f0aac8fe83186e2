"""Matplotlib figures for the report outputs (session trajectories, correlation heatmap).

SVG output is made reproducible by fixing the hash salt and dropping the date.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_trajectories", "plot_correlation", "plot_rs_fit", "plot_box_counts"]

FEATURE_NAMES = {"S": "Shannon entropy (nats)", "H": "Hurst exponent", "D": "Fractal dimension"}

_STYLE = {
    "svg.hashsalt": "nldmarkers",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_trajectories(rows, feature: str, path) -> Path:
    """One line per subject across its sessions; a vertical gridline closes each session."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(7.5, 3.2))
        by_subject: dict[int, list[tuple[int, float]]] = {}
        for sid, k, v in rows:
            by_subject.setdefault(sid, []).append((k, v))
        n_sessions = max(k for _, k, _ in rows)
        for k in range(1, n_sessions + 1):
            ax.axvline(k, color="0.85", lw=0.6, zorder=0)
        for sid, pts in sorted(by_subject.items()):
            ks, vs = zip(*pts)
            ax.plot(ks, vs, marker="o", ms=2.5, lw=1.0, label=f"S{sid}")
        ax.set_xlabel("session")
        ax.set_ylabel(FEATURE_NAMES.get(feature, feature))
        ax.set_xticks(range(1, n_sessions + 1))
        if len(by_subject) <= 12:
            ax.legend(ncol=min(len(by_subject), 5), fontsize=7, frameon=False)
        return _save(fig, path)


def plot_correlation(cm, path) -> Path:
    with plt.rc_context(_STYLE):
        k = len(cm.labels)
        fig, ax = plt.subplots(figsize=(1.0 + 0.8 * k, 0.6 + 0.8 * k))
        im = ax.imshow(cm.values, cmap="RdBu_r", vmin=-1, vmax=1)
        ax.set_xticks(range(k), cm.labels, rotation=45, ha="right")
        ax.set_yticks(range(k), cm.labels)
        for i in range(k):
            for j in range(k):
                v = cm.values[i, j]
                ax.text(j, i, f"{v:.2f}", ha="center", va="center", fontsize=7,
                        color="white" if abs(v) > 0.6 else "black")
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04, label="Pearson r")
        return _save(fig, path)


def plot_rs_fit(fit, path) -> Path:
    """log-log R/S points with the fitted line."""
    w = np.array([p.w for p in fit.points], dtype=float)
    rs = np.array([p.rs for p in fit.points])
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(3.5, 3.0))
        ax.loglog(w, rs, "o", ms=3)
        ax.loglog(w, np.exp(fit.log_k) * w ** fit.h, lw=1, label=f"H = {fit.h:.3f}")
        ax.set_xlabel("window w (samples)")
        ax.set_ylabel("R/S")
        ax.legend(frameon=False)
        return _save(fig, path)


def plot_box_counts(fit, path) -> Path:
    inv_r = np.array([1.0 / c.r for c in fit.counts])
    n = np.array([c.n for c in fit.counts], dtype=float)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(3.5, 3.0))
        ax.loglog(inv_r, n, "s", ms=3)
        c0 = np.exp(np.mean(np.log(n) - fit.d * np.log(inv_r)))
        ax.loglog(inv_r, c0 * inv_r ** fit.d, lw=1, label=f"D = {fit.d:.3f}")
        ax.set_xlabel("1 / r")
        ax.set_ylabel("occupied boxes N")
        ax.legend(frameon=False)
        return _save(fig, path)
