"""Matplotlib renderings of the CSV outputs (written next to the data files)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_fov_figure(x, y, Z, path: str, title: str = "Field of view") -> None:
    """Heatmap of the combined level in dB with the shadowing area blanked."""
    fig, ax = plt.subplots(figsize=(7, 4))
    with np.errstate(divide="ignore"):
        db = 20.0 * np.ma.log10(np.ma.masked_less_equal(Z, 0.0))
    mesh = ax.pcolormesh(x, y, db, shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label="combined level (dB rel. baseline)")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_range_figure(rows, path: str, title: str = "Detection range") -> None:
    """Histogram of per-run detection ranges with the mean marked."""
    r = [row.r_det_mm for row in rows if row.r_det_mm is not None]
    fig, ax = plt.subplots(figsize=(6, 4))
    if r:
        ax.hist(r, bins=30, color="tab:blue", alpha=0.8)
        ax.axvline(float(np.mean(r)), color="tab:green", linestyle="--", label="mean")
        ax.legend()
    ax.set_xlabel("detection range r_det (mm)")
    ax.set_ylabel("runs")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(rows, path: str, title: str = "Prediction time vs. accuracy") -> None:
    """Threshold trade-off: mean prediction time and accuracy per sigma_th."""
    th = [row.sigma_th for row in rows]
    tp = [row.mean_t_p_ms if row.mean_t_p_ms is not None else np.nan for row in rows]
    acc = [row.accuracy if row.accuracy is not None else np.nan for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(th, tp, "o-", color="tab:blue", label="mean t_p (ms)")
    ax.set_xlabel("sigma_th")
    ax.set_ylabel("mean t_p (ms)", color="tab:blue")
    ax2 = ax.twinx()
    ax2.plot(th, acc, "s--", color="tab:red", label="accuracy")
    ax2.set_ylabel("accuracy", color="tab:red")
    ax2.set_ylim(0.0, 1.05)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_detect_figure(
    t_ms, levels, sigma, threshold: float, t_d_ms, path: str, title: str = "Detection"
) -> None:
    """Level trace and sliding std with the threshold and detection time."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax1.plot(t_ms, levels, lw=0.8)
    ax1.set_ylabel("combined level z")
    ax2.plot(t_ms, sigma, lw=0.8, color="tab:orange")
    ax2.axhline(threshold, color="tab:red", linestyle="--", label="sigma_th")
    if t_d_ms is not None:
        ax2.axvline(t_d_ms, color="tab:green", linestyle=":", label="t_d")
    ax2.set_xlabel("t (ms)")
    ax2.set_ylabel("sigma(t)")
    ax2.legend(loc="upper left")
    ax1.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trace_figure(t_ms, samples, path: str, title: str = "Simulated trace") -> None:
    """Per-beam magnitude of the normalized received samples."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for beam_id, values in samples.items():
        ax.plot(t_ms, np.abs(values), lw=0.8, label=beam_id)
    ax.set_xlabel("t (ms)")
    ax.set_ylabel("|y| (normalized)")
    ax.legend()
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
