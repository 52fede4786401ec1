"""Matplotlib rendering of benchmark reports to image files."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_figures"]


def render_figures(report, out_dir, fmt="png"):
    """Write summary figures for a BenchReport; returns the file paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payloads = sorted(report.aggregates)
    written = []

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(payloads, [report.aggregates[p]["mean_r_error"] for p in payloads], "o-")
    ax.set_xlabel("payload (bpnzac)")
    ax.set_ylabel("mean extraction error rate")
    ax.set_title(
        f"robustness, QF {report.settings.get('q_cover', '?')} → "
        f"{report.settings.get('q_channel', '?')}"
    )
    ax.grid(True, alpha=0.3)
    path = out / f"error_rate.{fmt}"
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, axes = plt.subplots(1, 2, figsize=(8, 3.5))
    psnrs = [report.aggregates[p]["mean_psnr"] for p in payloads]
    finite = [p if np.isfinite(p) else np.nan for p in psnrs]
    axes[0].plot(payloads, finite, "s-")
    axes[0].set_xlabel("payload (bpnzac)")
    axes[0].set_ylabel("mean PSNR (dB)")
    axes[0].grid(True, alpha=0.3)
    axes[1].plot(payloads, [report.aggregates[p]["mean_ssim"] for p in payloads], "s-")
    axes[1].set_xlabel("payload (bpnzac)")
    axes[1].set_ylabel("mean SSIM")
    axes[1].grid(True, alpha=0.3)
    fig.suptitle("stego image quality")
    path = out / f"quality.{fmt}"
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ks = [row["k"] for row in report.rows]
    values = sorted(set(ks))
    ax.bar(values, [ks.count(v) for v in values], width=1.2)
    ax.set_xlabel("selected RS message length k")
    ax.set_ylabel("runs")
    ax.set_title("adaptive code selection")
    ax.grid(True, axis="y", alpha=0.3)
    path = out / f"rs_selection.{fmt}"
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)
    return written
