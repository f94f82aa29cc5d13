"""Figures for the command-line reports.

All figures are written as SVG with a fixed hash salt and no date stamp so
that reruns produce identical files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .spectrum import WavelengthMap  # noqa: E402

GEOMETRY_COLORS = {"homogeneous": "#1f77b4", "trivial": "#ff7f0e", "ssh": "#2ca02c"}
GEOMETRY_LABELS = {"homogeneous": "homogeneous", "trivial": "trivial mode", "ssh": "SSH"}

_RC = {
    "svg.hashsalt": "spdcarray",
    "font.size": 10,
    "axes.linewidth": 1.0,
    "axes.xmargin": 0,
    "legend.frameon": False,
}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _nm_axis(ax, wmap: WavelengthMap):
    k = wmap.nm_per_mm_inv
    top = ax.secondary_xaxis("top", functions=(lambda d: d * k, lambda nm: nm / k))
    top.set_xlabel(r"$\delta\lambda_p$ (nm)")


def plot_spectra(path, reference, realizations, wmap: WavelengthMap, title: str = ""):
    """Disorder-free spectrum (thick black) with disordered ones overlaid."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.0, 3.6))
        x = reference.grid.points
        for k, s in enumerate(realizations):
            ax.plot(x, s.intensity, lw=0.9, label=f"realization {k}")
        ax.plot(x, reference.intensity, color="k", lw=2.4, label="no disorder")
        ax.set_xlabel(r"$\Delta\beta^{(0)}$ (mm$^{-1}$)")
        ax.set_ylabel("normalized intensity")
        _nm_axis(ax, wmap)
        if title:
            ax.set_title(title, fontsize=10, pad=28)
        ax.legend(fontsize=7, loc="upper right")
        fig.tight_layout()
        _save(fig, path)


def plot_sweep(path, sweeps):
    """Overlap (mean +/- std) and peak-shift std versus disorder strength."""
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.4))
        for sw in sweeps:
            color = GEOMETRY_COLORS.get(sw.geometry)
            label = GEOMETRY_LABELS.get(sw.geometry, sw.geometry)
            x = sw.disorders
            ax1.errorbar(x, sw.column("overlap_mean"), yerr=sw.column("overlap_std"),
                         marker="o", ms=3, capsize=2, color=color, label=label)
            ax2.plot(x, sw.column("shift_std_nm"), marker="o", ms=3, color=color, label=label)
        ax1.set_xlabel(r"disorder $\Delta$")
        ax1.set_ylabel("spectral overlap")
        ax2.set_xlabel(r"disorder $\Delta$")
        ax2.set_ylabel("peak-shift std (nm)")
        ax2.set_ylim(bottom=0)
        for ax in (ax1, ax2):
            ax.margins(x=0.04)
        ax1.legend(fontsize=8)
        fig.tight_layout()
        _save(fig, path)


def plot_compare(path, table):
    """Grouped bars of shift std and overlap per geometry.

    ``table`` maps geometry -> list of EnsembleStats (one per disorder).
    """
    geoms = list(table)
    strengths = [r.disorder for r in table[geoms[0]]]
    width = 0.8 / len(strengths)
    xs = np.arange(len(geoms))
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.4))
        for j, strength in enumerate(strengths):
            off = (j - (len(strengths) - 1) / 2) * width
            std = [table[g][j].shift_std_nm for g in geoms]
            ov = [table[g][j].overlap_mean for g in geoms]
            ax1.bar(xs + off, std, width, label=rf"$\Delta$ = {strength:g}")
            ax2.bar(xs + off, ov, width, label=rf"$\Delta$ = {strength:g}")
        for ax in (ax1, ax2):
            ax.set_xticks(xs, [GEOMETRY_LABELS.get(g, g) for g in geoms])
        ax1.set_yscale("log")
        ax1.set_ylabel("peak-shift std (nm)")
        ax2.set_ylabel("mean overlap")
        ax2.set_ylim(0, 1.05)
        ax1.legend(fontsize=8)
        fig.tight_layout()
        _save(fig, path)


def plot_modes(path, basis, localized: int | None, title: str = ""):
    """Eigenvalue ladder and the intensity profile of the localized mode."""
    vals, vecs = basis.eigenvalues, basis.eigenvectors
    n = vals.size
    sites = np.arange(n) - n // 2
    with plt.rc_context(_RC):
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.0, 3.2))
        ax1.plot(np.arange(n), vals, "o", color="0.3", ms=4)
        if localized is not None:
            ax1.plot([localized], [vals[localized]], "o", color="#d62728", ms=6)
            ax2.bar(sites, vecs[:, localized] ** 2, color="#d62728")
        ax1.set_xlabel("mode index")
        ax1.set_ylabel(r"eigenvalue (mm$^{-1}$)")
        ax2.set_xlabel("guide (relative to centre)")
        ax2.set_ylabel("localized-mode weight")
        if title:
            fig.suptitle(title, fontsize=10)
        fig.tight_layout()
        _save(fig, path)

