"""Figures for power sweeps and runtime benchmarks.

Output format follows the file extension. SVG output keeps text as text and
carries no timestamp, so identical inputs give byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .simharness.bench import BenchRow  # noqa: E402
from .simharness.power import PowerCurve  # noqa: E402

STYLE = {
    "svg.fonttype": "none",
    "svg.hashsalt": "twosample",
    "font.size": 10,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}

LABELS = {
    "ks": "KS",
    "kuiper": "Kuiper",
    "cvm": "CVM",
    "ad": "AD",
    "wass": "Wasserstein",
    "dts": "DTS",
    "ttest": "t-test",
    "ftest": "F-test",
}

AXIS_LABELS = {
    "mu": "difference in means",
    "sigma2": "ratio of variances",
    "n": "n per sample",
}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if path.suffix.lower() == ".svg" else None
    fig.savefig(path, bbox_inches="tight", metadata=metadata)
    plt.close(fig)
    return path


def plot_power_curve(curve: PowerCurve, path: str | Path, title: str | None = None) -> Path:
    """Rejection rate against the sweep variable, one line per test.

    Legend entries run from the highest to the lowest mean power.
    """
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4))
        cmap = plt.get_cmap("viridis")
        ordered = curve.ordered_tests()
        for rank, test in enumerate(ordered):
            color = cmap(rank / max(1, len(ordered) - 1))
            ax.plot(curve.sweep_values, curve.rates[test], marker="o", ms=3, lw=1.2,
                    color=color, label=LABELS.get(test, test))
        ax.axhline(curve.alpha, color="0.6", lw=0.8, ls="--")
        ax.set_ylim(0, 1)
        ax.set_xlabel(AXIS_LABELS.get(curve.sweep_name, curve.sweep_name))
        ax.set_ylabel("rejection rate")
        if curve.sweep_name == "n" and len(curve.sweep_values) > 2:
            ax.set_xscale("log")
        ax.set_title(title or f"{curve.family} ({curve.n_sims} sims, alpha={curve.alpha:g})")
        ax.legend(loc="best", frameon=False)
        return _save(fig, path)


def plot_bench(rows: Sequence[BenchRow], path: str | Path) -> Path:
    """Mean runtime against pooled size with its 95% band."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4))
        ns = [r.n for r in rows]
        ax.fill_between(ns, [r.lo95 for r in rows], [r.hi95 for r in rows], color="0.85")
        ax.plot(ns, [r.mean_seconds for r in rows], color="k", marker="o", ms=3)
        ax.set_xlabel("n = n_a + n_b")
        ax.set_ylabel("seconds per test")
        return _save(fig, path)
