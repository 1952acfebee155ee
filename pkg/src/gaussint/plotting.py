"""Matplotlib report figures for sweep results."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .optimizer import SweepResult  # noqa: E402
from .serialize import reference_curves  # noqa: E402

STYLE = {
    "font.family": "serif",
    "mathtext.fontset": "stix",
    "font.size": 9,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "figure.dpi": 150,
    # fixed metadata keeps repeated renders byte-stable
    "svg.hashsalt": "gaussint",
}


def plot_sweep(result: SweepResult, path, title: str | None = None) -> None:
    """Optimized value and optimal parameters against ``N_tot``.

    The left panel overlays the shot-noise (dashed) and Heisenberg (dotted)
    scalings; the right panel shows every optimized parameter that varies
    along the sweep.
    """
    quantity = result.meta.get("quantity", "sensitivity")
    ok = np.isfinite(result.values)
    n, v = result.n_tot[ok], result.values[ok]
    names = sorted({k for p in result.points for k in p.params})
    varying = [k for k in names if np.ptp(np.nan_to_num(result.param(k)[ok])) > 1e-9] if ok.any() else []

    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(7.0, 2.9), constrained_layout=True)
        ax = axes[0]
        if ok.any():
            refs = reference_curves(n, quantity)
            ax.loglog(n, refs["shot noise"], "--", color="#c0392b", label="shot noise")
            ax.loglog(n, refs["Heisenberg"], ":", color="#1e8449", label="Heisenberg")
            ax.loglog(n, v, "-", color="#1f4e9c", label=result.meta.get("label", "optimum"))
        ax.set_xlabel(r"$N_{\rm tot}$")
        ax.set_ylabel(r"$H_\phi$" if quantity == "qfi" else r"$S_{\eta\,\rm min}$")
        ax.legend(frameon=False)

        ax = axes[1]
        for k in varying:
            ax.semilogx(n, result.param(k)[ok], label=k.replace("_", " "))
        ax.set_xlabel(r"$N_{\rm tot}$")
        ax.set_ylabel("optimal parameter")
        if varying:
            ax.legend(frameon=False)
        if title:
            fig.suptitle(title)
        fig.savefig(path, metadata={"Software": None} if str(path).endswith(".png") else None)
        plt.close(fig)
