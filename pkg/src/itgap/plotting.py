"""Matplotlib rendering of the relative-error curves."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

_COLORS = {1: "tab:blue", 2: "tab:orange"}
_TITLES = {"tfim": "Transverse field Ising", "fermi_hubbard": "Fermi-Hubbard"}


def render_error_figure(curves: dict, path):
    """Semilog panels of gap relative error vs imaginary time, one per model.

    curves maps model name -> (tau_grid, {order: epsilon array}).
    """
    fig, axes = plt.subplots(1, len(curves), figsize=(5.0 * len(curves), 3.6))
    if len(curves) == 1:
        axes = [axes]
    for ax, (name, (tau_grid, eps)) in zip(np.atleast_1d(axes), curves.items()):
        for m, curve in sorted(eps.items()):
            mask = np.isfinite(curve) & (curve > 0)
            ax.semilogy(tau_grid[mask], curve[mask],
                        color=_COLORS.get(m, None), label=f"M={m}")
        ax.set_xlabel(r"$\tau$")
        ax.set_ylabel(r"relative error $\epsilon$")
        ax.set_title(_TITLES.get(name, name))
        ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
