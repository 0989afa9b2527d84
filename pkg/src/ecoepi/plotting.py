"""Static figures for the report command.

Figures are built on :class:`matplotlib.figure.Figure` directly, so no
interactive backend or pyplot state is involved.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

LABELS = ("S(t)", "I(t)", "Y(t)")
RC = {"linewidth": 1.2}


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    return path


def plot_trajectories(path, runs: dict, title: str = "") -> Path:
    """Three panels (S, I, Y) against time, one line per named run.

    ``runs`` maps a label to ``(t, x)`` with ``x`` of shape ``(n, 3)``.
    """
    fig = Figure(figsize=(11, 3.2))
    axes = fig.subplots(1, 3)
    for label, (t, x) in runs.items():
        x = np.asarray(x)
        for j, ax in enumerate(axes):
            ax.plot(t, x[:, j], label=label, **RC)
    for ax, lab in zip(axes, LABELS):
        ax.set_xlabel("t")
        ax.set_ylabel(lab)
        ax.grid(alpha=0.3)
    axes[0].legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_orbits(path, orbits: dict, title: str = "") -> Path:
    """One period of each periodic orbit, panels as in :func:`plot_trajectories`."""
    return plot_trajectories(path, orbits, title)


def plot_multipliers(path, multipliers: dict, title: str = "Floquet multipliers") -> Path:
    """Multipliers in the complex plane against the unit circle."""
    fig = Figure(figsize=(4.2, 4.2))
    ax = fig.subplots()
    th = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(th), np.sin(th), color="0.6", lw=0.8)
    for (label, mult), marker in zip(multipliers.items(), "oxs^v"):
        z = np.asarray(mult, dtype=complex)
        ax.scatter(z.real, z.imag, marker=marker, label=label)
    ax.axhline(0, color="0.8", lw=0.5)
    ax.axvline(0, color="0.8", lw=0.5)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend(fontsize=8)
    ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
