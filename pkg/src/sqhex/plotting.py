"""SVG figures: tilings, frozen boundaries, scalar fields and corner statistics."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from .lattice import NE_SW, NW_SE, VERTICAL, Graph  # noqa: E402

# fixed salt and no date keep repeated runs byte-identical
plt.rcParams["svg.hashsalt"] = "sqhex"
_META = {"Date": None}

DIMER_COLOURS = {NE_SW: "#1b6ca8", NW_SE: "#d1495b", VERTICAL: "#edae49"}


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)
    return path


def plot_matching(g: Graph, matching: Iterable[int], path: str | Path, title: str | None = None) -> Path:
    """Lattice in light grey with the dimers coloured by direction."""
    chosen = set(matching)
    pos = {v.id: v.position for v in g.vertices}
    width = max(3.0, 0.12 * max(v.X for v in g.vertices))
    fig, ax = plt.subplots(figsize=(width, width * 0.55))
    faint = [(pos[e.white], pos[e.black]) for e in g.edges if e.id not in chosen]
    ax.add_collection(LineCollection(faint, colors="#cccccc", linewidths=0.4))
    for direction, colour in DIMER_COLOURS.items():
        segs = [(pos[e.white], pos[e.black]) for e in g.edges if e.id in chosen and e.direction == direction]
        if segs:
            ax.add_collection(LineCollection(segs, colors=colour, linewidths=2.2, label=direction))
    real = [v for v in g.vertices if not v.virtual]
    if len(real) < 400:
        ax.scatter([v.position[0] for v in real], [v.position[1] for v in real], s=4,
                   c=["k" if v.color == "black" else "w" for v in real], edgecolors="k", linewidths=0.3, zorder=3)
    ax.set_aspect("equal")
    ax.autoscale()
    ax.axis("off")
    ax.legend(loc="upper right", fontsize=7, frameon=False)
    if title:
        ax.set_title(title, fontsize=9)
    return _save(fig, path)


def plot_frozen_boundary(
    segments: Sequence[tuple[np.ndarray, np.ndarray]],
    tangency: Sequence[tuple[str, float, float]],
    path: str | Path,
    a: Sequence[float] = (),
    b: Sequence[float] = (),
    slope: float = 0.0,
    title: str | None = None,
) -> Path:
    """Frozen boundary with the tangent lines ``chi = a_i`` and ``chi + slope kappa = b_i``."""
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for chi, kappa in segments:
        ax.plot(chi, kappa, color="k", lw=1.2)
    for v in a:
        ax.plot([v, v], [0, 1], color="#1b6ca8", lw=0.6, ls="--")
    for v in b:
        ax.plot([v, v - slope], [0, 1], color="#d1495b", lw=0.6, ls="--")
    if tangency:
        ax.scatter([t[1] for t in tangency], [t[2] for t in tangency], s=14, color="#edae49", zorder=3)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel(r"$\chi$")
    ax.set_ylabel(r"$\kappa$")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def plot_field(
    chi: np.ndarray, kappa: np.ndarray, values: np.ndarray, path: str | Path, label: str, cmap: str = "viridis"
) -> Path:
    """Scalar field on a ``(kappa, chi)`` grid; NaN cells are left blank."""
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    mesh = ax.pcolormesh(chi, kappa, np.ma.masked_invalid(values), shading="nearest", cmap=cmap)
    fig.colorbar(mesh, ax=ax, label=label)
    ax.set_xlabel(r"$\chi$")
    ax.set_ylabel(r"$\kappa$")
    fig.tight_layout()
    return _save(fig, path)


def plot_gue(level1: np.ndarray, gaps: np.ndarray, path: str | Path, spacing_pdf) -> Path:
    """Histograms of the level-one statistic and the level-two gap against their limits."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(7.5, 3.0))
    ax1.hist(level1, bins=40, density=True, color="#9ecae1", edgecolor="white")
    s = np.linspace(-4, 4, 400)
    ax1.plot(s, np.exp(-(s**2) / 2) / np.sqrt(2 * np.pi), color="k", lw=1)
    ax1.set_title("level 1", fontsize=9)
    ax2.hist(gaps, bins=40, density=True, color="#fdae6b", edgecolor="white")
    s = np.linspace(0, max(6.0, float(np.max(gaps)) if len(gaps) else 6.0), 400)
    ax2.plot(s, spacing_pdf(s), color="k", lw=1)
    ax2.set_title("level 2 gap", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def plot_curve(x: np.ndarray, y: np.ndarray, path: str | Path, xlabel: str, ylabel: str, ylim=None) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(x, y, color="k", lw=1)
    if ylim:
        ax.set_ylim(*ylim)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    return _save(fig, path)
