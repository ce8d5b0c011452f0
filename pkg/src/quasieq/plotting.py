"""Figures for polynomial graphs, written to files next to CLI reports."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import FancyArrowPatch  # noqa: E402

from .polygraph import CountReport, PolynomialGraph  # noqa: E402


def figure_settings(fontsize: int = 10) -> None:
    plt.rcParams.update({
        "font.size": fontsize,
        "axes.titlesize": fontsize + 1,
        "axes.linewidth": 0.8,
        "savefig.dpi": 150,
        "savefig.bbox": "tight",
        "figure.facecolor": "white",
    })


def _circle_layout(n: int) -> list[tuple[float, float]]:
    if n == 1:
        return [(0.0, 0.0)]
    return [(math.cos(math.pi / 2 - 2 * math.pi * k / n),
             math.sin(math.pi / 2 - 2 * math.pi * k / n)) for k in range(n)]


def plot_incidence(ax, g: PolynomialGraph) -> None:
    m = g.incidence()
    if g.d:
        ax.imshow(m, cmap="Greys", vmin=0, vmax=1, interpolation="nearest")
    edge = -0.5
    for size in g.block_sizes[:-1]:
        edge += size
        ax.axhline(edge, color="tab:red", lw=0.8)
        ax.axvline(edge, color="tab:red", lw=0.8)
    ax.set_xticks(range(g.d))
    ax.set_yticks(range(g.d))
    ax.set_xticklabels(g.labels, rotation=90, fontsize=7)
    ax.set_yticklabels(g.labels, fontsize=7)
    ax.set_xlabel("variable")
    ax.set_ylabel("equation")
    ax.set_title("incidence matrix g")


def plot_digraph(ax, g: PolynomialGraph) -> None:
    pos = _circle_layout(g.d)
    colors = plt.get_cmap("tab10")
    for j, k in g.edges:
        arrow = FancyArrowPatch(pos[j], pos[k], arrowstyle="-|>", mutation_scale=9,
                                shrinkA=9, shrinkB=9, lw=0.6, color="0.35",
                                connectionstyle="arc3,rad=0.08")
        ax.add_patch(arrow)
    for k, (x, y) in enumerate(pos):
        ax.scatter([x], [y], s=260, color=colors(g.block_of(k) % 10), zorder=3,
                   edgecolors="black", linewidths=0.5)
        ax.annotate(g.labels[k], (x, y), ha="center", va="center", fontsize=6, zorder=4)
    ax.set_xlim(-1.3, 1.3)
    ax.set_ylim(-1.3, 1.3)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("polynomial graph")


def plot_polygraph(g: PolynomialGraph, path: str, report: CountReport | None = None) -> str:
    """Save the incidence matrix and a circular drawing of ``g`` to ``path``."""
    figure_settings()
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4.8))
    plot_incidence(left, g)
    plot_digraph(right, g)
    if report is not None:
        fig.suptitle(f"per(g) = {report.permanent_g},  "
                     f"prod d_i! = {report.divisor},  count = {report.bernstein_count}")
    fig.savefig(path)
    plt.close(fig)
    return path
