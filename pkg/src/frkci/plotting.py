"""Render graphs to image files with matplotlib.

Nodes sit on a circle in index order, so the same graph always renders the
same picture.  Endpoint marks follow the usual glyphs: filled arrowheads for
arrows, small open circles for undecided ends, nothing for tails.
"""

from __future__ import annotations

import math

from matplotlib.figure import Figure
from matplotlib.patches import Circle as CirclePatch
from matplotlib.patches import FancyArrowPatch

from .graph import ARROW, CIRCLE, Dag, Mark, MixedGraph

_NODE_R = 0.09


def _layout(n: int) -> list[tuple[float, float]]:
    if n == 1:
        return [(0.0, 0.0)]
    return [
        (math.cos(2 * math.pi * i / n - math.pi / 2), math.sin(2 * math.pi * i / n - math.pi / 2))
        for i in range(n)
    ]


def _draw(ax, names, node_styles, edges) -> None:
    pos = _layout(len(names))
    for (xa, ya), (xb, yb), ma, mb in (
        (pos[a], pos[b], m1, m2) for a, b, m1, m2 in edges
    ):
        dx, dy = xb - xa, yb - ya
        dist = math.hypot(dx, dy) or 1.0
        ux, uy = dx / dist, dy / dist
        start = (xa + ux * _NODE_R, ya + uy * _NODE_R)
        end = (xb - ux * _NODE_R, yb - uy * _NODE_R)
        style = ("<" if ma is ARROW else "") + "-" + (">" if mb is ARROW else "")
        if style == "-":
            style = "-"
        ax.add_patch(
            FancyArrowPatch(
                start, end, arrowstyle=style, mutation_scale=14, color="0.2", lw=1.2
            )
        )
        for mark, (px, py) in ((ma, start), (mb, end)):
            if mark is CIRCLE:
                ax.add_patch(
                    CirclePatch((px, py), 0.022, facecolor="white", edgecolor="0.2", zorder=3)
                )
    for i, name in enumerate(names):
        x, y = pos[i]
        ax.add_patch(
            CirclePatch(
                (x, y),
                _NODE_R,
                facecolor="white",
                edgecolor="0.1",
                linestyle=node_styles[i],
                zorder=4,
            )
        )
        ax.text(x, y, name, ha="center", va="center", fontsize=7, zorder=5)
    ax.set_xlim(-1.3, 1.3)
    ax.set_ylim(-1.3, 1.3)
    ax.set_aspect("equal")
    ax.axis("off")


def plot_mixed_graph(g: MixedGraph, path, title: str | None = None) -> None:
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot(111)
    _draw(ax, g.names, ["solid"] * g.n, g.edges_with_marks())
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")


def plot_dag(dag: Dag, path, title: str | None = None) -> None:
    fig = Figure(figsize=(6, 6))
    ax = fig.add_subplot(111)
    styles = ["dashed" if v in dag.hidden else "solid" for v in range(dag.n)]
    edges = [(p, c, Mark.TAIL, Mark.ARROW) for p, c in sorted(dag.edges)]
    _draw(ax, dag.names, styles, edges)
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight")
