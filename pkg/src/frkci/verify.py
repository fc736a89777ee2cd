"""Equivalence and soundness checks between recovered and true structures.

All three checks are pure and deterministic; disagreement lists come back
sorted (pair order, then set size, then set contents) so they can be frozen
into golden files.  Hidden nodes are never query endpoints and never
conditioned on: only visible-pair separations matter.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence, Union

from .dsep import d_connected_nodes
from .errors import InvariantError
from .graph import Dag, MixedGraph
from .ipg import RkIpg

_ENUM_LIMIT = 10

GraphLike = Union[Dag, MixedGraph, RkIpg]


def _visible_adjacency(g: GraphLike) -> tuple[list[str], set[frozenset[str]]]:
    """Visible node names and visible-visible adjacency of a graph.

    For DAGs, a hidden node's visible children count as pairwise adjacent:
    a parentless two-child hidden node is structurally a bidirectional edge.
    """
    if isinstance(g, RkIpg):
        g = g.graph
    if isinstance(g, MixedGraph):
        pairs = {frozenset((g.names[a], g.names[b])) for a, b in g.edges()}
        return list(g.names), pairs
    vis = set(g.visible())
    pairs = {
        frozenset((g.names[p], g.names[c]))
        for p, c in g.edges
        if p in vis and c in vis
    }
    for h in sorted(g.hidden):
        kids = [c for c in g.children[h] if c in vis]
        for a, b in combinations(kids, 2):
            pairs.add(frozenset((g.names[a], g.names[b])))
    return [g.names[v] for v in sorted(vis)], pairs


def compare_skeletons(recovered: GraphLike, truth: GraphLike) -> dict:
    """Adjacency diff over visible pairs: extra and missing edges by name."""
    names_r, adj_r = _visible_adjacency(recovered)
    names_t, adj_t = _visible_adjacency(truth)
    if set(names_r) != set(names_t):
        raise InvariantError("graphs do not share a visible node set")
    superfluous = sorted(tuple(sorted(p)) for p in adj_r - adj_t)
    missing = sorted(tuple(sorted(p)) for p in adj_t - adj_r)
    return {"superfluous": superfluous, "missing": missing}


def _name_map(g: Dag, visibles: Sequence[str]) -> list[int]:
    ids = []
    for name in visibles:
        v = g.index_of(name)
        if v in g.hidden:
            raise InvariantError(f"{name} is hidden in one of the graphs")
        ids.append(v)
    return ids


def _subset_masks(m: int, max_size: int | None):
    sizes = range(m + 1) if max_size is None else range(min(max_size, m) + 1)
    for size in sizes:
        yield from combinations(range(m), size)


def independencies_agree_up_to_k(
    g1: Dag, g2: Dag, visibles: Sequence[str], k: int
) -> list[dict]:
    """All (x, y, S) with |S| <= k where the two graphs disagree on separation."""
    return _separation_diff(g1, g2, visibles, max_size=k, one_sided=False)


def soundness_unrestricted(
    output: Dag, truth: Dag, visibles: Sequence[str]
) -> list[dict]:
    """Separations claimed by ``output`` (any |S|) that fail in ``truth``."""
    return _separation_diff(output, truth, visibles, max_size=None, one_sided=True)


def _separation_diff(
    ga: Dag,
    gb: Dag,
    visibles: Sequence[str],
    max_size: int | None,
    one_sided: bool,
) -> list[dict]:
    visibles = list(visibles)
    if len(visibles) > _ENUM_LIMIT:
        raise InvariantError(f"exhaustive enumeration limited to {_ENUM_LIMIT} visibles")
    ids_a = _name_map(ga, visibles)
    ids_b = _name_map(gb, visibles)
    m = len(visibles)
    out = []
    for subset in _subset_masks(m, max_size):
        chosen = set(subset)
        sa = [ids_a[i] for i in subset]
        sb = [ids_b[i] for i in subset]
        # one reachability sweep per (source, S) answers every partner at once
        conn_a = {i: d_connected_nodes(ga, ids_a[i], sa) for i in range(m) if i not in chosen}
        conn_b = {i: d_connected_nodes(gb, ids_b[i], sb) for i in range(m) if i not in chosen}
        for i, j in combinations(range(m), 2):
            if i in chosen or j in chosen:
                continue
            sep_a = ids_a[j] not in conn_a[i]
            sep_b = ids_b[j] not in conn_b[i]
            if sep_a == sep_b:
                continue
            if one_sided and not sep_a:
                continue
            out.append(
                {
                    "x": visibles[i],
                    "y": visibles[j],
                    "s": [visibles[v] for v in subset],
                    "sep_in_a": sep_a,
                    "sep_in_b": sep_b,
                }
            )
    out.sort(key=lambda d: (d["x"], d["y"], len(d["s"]), d["s"]))
    return out
