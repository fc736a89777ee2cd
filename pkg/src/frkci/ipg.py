"""Ground-truth constructions from a known latent-variable DAG.

Given the true DAG these build, by direct enumeration, the graph objects the
learner is trying to recover: the including path graph, its k-bounded
analogue, and the hidden-cause expansion of the latter.  Everything here is
deliberately brute force (subset and trail enumeration) behind small-size
guards -- these are correctness references, not production paths.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .dsep import all_simple_trails, d_separated, trail_is_active
from .errors import InvariantError
from .graph import ARROW, CIRCLE, TAIL, Dag, MixedGraph

_RK_VISIBLE_LIMIT = 12


@dataclass(frozen=True)
class RkIpg:
    """A fully oriented mixed graph (no circle marks) built for bound k."""

    graph: MixedGraph
    k: int


def _subsets(candidates: Sequence[int], max_size: int) -> Iterator[tuple[int, ...]]:
    """Subsets in size-ascending, lexicographic order; empty for max_size < 0."""
    for size in range(0, max_size + 1):
        yield from combinations(candidates, size)


def hidden_pair_name(name_a: str, name_b: str) -> str:
    return f"H_{name_a}_{name_b}"


def build_including_path_graph(g: Dag) -> MixedGraph:
    """Edge and orientation induced by explicit path enumeration.

    A path between visible a and b qualifies iff every interior visible
    vertex is a collider on the path with a directed path to a or b.  A
    qualifying path ingoing at both ends yields a bidirectional edge; one
    outgoing at exactly one end yields a directed edge.  Paths outgoing at
    both ends induce nothing, and opposite one-way paths (possible only
    through hidden colliders that are ancestors of neither end) are merged
    into a bidirectional edge rather than picking a direction silently.
    """
    vis = g.visible()
    if not vis:
        raise InvariantError("need at least one visible node")
    out = MixedGraph([g.names[v] for v in vis])
    pos = {v: i for i, v in enumerate(vis)}
    for a, b in combinations(vis, 2):
        endings = set()
        for trail in all_simple_trails(g, a, b):
            ok = True
            for i in range(1, len(trail) - 1):
                v = trail[i]
                if v in g.hidden:
                    continue
                u, w = trail[i - 1], trail[i + 1]
                if not ((u, v) in g.edges and (w, v) in g.edges):
                    ok = False
                    break
                if a not in g.descendants_of(v) and b not in g.descendants_of(v):
                    ok = False
                    break
            if not ok:
                continue
            in_a = (trail[1], a) in g.edges
            in_b = (trail[-2], b) in g.edges
            endings.add((in_a, in_b))
        if (True, True) in endings or ((False, True) in endings and (True, False) in endings):
            out.add_edge(pos[a], pos[b], ARROW, ARROW)
        elif (False, True) in endings:
            out.add_edge(pos[a], pos[b], TAIL, ARROW)
        elif (True, False) in endings:
            out.add_edge(pos[a], pos[b], ARROW, TAIL)
    return out


def rk_adjacent(g: Dag, a: int, b: int, k: int) -> bool:
    """True iff no visible set of size at most k d-separates a and b."""
    others = [v for v in g.visible() if v not in (a, b)]
    return not any(d_separated(g, a, b, s) for s in _subsets(others, k))


def rk_skeleton(g: Dag, k: int) -> MixedGraph:
    """Adjacency of the k-bounded including path graph, all marks circle.

    Unlike :func:`build_rk_ipg` this needs no trail enumeration and scales to
    benchmark-sized graphs.
    """
    if k < 0:
        raise InvariantError("k must be non-negative")
    vis = g.visible()
    out = MixedGraph([g.names[v] for v in vis])
    pos = {v: i for i, v in enumerate(vis)}
    for a, b in combinations(vis, 2):
        if rk_adjacent(g, a, b, k):
            out.add_edge(pos[a], pos[b], CIRCLE, CIRCLE)
    return out


def build_rk_ipg(g: Dag, k: int) -> RkIpg:
    """The k-bounded including path graph with endpoint orientations.

    An edge survives iff every visible conditioning set of size <= k fails to
    separate its endpoints.  An endpoint gets a tail iff some visible set of
    size <= k-1 blocks every trail whose final edge points into that
    endpoint; otherwise it gets an arrow.  An edge qualifying for tails at
    both ends signals a broken premise and raises.
    """
    if k < 0:
        raise InvariantError("k must be non-negative")
    vis = g.visible()
    if len(vis) > _RK_VISIBLE_LIMIT:
        raise InvariantError(
            f"brute-force construction limited to {_RK_VISIBLE_LIMIT} visible nodes"
        )
    out = rk_skeleton(g, k)
    pos = {v: i for i, v in enumerate(vis)}
    for a, b in combinations(vis, 2):
        if not out.has_edge(pos[a], pos[b]):
            continue
        trails = all_simple_trails(g, a, b)
        others = [v for v in vis if v not in (a, b)]
        mark_a = TAIL if _blockable_end(g, trails, a, end_is_first=True, others=others, k=k) else ARROW
        mark_b = TAIL if _blockable_end(g, trails, b, end_is_first=False, others=others, k=k) else ARROW
        if mark_a is TAIL and mark_b is TAIL:
            raise InvariantError(
                f"edge {g.names[a]}-{g.names[b]} came out tail-tail; "
                "this contradicts the construction's premises"
            )
        out.set_mark(pos[a], pos[b], mark_a)
        out.set_mark(pos[b], pos[a], mark_b)
    return RkIpg(graph=out, k=k)


def _blockable_end(
    g: Dag,
    trails: list[list[int]],
    end: int,
    end_is_first: bool,
    others: Sequence[int],
    k: int,
) -> bool:
    """Can some set of size <= k-1 block every trail ingoing at ``end``?

    The quantifier is existential over actual candidate sets: for k = 0
    there are none, so nothing is blockable and every end comes out an
    arrow, ingoing trails or not.
    """
    ingoing = []
    for t in trails:
        prev = t[1] if end_is_first else t[-2]
        if (prev, end) in g.edges:
            ingoing.append(t)
    return any(
        not any(trail_is_active(g, t, s) for t in ingoing)
        for s in _subsets(others, k - 1)
    )


def build_fhg(pi: RkIpg | MixedGraph) -> Dag:
    """Replace each bidirectional edge with a fresh parentless hidden cause.

    Unidirectional edges are copied; every circle mark is rejected.  The
    result is checked for acyclicity (a cycle means the input was not a
    legitimate construction output).
    """
    mg = pi.graph if isinstance(pi, RkIpg) else pi
    names = list(mg.names)
    hidden: list[int] = []
    edges: list[tuple[int, int]] = []
    for a, b, ma, mb in mg.edges_with_marks():
        if CIRCLE in (ma, mb):
            raise InvariantError(
                f"circle mark on edge {mg.names[a]}-{mg.names[b]}; "
                "input must be fully oriented"
            )
        if ma is TAIL and mb is ARROW:
            edges.append((a, b))
        elif ma is ARROW and mb is TAIL:
            edges.append((b, a))
        elif ma is ARROW and mb is ARROW:
            h = len(names)
            names.append(hidden_pair_name(mg.names[a], mg.names[b]))
            hidden.append(h)
            edges.append((h, a))
            edges.append((h, b))
        else:
            raise InvariantError(
                f"edge {mg.names[a]}-{mg.names[b]} is tail-tail; not a legal input"
            )
    return Dag(names, edges=edges, hidden=hidden)
