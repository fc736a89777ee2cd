"""The structure-recovery algorithm: skeleton search, orientation, extraction.

The pipeline refines a mixed graph in place:

1. skeleton phase -- start complete, delete every edge some conditioning set
   of size at most k separates, recording the first separator found;
2. collider orientation over unshielded triples;
3. an orientation closure applying four rules to a fixpoint, cheapest first
   (the discriminating-path rule is postponed within every sweep because its
   search dominates the cost);
4. finalisation of partially oriented edges, extraction of a node ordering
   by repeatedly deleting legally removable nodes, and replacement of the
   remaining bidirectional edges with fresh hidden common causes.

Every mark a rule places is logged as a trace event, and identical inputs
yield byte-identical results: all iteration is in ascending index or
lexicographic subset order.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import InvariantError, MarkConflictError
from .graph import (
    ARROW,
    CIRCLE,
    TAIL,
    Dag,
    Mark,
    MixedGraph,
    SepsetTable,
    has_directed_path,
    is_collider,
    legally_removable,
)
from .independence import OracleStats
from .ipg import hidden_pair_name


@dataclass(frozen=True)
class TraceEvent:
    """One oriented edge: rule tag plus the edge's marks after the event."""

    rule: str
    a: int
    mark_a: Mark
    b: int
    mark_b: Mark
    changed_a: bool
    changed_b: bool


def serialize_trace(trace: Sequence[TraceEvent], names: Sequence[str]) -> str:
    lines = [
        f"{e.rule} {names[e.a]} {e.mark_a.value} {names[e.b]} {e.mark_b.value}"
        for e in trace
    ]
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass
class FrkciResult:
    """Everything a run produces, kept for verification and reporting."""

    pipg: MixedGraph
    dag: Dag
    sepsets: SepsetTable
    stats: OracleStats
    trace: list[TraceEvent]

    def trace_text(self) -> str:
        return serialize_trace(self.trace, self.pipg.names)


def _orient(
    g: MixedGraph,
    trace: list[TraceEvent] | None,
    rule: str,
    end: int,
    other: int,
    mark: Mark,
    end2_mark: Mark | None = None,
) -> bool:
    """Set one or both marks of edge end-other, logging a single event."""
    changed_end = g.set_mark(end, other, mark)
    changed_other = False
    if end2_mark is not None:
        changed_other = g.set_mark(other, end, end2_mark)
    if (changed_end or changed_other) and trace is not None:
        a, b = (end, other) if end < other else (other, end)
        ma, mb = g.edge_marks(a, b)
        trace.append(
            TraceEvent(
                rule=rule,
                a=a,
                mark_a=ma,
                b=b,
                mark_b=mb,
                changed_a=changed_end if a == end else changed_other,
                changed_b=changed_other if a == end else changed_end,
            )
        )
    return changed_end or changed_other


# -- skeleton ---------------------------------------------------------------


def skeleton_phase(oracle, vars: Sequence[int], k: int) -> tuple[MixedGraph, SepsetTable]:
    """Steps A and B: complete graph, then bounded separator search.

    First pass, per size j = 0..k: candidate separators are drawn from the
    current adjacency of either endpoint.  Second pass: for each surviving
    edge, every set of size 1..k over all variables, skipping sets the first
    pass already tried for that edge.  The first separator found deletes the
    edge and is recorded.
    """
    vars = list(vars)
    if k < 0:
        raise InvariantError("k must be non-negative")
    if len(set(vars)) != len(vars) or not vars:
        raise InvariantError("variable list must be non-empty and without repeats")
    m = len(vars)
    g = MixedGraph([oracle.names[v] for v in vars])
    for a, b in combinations(range(m), 2):
        g.add_edge(a, b, CIRCLE, CIRCLE)
    sepsets = SepsetTable()
    tried: dict[tuple[int, int], set[frozenset[int]]] = defaultdict(set)

    def query(a: int, b: int, s: Iterable[int]) -> bool:
        return oracle.query(vars[a], vars[b], [vars[v] for v in s])

    for size in range(k + 1):
        for a, b in g.edges():
            if not g.has_edge(a, b):
                continue
            found = None
            for side, other in ((a, b), (b, a)):
                candidates = [v for v in g.neighbors(side) if v != other]
                for s in combinations(candidates, size):
                    fs = frozenset(s)
                    if fs in tried[(a, b)]:
                        continue
                    tried[(a, b)].add(fs)
                    if query(a, b, s):
                        found = fs
                        break
                if found is not None:
                    break
            if found is not None:
                g.remove_edge(a, b)
                sepsets.record(a, b, found)

    for a, b in g.edges():
        rest = [v for v in range(m) if v not in (a, b)]
        found = None
        for size in range(1, k + 1):
            for s in combinations(rest, size):
                fs = frozenset(s)
                if fs in tried[(a, b)]:
                    continue
                if query(a, b, s):
                    found = fs
                    break
            if found is not None:
                break
        if found is not None:
            g.remove_edge(a, b)
            sepsets.record(a, b, found)
    return g, sepsets


# -- collider orientation ----------------------------------------------------


def orient_colliders(
    g: MixedGraph, sepsets: SepsetTable, trace: list[TraceEvent] | None = None
) -> None:
    """For every unshielded triple, orient a collider or record a non-collider.

    The middle vertex gets arrows from both sides exactly when it is absent
    from the recorded separator of the outer pair.
    """
    for b in range(g.n):
        for a, c in combinations(g.neighbors(b), 2):
            if g.has_edge(a, c):
                continue
            sep = sepsets.get(a, c)
            if sep is None:
                raise InvariantError(
                    f"non-adjacent pair {g.names[a]}, {g.names[c]} has no recorded separator"
                )
            if b not in sep:
                _orient(g, trace, "C", b, a, ARROW)
                _orient(g, trace, "C", b, c, ARROW)
            else:
                g.add_noncollider(a, b, c)


# -- orientation closure ------------------------------------------------------


def _d1_pass(g: MixedGraph, trace) -> bool:
    # A directed path alongside an edge forces the edge's far mark to an arrow.
    changed = False
    for a, b in g.edges():
        if g.mark_at(b, a) is not ARROW and has_directed_path(g, a, b):
            changed |= _orient(g, trace, "D1", b, a, ARROW)
        if g.mark_at(a, b) is not ARROW and has_directed_path(g, b, a):
            changed |= _orient(g, trace, "D1", a, b, ARROW)
    return changed


def _d2_pass(g: MixedGraph, trace) -> bool:
    # Collider a->b<-c with b adjacent to a constrained middle d of (a, d, c):
    # the edge b-d must point into b.
    changed = False
    for a, d, c in g.noncolliders():
        if g.has_edge(a, c):
            continue
        for b in g.neighbors(d):
            if b in (a, c):
                continue
            if not (g.has_edge(a, b) and g.has_edge(b, c)):
                continue
            if is_collider(g, a, b, c) and g.mark_at(b, d) is not ARROW:
                changed |= _orient(g, trace, "D2", b, d, ARROW)
    return changed


def _d4_pass(g: MixedGraph, trace) -> bool:
    # An arrow into a constrained middle forces the far side out of it.
    changed = False
    for a, mid, c in g.noncolliders():
        for p, r in ((a, c), (c, a)):
            if g.mark_at(mid, p) is ARROW and (
                g.mark_at(mid, r) is not TAIL or g.mark_at(r, mid) is not ARROW
            ):
                changed |= _orient(g, trace, "D4", mid, r, TAIL, end2_mark=ARROW)
    return changed


def _interior_ok(g: MixedGraph, prev: int, v: int, nxt: int, far: int) -> bool:
    """Check a path-interior vertex (its incoming side already carries an arrow)."""
    mark_on = g.mark_at(v, nxt)
    if mark_on is ARROW:
        # collider on the path: must be a parent of the far endpoint
        return (
            g.has_edge(v, far)
            and g.mark_at(v, far) is TAIL
            and g.mark_at(far, v) is ARROW
        )
    if mark_on is TAIL or g.is_noncollider(prev, v, nxt):
        # definite non-collider: the far endpoint must point into it
        return g.has_edge(v, far) and g.mark_at(far, v) is ARROW
    return False


def _arms(g: MixedGraph, start: int, far: int, mid: int, max_arm: int) -> list[list[int]]:
    """Simple chains start, v1, .., vt with vt adjacent to mid.

    Every chain edge carries an arrow toward mid, and every interior vertex
    satisfies the collider/definite-non-collider conditions relative to the
    far endpoint.  Depth-first, neighbours in ascending order.
    """
    arms: list[list[int]] = []
    path = [start]
    on_path = {start}

    def walk() -> None:
        last = path[-1]
        if g.has_edge(last, mid) and (
            len(path) == 1 or _interior_ok(g, path[-2], last, mid, far)
        ):
            arms.append(list(path))
        if len(path) - 1 >= max_arm:
            return
        for w in g.neighbors(last):
            if w in (mid, far) or w in on_path:
                continue
            if g.mark_at(w, last) is not ARROW:
                continue
            if len(path) > 1 and not _interior_ok(g, path[-2], last, w, far):
                continue
            path.append(w)
            on_path.add(w)
            walk()
            path.pop()
            on_path.discard(w)

    walk()
    return arms


def _find_ddp(
    g: MixedGraph,
    a: int,
    b: int,
    mid: int,
    max_edges: int | None,
    require_triangle: bool,
) -> list[int] | None:
    if len({a, b, mid}) != 3:
        raise InvariantError("path endpoints and the discriminated vertex must differ")
    if g.has_edge(a, b):
        return None
    cap = max_edges if max_edges is not None else g.n
    if cap < 3:
        return None
    arms_a = _arms(g, a, b, mid, cap - 2)
    if not arms_a:
        return None
    arms_b = _arms(g, b, a, mid, cap - 2)
    for arm_a in arms_a:
        set_a = set(arm_a)
        for arm_b in arms_b:
            if len(arm_a) + len(arm_b) < 3:
                continue  # a-mid-b alone has no discriminating structure
            if len(arm_a) + len(arm_b) > cap:
                continue
            if set_a & set(arm_b):
                continue
            if require_triangle and not g.has_edge(arm_a[-1], arm_b[-1]):
                continue
            return arm_a + [mid] + list(reversed(arm_b))
    return None


def find_definite_discriminating_path(
    g: MixedGraph, a: int, b: int, m: int, max_edges: int | None = None
) -> list[int] | None:
    """First definite discriminating path between a and b for m, if any.

    The path runs a .. m .. b with at least three edges, arrows pointing
    toward m along both sides, endpoints non-adjacent, and every interior
    vertex either a collider on the path that is a parent of the far
    endpoint, or a definite non-collider that the far endpoint points into.
    The search is a depth-first walk over simple partial paths, capped at
    ``max_edges`` (the node count by default).
    """
    return _find_ddp(g, a, b, m, max_edges, require_triangle=False)


def _d3_pass(
    g: MixedGraph,
    sepsets: SepsetTable,
    trace,
    require_triangle: bool,
    max_edges: int | None,
) -> bool:
    changed = False
    for mid in range(g.n):
        nbrs = g.neighbors(mid)
        if len(nbrs) < 2:
            continue
        if require_triangle and not any(
            g.has_edge(p, r) for p, r in combinations(nbrs, 2)
        ):
            continue
        for a in range(g.n):
            if a == mid:
                continue
            for b in range(a + 1, g.n):
                if b == mid or g.has_edge(a, b):
                    continue
                path = _find_ddp(g, a, b, mid, max_edges, require_triangle)
                if path is None:
                    continue
                at = path.index(mid)
                p, r = path[at - 1], path[at + 1]
                sep = sepsets.get(a, b)
                if sep is None:
                    raise InvariantError(
                        f"no separator recorded for {g.names[a]}, {g.names[b]}"
                    )
                if mid in sep:
                    changed |= g.add_noncollider(p, mid, r)
                else:
                    changed |= _orient(g, trace, "D3", mid, p, ARROW)
                    changed |= _orient(g, trace, "D3", mid, r, ARROW)
    return changed


def orientation_closure(
    g: MixedGraph,
    sepsets: SepsetTable,
    trace: list[TraceEvent] | None = None,
    d3_requires_triangle: bool = True,
    max_ddp_edges: int | None = None,
) -> None:
    """Apply the four orientation rules until nothing changes.

    Within a sweep the order is D1, D2, D4, D3, and any change restarts the
    sweep from the cheapest rule so the discriminating-path search runs only
    when nothing else applies.
    """
    while True:
        if _d1_pass(g, trace):
            continue
        if _d2_pass(g, trace):
            continue
        if _d4_pass(g, trace):
            continue
        if _d3_pass(g, sepsets, trace, d3_requires_triangle, max_ddp_edges):
            continue
        break


# -- finalisation and extraction ----------------------------------------------


def finalize_orientations(g: MixedGraph, trace: list[TraceEvent] | None = None) -> None:
    """Every circle-arrow edge becomes tail-arrow; all else is untouched."""
    for a, b, ma, mb in g.edges_with_marks():
        if ma is CIRCLE and mb is ARROW:
            _orient(g, trace, "E", a, b, TAIL)
        elif mb is CIRCLE and ma is ARROW:
            _orient(g, trace, "E", b, a, TAIL)


def extract_dag(g: MixedGraph, trace: list[TraceEvent] | None = None) -> MixedGraph:
    """Orient the remaining circle-circle edges by peeling removable nodes.

    Works on a scratch copy: repeatedly deletes the lowest-index legally
    removable node together with its edges and constraints; each deleted
    circle-circle edge is oriented into the deleted node in the result.
    Deadlock (no removable node while nodes remain) means the input violated
    the algorithm's premises and raises.
    """
    scratch = g.copy()
    remaining = list(range(g.n))
    while remaining:
        pick = None
        for a in remaining:
            if legally_removable(scratch, a):
                pick = a
                break
        if pick is None:
            stuck = ", ".join(g.names[v] for v in remaining)
            raise InvariantError(
                f"step F deadlock: no legally removable node among {stuck}; "
                "the oracle answers were not faithful to any DAG"
            )
        for other in scratch.neighbors(pick):
            ma, mb = scratch.edge_marks(pick, other)
            if ma is CIRCLE and mb is CIRCLE:
                _orient(g, trace, "F", pick, other, ARROW, end2_mark=TAIL)
        scratch.remove_node(pick)
        remaining.remove(pick)
    return g


def insert_hidden(g: MixedGraph) -> Dag:
    """Replace each bidirectional edge with a parentless hidden common cause."""
    names = list(g.names)
    hidden: list[int] = []
    edges: list[tuple[int, int]] = []
    for a, b, ma, mb in g.edges_with_marks():
        if ma is TAIL and mb is ARROW:
            edges.append((a, b))
        elif ma is ARROW and mb is TAIL:
            edges.append((b, a))
        elif ma is ARROW and mb is ARROW:
            h = len(names)
            names.append(hidden_pair_name(g.names[a], g.names[b]))
            hidden.append(h)
            edges.append((h, a))
            edges.append((h, b))
        else:
            raise InvariantError(
                f"step G: edge {g.names[a]}-{g.names[b]} still carries a circle mark"
            )
    return Dag(names, edges=edges, hidden=hidden)


# -- the full pipeline ---------------------------------------------------------


def fr_k_ci(
    oracle,
    vars: Sequence[int] | None = None,
    k: int = 1,
    d3_requires_triangle: bool = True,
) -> FrkciResult:
    """Run the whole pipeline and return every intermediate artifact.

    ``vars`` defaults to all of the oracle's variables.  The returned mixed
    graph is the state after the orientation closure, before finalisation.
    """
    if vars is None:
        vars = range(len(oracle.names))
    g, sepsets = skeleton_phase(oracle, vars, k)
    trace: list[TraceEvent] = []
    try:
        orient_colliders(g, sepsets, trace)
        orientation_closure(g, sepsets, trace, d3_requires_triangle)
        pipg = g.copy()
        finalize_orientations(g, trace)
        extract_dag(g, trace)
        dag = insert_hidden(g)
    except MarkConflictError as e:
        raise MarkConflictError(
            f"{e}\ntrace so far:\n{serialize_trace(trace, g.names)}"
        ) from e
    return FrkciResult(pipg=pipg, dag=dag, sepsets=sepsets, stats=oracle.stats, trace=trace)


def ci_reference(oracle, vars: Sequence[int]) -> MixedGraph:
    """Unbounded-conditioning baseline for small instances.

    Same pipeline with conditioning sets up to |vars| - 2; the collider and
    closure steps run on recorded constraints exactly as in the bounded
    algorithm.  Returns the oriented mixed graph (no extraction).
    """
    vars = list(vars)
    if len(vars) > 10:
        raise InvariantError("reference algorithm limited to 10 variables")
    k = max(len(vars) - 2, 0)
    g, sepsets = skeleton_phase(oracle, vars, k)
    orient_colliders(g, sepsets, None)
    orientation_closure(g, sepsets, None)
    return g
