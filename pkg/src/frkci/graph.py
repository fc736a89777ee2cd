"""Core graph representations.

Two graph kinds live here:

* :class:`Dag` -- a directed acyclic graph whose nodes may be flagged hidden.
  Used for ground-truth models and for final belief-network structures.
* :class:`MixedGraph` -- a graph over visible nodes whose edge endpoints carry
  one of three marks (tail, arrow, circle), together with recorded
  "definite non-collider" constraints.  This is the object the structure
  learner refines in place.

Nodes are dense integer indices ``0..n-1`` paired with unique display names.
Both graph kinds are meant to be built once and then shared read-only;
mark refinement on a mixed graph is a single-writer operation.
"""

from __future__ import annotations

from collections import deque
from enum import Enum
from typing import Iterable, Sequence, Union

from .errors import InvariantError, MarkConflictError


class Mark(Enum):
    """Endpoint mark on a mixed-graph edge."""

    TAIL = "tail"
    ARROW = "arrow"
    CIRCLE = "circle"

    def __repr__(self) -> str:  # terse in test diffs
        return self.value


TAIL = Mark.TAIL
ARROW = Mark.ARROW
CIRCLE = Mark.CIRCLE

_DOT_MARK = {TAIL: "none", ARROW: "normal", CIRCLE: "odot"}


def _check_names(names: Sequence[str]) -> list[str]:
    names = list(names)
    if len(set(names)) != len(names):
        raise InvariantError("node display names must be unique")
    return names


class Dag:
    """Directed acyclic graph with visible/hidden node labels.

    Immutable after construction: all derived structure (topological order,
    descendant sets) is computed once and may be shared across threads.
    """

    def __init__(
        self,
        names: Sequence[str],
        edges: Iterable[tuple[int, int]] = (),
        hidden: Iterable[int] = (),
    ):
        self.names = _check_names(names)
        self.n = len(self.names)
        self.hidden = frozenset(hidden)
        for h in self.hidden:
            self._check_node(h)
        self.parents: list[list[int]] = [[] for _ in range(self.n)]
        self.children: list[list[int]] = [[] for _ in range(self.n)]
        self.edges: set[tuple[int, int]] = set()
        for p, c in edges:
            self._check_node(p)
            self._check_node(c)
            if p == c:
                raise InvariantError(f"self-loop at {self.names[p]}")
            if (p, c) in self.edges:
                raise InvariantError(f"duplicate edge {self.names[p]}->{self.names[c]}")
            self.edges.add((p, c))
            self.parents[c].append(p)
            self.children[p].append(c)
        for adj in self.parents:
            adj.sort()
        for adj in self.children:
            adj.sort()
        self.topological_order = self._toposort()
        self._descendants: list[frozenset[int]] | None = None

    def _check_node(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise InvariantError(f"unknown node id {v}")

    def _toposort(self) -> list[int]:
        indeg = [len(self.parents[v]) for v in range(self.n)]
        queue = deque(v for v in range(self.n) if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in self.children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != self.n:
            raise InvariantError("directed cycle detected")
        return order

    def visible(self) -> list[int]:
        return [v for v in range(self.n) if v not in self.hidden]

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InvariantError(f"unknown node name {name!r}") from None

    def descendants_of(self, v: int) -> frozenset[int]:
        """Strict descendants of ``v``, computed once per graph and cached."""
        if self._descendants is None:
            desc: list[set[int]] = [set() for _ in range(self.n)]
            for v2 in reversed(self.topological_order):
                for c in self.children[v2]:
                    desc[v2].add(c)
                    desc[v2] |= desc[c]
            self._descendants = [frozenset(s) for s in desc]
        return self._descendants[v]

    def to_dot(self, graph_name: str = "g") -> str:
        lines = [f"digraph {graph_name} {{"]
        for v in range(self.n):
            style = " [style=dashed]" if v in self.hidden else ""
            lines.append(f'  "{self.names[v]}"{style};')
        for p, c in sorted(self.edges):
            lines.append(
                f'  "{self.names[p]}" -> "{self.names[c]}"'
                " [dir=both, arrowtail=none, arrowhead=normal];"
            )
        lines.append("}")
        return "\n".join(lines) + "\n"


class MixedGraph:
    """Graph over visible nodes with per-endpoint marks and non-collider constraints.

    Edges are unordered: ``A o-> B`` and ``B <-o A`` denote the same object.
    A constraint triple ``(a, b, c)`` states that the edges a-b and b-c can
    never meet head-to-head at ``b``; it is symmetric in ``a`` and ``c``.
    """

    def __init__(self, names: Sequence[str]):
        self.names = _check_names(names)
        self.n = len(self.names)
        self._marks: dict[tuple[int, int], list[Mark]] = {}
        self._adj: list[set[int]] = [set() for _ in range(self.n)]
        self._constraints: set[tuple[int, int, int]] = set()

    @classmethod
    def from_edges(
        cls,
        names: Sequence[str],
        edges: Iterable[tuple[int, int, Mark, Mark]] = (),
        constraints: Iterable[tuple[int, int, int]] = (),
    ) -> "MixedGraph":
        g = cls(names)
        for a, b, ma, mb in edges:
            g.add_edge(a, b, ma, mb)
        for a, b, c in constraints:
            g.add_noncollider(a, b, c)
        return g

    def _check_node(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise InvariantError(f"unknown node id {v}")

    @staticmethod
    def _key(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    def add_edge(self, a: int, b: int, mark_a: Mark = CIRCLE, mark_b: Mark = CIRCLE) -> None:
        self._check_node(a)
        self._check_node(b)
        if a == b:
            raise InvariantError(f"self-loop at {self.names[a]}")
        key = self._key(a, b)
        if key in self._marks:
            raise InvariantError(f"duplicate edge {self.names[a]}-{self.names[b]}")
        self._marks[key] = [mark_a, mark_b] if a < b else [mark_b, mark_a]
        self._adj[a].add(b)
        self._adj[b].add(a)

    def remove_edge(self, a: int, b: int) -> None:
        key = self._key(a, b)
        if key not in self._marks:
            raise InvariantError(f"no edge {self.names[a]}-{self.names[b]}")
        del self._marks[key]
        self._adj[a].discard(b)
        self._adj[b].discard(a)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self._adj[a] if 0 <= a < self.n else False

    def neighbors(self, a: int) -> list[int]:
        self._check_node(a)
        return sorted(self._adj[a])

    def degree(self, a: int) -> int:
        return len(self._adj[a])

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._marks)

    def edges_with_marks(self) -> list[tuple[int, int, Mark, Mark]]:
        return [(a, b, m[0], m[1]) for (a, b), m in sorted(self._marks.items())]

    def edge_marks(self, a: int, b: int) -> tuple[Mark, Mark]:
        """Marks of edge a-b, given in (at-a, at-b) order."""
        marks = self._marks.get(self._key(a, b))
        if marks is None:
            raise InvariantError(f"no edge {self.names[a]}-{self.names[b]}")
        return (marks[0], marks[1]) if a < b else (marks[1], marks[0])

    def mark_at(self, end: int, other: int) -> Mark:
        """The mark at endpoint ``end`` on the edge between ``end`` and ``other``."""
        return self.edge_marks(end, other)[0]

    def set_mark(self, end: int, other: int, mark: Mark) -> bool:
        """Refine the mark at ``end`` on edge end-other.  Returns True if changed.

        Circle may be refined to arrow or tail; arrow and tail are final, and
        any attempt to overwrite one with a different definite mark raises
        :class:`MarkConflictError`.
        """
        key = self._key(end, other)
        marks = self._marks.get(key)
        if marks is None:
            raise InvariantError(f"no edge {self.names[end]}-{self.names[other]}")
        pos = 0 if end < other else 1
        cur = marks[pos]
        if cur is mark:
            return False
        if cur is not CIRCLE:
            raise MarkConflictError(
                f"cannot overwrite {cur.value} with {mark.value} at "
                f"{self.names[end]} on edge {self.names[end]}-{self.names[other]}"
            )
        if mark is ARROW:
            self._check_head_to_head(end, other)
        marks[pos] = mark
        return True

    def _check_head_to_head(self, end: int, other: int) -> None:
        # Placing an arrow at `end` coming from `other` must not complete a
        # head-to-head meeting at a recorded non-collider (other, end, z).
        for x, b, z in self._constraints:
            if b != end or other not in (x, z):
                continue
            far = z if other == x else x
            if self.has_edge(far, end) and self.mark_at(end, far) is ARROW:
                raise MarkConflictError(
                    f"arrow at {self.names[end]} from {self.names[other]} contradicts "
                    f"non-collider constraint ({self.names[x]}, {self.names[b]}, {self.names[z]})"
                )

    # -- non-collider constraints ------------------------------------------

    def add_noncollider(self, a: int, b: int, c: int) -> bool:
        """Record that edges a-b and b-c never meet head-to-head at b."""
        if not self.has_edge(a, b) or not self.has_edge(b, c):
            raise InvariantError(
                f"constraint ({self.names[a]}, {self.names[b]}, {self.names[c]}) "
                "requires both edges to exist"
            )
        if a == c:
            raise InvariantError("constraint outer nodes must differ")
        triple = (min(a, c), b, max(a, c))
        if triple in self._constraints:
            return False
        if self.mark_at(b, a) is ARROW and self.mark_at(b, c) is ARROW:
            raise InvariantError(
                f"edges already meet head-to-head at {self.names[b]}; "
                "non-collider constraint is contradictory"
            )
        self._constraints.add(triple)
        return True

    def is_noncollider(self, a: int, b: int, c: int) -> bool:
        return (min(a, c), b, max(a, c)) in self._constraints

    def noncolliders(self) -> list[tuple[int, int, int]]:
        return sorted(self._constraints)

    def has_middle_constraint(self, b: int) -> bool:
        return any(t[1] == b for t in self._constraints)

    # -- node removal (used by the DAG-extraction scratch copy) -------------

    def remove_node(self, a: int) -> None:
        """Drop every edge incident to ``a`` and every constraint involving it."""
        for other in list(self._adj[a]):
            self.remove_edge(a, other)
        self._constraints = {t for t in self._constraints if a not in t}

    def copy(self) -> "MixedGraph":
        g = MixedGraph(self.names)
        g._marks = {k: list(v) for k, v in self._marks.items()}
        g._adj = [set(s) for s in self._adj]
        g._constraints = set(self._constraints)
        return g

    def to_dot(self, graph_name: str = "g") -> str:
        lines = [f"digraph {graph_name} {{"]
        for name in self.names:
            lines.append(f'  "{name}";')
        for a, b, ma, mb in self.edges_with_marks():
            lines.append(
                f'  "{self.names[a]}" -> "{self.names[b]}"'
                f" [dir=both, arrowtail={_DOT_MARK[ma]}, arrowhead={_DOT_MARK[mb]}];"
            )
        for a, b, c in self.noncolliders():
            lines.append(f"  // noncollider {self.names[a]} {self.names[b]} {self.names[c]}")
        lines.append("}")
        return "\n".join(lines) + "\n"


class SepsetTable:
    """Separating sets recorded per unordered node pair.

    Only the first set found is kept: later orientation steps test membership
    against one canonical set per pair, so overwriting would change results.
    """

    def __init__(self) -> None:
        self._table: dict[tuple[int, int], frozenset[int]] = {}

    def record(self, a: int, b: int, s: Iterable[int]) -> None:
        key = (a, b) if a < b else (b, a)
        sep = frozenset(s)
        if a in sep or b in sep:
            raise InvariantError("a separating set cannot contain either endpoint")
        self._table.setdefault(key, sep)

    def get(self, a: int, b: int) -> frozenset[int] | None:
        return self._table.get((a, b) if a < b else (b, a))

    def has(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self._table

    def items(self) -> list[tuple[tuple[int, int], frozenset[int]]]:
        return sorted(self._table.items())

    def __len__(self) -> int:
        return len(self._table)


AnyGraph = Union[Dag, MixedGraph]


def _directed_successors(g: AnyGraph, v: int) -> list[int]:
    if isinstance(g, Dag):
        return g.children[v]
    return [
        w
        for w in g.neighbors(v)
        if g.mark_at(v, w) is TAIL and g.mark_at(w, v) is ARROW
    ]


def has_directed_path(g: AnyGraph, src: int, dst: int) -> bool:
    """True iff a path of fully directed edges leads from src to dst.

    On a mixed graph a directed edge requires a tail at the source and an
    arrow at the target; circle ends never count.  ``src == dst`` holds
    trivially (zero-length path).
    """
    if not (0 <= src < g.n) or not (0 <= dst < g.n):
        raise InvariantError("unknown node id")
    if src == dst:
        return True
    seen = {src}
    stack = [src]
    while stack:
        v = stack.pop()
        for w in _directed_successors(g, v):
            if w == dst:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def is_collider(g: MixedGraph, a: int, b: int, c: int) -> bool:
    """True iff edges a-b and b-c both carry arrow marks at b."""
    return g.mark_at(b, a) is ARROW and g.mark_at(b, c) is ARROW


def legally_removable(g: MixedGraph, a: int) -> bool:
    """True iff ``a`` may be deleted during belief-network extraction.

    Blocked when some constraint has ``a`` as its middle vertex, or when an
    edge makes ``a`` point into another node (arrow at the far end without an
    arrow back at ``a``).  A bidirectional edge does not block: it stands for
    a hidden common cause and imposes no ordering between its endpoints.
    """
    g._check_node(a)
    if g.has_middle_constraint(a):
        return False
    for other in g._adj[a]:
        if g.mark_at(other, a) is ARROW and g.mark_at(a, other) is not ARROW:
            return False
    return True
