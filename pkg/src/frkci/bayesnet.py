"""Discrete Bayesian networks: validation, seeded sampling, and file I/O.

Networks pair a :class:`~frkci.graph.Dag` with per-node categorical CPTs.
Parent configurations enumerate with the last parent varying fastest.  All
randomness flows through numpy's seedable PCG64 generator, so a fixed seed
reproduces networks and samples exactly within this implementation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from .errors import DataError
from .graph import Dag
from .independence import Dataset

_ROW_SUM_TOL = 1e-9


@dataclass
class DiscreteBayesNet:
    """DAG plus CPTs.  ``parent_order[v]`` fixes the configuration enumeration."""

    dag: Dag
    states: list[list[str]]
    parent_order: list[list[int]]
    cpts: list[np.ndarray]

    def __post_init__(self) -> None:
        n = self.dag.n
        if not (len(self.states) == len(self.parent_order) == len(self.cpts) == n):
            raise DataError("per-node lists do not match the node count")
        for v in range(n):
            name = self.dag.names[v]
            if sorted(self.parent_order[v]) != self.dag.parents[v]:
                raise DataError(f"parent order of {name} does not match the graph")
            cpt = np.asarray(self.cpts[v], dtype=np.float64)
            self.cpts[v] = cpt
            expect_rows = 1
            for p in self.parent_order[v]:
                expect_rows *= len(self.states[p])
            if cpt.shape != (expect_rows, len(self.states[v])):
                raise DataError(
                    f"CPT of {name} has shape {cpt.shape}, "
                    f"expected ({expect_rows}, {len(self.states[v])})"
                )
            bad = np.abs(cpt.sum(axis=1) - 1.0) > _ROW_SUM_TOL
            if bad.any():
                raise DataError(f"CPT row of {name} does not sum to 1")
            if (cpt < 0).any():
                raise DataError(f"CPT of {name} has a negative entry")

    def config_index(self, v: int, assignment: Sequence[int]) -> int:
        """Row index for a full assignment (last parent varies fastest)."""
        idx = 0
        for p in self.parent_order[v]:
            idx = idx * len(self.states[p]) + assignment[p]
        return idx


def forward_sample(bn: DiscreteBayesNet, n: int, seed: int) -> Dataset:
    """Ancestral sampling; hidden columns are generated, then dropped.

    Deterministic for a fixed seed: nodes consume randomness in topological
    order, one uniform draw per row per node.
    """
    if n < 0:
        raise DataError("row count must be non-negative")
    rng = np.random.Generator(np.random.PCG64(seed))
    dag = bn.dag
    values = np.zeros((n, dag.n), dtype=np.int64)
    for v in dag.topological_order:
        parents = bn.parent_order[v]
        if parents:
            config = np.zeros(n, dtype=np.int64)
            for p in parents:
                config = config * len(bn.states[p]) + values[:, p]
        else:
            config = np.zeros(n, dtype=np.int64)
        cdf = np.cumsum(bn.cpts[v], axis=1)
        u = rng.random(n)
        values[:, v] = np.sum(u[:, None] > cdf[config], axis=1)
    vis = dag.visible()
    return Dataset(
        names=[dag.names[v] for v in vis],
        states=[list(bn.states[v]) for v in vis],
        rows=values[:, vis],
    )


def random_parameters(
    dag: Dag,
    seed: int,
    concentration: float = 1.0,
    state_counts: Sequence[int] | None = None,
    floor: float = 1e-3,
) -> DiscreteBayesNet:
    """Draw each CPT row from a symmetric Dirichlet.

    Rows are clamped away from zero by ``floor`` and renormalised, which
    keeps near-deterministic rows (and with them faithfulness violations)
    unlikely.
    """
    if concentration <= 0:
        raise DataError("concentration must be positive")
    counts = list(state_counts) if state_counts is not None else [2] * dag.n
    if len(counts) != dag.n or any(c < 2 for c in counts):
        raise DataError("every node needs at least two states")
    rng = np.random.Generator(np.random.PCG64(seed))
    states = [[f"s{i}" for i in range(c)] for c in counts]
    parent_order = [list(dag.parents[v]) for v in range(dag.n)]
    cpts = []
    for v in range(dag.n):
        rows = 1
        for p in parent_order[v]:
            rows *= counts[p]
        cpt = rng.dirichlet([concentration] * counts[v], size=rows)
        cpt = np.clip(cpt, floor, None)
        cpt /= cpt.sum(axis=1, keepdims=True)
        cpts.append(cpt)
    return DiscreteBayesNet(dag=dag, states=states, parent_order=parent_order, cpts=cpts)


def random_latent_dag(n_visible: int, n_hidden: int, edge_prob: float, seed: int) -> Dag:
    """Random DAG over V0..Vn-1 (visible) and H0..Hm-1 (hidden).

    A random permutation fixes a topological order; each compatible ordered
    pair becomes an edge independently with the given probability.
    """
    if n_visible < 1 or n_hidden < 0 or not (0.0 <= edge_prob <= 1.0):
        raise DataError("bad generator arguments")
    rng = np.random.Generator(np.random.PCG64(seed))
    total = n_visible + n_hidden
    names = [f"V{i}" for i in range(n_visible)] + [f"H{i}" for i in range(n_hidden)]
    order = rng.permutation(total)
    edges = []
    for i in range(total):
        for j in range(i + 1, total):
            if rng.random() < edge_prob:
                edges.append((int(order[i]), int(order[j])))
    return Dag(names, edges=edges, hidden=range(n_visible, total))


# -- network document I/O ---------------------------------------------------


def save_network(bn: DiscreteBayesNet) -> str:
    """Canonical JSON form; ``load_network`` inverts it exactly."""
    nodes = []
    for v in range(bn.dag.n):
        nodes.append(
            {
                "name": bn.dag.names[v],
                "hidden": v in bn.dag.hidden,
                "states": list(bn.states[v]),
                "parents": [bn.dag.names[p] for p in bn.parent_order[v]],
                "cpt": [list(map(float, row)) for row in bn.cpts[v]],
            }
        )
    return json.dumps({"nodes": nodes}, indent=2) + "\n"


def load_network(text: str) -> DiscreteBayesNet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"not a JSON document: {e}") from e
    if not isinstance(doc, dict) or not isinstance(doc.get("nodes"), list):
        raise DataError("document must be an object with a 'nodes' list")
    raw = doc["nodes"]
    names = []
    for entry in raw:
        if not isinstance(entry, dict) or "name" not in entry:
            raise DataError("every node entry needs a 'name'")
        names.append(str(entry["name"]))
    if len(set(names)) != len(names):
        raise DataError("duplicate node names")
    index = {name: i for i, name in enumerate(names)}

    parent_order: list[list[int]] = []
    for entry in raw:
        plist = []
        for pname in entry.get("parents", []):
            if pname not in index:
                raise DataError(f"node {entry['name']}: unknown parent {pname!r}")
            plist.append(index[pname])
        if len(set(plist)) != len(plist):
            raise DataError(f"node {entry['name']}: repeated parent")
        parent_order.append(plist)

    # cycle check before touching Dag, so the error can name a node
    indeg = [len(p) for p in parent_order]
    children: list[list[int]] = [[] for _ in names]
    for v, plist in enumerate(parent_order):
        for p in plist:
            children[p].append(v)
    queue = [v for v in range(len(names)) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if seen != len(names):
        cyclic = min(v for v in range(len(names)) if indeg[v] > 0)
        raise DataError(f"cycle through node {names[cyclic]}")

    hidden = [i for i, entry in enumerate(raw) if bool(entry.get("hidden", False))]
    edges = [(p, v) for v, plist in enumerate(parent_order) for p in plist]
    dag = Dag(names, edges=edges, hidden=hidden)
    states = []
    cpts = []
    for v, entry in enumerate(raw):
        st = [str(s) for s in entry.get("states", [])]
        if len(st) < 1:
            raise DataError(f"node {names[v]}: missing states")
        states.append(st)
        cpts.append(np.asarray(entry.get("cpt", []), dtype=np.float64))
    try:
        return DiscreteBayesNet(dag=dag, states=states, parent_order=parent_order, cpts=cpts)
    except DataError:
        raise


def load_network_file(path) -> DiscreteBayesNet:
    with open(path, "r", encoding="utf-8") as f:
        return load_network(f.read())


def save_network_file(bn: DiscreteBayesNet, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(save_network(bn))


def load_alarm() -> DiscreteBayesNet:
    """The bundled 37-node, 46-edge clinical monitoring benchmark network."""
    text = resources.files("frkci").joinpath("assets/alarm.json").read_text("utf-8")
    return load_network(text)
