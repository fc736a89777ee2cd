"""Conditional-independence queries: a perfect oracle and a G-squared test.

Both implementations answer ``query(x, y, s) -> bool`` (True = independent)
over a shared variable index space and count every query they serve, bucketed
by conditioning-set size.  The perfect oracle answers from d-separation on a
known DAG and never sees hidden nodes; the statistical test works on
categorical samples.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import gammaincc

from .dsep import d_separated
from .errors import DataError, InvariantError
from .graph import Dag


class OracleStats:
    """Query counts, total and per conditioning-set size."""

    def __init__(self) -> None:
        self.by_size: dict[int, int] = {}

    @property
    def total(self) -> int:
        return sum(self.by_size.values())

    def record(self, size: int) -> None:
        self.by_size[size] = self.by_size.get(size, 0) + 1

    def max_size(self) -> int:
        return max(self.by_size) if self.by_size else -1

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "by_size": {str(k): self.by_size[k] for k in sorted(self.by_size)},
        }


def _validate_triplet(n: int, x: int, y: int, s: Sequence[int]) -> None:
    for v in (x, y, *s):
        if not (0 <= v < n):
            raise InvariantError(f"unknown variable index {v}")
    if x == y:
        raise InvariantError("query variables must differ")
    if x in s or y in s:
        raise InvariantError("conditioning set overlaps the query pair")
    if len(set(s)) != len(s):
        raise InvariantError("conditioning set has repeated variables")


class PerfectOracle:
    """Independence oracle backed by d-separation on the true DAG.

    The variable space is the DAG's visible nodes (in index order), so hidden
    nodes cannot be mentioned in a query by construction; out-of-range
    indices raise.
    """

    def __init__(self, dag: Dag):
        self._dag = dag
        self._vis = dag.visible()
        self.names = [dag.names[v] for v in self._vis]
        self.stats = OracleStats()

    def query(self, x: int, y: int, s: Iterable[int] = ()) -> bool:
        s = list(s)
        _validate_triplet(len(self._vis), x, y, s)
        self.stats.record(len(s))
        return d_separated(
            self._dag, self._vis[x], self._vis[y], [self._vis[v] for v in s]
        )


@dataclass
class Dataset:
    """Categorical sample: named variables, state names, row-major indices."""

    names: list[str]
    states: list[list[str]]
    rows: np.ndarray

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=np.int64)
        if self.rows.size == 0:
            self.rows = self.rows.reshape(0, len(self.names))
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.names):
            raise DataError("row table shape does not match the variable list")
        if len(self.states) != len(self.names):
            raise DataError("state lists do not match the variable list")
        for j, st in enumerate(self.states):
            if len(st) == 0:
                raise DataError(f"variable {self.names[j]} has no states")
            if self.rows.shape[0] and self.rows[:, j].max() >= len(st):
                raise DataError(f"out-of-range state index in column {self.names[j]}")
            if self.rows.shape[0] and self.rows[:, j].min() < 0:
                raise DataError(f"negative state index in column {self.names[j]}")

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.names)
        for row in self.rows:
            writer.writerow([self.states[j][v] for j, v in enumerate(row)])
        return buf.getvalue()

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str) -> "Dataset":
        reader = csv.reader(io.StringIO(text))
        try:
            names = next(reader)
        except StopIteration:
            raise DataError("empty CSV document") from None
        body = list(reader)
        for i, row in enumerate(body):
            if len(row) != len(names):
                raise DataError(f"row {i + 1} has {len(row)} cells, expected {len(names)}")
        columns = list(zip(*body)) if body else [() for _ in names]
        states = [sorted(set(col)) or ["s0"] for col in columns]
        lookup = [{v: i for i, v in enumerate(st)} for st in states]
        rows = np.array(
            [[lookup[j][row[j]] for j in range(len(names))] for row in body],
            dtype=np.int64,
        ).reshape(len(body), len(names))
        return cls(names=names, states=states, rows=rows)

    @classmethod
    def load_csv(cls, path) -> "Dataset":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_csv(f.read())


@dataclass
class GSquaredResult:
    stat: float
    dof: int
    p_value: float
    low_power: bool = field(default=False)


def g_squared(
    data: Dataset, x: int, y: int, s: Sequence[int] = (), min_rows_per_dof: int = 10
) -> GSquaredResult:
    """G-squared statistic of x vs y within each configuration of s.

    Degrees of freedom are (|x|-1)(|y|-1) per stratum, dropping the full
    block of any stratum with zero observed rows.  With fewer rows than
    ``min_rows_per_dof`` per nominal degree of freedom the test refuses to
    judge and reports independence with the low-power flag set.
    """
    s = list(s)
    _validate_triplet(len(data.names), x, y, s)
    cx = len(data.states[x])
    cy = len(data.states[y])
    scards = [len(data.states[v]) for v in s]
    n_strata = 1
    for c in scards:
        n_strata *= c
    block = (cx - 1) * (cy - 1)
    nominal_dof = block * n_strata
    if data.n_rows < min_rows_per_dof * nominal_dof:
        return GSquaredResult(stat=0.0, dof=nominal_dof, p_value=1.0, low_power=True)
    if s:
        strat = np.ravel_multi_index(
            tuple(data.rows[:, v] for v in s), dims=tuple(scards)
        )
    else:
        strat = np.zeros(data.n_rows, dtype=np.int64)
    counts = np.zeros((n_strata, cx, cy), dtype=np.float64)
    np.add.at(counts, (strat, data.rows[:, x], data.rows[:, y]), 1.0)

    totals = counts.sum(axis=(1, 2))
    occupied = totals > 0
    dof = block * int(occupied.sum())
    stat = 0.0
    for t in np.nonzero(occupied)[0]:
        table = counts[t]
        expected = np.outer(table.sum(axis=1), table.sum(axis=0)) / totals[t]
        observed = table[table > 0]
        stat += 2.0 * float(np.sum(observed * np.log(observed / expected[table > 0])))
    p_value = float(gammaincc(dof / 2.0, stat / 2.0)) if dof > 0 else 1.0
    return GSquaredResult(stat=stat, dof=dof, p_value=p_value, low_power=False)


def g_squared_test(
    data: Dataset,
    x: int,
    y: int,
    s: Sequence[int] = (),
    alpha: float = 0.01,
    min_rows_per_dof: int = 10,
) -> bool:
    """True (independent) iff the G-squared p-value is at least alpha."""
    if not (0.0 < alpha < 1.0):
        raise InvariantError("alpha must lie strictly between 0 and 1")
    return g_squared(data, x, y, s, min_rows_per_dof).p_value >= alpha


class GSquaredOracle:
    """Independence oracle answering from a categorical sample."""

    def __init__(self, data: Dataset, alpha: float = 0.01, min_rows_per_dof: int = 10):
        if not (0.0 < alpha < 1.0):
            raise InvariantError("alpha must lie strictly between 0 and 1")
        self._data = data
        self.alpha = alpha
        self.min_rows_per_dof = min_rows_per_dof
        self.names = list(data.names)
        self.stats = OracleStats()
        self.low_power_queries = 0

    def query(self, x: int, y: int, s: Iterable[int] = ()) -> bool:
        s = list(s)
        result = g_squared(self._data, x, y, s, self.min_rows_per_dof)
        self.stats.record(len(s))
        if result.low_power:
            self.low_power_queries += 1
        return result.p_value >= self.alpha
