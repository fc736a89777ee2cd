import numpy as np
import pytest

from frkci import (
    Dag,
    Dataset,
    GSquaredOracle,
    InvariantError,
    PerfectOracle,
    g_squared,
    g_squared_test,
)


def make_data(columns: dict[str, list[int]], cards: dict[str, int] | None = None) -> Dataset:
    names = list(columns)
    rows = np.array(list(zip(*columns.values())), dtype=np.int64)
    cards = cards or {}
    states = [[f"s{i}" for i in range(cards.get(n, 2))] for n in names]
    return Dataset(names=names, states=states, rows=rows)


# -- perfect oracle -----------------------------------------------------------


def test_perfect_oracle_chain():
    oracle = PerfectOracle(Dag(["A", "B", "C"], edges=[(0, 1), (1, 2)]))
    assert oracle.query(0, 2, {1})
    assert not oracle.query(0, 2)


def test_perfect_oracle_collider():
    oracle = PerfectOracle(Dag(["A", "B", "C"], edges=[(0, 2), (1, 2)]))
    assert not oracle.query(0, 1, {2})
    assert oracle.query(0, 1)


def test_perfect_oracle_hides_hidden_nodes():
    # variable space is the visibles only; the hidden node has no index
    dag = Dag(["A", "H", "B"], edges=[(1, 0), (1, 2)], hidden=[1])
    oracle = PerfectOracle(dag)
    assert oracle.names == ["A", "B"]
    assert not oracle.query(0, 1)
    with pytest.raises(InvariantError):
        oracle.query(0, 2)


def test_perfect_oracle_counts_queries():
    oracle = PerfectOracle(Dag(["A", "B", "C"], edges=[(0, 1)]))
    oracle.query(0, 1)
    oracle.query(0, 2, {1})
    oracle.query(1, 2, {0})
    assert oracle.stats.total == 3
    assert oracle.stats.by_size == {0: 1, 1: 2}
    assert oracle.stats.total == sum(oracle.stats.by_size.values())


def test_query_validation():
    oracle = PerfectOracle(Dag(["A", "B"], edges=[(0, 1)]))
    with pytest.raises(InvariantError):
        oracle.query(0, 0)
    with pytest.raises(InvariantError):
        oracle.query(0, 1, {0})


def test_perfect_oracle_symmetry():
    dag = Dag(["A", "B", "C", "D"], edges=[(0, 1), (1, 2), (3, 2)])
    oracle = PerfectOracle(dag)
    for s in [(), (1,), (3,), (1, 3)]:
        assert oracle.query(0, 2, s) == oracle.query(2, 0, s)


# -- dataset ---------------------------------------------------------------------


def test_dataset_rejects_out_of_range_cells():
    with pytest.raises(Exception):
        make_data({"A": [0, 2], "B": [0, 1]})


def test_csv_round_trip():
    data = make_data({"A": [0, 1, 1], "B": [1, 0, 1]})
    again = Dataset.from_csv(data.to_csv())
    assert again.names == data.names
    assert np.array_equal(again.rows, data.rows)


def test_csv_ragged_row_rejected():
    with pytest.raises(Exception):
        Dataset.from_csv("A,B\n1\n")


# -- G-squared --------------------------------------------------------------------


def test_independent_binaries_accepted():
    rng = np.random.Generator(np.random.PCG64(7))
    data = make_data(
        {"X": list(rng.integers(0, 2, 50_000)), "Y": list(rng.integers(0, 2, 50_000))}
    )
    assert g_squared_test(data, 0, 1, (), alpha=0.01)


def test_independent_binaries_accepted_across_seeds():
    accepted = 0
    for seed in range(100):
        rng = np.random.Generator(np.random.PCG64(seed))
        data = make_data(
            {"X": list(rng.integers(0, 2, 5_000)), "Y": list(rng.integers(0, 2, 5_000))}
        )
        accepted += g_squared_test(data, 0, 1, (), alpha=0.01)
    assert accepted >= 95


def test_copy_is_rejected():
    rng = np.random.Generator(np.random.PCG64(3))
    x = list(rng.integers(0, 2, 1_000))
    data = make_data({"X": x, "Y": x})
    res = g_squared(data, 0, 1)
    assert not g_squared_test(data, 0, 1, (), alpha=0.01)
    assert res.p_value < 1e-6


def test_chain_conditional_independence_detected():
    # forward-sample a strong chain by hand and test A _||_ C | B
    for seed in range(5):
        rng = np.random.Generator(np.random.PCG64(seed))
        n = 50_000
        a = rng.integers(0, 2, n)
        b = np.where(rng.random(n) < 0.8, a, 1 - a)
        c = np.where(rng.random(n) < 0.8, b, 1 - b)
        data = make_data({"A": list(a), "B": list(b), "C": list(c)})
        assert g_squared_test(data, 0, 2, (1,), alpha=0.01)
        assert not g_squared_test(data, 0, 2, (), alpha=0.01)


def test_g_squared_zero_when_table_factorizes():
    # counts form an exact outer product, so observed equals expected
    cols = {"X": [], "Y": []}
    for x in (0, 1):
        for y in (0, 1):
            cols["X"] += [x] * 25
            cols["Y"] += [y] * 25
    res = g_squared(make_data(cols), 0, 1)
    assert res.stat == pytest.approx(0.0, abs=1e-12)
    assert res.p_value == pytest.approx(1.0)


def test_g_squared_nonnegative():
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(20):
        data = make_data(
            {"X": list(rng.integers(0, 2, 400)), "Y": list(rng.integers(0, 2, 400))}
        )
        assert g_squared(data, 0, 1).stat >= 0.0


def test_empty_stratum_reduces_dof():
    # S = s1 never takes value 1, so that stratum's block drops out
    cols = {
        "X": [0, 1, 0, 1] * 30,
        "Y": [0, 0, 1, 1] * 30,
        "S": [0] * 120,
    }
    res = g_squared(make_data(cols), 0, 1, (2,))
    assert res.dof == 1  # nominal block count is 2


def test_low_power_verdict_is_independent_with_flag():
    data = make_data({"X": [0, 1, 0], "Y": [0, 1, 1], "S": [0, 1, 0]})
    res = g_squared(data, 0, 1, (2,))
    assert res.low_power
    assert res.p_value == 1.0
    assert g_squared_test(data, 0, 1, (2,), alpha=0.01)


def test_alpha_validation():
    data = make_data({"X": [0, 1], "Y": [0, 1]})
    with pytest.raises(InvariantError):
        g_squared_test(data, 0, 1, (), alpha=0.0)
    with pytest.raises(InvariantError):
        GSquaredOracle(data, alpha=1.5)


def test_gsquared_oracle_counts_and_symmetry():
    rng = np.random.Generator(np.random.PCG64(5))
    data = make_data(
        {
            "X": list(rng.integers(0, 2, 2_000)),
            "Y": list(rng.integers(0, 2, 2_000)),
            "Z": list(rng.integers(0, 2, 2_000)),
        }
    )
    oracle = GSquaredOracle(data, alpha=0.05)
    assert oracle.query(0, 1, (2,)) == oracle.query(1, 0, (2,))
    assert oracle.stats.by_size == {1: 2}
