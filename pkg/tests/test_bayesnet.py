from itertools import product

import numpy as np
import pytest

from frkci import (
    Dag,
    DataError,
    DiscreteBayesNet,
    forward_sample,
    load_alarm,
    load_network,
    random_latent_dag,
    random_parameters,
    save_network,
)


def chain_net(p_flip: float = 0.2) -> DiscreteBayesNet:
    dag = Dag(["A", "B", "C"], edges=[(0, 1), (1, 2)])
    keep = 1.0 - p_flip
    row = np.array([[keep, p_flip], [p_flip, keep]])
    return DiscreteBayesNet(
        dag=dag,
        states=[["s0", "s1"]] * 3,
        parent_order=[[], [0], [1]],
        cpts=[np.array([[0.5, 0.5]]), row.copy(), row.copy()],
    )


def exact_marginal(bn: DiscreteBayesNet, node: int) -> np.ndarray:
    """Oracle by full joint enumeration; independent of the sampler."""
    cards = [len(s) for s in bn.states]
    marginal = np.zeros(cards[node])
    for assignment in product(*(range(c) for c in cards)):
        p = 1.0
        for v in range(bn.dag.n):
            p *= bn.cpts[v][bn.config_index(v, assignment), assignment[v]]
        marginal[assignment[node]] += p
    return marginal


# -- validation -----------------------------------------------------------------


def test_cpt_row_sum_enforced():
    dag = Dag(["A"])
    with pytest.raises(DataError):
        DiscreteBayesNet(
            dag=dag, states=[["s0", "s1"]], parent_order=[[]], cpts=[np.array([[0.5, 0.4]])]
        )


def test_cpt_shape_enforced():
    dag = Dag(["A", "B"], edges=[(0, 1)])
    with pytest.raises(DataError):
        DiscreteBayesNet(
            dag=dag,
            states=[["s0", "s1"]] * 2,
            parent_order=[[], [0]],
            cpts=[np.array([[0.5, 0.5]]), np.array([[0.5, 0.5]])],  # B needs 2 rows
        )


# -- sampling --------------------------------------------------------------------


def test_sample_zero_rows_keeps_header():
    data = forward_sample(chain_net(), 0, seed=1)
    assert data.names == ["A", "B", "C"]
    assert data.n_rows == 0


def test_degenerate_cpt_sample():
    dag = Dag(["A"])
    bn = DiscreteBayesNet(
        dag=dag, states=[["s0", "s1"]], parent_order=[[]], cpts=[np.array([[1.0, 0.0]])]
    )
    data = forward_sample(bn, 100, seed=3)
    assert (data.rows[:, 0] == 0).all()


def test_sampling_is_deterministic_per_seed():
    a = forward_sample(chain_net(), 500, seed=9)
    b = forward_sample(chain_net(), 500, seed=9)
    c = forward_sample(chain_net(), 500, seed=10)
    assert np.array_equal(a.rows, b.rows)
    assert not np.array_equal(a.rows, c.rows)


def test_conditional_frequencies_match_cpt():
    bn = chain_net(p_flip=0.2)
    data = forward_sample(bn, 100_000, seed=42)
    a, b = data.rows[:, 0], data.rows[:, 1]
    for av in (0, 1):
        freq = np.mean(b[a == av] == av)
        assert abs(freq - 0.8) < 0.01


def test_hidden_columns_are_dropped():
    dag = Dag(["H", "A", "B"], edges=[(0, 1), (0, 2)], hidden=[0])
    bn = random_parameters(dag, seed=4)
    data = forward_sample(bn, 50, seed=4)
    assert data.names == ["A", "B"]


def test_sampling_marginals_match_enumeration():
    dag = random_latent_dag(6, 0, 0.4, seed=12)
    bn = random_parameters(dag, seed=12)
    data = forward_sample(bn, 200_000, seed=5)
    for v in range(dag.n):
        exact = exact_marginal(bn, v)
        col = data.rows[:, v]
        for state, p in enumerate(exact):
            assert abs(np.mean(col == state) - p) < 0.01


# -- random parameters -------------------------------------------------------------


def test_random_parameters_deterministic():
    dag = Dag(["A", "B"], edges=[(0, 1)])
    bn1 = random_parameters(dag, seed=8)
    bn2 = random_parameters(dag, seed=8)
    bn3 = random_parameters(dag, seed=9)
    for a, b in zip(bn1.cpts, bn2.cpts):
        assert np.array_equal(a, b)
    assert any(not np.array_equal(a, b) for a, b in zip(bn1.cpts, bn3.cpts))


def test_random_parameters_rows_are_distributions():
    dag = Dag(["A", "B", "C"], edges=[(0, 1), (1, 2)])
    bn = random_parameters(dag, seed=1, concentration=1.0)
    for cpt in bn.cpts:
        assert np.allclose(cpt.sum(axis=1), 1.0)
        assert (cpt > 0).all()


def test_random_parameters_rejects_bad_concentration():
    with pytest.raises(DataError):
        random_parameters(Dag(["A"]), seed=0, concentration=0.0)


# -- document I/O --------------------------------------------------------------------


def test_minimal_document_loads():
    text = '{"nodes": [{"name": "A", "hidden": false, "states": ["s0", "s1"], "parents": [], "cpt": [[0.5, 0.5]]}]}'
    bn = load_network(text)
    assert bn.dag.names == ["A"]


def test_round_trip_is_identity_on_canonical_form():
    for seed in range(5):
        bn = random_parameters(random_latent_dag(5, 2, 0.3, seed), seed=seed)
        text = save_network(bn)
        assert save_network(load_network(text)) == text


def test_load_rejects_bad_row_sum():
    text = '{"nodes": [{"name": "A", "states": ["s0", "s1"], "parents": [], "cpt": [[0.5, 0.4]]}]}'
    with pytest.raises(DataError):
        load_network(text)


def test_load_rejects_unknown_parent():
    text = '{"nodes": [{"name": "A", "states": ["s0", "s1"], "parents": ["Z"], "cpt": [[0.5, 0.5]]}]}'
    with pytest.raises(DataError, match="unknown parent"):
        load_network(text)


def test_load_rejects_cycle_with_node_name():
    text = """{"nodes": [
      {"name": "A", "states": ["s0", "s1"], "parents": ["B"], "cpt": [[0.5, 0.5], [0.5, 0.5]]},
      {"name": "B", "states": ["s0", "s1"], "parents": ["A"], "cpt": [[0.5, 0.5], [0.5, 0.5]]}
    ]}"""
    with pytest.raises(DataError, match="cycle"):
        load_network(text)


def test_alarm_asset_loads_with_expected_size():
    bn = load_alarm()
    assert bn.dag.n == 37
    assert len(bn.dag.edges) == 46
    assert not bn.dag.hidden


# -- random dags ------------------------------------------------------------------------


def test_random_latent_dag_deterministic_and_labelled():
    g1 = random_latent_dag(5, 2, 0.3, seed=2)
    g2 = random_latent_dag(5, 2, 0.3, seed=2)
    assert g1.edges == g2.edges
    assert g1.hidden == {5, 6}
    assert g1.names[:5] == ["V0", "V1", "V2", "V3", "V4"]
