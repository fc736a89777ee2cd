"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with ``-s`` to see them live).
The property corpus is 300 random latent DAGs crossed with k in {0, 1, 2};
heavy shared artifacts are built once per session.
"""

import subprocess
import sys
import time
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import pytest

from frkci import (
    CIRCLE,
    Dag,
    DiscreteBayesNet,
    GSquaredOracle,
    PerfectOracle,
    RkIpg,
    TAIL,
    active_trail_exists_bruteforce,
    build_fhg,
    build_rk_ipg,
    compare_skeletons,
    d_separated,
    forward_sample,
    fr_k_ci,
    has_directed_path,
    independencies_agree_up_to_k,
    load_alarm,
    random_latent_dag,
    rk_skeleton,
    save_network_file,
    skeleton_phase,
    soundness_unrestricted,
)

SEEDS = range(300)
KS = (0, 1, 2)


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)


@dataclass
class Run:
    seed: int
    k: int
    g: Dag
    visibles: list[str]
    rk: RkIpg
    fhg: Dag
    result: object  # FrkciResult
    max_query_size: int


@pytest.fixture(scope="session")
def corpus() -> list[Run]:
    runs = []
    for seed in SEEDS:
        g = random_latent_dag(4 + seed % 5, seed % 4, 0.25, seed)
        visibles = [g.names[v] for v in g.visible()]
        for k in KS:
            rk = build_rk_ipg(g, k)
            fhg = build_fhg(rk)
            oracle = PerfectOracle(g)
            result = fr_k_ci(oracle, range(len(visibles)), k)
            runs.append(
                Run(seed, k, g, visibles, rk, fhg, result, oracle.stats.max_size())
            )
    return runs


@pytest.fixture(scope="session")
def alarm_runs():
    bn = load_alarm()
    out = {}
    for k in (1, 2):
        oracle = PerfectOracle(bn.dag)
        started = time.perf_counter()
        result = fr_k_ci(oracle, range(37), k)
        elapsed = time.perf_counter() - started
        out[k] = (bn, result, oracle, elapsed)
    return out


# -- criterion 1: guarantee suite over the random corpus ----------------------


def test_1a_rk_ipg_fully_oriented(corpus):
    bad = [
        (r.seed, r.k)
        for r in corpus
        for _, _, ma, mb in r.rk.graph.edges_with_marks()
        if CIRCLE in (ma, mb)
    ]
    report("1a (no circle marks in the k-bounded construction)", not bad, f"{len(bad)} failures / {len(corpus)} runs")
    assert not bad


def test_1b_directed_edges_have_directed_paths(corpus):
    bad = []
    for r in corpus:
        vis = r.g.visible()
        for a, b, ma, mb in r.rk.graph.edges_with_marks():
            if ma is TAIL and not has_directed_path(r.g, vis[a], vis[b]):
                bad.append((r.seed, r.k, a, b))
            if mb is TAIL and not has_directed_path(r.g, vis[b], vis[a]):
                bad.append((r.seed, r.k, b, a))
    report("1b (every directed edge backed by a directed path)", not bad, f"{len(bad)} failures")
    assert not bad


def test_1c_hidden_cause_expansion_acyclic(corpus):
    # Dag construction inside build_fhg toposorts; reaching here proves it,
    # but assert explicitly so a regression cannot slip through as an error.
    bad = [(r.seed, r.k) for r in corpus if len(r.fhg.topological_order) != r.fhg.n]
    report("1c (expansion acyclic)", not bad, f"{len(bad)} failures / {len(corpus)} runs")
    assert not bad


def test_1d_separation_equivalence_up_to_k(corpus):
    bad = []
    for r in corpus:
        disagreements = independencies_agree_up_to_k(r.g, r.fhg, r.visibles, r.k)
        if disagreements:
            bad.append((r.seed, r.k, disagreements[0]))
    report("1d (separation equivalence up to k)", not bad, f"{len(bad)} disagreeing runs")
    assert not bad


def test_1e_expansion_sound_for_all_sets(corpus):
    bad = []
    for r in corpus:
        violations = soundness_unrestricted(r.fhg, r.g, r.visibles)
        if violations:
            bad.append((r.seed, r.k, violations[0]))
    report("1e (expansion sound for unbounded sets)", not bad, f"{len(bad)} violating runs")
    assert not bad


def test_1f_skeleton_matches_ground_truth(corpus):
    bad = []
    for r in corpus:
        diff = compare_skeletons(r.result.pipg, r.rk.graph)
        if diff["superfluous"] or diff["missing"]:
            bad.append((r.seed, r.k, diff))
    report("1f (skeleton equals the k-bounded construction)", not bad, f"{len(bad)} mismatching runs")
    assert not bad


def test_1g_output_equivalent_and_sound(corpus):
    bad = []
    for r in corpus:
        if independencies_agree_up_to_k(r.result.dag, r.g, r.visibles, r.k):
            bad.append((r.seed, r.k, "equivalence"))
        elif soundness_unrestricted(r.result.dag, r.g, r.visibles):
            bad.append((r.seed, r.k, "soundness"))
    report("1g (recovered network equivalent up to k and sound)", not bad, f"{len(bad)} violating runs")
    assert not bad


# -- criterion 2: ALARM benchmark ----------------------------------------------


def test_2_alarm_k2(alarm_runs):
    bn, result, oracle, elapsed = alarm_runs[2]
    vs_truth = compare_skeletons(result.dag, bn.dag)
    vs_bounded = compare_skeletons(result.pipg, rk_skeleton(bn.dag, 2))
    ok = (
        not vs_bounded["missing"]
        and len(vs_truth["superfluous"]) <= 5
        and 10_000 <= oracle.stats.total <= 100_000
        and elapsed < 60.0
    )
    report(
        "2 (ALARM k=2)",
        ok,
        f"missing-vs-bounded={len(vs_bounded['missing'])}, "
        f"superfluous-vs-truth={len(vs_truth['superfluous'])}, "
        f"queries={oracle.stats.total}, wall={elapsed:.1f}s",
    )
    assert vs_bounded["missing"] == []
    assert len(vs_truth["superfluous"]) <= 5
    assert 10_000 <= oracle.stats.total <= 100_000
    assert elapsed < 60.0


def test_2_alarm_k1(alarm_runs):
    bn, result, oracle, elapsed = alarm_runs[1]
    vs_truth = compare_skeletons(result.dag, bn.dag)
    ok = (
        30 <= len(vs_truth["superfluous"]) <= 120
        and oracle.stats.total < 30_000
        and elapsed < 30.0
    )
    report(
        "2 (ALARM k=1)",
        ok,
        f"superfluous-vs-truth={len(vs_truth['superfluous'])}, "
        f"queries={oracle.stats.total}, wall={elapsed:.1f}s",
    )
    assert 30 <= len(vs_truth["superfluous"]) <= 120
    assert oracle.stats.total < 30_000
    assert elapsed < 30.0


# -- criterion 3: statistical path ------------------------------------------------


def test_3_chain_recovery_from_samples():
    dag = Dag(["A", "B", "C"], edges=[(0, 1), (1, 2)])
    row = np.array([[0.8, 0.2], [0.2, 0.8]])
    bn = DiscreteBayesNet(
        dag=dag,
        states=[["s0", "s1"]] * 3,
        parent_order=[[], [0], [1]],
        cpts=[np.array([[0.5, 0.5]]), row.copy(), row.copy()],
    )
    hits = 0
    for seed in range(100):
        data = forward_sample(bn, 50_000, seed=seed)
        oracle = GSquaredOracle(data, alpha=0.01)
        g, _ = skeleton_phase(oracle, range(3), 1)
        hits += g.edges() == [(0, 1), (1, 2)]
    report("3 (chain skeleton from 50k-row samples)", hits >= 95, f"{hits}/100 exact recoveries")
    assert hits >= 95


# -- criterion 4: d-separation vs brute force ---------------------------------------


def test_4_dsep_agrees_with_bruteforce():
    disagreements = 0
    checked = 0
    for seed in range(100):
        g = random_latent_dag(3 + seed % 4, 0, 0.4, seed)
        nodes = range(g.n)
        for x, y in combinations(nodes, 2):
            rest = [v for v in nodes if v not in (x, y)]
            for size in range(len(rest) + 1):
                for s in combinations(rest, size):
                    checked += 1
                    if d_separated(g, x, y, s) == active_trail_exists_bruteforce(g, x, y, s):
                        disagreements += 1
    report("4 (reachability vs trail enumeration)", disagreements == 0, f"{checked} triples, {disagreements} disagreements")
    assert disagreements == 0


# -- criterion 5: byte-identical CLI outputs ------------------------------------------


def test_5_run_outputs_byte_identical(tmp_path):
    net = tmp_path / "net.json"
    bn = DiscreteBayesNet(
        dag=Dag(["A", "B", "C", "D"], edges=[(0, 1), (1, 2), (3, 2)]),
        states=[["s0", "s1"]] * 4,
        parent_order=[[], [0], [1, 3], []],
        cpts=[
            np.array([[0.5, 0.5]]),
            np.array([[0.8, 0.2], [0.2, 0.8]]),
            np.array([[0.9, 0.1], [0.3, 0.7], [0.6, 0.4], [0.1, 0.9]]),
            np.array([[0.4, 0.6]]),
        ],
    )
    save_network_file(bn, net)
    blobs = []
    for tag in ("first", "second"):
        dot = tmp_path / f"{tag}.dot"
        stats = tmp_path / f"{tag}.stats.json"
        trace = tmp_path / f"{tag}.trace"
        proc = subprocess.run(
            [
                sys.executable, "-m", "frkci", "run", "--k", "2",
                "--net", str(net), "--oracle", "perfect",
                "--out-dot", str(dot), "--stats", str(stats), "--trace", str(trace),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        blobs.append((dot.read_bytes(), stats.read_bytes(), trace.read_bytes()))
    ok = blobs[0] == blobs[1]
    report("5 (byte-identical DOT, stats, trace)", ok, "3 artifact files compared")
    assert ok


# -- criterion 6: query bound -----------------------------------------------------------


def test_6_no_query_exceeds_k(corpus, alarm_runs):
    bad = [(r.seed, r.k, r.max_query_size) for r in corpus if r.max_query_size > r.k]
    for k, (_, _, oracle, _) in alarm_runs.items():
        if oracle.stats.max_size() > k:
            bad.append(("alarm", k, oracle.stats.max_size()))
    report("6 (no query above the conditioning bound)", not bad, f"{len(bad)} offending runs of {len(corpus) + 2}")
    assert not bad
