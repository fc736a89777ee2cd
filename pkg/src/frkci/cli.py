"""Command-line front door: gen, sample, run, compare, bench-alarm.

Exit codes: 0 success, 1 usage error, 2 data error, 3 invariant or
algorithm error.  ``FRCI_SEED`` serves as the seed when no flag is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from .algorithm import fr_k_ci
from .bayesnet import (
    forward_sample,
    load_alarm,
    load_network_file,
    random_latent_dag,
    random_parameters,
    save_network_file,
)
from .errors import DataError, FrciError, InvariantError, MarkConflictError
from .independence import Dataset, GSquaredOracle, PerfectOracle
from .verify import compare_skeletons, independencies_agree_up_to_k, soundness_unrestricted

STATS_SCHEMA = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}")


def _seed_or_env(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("FRCI_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DataError(f"FRCI_SEED is not an integer: {env!r}") from None
    return 0


def _cmd_gen(args) -> int:
    dag = random_latent_dag(args.nodes, args.latents, args.edge_prob, _seed_or_env(args.seed))
    bn = random_parameters(dag, seed=_seed_or_env(args.seed))
    save_network_file(bn, args.out)
    print(f"wrote {args.out}: {dag.n} nodes ({len(dag.hidden)} hidden), {len(dag.edges)} edges")
    return 0


def _cmd_sample(args) -> int:
    bn = load_network_file(args.net)
    data = forward_sample(bn, args.rows, _seed_or_env(args.seed))
    data.save_csv(args.out)
    print(f"wrote {args.out}: {data.n_rows} rows, {len(data.names)} visible columns")
    return 0


def _cmd_run(args) -> int:
    truth = None
    if args.net:
        if args.oracle != "perfect":
            raise DataError(f"unknown oracle kind {args.oracle!r}")
        bn = load_network_file(args.net)
        truth = bn.dag
        oracle = PerfectOracle(bn.dag)
    else:
        data = Dataset.load_csv(args.data)
        oracle = GSquaredOracle(data, alpha=args.alpha)
    started = time.perf_counter()
    result = fr_k_ci(oracle, range(len(oracle.names)), args.k)
    elapsed = time.perf_counter() - started

    stats: dict = {
        "schema": STATS_SCHEMA,
        "k": args.k,
        "n_vars": len(oracle.names),
        "queries": oracle.stats.as_dict(),
        "pipg_edges": len(result.pipg.edges()),
        "dag_edges": len(result.dag.edges),
        "hidden_inserted": len(result.dag.hidden),
    }
    if truth is not None:
        diff = compare_skeletons(result.dag, truth)
        stats["superfluous"] = ["-".join(p) for p in diff["superfluous"]]
        stats["missing"] = ["-".join(p) for p in diff["missing"]]
    if args.out_dot:
        with open(args.out_dot, "w", encoding="utf-8") as f:
            f.write(result.dag.to_dot("recovered"))
    if args.stats:
        with open(args.stats, "w", encoding="utf-8") as f:
            json.dump(stats, f, indent=2)
            f.write("\n")
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as f:
            f.write(result.trace_text())
    if args.plot:
        from .plotting import plot_dag

        plot_dag(result.dag, args.plot, title=f"recovered (k={args.k})")
    summary = (
        f"k={args.k} vars={len(oracle.names)} queries={oracle.stats.total} "
        f"edges={len(result.dag.edges)}"
    )
    if truth is not None:
        summary += f" superfluous={len(stats['superfluous'])} missing={len(stats['missing'])}"
    print(summary)
    print(f"wall time: {elapsed:.2f}s", file=sys.stderr)
    return 0


def _cmd_compare(args) -> int:
    bn_a = load_network_file(args.a)
    bn_b = load_network_file(args.b)
    vis_a = {bn_a.dag.names[v] for v in bn_a.dag.visible()}
    vis_b = {bn_b.dag.names[v] for v in bn_b.dag.visible()}
    if vis_a != vis_b:
        raise DataError("networks do not share a visible node set")
    visibles = sorted(vis_a)
    report = {
        "schema": STATS_SCHEMA,
        "k": args.k,
        "skeleton": compare_skeletons(bn_a.dag, bn_b.dag),
        "disagreements": independencies_agree_up_to_k(bn_a.dag, bn_b.dag, visibles, args.k),
    }
    if args.unrestricted:
        report["soundness_violations"] = soundness_unrestricted(bn_a.dag, bn_b.dag, visibles)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bench_alarm(args) -> int:
    bn = load_alarm()
    truth = bn.dag
    oracle = PerfectOracle(truth)
    started = time.perf_counter()
    result = fr_k_ci(oracle, range(len(oracle.names)), args.k)
    elapsed = time.perf_counter() - started
    diff = compare_skeletons(result.dag, truth)
    by_size = ", ".join(
        f"|S|={s}: {c}" for s, c in sorted(oracle.stats.by_size.items())
    )
    print(f"ALARM: {truth.n} nodes, {len(truth.edges)} edges")
    print(f"Fr({args.k})CI with perfect oracle")
    print(f"queries: {oracle.stats.total} ({by_size})")
    print(f"recovered adjacencies: {len(result.pipg.edges())}")
    print(f"superfluous: {len(diff['superfluous'])}")
    for a, b in diff["superfluous"]:
        print(f"  extra {a}-{b}")
    print(f"missing: {len(diff['missing'])}")
    for a, b in diff["missing"]:
        print(f"  lost {a}-{b}")
    print(f"wall time: {elapsed:.2f}s")
    if args.plot:
        from .plotting import plot_dag

        plot_dag(result.dag, args.plot, title=f"ALARM recovered (k={args.k})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frkci", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="random latent network to JSON")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--latents", type=int, default=0)
    p.add_argument("--edge-prob", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("sample", help="draw rows from a network into CSV")
    p.add_argument("--net", required=True)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("run", help="recover structure from a network oracle or CSV data")
    p.add_argument("--k", type=int, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--net")
    src.add_argument("--data")
    p.add_argument("--oracle", default="perfect")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--out-dot")
    p.add_argument("--stats")
    p.add_argument("--trace")
    p.add_argument("--plot")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="independence agreement between two networks")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--unrestricted", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("bench-alarm", help="benchmark on the bundled ALARM network")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--plot")
    p.set_defaults(func=_cmd_bench_alarm)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        if isinstance(e.code, str):
            print(e.code, file=sys.stderr)
            return 1
        return 1 if e.code else 0
    try:
        return args.func(args)
    except (DataError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (InvariantError, MarkConflictError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except FrciError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
