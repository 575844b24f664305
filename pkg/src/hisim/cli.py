"""Command-line interface: partition circuits, run them, study the gap
between the dagp heuristic and the brute-force optimum.

Exit codes are a stable contract: 0 success, 1 usage error, 2 input or
partition error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import bench
from .dag import GateDag, build_dag, to_dot, to_json as dag_to_json
from .errors import (
    PartitionError,
    QasmError,
    SimulationError,
    TooLargeForOracleError,
    VerificationError,
)
from .hier import ExecutionTrace, execute_hierarchical, execute_multilevel
from .dist import simulate_distributed
from .partition import (
    MultiLevelPartition,
    PartitionResult,
    multilevel_to_json,
    optimal_parts_bruteforce,
    partition_dagp,
    partition_dfs,
    partition_from_json,
    partition_multilevel,
    partition_nat,
    partition_to_json,
)
from .qasm import Circuit, parse_qasm
from .statevec import save_state, simulate_flat

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_VERIFY = 3

VERIFY_ATOL = 1e-10
VERIFY_MAX_QUBITS = 16

_STRATEGIES = ("nat", "dfs", "dagp", "multilevel")
_MODES = ("flat", "hierarchical", "multilevel", "distributed")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad arguments; our contract reserves 2 for
    input errors, so usage problems exit 1 instead."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- shared helpers ---------------------------------------------------------

def _load_circuit(spec: str) -> tuple[str, Circuit]:
    """Accept a .qasm path or the name of a bundled circuit."""
    path = Path(spec)
    if path.exists():
        return path.stem, parse_qasm(path.read_text())
    if spec in bench.available():
        return spec, bench.load(spec)
    raise FileNotFoundError(f"no such file or bundled circuit: {spec}")


def _widest_gate(circuit: Circuit) -> int:
    return max((len(op.qubits) for op in circuit.ops), default=1)


def _default_limit(circuit: Circuit) -> int:
    """Half the qubits, but never below the widest gate."""
    return max(math.ceil(circuit.num_qubits / 2), _widest_gate(circuit))


def _flat_partition(
    dag: GateDag, strategy: str, limit: int, seed: int, trials: int
) -> PartitionResult:
    if strategy == "nat":
        return partition_nat(dag, limit)
    if strategy == "dfs":
        return partition_dfs(dag, limit, trials=trials, seed=seed)
    if strategy == "dagp":
        return partition_dagp(dag, limit)
    raise _UsageError(f"strategy {strategy!r} does not produce a flat partition")


def _resolve_levels(args, circuit: Circuit) -> tuple[int, int]:
    l1 = args.l1 if args.l1 is not None else (
        args.limit if args.limit is not None else _default_limit(circuit)
    )
    l2 = args.l2 if args.l2 is not None else max(
        math.ceil(l1 / 2), _widest_gate(circuit)
    )
    return l1, min(l2, l1)


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n")


# --- partition --------------------------------------------------------------

def cmd_partition(args) -> int:
    name, circuit = _load_circuit(args.circuit)
    dag = build_dag(circuit)
    summary_stream = sys.stdout if args.out else sys.stderr

    if args.dag:
        dag_path = Path(args.dag)
        text = to_dot(dag) if dag_path.suffix == ".dot" else dag_to_json(dag)
        dag_path.write_text(text + "\n")

    if args.strategy == "multilevel":
        l1, l2 = _resolve_levels(args, circuit)
        ml = partition_multilevel(dag, l1, l2)
        _write_or_print(multilevel_to_json(dag, ml), args.out)
        print(
            f"{name}: multilevel limits {l1}/{l2}, "
            f"{ml.level1.num_parts} level-1 parts, "
            f"{sum(s.num_parts for s in ml.sublevels)} level-2 parts",
            file=summary_stream,
        )
        for i, part in enumerate(ml.level1.parts):
            ws2 = [p.working_set for p in ml.sublevels[i].parts]
            print(
                f"  part {part.id}: working set {part.working_set}, "
                f"{len(part.gate_indices)} gates, level-2 working sets {ws2}",
                file=summary_stream,
            )
        return EXIT_OK

    limit = args.limit if args.limit is not None else _default_limit(circuit)
    result = _flat_partition(dag, args.strategy, limit, args.seed, args.trials)
    _write_or_print(partition_to_json(dag, result), args.out)
    print(
        f"{name}: {args.strategy} limit {limit}, {result.num_parts} parts",
        file=summary_stream,
    )
    for part in result.parts:
        print(
            f"  part {part.id}: working set {part.working_set}, "
            f"{len(part.gate_indices)} gates",
            file=summary_stream,
        )
    return EXIT_OK


# --- run --------------------------------------------------------------------

def _probabilities(data: np.ndarray, num_qubits: int) -> dict[str, float] | None:
    """Largest basis-state probabilities, qubit n-1 leftmost; small n only."""
    if num_qubits > VERIFY_MAX_QUBITS:
        return None
    probs = np.abs(data) ** 2
    order = np.argsort(probs)[::-1][:64]
    out = {}
    for idx in order:
        if probs[idx] < 1e-9:
            break
        out[format(int(idx), f"0{num_qubits}b")] = round(float(probs[idx]), 12)
    return out


def _run_report_parts(partition) -> list[dict]:
    if isinstance(partition, MultiLevelPartition):
        parts = partition.level1.parts
    else:
        parts = partition.parts
    return [
        {
            "id": p.id,
            "working_set": p.working_set,
            "gates": len(p.gate_indices),
        }
        for p in parts
    ]


def cmd_run(args) -> int:
    name, circuit = _load_circuit(args.circuit)
    n = circuit.num_qubits
    if args.verify and n > VERIFY_MAX_QUBITS:
        raise _UsageError(
            f"--verify supports up to {VERIFY_MAX_QUBITS} qubits, circuit has {n}"
        )
    if args.trace and args.mode not in ("hierarchical", "multilevel"):
        raise _UsageError("--trace requires --mode hierarchical or multilevel")

    partition: PartitionResult | MultiLevelPartition | None = None
    strategy: str | None = None
    limit = limit1 = limit2 = None
    trace: ExecutionTrace | None = None
    comm = None

    t0 = time.perf_counter()
    if args.mode == "flat":
        state = simulate_flat(circuit)
    else:
        dag = build_dag(circuit)
        if args.partition is not None:
            partition = partition_from_json(dag, Path(args.partition).read_text())
            strategy = partition.strategy
            limit = partition.limit
        elif args.mode == "multilevel" or (
            args.mode == "distributed" and args.l1 is not None
        ):
            limit1, limit2 = _resolve_levels(args, circuit)
            partition = partition_multilevel(dag, limit1, limit2)
            strategy = "multilevel"
        else:
            strategy = args.strategy
            limit = args.limit if args.limit is not None else _default_limit(circuit)
            partition = _flat_partition(dag, strategy, limit, args.seed, args.trials)

        if args.mode == "hierarchical":
            if isinstance(partition, MultiLevelPartition):
                raise _UsageError(
                    "--mode hierarchical needs a flat partition; "
                    "use --mode multilevel"
                )
            state, trace = execute_hierarchical(circuit, partition, with_trace=True)
        elif args.mode == "multilevel":
            if not isinstance(partition, MultiLevelPartition):
                raise _UsageError(
                    "--mode multilevel needs --l1/--l2 limits, not --partition"
                )
            state, trace = execute_multilevel(circuit, partition, with_trace=True)
        else:
            state, comm = simulate_distributed(circuit, partition, args.p)
    wall = time.perf_counter() - t0

    max_delta = None
    if args.verify:
        ref = simulate_flat(circuit)
        max_delta = float(np.max(np.abs(state.data - ref.data)))

    report = {
        "circuit": {"name": name, "num_qubits": n, "num_gates": circuit.num_ops},
        "mode": args.mode,
        "strategy": strategy,
        "limit": limit,
        "limit1": limit1,
        "limit2": limit2,
        "num_rank_bits": args.p if args.mode == "distributed" else None,
        "num_parts": len(_run_report_parts(partition)) if partition else None,
        "parts": _run_report_parts(partition) if partition else None,
        "wall_time_s": round(wall, 6),
        "max_abs_delta": max_delta,
        "comm": comm.to_json() if comm is not None else None,
        "probabilities": _probabilities(state.data, n),
    }

    if args.out:
        save_state(state, args.out)
    if args.trace and trace is not None:
        Path(args.trace).write_text(trace.to_json_lines() + "\n")
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2) + "\n")
        parts_note = (
            f", {report['num_parts']} parts" if report["num_parts"] else ""
        )
        print(
            f"{name}: n={n}, {circuit.num_ops} gates, mode={args.mode}"
            f"{parts_note}, {wall:.3f}s"
        )
    else:
        print(json.dumps(report, indent=2))

    if max_delta is not None:
        print(f"verify: max |delta| = {max_delta:.3e}", file=sys.stderr)
        if max_delta >= VERIFY_ATOL:
            raise VerificationError(
                f"max amplitude deviation {max_delta:.3e} is not below "
                f"{VERIFY_ATOL:.1e}"
            )
    return EXIT_OK


# --- oracle gap -------------------------------------------------------------

def cmd_oracle_gap(args) -> int:
    names = args.circuits if args.circuits else list(bench.DESK_NAMES)
    rows = []
    for spec in names:
        cname, circuit = _load_circuit(spec)
        if args.truncate and circuit.num_ops > args.truncate:
            circuit = Circuit(circuit.num_qubits, circuit.ops[: args.truncate])
        dag = build_dag(circuit)
        for limit in args.limits:
            row = {
                "circuit": cname,
                "num_gates": circuit.num_ops,
                "limit": limit,
                "dagp": None,
                "optimal": None,
                "gap": None,
                "note": "",
            }
            try:
                row["dagp"] = partition_dagp(dag, limit).num_parts
                row["optimal"] = optimal_parts_bruteforce(dag, limit)
                row["gap"] = row["dagp"] - row["optimal"]
            except TooLargeForOracleError as e:
                row["note"] = str(e)
            except PartitionError as e:
                row["note"] = str(e)
            rows.append(row)

    header = f"{'circuit':<14} {'gates':>5} {'limit':>5} {'dagp':>5} {'optimal':>7} {'gap':>4}"
    print(header)
    print("-" * len(header))
    for row in rows:
        if row["gap"] is None:
            print(
                f"{row['circuit']:<14} {row['num_gates']:>5} {row['limit']:>5} "
                f"-- {row['note']}"
            )
        else:
            print(
                f"{row['circuit']:<14} {row['num_gates']:>5} {row['limit']:>5} "
                f"{row['dagp']:>5} {row['optimal']:>7} {row['gap']:>4}"
            )
    scored = [r for r in rows if r["gap"] is not None]
    if scored:
        zeros = sum(1 for r in scored if r["gap"] == 0)
        print(
            f"{zeros}/{len(scored)} combinations optimal, "
            f"max gap {max(r['gap'] for r in scored)}"
        )
    if args.out:
        Path(args.out).write_text(json.dumps(rows, indent=2) + "\n")
    return EXIT_OK


# --- wiring -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hisim",
        description=(
            "Partitioned state-vector simulator: split a circuit's gate DAG "
            "into acyclic parts under a qubit limit, then execute the parts "
            "through cache-sized inner vectors, optionally across emulated "
            "ranks."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "partition", help="partition a circuit and write the result as JSON"
    )
    p.add_argument("circuit", help=".qasm path or bundled circuit name")
    p.add_argument("--strategy", choices=_STRATEGIES, default="dagp")
    p.add_argument("--limit", type=int, help="working-set limit (default: n/2)")
    p.add_argument("--l1", type=int, help="level-1 limit (multilevel)")
    p.add_argument("--l2", type=int, help="level-2 limit (multilevel)")
    p.add_argument("--seed", type=int, default=0, help="dfs shuffle seed")
    p.add_argument("--trials", type=int, default=16, help="dfs restarts")
    p.add_argument("--out", help="write partition JSON here instead of stdout")
    p.add_argument("--dag", help="also export the gate DAG (.json or .dot)")
    p.set_defaults(func=cmd_partition)

    r = sub.add_parser("run", help="simulate a circuit and report the run")
    r.add_argument("circuit", help=".qasm path or bundled circuit name")
    r.add_argument("--mode", choices=_MODES, default="flat")
    r.add_argument("--strategy", choices=("nat", "dfs", "dagp"), default="dagp")
    r.add_argument("--limit", type=int, help="working-set limit (default: n/2)")
    r.add_argument("--l1", type=int, help="level-1 limit (multilevel)")
    r.add_argument("--l2", type=int, help="level-2 limit (multilevel)")
    r.add_argument("--seed", type=int, default=0, help="dfs shuffle seed")
    r.add_argument("--trials", type=int, default=16, help="dfs restarts")
    r.add_argument("--p", type=int, default=1,
                   help="rank bits for distributed mode (2**p ranks)")
    r.add_argument("--partition", help="run a partition loaded from JSON")
    r.add_argument("--verify", action="store_true",
                   help="compare against the flat reference (n <= 16)")
    r.add_argument("--report", help="write the run report JSON here")
    r.add_argument("--trace", help="write per-part trace JSON lines here")
    r.add_argument("--out", help="save the final state vector here")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser(
        "oracle-gap",
        help="compare dagp part counts against the brute-force optimum",
    )
    g.add_argument("--circuits", nargs="+",
                   help="circuit names or paths (default: bundled set)")
    g.add_argument("--limits", nargs="+", type=int, default=[3, 4, 5, 6])
    g.add_argument("--truncate", type=int, default=20,
                   help="keep only the first K gates (0 = no truncation)")
    g.add_argument("--out", help="write the table as JSON here")
    g.set_defaults(func=cmd_oracle_gap)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse handles --help and bad arguments by exiting; callers of
        # main() get the code back as a return value instead
        return int(e.code or 0)
    try:
        return args.func(args)
    except _UsageError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as e:
        print(f"{parser.prog}: verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except (QasmError, PartitionError, SimulationError) as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError, ValueError) as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
