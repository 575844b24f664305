"""Command-line interface tests: exit codes, file outputs, report shape."""

from __future__ import annotations

import json

import jsonschema
import numpy as np
import pytest

from hisim.cli import main
from hisim.statevec import load_state, simulate_flat
from hisim import bench


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- exit codes -------------------------------------------------------------


def test_unknown_flag_is_usage_error(capsys):
    code, _, _ = run_cli(capsys, "run", "bell", "--frobnicate")
    assert code == 1


def test_missing_subcommand_is_usage_error(capsys):
    code, _, _ = run_cli(capsys)
    assert code == 1


def test_missing_file_is_input_error(capsys):
    code, _, err = run_cli(capsys, "run", "/nonexistent/circuit.qasm")
    assert code == 2
    assert err.strip() != ""


def test_unparseable_file_is_input_error(tmp_path, capsys):
    bad = tmp_path / "bad.qasm"
    bad.write_text("OPENQASM 2.0;\nqreg q[2];\nh q[0]\n")
    code, _, _ = run_cli(capsys, "run", str(bad))
    assert code == 2


def test_infeasible_limit_is_input_error(capsys):
    code, _, _ = run_cli(
        capsys, "run", "bv_6", "--mode", "hierarchical", "--limit", "0"
    )
    assert code == 2


def test_oversized_circuit_is_input_error(capsys):
    # bv_30 is 30 qubits; a flat run would need 16 GiB, which the default
    # cap refuses.
    code, _, _ = run_cli(capsys, "run", "bv_30", "--mode", "flat")
    assert code == 2


def test_verification_failure_is_exit_three(capsys, monkeypatch):
    # A valid partition always verifies, so corrupt the executor.
    import hisim.cli as cli_mod

    real = cli_mod.execute_hierarchical

    def corrupted(circuit, partition, **kwargs):
        out = real(circuit, partition, **kwargs)
        state = out[0] if isinstance(out, tuple) else out
        state.data[0] += 0.5
        return out

    monkeypatch.setattr(cli_mod, "execute_hierarchical", corrupted)
    code, _, err = run_cli(
        capsys, "run", "bv_6", "--mode", "hierarchical", "--verify"
    )
    assert code == 3
    assert "delta" in err


# --- run reports ------------------------------------------------------------

REPORT_SCHEMA = {
    "type": "object",
    "required": [
        "circuit",
        "mode",
        "num_parts",
        "parts",
        "wall_time_s",
    ],
    "properties": {
        "circuit": {
            "type": "object",
            "required": ["name", "num_qubits", "num_gates"],
            "properties": {
                "name": {"type": "string"},
                "num_qubits": {"type": "integer", "minimum": 1},
                "num_gates": {"type": "integer", "minimum": 0},
            },
        },
        "mode": {
            "enum": ["flat", "hierarchical", "multilevel", "distributed"]
        },
        "num_parts": {"type": ["integer", "null"]},
        "parts": {
            "type": ["array", "null"],
            "items": {
                "type": "object",
                "required": ["id", "gates", "working_set"],
            },
        },
        "wall_time_s": {"type": "number", "minimum": 0},
        "max_abs_delta": {"type": ["number", "null"]},
        "probabilities": {"type": ["object", "null"]},
    },
}


def test_run_report_on_stdout_is_valid(capsys):
    code, out, _ = run_cli(
        capsys,
        "run",
        "bv_6",
        "--mode",
        "hierarchical",
        "--strategy",
        "dagp",
        "--limit",
        "4",
        "--verify",
    )
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["circuit"] == {"name": "bv_6", "num_qubits": 6, "num_gates": 17}
    assert report["mode"] == "hierarchical"
    assert report["strategy"] == "dagp"
    assert report["limit"] == 4
    assert report["num_parts"] == 2
    assert report["max_abs_delta"] < 1e-10


def test_bell_probabilities(capsys):
    code, out, _ = run_cli(capsys, "run", "bell", "--mode", "flat")
    assert code == 0
    report = json.loads(out)
    probs = report["probabilities"]
    assert set(probs.keys()) == {"00", "11"}
    assert probs["00"] == pytest.approx(0.5, abs=1e-12)
    assert probs["11"] == pytest.approx(0.5, abs=1e-12)


def test_report_file_and_summary(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys, "run", "bv_6", "--report", str(report_path)
    )
    assert code == 0
    report = json.loads(report_path.read_text())
    jsonschema.validate(report, REPORT_SCHEMA)
    # With --report the JSON goes to the file, not stdout.
    assert not out.strip().startswith("{")


def test_distributed_run_reports_comm(capsys):
    code, out, _ = run_cli(
        capsys,
        "run",
        "ising_8",
        "--mode",
        "distributed",
        "--p",
        "2",
        "--verify",
    )
    assert code == 0
    report = json.loads(out)
    assert report["mode"] == "distributed"
    assert report["num_rank_bits"] == 2
    comm = report["comm"]
    assert comm["num_ranks"] == 4
    assert comm["totals"]["switches"] == len(comm["switches"])
    assert report["max_abs_delta"] < 1e-10


def test_multilevel_run(capsys):
    code, out, _ = run_cli(
        capsys,
        "run",
        "qft_12",
        "--mode",
        "multilevel",
        "--l1",
        "8",
        "--l2",
        "4",
        "--verify",
    )
    assert code == 0
    report = json.loads(out)
    assert report["mode"] == "multilevel"
    assert report["limit1"] == 8
    assert report["limit2"] == 4
    assert report["max_abs_delta"] < 1e-10


def test_state_output_matches_flat(tmp_path, capsys):
    out_path = tmp_path / "state.npz"
    code, _, _ = run_cli(capsys, "run", "bv_6", "--out", str(out_path))
    assert code == 0
    state = load_state(out_path)
    expect = simulate_flat(bench.build("bv_6"))
    assert np.max(np.abs(state.data - expect.data)) < 1e-10


def test_trace_file_has_one_row_per_executed_part(tmp_path, capsys):
    trace_path = tmp_path / "trace.jsonl"
    code, _, _ = run_cli(
        capsys,
        "run",
        "bv_6",
        "--mode",
        "hierarchical",
        "--strategy",
        "nat",
        "--limit",
        "4",
        "--trace",
        str(trace_path),
    )
    assert code == 0
    rows = [json.loads(s) for s in trace_path.read_text().splitlines()]
    assert len(rows) == 5
    for row in rows:
        assert set(row) == {"part_id", "w", "iterations", "gates", "level", "parent_id"}
        assert row["iterations"] == 1 << (6 - row["w"])


# --- partition subcommand ---------------------------------------------------


def test_partition_writes_valid_document(tmp_path, capsys):
    out_path = tmp_path / "parts.json"
    code, out, err = run_cli(
        capsys,
        "partition",
        "bv_6",
        "--strategy",
        "dagp",
        "--limit",
        "4",
        "--out",
        str(out_path),
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["strategy"] == "dagp"
    assert doc["num_parts"] == 2
    assert "bv_6" in out  # summary goes to stdout when the JSON goes to a file
    assert err == ""


def test_partition_to_stdout(capsys):
    code, out, _ = run_cli(capsys, "partition", "bv_6", "--limit", "4")
    assert code == 0
    doc = json.loads(out)
    assert doc["num_parts"] >= 1


def test_partition_multilevel_document(capsys):
    code, out, _ = run_cli(
        capsys,
        "partition",
        "bv_6",
        "--strategy",
        "multilevel",
        "--l1",
        "4",
        "--l2",
        "2",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["strategy"] == "multilevel"
    assert len(doc["sublevels"]) == doc["level1"]["num_parts"]


def test_partition_dag_exports(tmp_path, capsys):
    dot_path = tmp_path / "dag.dot"
    code, _, _ = run_cli(
        capsys, "partition", "bell", "--dag", str(dot_path)
    )
    assert code == 0
    assert dot_path.read_text().startswith("digraph")
    json_path = tmp_path / "dag.json"
    code, _, _ = run_cli(
        capsys, "partition", "bell", "--dag", str(json_path)
    )
    assert code == 0
    doc = json.loads(json_path.read_text())
    assert doc["num_qubits"] == 2


def test_saved_partition_replays(tmp_path, capsys):
    parts_path = tmp_path / "parts.json"
    code, _, _ = run_cli(
        capsys,
        "partition",
        "bv_6",
        "--strategy",
        "dfs",
        "--limit",
        "4",
        "--out",
        str(parts_path),
    )
    assert code == 0
    code, out, _ = run_cli(
        capsys,
        "run",
        "bv_6",
        "--mode",
        "hierarchical",
        "--partition",
        str(parts_path),
        "--verify",
    )
    assert code == 0
    report = json.loads(out)
    assert report["strategy"] == "dfs"
    assert report["max_abs_delta"] < 1e-10


def test_replayed_partition_must_match_circuit(tmp_path, capsys):
    parts_path = tmp_path / "parts.json"
    run_cli(capsys, "partition", "bv_6", "--out", str(parts_path))
    code, _, _ = run_cli(
        capsys,
        "run",
        "qaoa_8",
        "--mode",
        "hierarchical",
        "--partition",
        str(parts_path),
    )
    assert code == 2


# --- oracle-gap subcommand --------------------------------------------------


def test_oracle_gap_small_subset(tmp_path, capsys):
    out_path = tmp_path / "gap.json"
    code, out, _ = run_cli(
        capsys,
        "oracle-gap",
        "--circuits",
        "bv_6",
        "cat_state_6",
        "--limits",
        "3",
        "4",
        "--out",
        str(out_path),
    )
    assert code == 0
    rows = json.loads(out_path.read_text())
    assert len(rows) == 4
    for row in rows:
        assert row["gap"] == row["dagp"] - row["optimal"]
        assert row["gap"] >= 0
    assert "combinations optimal" in out
