"""End-to-end CLI contract: subcommands, exit codes, determinism."""
from __future__ import annotations

import json
import math
import os

import pytest

from qsearch.circuit import Circuit
from qsearch.cli import main

DATA_DB = os.path.join(os.path.dirname(__file__), "..", "data", "people.json")


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_estimate_bound_json(capsys):
    code, out, _ = _run(capsys, "estimate", "--n", "10", "--m", "8")
    assert code == 0
    doc = json.loads(out)
    assert doc["t_depth_kernel"] == 176
    assert doc["t_cost"] == 4400
    assert doc["mode"] == "bound"


def test_estimate_csv(capsys):
    code, out, _ = _run(capsys, "estimate", "--n", "2", "--m", "2",
                        "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.split(",")[0] == "n"
    assert row.split(",")[0] == "2"


def test_estimate_measured_mode(capsys):
    code, out, _ = _run(capsys, "estimate", "--n", "3", "--m", "2",
                        "--mode", "measured")
    assert code == 0
    doc = json.loads(out)
    assert doc["mode"] == "measured"
    assert doc["t_depth_qdam"] <= 12


def test_search_present_key_solves(capsys):
    code, out, _ = _run(capsys, "search", "--db", DATA_DB,
                        "--key", "0101", "--return", "phone")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "SOLVED"
    assert doc["returned_value"] == "01011001"
    expected = math.sin(5 * math.asin(8 ** -0.5)) ** 2
    assert abs(doc["success_probability"] - expected) < 1e-9


def test_search_absent_key_exits_two(capsys):
    code, out, _ = _run(capsys, "search", "--db", DATA_DB,
                        "--key", "1111", "--return", "phone")
    assert code == 2
    assert json.loads(out)["status"] == "KEY_NOT_PRESENT"


def test_search_malformed_database_exits_three(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    code, _, err = _run(capsys, "search", "--db", str(bad),
                        "--key", "0101", "--return", "phone")
    assert code == 3
    assert "error" in err


def test_search_duplicate_keys_exit_three(tmp_path, capsys):
    dup = tmp_path / "dup.json"
    dup.write_text(json.dumps({
        "version": 1,
        "fields": [{"name": "id", "bit_width": 2}],
        "key_field": "id",
        "records": [{"id": "01"}, {"id": "01"}],
    }))
    code, _, err = _run(capsys, "search", "--db", str(dup),
                        "--key", "01", "--return", "id")
    assert code == 3


def test_search_width_mismatch_exits_three(capsys):
    code, _, _ = _run(capsys, "search", "--db", DATA_DB,
                      "--key", "01", "--return", "phone")
    assert code == 3


def test_search_output_is_byte_deterministic(capsys):
    _, first, _ = _run(capsys, "search", "--db", DATA_DB,
                       "--key", "0011", "--return", "room")
    _, second, _ = _run(capsys, "search", "--db", DATA_DB,
                        "--key", "0011", "--return", "room")
    assert first == second


def test_search_sampled_deterministic_with_seed(capsys):
    args = ["search", "--db", DATA_DB, "--key", "0101", "--return", "phone",
            "--shots", "16", "--seed", "7"]
    _, first, _ = _run(capsys, *args)
    _, second, _ = _run(capsys, *args)
    assert first == second


def test_search_writes_out_file(tmp_path, capsys):
    out_path = tmp_path / "result.json"
    code, out, _ = _run(capsys, "search", "--db", DATA_DB, "--key", "0101",
                        "--return", "phone", "--out", str(out_path))
    assert code == 0
    assert "SOLVED" in out
    doc = json.loads(out_path.read_text())
    assert doc["status"] == "SOLVED"


@pytest.mark.parametrize(
    "part", ["m1", "m2", "qdam", "oracle", "diffusion", "kernel", "naive"]
)
def test_compile_exports_every_part(tmp_path, capsys, part):
    out_path = tmp_path / f"{part}.json"
    code, _, _ = _run(capsys, "compile", "--db", DATA_DB, "--key", "0101",
                      "--part", part, "--out", str(out_path))
    assert code == 0
    circuit = Circuit.from_json(out_path.read_text())
    assert len(circuit.gates) > 0


def test_compile_lowered_export(tmp_path, capsys):
    out_path = tmp_path / "qdam_low.json"
    code, _, _ = _run(capsys, "compile", "--db", DATA_DB, "--key", "0101",
                      "--part", "qdam", "--lowered", "--out", str(out_path))
    assert code == 0
    circuit = Circuit.from_json(out_path.read_text())
    assert circuit.is_lowered


def test_bench_writes_csv(tmp_path, capsys):
    out_path = tmp_path / "bench.csv"
    code, _, _ = _run(capsys, "bench", "--n-min", "2", "--n-max", "4",
                      "--m", "1", "--out", str(out_path))
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0] == "N,K,td_opt,td_naive,tcost_opt,tcost_naive"
    assert len(lines) == 4


def test_bad_flags_exit_three(capsys):
    code, _, err = _run(capsys, "estimate", "--n", "10")
    assert code == 3
    code, _, _ = _run(capsys, "bench", "--n-min", "4", "--n-max", "2",
                      "--m", "1", "--out", "/tmp/x.csv")
    assert code == 3
