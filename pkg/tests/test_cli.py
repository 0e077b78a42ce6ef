from __future__ import annotations

import json
import subprocess
import sys

import pytest

from qpor.benchmarks import bundled_source
from qpor.cli import main, parse_formula
from qpor.export import dotted_edges


@pytest.fixture
def fig2_file(tmp_path):
    path = tmp_path / "fig2.qp"
    path.write_text(bundled_source("fig2"))
    return path


def test_check_fig2_stats(fig2_file, tmp_path, capsys):
    out = tmp_path / "out.json"
    code = main(["check", str(fig2_file), "--k", "inf", "--stats-json", str(out), "--allow-deadlock"])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["max_configs"] == 3 and data["ssbs"] == 0
    assert "max_configs=3" in capsys.readouterr().out


def test_blocked_deadlock_fails_without_flag(fig2_file):
    assert main(["check", str(fig2_file)]) == 1


def test_violation_exit_code(tmp_path, capsys):
    path = tmp_path / "a.qp"
    path.write_text(bundled_source("asserts"))
    assert main(["check", str(path)]) == 1
    out = capsys.readouterr().out
    assert "violation:" in out and "assert(x[2] == 0)" in out and "witness:" in out


def test_parse_error_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.qp"
    path.write_text("mutex m\nthread t {\n  lock(q)\n}\n")
    assert main(["check", str(path)]) == 2
    assert "undeclared-identifier" in capsys.readouterr().err


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        main(["check", "--k", "0", "x.qp"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_guard_exit_code(tmp_path):
    path = tmp_path / "loop.qp"
    path.write_text("var x\nthread t {\n  while (1) {\n    x = x + 1\n  }\n}\n")
    assert main(["check", str(path), "--max-steps", "100"]) == 3


def test_k_one_then_two_on_writers(tmp_path):
    src = tmp_path / "w3.qp"
    assert main(["gen", "writers", "--n", "3", "-o", str(src)]) == 0
    ssbs = []
    for k in ("1", "2"):
        out = tmp_path / f"k{k}.json"
        assert main(["check", str(src), "--k", k, "--stats-json", str(out)]) == 0
        ssbs.append(json.loads(out.read_text())["ssbs"])
    assert ssbs[0] > ssbs[1] == 0


def test_gen_pipe_into_check():
    gen = subprocess.run([sys.executable, "-m", "qpor", "gen", "writers", "--n", "4"],
                         capture_output=True, text=True, check=True)
    res = subprocess.run([sys.executable, "-m", "qpor", "check", "--k", "inf"],
                         input=gen.stdout, capture_output=True, text=True)
    assert res.returncode == 0
    assert "max_configs=8" in res.stdout


def test_oracle_check(fig2_file, capsys):
    assert main(["oracle-check", str(fig2_file), "--k", "2"]) == 0
    assert capsys.readouterr().out.strip().endswith("match")


def test_dot_subcommand(fig2_file, tmp_path):
    out = tmp_path / "f.dot"
    assert main(["dot", str(fig2_file), "-o", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("digraph") and len(dotted_edges(text)) == 2


def test_gen_3sat(tmp_path, capsys):
    assert main(["gen", "3sat"]) == 0
    text = capsys.readouterr().out
    assert text.count("thread ") == 16
    assert main(["gen", "3sat", "--formula", "1 -2, 2"]) == 0
    assert capsys.readouterr().out.count("thread ") == 2 * 2 + 2 + 3


def test_parse_formula():
    phi = parse_formula("1 -2 3, -1 -2")
    assert phi.nvars == 3
    assert phi.clauses == [((0, True), (1, False), (2, True)), ((0, False), (1, False))]
    with pytest.raises(ValueError):
        parse_formula("1 0")
