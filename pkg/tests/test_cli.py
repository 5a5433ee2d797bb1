import json
import math
import os
import struct
import subprocess
import sys
from unittest import mock

import pytest

from fhp import io
from fhp.cli import EXIT_CONVERGENCE, EXIT_INPUT, EXIT_INVARIANT, EXIT_OK, RunConfig, execute, main, verify
from fhp.errors import ConvergenceError, InputError
from fhp.instances.sat import format_dimacs, random_3sat13


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def circle8(workdir):
    assert main(["gen", "circle", "--n", "8", "--out", "circle8.fhp", "--report", "gen.json"]) == 0
    return "circle8.fhp"


@pytest.fixture
def tiny_cnf(workdir):
    phi, _ = random_3sat13(10, 20, seed=0)
    (workdir / "tiny.dimacs").write_text(format_dimacs(phi.num_vars, phi.clauses))
    return "tiny.dimacs", phi


def _load(path):
    return json.loads(open(path).read())


def test_solve_bfs_circle(circle8):
    assert main(["solve", "--solver", "bfs", "--in", circle8, "--out", "r.json"]) == EXIT_OK
    rep = _load("r.json")
    assert rep["kind"] == "solve"
    assert rep["result"]["margin"] == pytest.approx(0.38268, abs=1e-5)
    assert rep["config"]["seed"] == 0 and rep["input"]["sha256"] == io.file_digest(circle8)
    assert all(rep["checks"].values())
    assert "timing" not in rep


@pytest.mark.parametrize("solver", ["net", "random", "approx", "mmc"])
def test_solve_every_solver(circle8, solver):
    assert main(["solve", solver, "--in", circle8, "--out", "r.json", "--budget", "5000"]) == EXIT_OK
    rep = _load("r.json")
    assert rep["result"]["solver"] == solver
    assert all(rep["checks"].values())


def test_random_with_theta_lower(circle8):
    assert main(["solve", "random", "--in", circle8, "--theta-lower", "0.38", "--out", "r.json"]) == 0
    assert _load("r.json")["result"]["margin"] == pytest.approx(math.sin(math.pi / 8), abs=1e-9)


def test_gen_is_byte_deterministic(workdir):
    main(["gen", "gaussian", "--n", "20", "--d", "10", "--seed", "7", "--out", "a.fhp", "--report", "a.json"])
    main(["gen", "gaussian", "--n", "20", "--d", "10", "--seed", "7", "--out", "b.fhp", "--report", "b.json"])
    assert (workdir / "a.fhp").read_bytes() == (workdir / "b.fhp").read_bytes()


def test_reduce_report(tiny_cnf, workdir):
    cnf, phi = tiny_cnf
    assert main(["reduce", "--cnf", cnf, "--seed", "1", "--out", "hard.fhp", "--report", "red.json"]) == 0
    rep = _load("red.json")
    assert rep["result"]["sym_clauses"] == 16 * phi.m
    assert rep["checks"]["clause_count_16m"] and rep["checks"]["norm_range"]
    assert rep["checks"]["completeness_margin"]
    assert (workdir / "hard.fhp.sym.cnf").exists() and (workdir / "hard.fhp.sym.json").exists()
    checks = verify("hard.fhp")
    assert checks["clause_count_16m"] and checks["norm_range"] and all(checks.values())


def test_reduce_too_few_clauses(workdir):
    phi, _ = random_3sat13(6, 8, seed=0)
    (workdir / "small.dimacs").write_text(format_dimacs(phi.num_vars, phi.clauses))
    assert main(["reduce", "--cnf", "small.dimacs", "--out", "x.fhp"]) == EXIT_INPUT


def test_verify_bfs_report(circle8, capsys):
    main(["solve", "bfs", "--in", circle8, "--out", "r.json"])
    assert main(["verify", "r.json", "--replay"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS witness_margin" in out and "PASS report_bytes_identical" in out


def test_tamper_one_bit(circle8, capsys):
    main(["solve", "bfs", "--in", circle8, "--out", "r.json"])
    rep = _load("r.json")
    x = rep["result"]["normal"][0]
    (bits,) = struct.unpack("<Q", struct.pack("<d", x))
    rep["result"]["normal"][0] = struct.unpack("<d", struct.pack("<Q", bits ^ (1 << 60)))[0]
    open("t.json", "w").write(io.dumps_report(rep))
    assert main(["verify", "t.json"]) == EXIT_INVARIANT
    assert "FAIL witness_margin" in capsys.readouterr().out


def test_tampered_instance_detected(circle8):
    main(["solve", "bfs", "--in", circle8, "--out", "r.json"])
    text = open(circle8).read().replace("0.70710678118654757", "0.70710678118654746", 1)
    open(circle8, "w").write(text)
    assert verify("r.json")["input_digest"] is False


def test_study_and_gap_demo_replay(workdir):
    assert main(["study", "random-margin", "--n", "20", "--d", "10", "--trials", "20", "--out", "s.json"]) == 0
    assert main(["gap-demo", "--n", "8", "--n", "16", "--out", "g.json"]) == 0
    for path in ("s.json", "g.json"):
        checks = verify(path, replay=True)
        assert all(checks.values()), checks


def test_timing_is_opt_in(circle8):
    main(["solve", "bfs", "--in", circle8, "--out", "r.json", "--timing"])
    assert "elapsed_s" in _load("r.json")["timing"]
    assert all(verify("r.json", replay=True).values())


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", "bfs", "--in", "missing.fhp"],
        ["solve", "approx", "--in", "x.fhp", "--alpha", "1.5"],
        ["gen", "gaussian", "--n", "5", "--out", "g.fhp"],
        ["solve", "bfs", "--solver", "net", "--in", "x.fhp"],
    ],
)
def test_input_errors(workdir, argv):
    (workdir / "x.fhp").write_text("fhp v1 n=1 d=1 scale=1\n1\n")
    assert main(argv) == EXIT_INPUT


def test_malformed_instance(workdir):
    (workdir / "bad.fhp").write_text("fhp v1 n=2 d=2 scale=1\n1 0\n")
    assert main(["solve", "bfs", "--in", "bad.fhp"]) == EXIT_INPUT
    assert main(["verify", "bad.fhp"]) == EXIT_INPUT


def test_convergence_exit_code(circle8):
    # iteration caps are not reachable from the command line, so inject the failure
    with mock.patch("fhp.cli.solve_exact_bfs", side_effect=ConvergenceError("cap")):
        assert main(["solve", "bfs", "--in", circle8]) == EXIT_CONVERGENCE


def test_invariant_exit_code(circle8):
    with mock.patch("fhp.cli.witness_checks", return_value={"witness_margin": False}):
        assert main(["solve", "bfs", "--in", circle8, "--out", "r.json"]) == EXIT_INVARIANT


def test_config_rejects_unknown_keys():
    with pytest.raises(InputError):
        RunConfig.from_dict({"command": "gap-demo", "colour": "red"})
    with pytest.raises(InputError):
        RunConfig.from_dict({"command": "solve", "target": "bfs", "inputs": ["a"], "tol": {"bogus": 1}})


def test_config_round_trip():
    cfg = RunConfig("solve", "approx", ["a.fhp"], seed=3, alpha=0.2, tol={"feas": 1e-8})
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_execute_is_pure(circle8):
    cfg = RunConfig("solve", "bfs", [circle8])
    a, _ = execute(cfg)
    b, _ = execute(cfg)
    assert io.dumps_report(a) == io.dumps_report(b)


def test_threads_env_does_not_change_result(circle8, monkeypatch):
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("FHP_THREADS", threads)
        main(["solve", "random", "--in", circle8, "--budget", "70000", "--out", f"r{threads}.json"])
        outs.append(open(f"r{threads}.json").read().replace(f"r{threads}.json", ""))
    assert outs[0] == outs[1]


def test_console_entry_point(circle8):
    proc = subprocess.run(
        [sys.executable, "-m", "fhp.cli", "solve", "bfs", "--in", circle8],
        capture_output=True,
        text=True,
        env={**os.environ},
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kind"] == "solve"
