"""Solver backends: bundled CDCL, external process contract, verification."""

import os
import random
import stat
from pathlib import Path

import pytest

from snowplan.cnf import Formula
from snowplan.solvers import (BackendError, ExternalSolver, InProcessSolver,
                              Status, check_model, default_backend, solve,
                              SOLVER_CMD_ENV)

from conftest import is_satisfiable_brute


def _tiny(clauses, n):
    f = Formula()
    for _ in range(n):
        f.new_var()
    for c in clauses:
        f.add_clause(c)
    return f


def test_unit_sat():
    f = _tiny([[1]], 1)
    out = InProcessSolver().solve(f)
    assert out.status is Status.SAT
    assert out.model == {1: True}


def test_contradiction_unsat():
    f = _tiny([[1], [-1]], 1)
    assert InProcessSolver().solve(f).status is Status.UNSAT


def test_model_is_total_and_verified():
    f = _tiny([[1, 2]], 3)  # var 3 is unconstrained
    out = InProcessSolver().solve(f)
    assert out.status is Status.SAT
    assert set(out.model) == {1, 2, 3}
    assert check_model(f, out.model)


def test_cdcl_agrees_with_enumeration():
    rng = random.Random(42)
    solver = InProcessSolver()
    for _ in range(150):
        n = rng.randint(1, 9)
        f = Formula()
        for _ in range(n):
            f.new_var()
        for _ in range(rng.randint(1, 4 * n)):
            width = rng.randint(1, 3)
            f.add_clause(sorted({rng.choice([-1, 1]) * rng.randint(1, n)
                                 for _ in range(width)}))
        out = solver.solve(f)
        expect = is_satisfiable_brute(f)
        assert (out.status is Status.SAT) == expect
        if out.status is Status.SAT:
            assert check_model(f, out.model)


def _script_solver(tmp_path: Path, body: str) -> str:
    path = tmp_path / "fakesolver.sh"
    path.write_text("#!/bin/sh\n" + body)
    path.chmod(path.stat().st_mode | stat.S_IXUSR)
    return f"{path} {{input}}"


def test_external_template_requires_placeholder():
    with pytest.raises(BackendError):
        ExternalSolver("solver-without-placeholder")


def test_external_sat_output_parsed(tmp_path):
    cmd = _script_solver(tmp_path, 'echo "s SATISFIABLE"\necho "v 1 -2 0"\n')
    f = _tiny([[1, -2]], 2)
    out = ExternalSolver(cmd).solve(f)
    assert out.status is Status.SAT
    assert out.model == {1: True, 2: False}


def test_external_unsat_output_parsed(tmp_path):
    cmd = _script_solver(tmp_path, 'echo "s UNSATISFIABLE"\n')
    out = ExternalSolver(cmd).solve(_tiny([[1], [-1]], 1))
    assert out.status is Status.UNSAT


def test_external_lying_solver_rejected(tmp_path):
    """A SAT claim whose model violates the formula is a backend error."""
    cmd = _script_solver(tmp_path, 'echo "s SATISFIABLE"\necho "v -1 0"\n')
    with pytest.raises(BackendError):
        ExternalSolver(cmd).solve(_tiny([[1]], 1))


def test_external_garbage_is_backend_error(tmp_path):
    cmd = _script_solver(tmp_path, 'echo "no status here"\n')
    with pytest.raises(BackendError):
        ExternalSolver(cmd).solve(_tiny([[1]], 1))


def test_external_timeout_is_unknown(tmp_path):
    cmd = _script_solver(tmp_path, "sleep 30\n")
    out = ExternalSolver(cmd).solve(_tiny([[1]], 1), budget=0.2)
    assert out.status is Status.UNKNOWN
    assert out.model is None


def test_default_backend_env_override(tmp_path, monkeypatch):
    cmd = _script_solver(tmp_path, 'echo "s UNSATISFIABLE"\n')
    monkeypatch.setenv(SOLVER_CMD_ENV, cmd)
    backend = default_backend()
    assert isinstance(backend, ExternalSolver)
    assert backend.command_template == cmd


def test_default_backend_falls_back_to_bundled(monkeypatch):
    monkeypatch.delenv(SOLVER_CMD_ENV, raising=False)
    monkeypatch.setenv("PATH", "/nonexistent")
    assert isinstance(default_backend(), InProcessSolver)


def test_solve_helper_uses_given_backend():
    out = solve(_tiny([[1]], 1), backend=InProcessSolver())
    assert out.status is Status.SAT


def test_session_backend_solves(backend):
    out = backend.solve(_tiny([[1, 2], [-1, -2], [1]], 2))
    assert out.status is Status.SAT
    assert out.model == {1: True, 2: False}
