"""Shared test helpers: brute-force CNF enumeration and level builders."""

from __future__ import annotations

from itertools import product

import pytest

from snowplan.cnf import Formula
from snowplan.solvers import default_backend


def brute_force_models(formula: Formula) -> list[dict[int, bool]]:
    """All satisfying total assignments, by exhaustive enumeration."""
    n = formula.num_vars
    out = []
    for bits in product([False, True], repeat=n):
        model = {v: bits[v - 1] for v in range(1, n + 1)}
        if all(any(model[abs(lit)] == (lit > 0) for lit in clause)
               for clause in formula.clauses):
            out.append(model)
    return out


def is_satisfiable_brute(formula: Formula) -> bool:
    n = formula.num_vars
    for bits in product([False, True], repeat=n):
        model = {v: bits[v - 1] for v in range(1, n + 1)}
        if all(any(model[abs(lit)] == (lit > 0) for lit in clause)
               for clause in formula.clauses):
            return True
    return False


@pytest.fixture(scope="session")
def backend():
    """One shared solver backend for the whole run."""
    return default_backend()
