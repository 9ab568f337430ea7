"""CNF construction primitives: variable pool, cardinality, DIMACS."""

import random
from itertools import combinations

import pytest

from snowplan.cnf import Formula, RegistryError, parse_dimacs
from snowplan.solvers import InProcessSolver, Status

from conftest import brute_force_models


def test_dense_allocation_from_one():
    f = Formula()
    assert f.new_var("x") == 1
    assert f.new_var() == 2
    assert f.new_var("y") == 3
    assert f.num_vars == 3


def test_duplicate_name_rejected():
    f = Formula()
    f.new_var("x")
    with pytest.raises(RegistryError):
        f.new_var("x")


def test_registry_is_injective():
    f = Formula()
    ids = [f.new_var(f"v{i}") for i in range(10)]
    assert len(set(ids)) == 10
    assert all(f.var(f"v{i}") == ids[i] for i in range(10))


def test_add_clause_validates_literals():
    f = Formula()
    f.new_var("x")
    with pytest.raises(ValueError):
        f.add_clause([0])
    with pytest.raises(ValueError):
        f.add_clause([2])


def test_exactly_one_singleton():
    f = Formula()
    x = f.new_var("x")
    f.exactly_one([x])
    assert f.clauses == [[x]]


def test_exactly_one_pair_shape():
    f = Formula()
    x, y = f.new_var("x"), f.new_var("y")
    f.exactly_one([x, y])
    assert f.clauses == [[x, y], [-x, -y]]


def test_exactly_one_clause_count_k4():
    f = Formula()
    lits = [f.new_var() for _ in range(4)]
    f.exactly_one(lits)
    assert len(f.clauses) == 1 + 6  # one ALO plus k(k-1)/2 AMO


def test_exactly_one_empty_rejected():
    with pytest.raises(ValueError):
        Formula().exactly_one([])


def test_at_most_zero_is_unit_negations():
    f = Formula()
    x, y = f.new_var("x"), f.new_var("y")
    f.at_most_k([x, y], 0)
    assert sorted(map(tuple, f.clauses)) == [(-y,), (-x,)]


def test_at_most_k_vacuous():
    f = Formula()
    lits = [f.new_var() for _ in range(3)]
    f.at_most_k(lits, 3)
    assert f.clauses == []


def test_at_most_one_of_three_model_count():
    f = Formula()
    lits = [f.new_var() for _ in range(3)]
    f.at_most_k(lits, 1)
    models = brute_force_models(f)
    projected = {tuple(m[abs(x)] for x in lits) for m in models}
    assert projected == {p for p in projected if sum(p) <= 1}
    assert len(projected) == 4


def test_at_least_k_units_and_duals():
    f = Formula()
    x = f.new_var("x")
    f.at_least_k([x], 1)
    assert f.clauses == [[x]]
    g = Formula()
    lits = [g.new_var() for _ in range(3)]
    g.at_least_k(lits, 3)
    assert sorted(map(tuple, g.clauses)) == [(l,) for l in lits]


def test_at_least_two_of_three_model_count():
    f = Formula()
    lits = [f.new_var() for _ in range(3)]
    f.at_least_k(lits, 2)
    projected = {tuple(m[abs(x)] for x in lits) for m in brute_force_models(f)}
    assert len(projected) == 4
    assert all(sum(p) >= 2 for p in projected)


@pytest.mark.parametrize("n,k", [(n, k) for n in range(1, 7) for k in range(n + 1)])
def test_cardinality_matches_brute_force(n, k):
    """An assignment extends to a model of at_most_k iff it has <= k true.

    The auxiliary counter variables are quantified away by solving with the
    base assignment pinned as unit clauses.
    """
    from itertools import product

    solver = InProcessSolver()
    for bits in product([False, True], repeat=n):
        f = Formula()
        lits = [f.new_var() for _ in range(n)]
        f.at_most_k(lits, k)
        for lit, bit in zip(lits, bits):
            f.add_clause([lit if bit else -lit])
        sat = solver.solve(f).status is Status.SAT
        assert sat == (sum(bits) <= k), (bits, k)


def test_negative_bounds_rejected():
    f = Formula()
    x = f.new_var("x")
    with pytest.raises(ValueError):
        f.at_most_k([x], -1)
    with pytest.raises(ValueError):
        f.at_least_k([x], -1)


def test_dimacs_format():
    f = Formula()
    f.new_var("a")
    f.new_var("b")
    f.add_clause([1, -2])
    assert f.to_dimacs() == "p cnf 2 1\n1 -2 0\n"


def test_dimacs_empty():
    assert Formula().to_dimacs() == "p cnf 0 0\n"


def test_dimacs_round_trip():
    rng = random.Random(7)
    for _ in range(25):
        f = Formula()
        n = rng.randint(1, 8)
        for _ in range(n):
            f.new_var()
        for _ in range(rng.randint(0, 12)):
            width = rng.randint(1, 4)
            f.add_clause([rng.choice([-1, 1]) * rng.randint(1, n)
                          for _ in range(width)])
        num_vars, clauses = parse_dimacs(f.to_dimacs())
        assert num_vars == f.num_vars
        assert sorted(map(tuple, clauses)) == sorted(map(tuple, f.clauses))


def test_pigeonhole_unsat():
    """Four pigeons into three holes via exactly_one/at_most_k."""
    f = Formula()
    cell = {(p, h): f.new_var(f"p{p}h{h}") for p in range(4) for h in range(3)}
    for p in range(4):
        f.exactly_one([cell[p, h] for h in range(3)])
    for h in range(3):
        f.at_most_k([cell[p, h] for p in range(4)], 1)
    assert InProcessSolver().solve(f).status is Status.UNSAT


def test_force_unsat():
    f = Formula()
    f.new_var("x")
    f.force_unsat()
    assert InProcessSolver().solve(f).status is Status.UNSAT
