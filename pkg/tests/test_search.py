"""Search strategies: deepening, ascend/serialize/descend, and the hybrid."""

import pytest

from snowplan.encoder import Mode, ReachKind
from snowplan.fixtures import load_fixture
from snowplan.game import Direction, initial_state, is_goal, run_plan
from snowplan.plans import ObjectAction, ParallelPlan, SequentialPlan, Step, to_lurd
from snowplan.search import (Bounds, BoundStatus, BudgetPolicy,
                             SerializationError, ascend_parallel, descend,
                             serialize, solve_hybrid, solve_sequential)

FAST = BudgetPolicy(solve_budget=60.0, total_budget=120.0, horizon_cap=30)


def test_bounds_validation():
    with pytest.raises(ValueError):
        Bounds(3, 2, BoundStatus.BOUNDED)
    with pytest.raises(ValueError):
        Bounds(1, 2, BoundStatus.OPTIMAL)
    with pytest.raises(ValueError):
        BudgetPolicy(solve_budget=0)


def test_solve_sequential_full_matches_oracle(backend):
    fx = load_fixture("soko_corridor")
    bounds, plan = solve_sequential(fx.level, Mode.FULL, policy=FAST,
                                    backend=backend)
    assert bounds.status is BoundStatus.OPTIMAL
    assert bounds.upper == fx.moves_optimal
    assert run_plan(fx.level, plan.moves).ok


def test_solve_sequential_collapsed_matches_oracle(backend):
    fx = load_fixture("snow_pop")
    bounds, plan = solve_sequential(fx.level, Mode.COLLAPSED, policy=FAST,
                                    backend=backend)
    assert bounds.status is BoundStatus.OPTIMAL
    assert bounds.upper == fx.object_actions_optimal
    assert isinstance(plan, ParallelPlan)


def test_solve_sequential_rejects_other_modes():
    fx = load_fixture("snow_pop")
    with pytest.raises(ValueError):
        solve_sequential(fx.level, Mode.PARALLEL)


@pytest.mark.parametrize("reach", list(ReachKind))
def test_ascend_upper_bound_is_sound(reach, backend):
    fx = load_fixture("soko_pair")
    bounds, plan = ascend_parallel(fx.level, reach, FAST, backend)
    assert bounds.status is BoundStatus.BOUNDED
    assert bounds.upper >= fx.object_actions_optimal
    moves = serialize(fx.level, plan)
    assert is_goal(fx.level, run_plan(fx.level, moves).state)


def test_serialize_single_action_plan():
    fx = load_fixture("soko_corridor")    # #@$-.#
    plan = ParallelPlan([
        Step(actions=frozenset({ObjectAction("roll", (1, 2), Direction.E)})),
        Step(actions=frozenset({ObjectAction("roll", (1, 3), Direction.E)})),
    ])
    moves = serialize(fx.level, plan)
    assert moves == [Direction.E, Direction.E]
    assert is_goal(fx.level, run_plan(fx.level, moves).state)


def test_serialize_inserts_walks():
    fx = load_fixture("soko_pair")
    # push each box once; the agent must walk between the two rows
    plan = ParallelPlan([Step(actions=frozenset({
        ObjectAction("roll", (1, 2), Direction.E),
        ObjectAction("roll", (3, 2), Direction.E),
    }))])
    moves = serialize(fx.level, plan)
    assert len(moves) > 2                  # pushes plus connecting walks
    assert is_goal(fx.level, run_plan(fx.level, moves).state)


def test_serialize_jump_becomes_walk():
    fx = load_fixture("soko_corridor")
    plan = ParallelPlan([Step(jump=(1, 1))])
    assert serialize(fx.level, plan) == []     # already standing there


def test_serialize_rejects_impossible_action():
    fx = load_fixture("soko_corridor")
    plan = ParallelPlan([
        Step(actions=frozenset({ObjectAction("roll", (1, 2), Direction.W)}))])
    with pytest.raises(SerializationError):
        serialize(fx.level, plan)


def test_descend_confirms_optimum(backend):
    fx = load_fixture("snow_pop")
    opt = fx.object_actions_optimal
    bounds, plan = descend(fx.level, opt, policy=FAST, backend=backend)
    assert bounds.status is BoundStatus.OPTIMAL
    assert (bounds.lower, bounds.upper) == (opt, opt)
    assert plan is None                    # no probe succeeded


def test_descend_multi_step_drop(backend):
    """From a padded upper bound the probe jumps straight to the optimum:
    a satisfiable shorter horizon already carries trailing noops."""
    fx = load_fixture("soko_corridor")
    opt = fx.object_actions_optimal
    bounds, plan = descend(fx.level, opt + 3, policy=FAST, backend=backend)
    assert bounds.status is BoundStatus.OPTIMAL
    assert bounds.upper == opt
    # one SAT probe that skips several bounds, then the UNSAT certificate
    assert len(bounds.horizon_times) < (opt + 3 - opt) + 2
    assert plan is not None and plan.object_action_count == opt


def test_descend_zero_upper_bound(backend):
    fx = load_fixture("snow_done")
    bounds, plan = descend(fx.level, 0, policy=FAST, backend=backend)
    assert (bounds.lower, bounds.upper) == (0, 0)
    assert bounds.status is BoundStatus.OPTIMAL


@pytest.mark.parametrize("name", ["snow_pop", "soko_corridor", "soko_pair",
                                  "snow_tiny3"])
def test_hybrid_matches_oracle(name, backend):
    fx = load_fixture(name)
    bounds, moves = solve_hybrid(fx.level, policy=FAST, backend=backend)
    assert bounds.status is BoundStatus.OPTIMAL
    assert bounds.upper == fx.object_actions_optimal
    lurd = to_lurd(fx.level, SequentialPlan(moves))
    assert sum(1 for ch in lurd if ch.isupper()) == fx.object_actions_optimal
    assert is_goal(fx.level, run_plan(fx.level, moves).state)


def test_hybrid_solved_at_start(backend):
    fx = load_fixture("snow_done")
    bounds, moves = solve_hybrid(fx.level, policy=FAST, backend=backend)
    assert (bounds.lower, bounds.upper) == (0, 0)
    assert moves == []


def test_hybrid_records_phase_times(backend):
    fx = load_fixture("snow_pop")
    bounds, _ = solve_hybrid(fx.level, policy=FAST, backend=backend)
    assert set(bounds.phase_times) == {"ascend", "descend"}
    assert all(t >= 0 for t in bounds.phase_times.values())
    assert bounds.horizon_times
