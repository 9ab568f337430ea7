"""Batch benchmarking with PAR-2 scoring.

Each (instance, reach-encoding) pair is solved under a per-instance wall
clock limit. The PAR-2 score of an encoding is the sum of the runtimes of
solved instances plus twice the limit for every unsolved one; lower is
better. Instances that error are counted as unsolved and reported.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .encoder import Mode, ReachKind
from .levels import GameTag, Level, parse_level
from .plans import RunRecord, SequentialPlan, to_lurd
from .search import Bounds, BoundStatus, BudgetPolicy, solve_hybrid, solve_sequential

LEVEL_SUFFIXES = {".snw": GameTag.SNOWMAN, ".xsb": GameTag.SOKOBAN}


@dataclass
class BenchRun:
    instance: str
    reach: str
    solved: bool
    runtime: float
    record: RunRecord | None = None
    error: str | None = None


@dataclass
class BenchReport:
    limit: float
    runs: list[BenchRun] = field(default_factory=list)

    def par2(self, reach: str | None = None) -> float:
        score = 0.0
        for run in self.runs:
            if reach is not None and run.reach != reach:
                continue
            score += run.runtime if run.solved else 2 * self.limit
        return score

    def timeouts(self, reach: str | None = None) -> int:
        return sum(1 for run in self.runs
                   if (reach is None or run.reach == reach) and not run.solved)

    def summary(self) -> dict[str, dict]:
        reaches = sorted({run.reach for run in self.runs})
        return {r: {"par2": self.par2(r), "timeouts": self.timeouts(r),
                    "instances": sum(1 for x in self.runs if x.reach == r)}
                for r in reaches}


def par2_score(runtimes: list[float], unsolved: int, limit: float) -> float:
    """PAR-2: solved runtimes plus twice the limit per unsolved instance."""
    return sum(runtimes) + 2 * limit * unsolved


def discover_levels(directory: Path) -> list[tuple[Path, GameTag]]:
    found = []
    for path in sorted(directory.iterdir()):
        game = LEVEL_SUFFIXES.get(path.suffix)
        if game is not None:
            found.append((path, game))
    return found


def load_level_file(path: Path, game: GameTag | None = None) -> Level:
    if game is None:
        game = LEVEL_SUFFIXES.get(path.suffix)
        if game is None:
            raise ValueError(f"cannot infer game from suffix of {path.name}; "
                             "expected .snw or .xsb")
    return parse_level(path.read_text(), game)


def run_instance(level: Level, instance: str, reach: ReachKind,
                 mode: Mode | str = "hybrid", limit: float = 60.0,
                 seed: int | None = None, backend=None) -> BenchRun:
    """Solve one instance under the limit, returning a scored run."""
    policy = BudgetPolicy(solve_budget=limit, total_budget=limit)
    start = time.monotonic()
    try:
        bounds, record = _dispatch(level, instance, reach, mode, policy,
                                   seed, backend)
    except Exception as exc:  # noqa: BLE001 - harness must keep going
        return BenchRun(instance, reach.value, False,
                        time.monotonic() - start, error=str(exc))
    runtime = time.monotonic() - start
    solved = bounds.status is BoundStatus.OPTIMAL
    return BenchRun(instance, reach.value, solved, runtime, record)


def _dispatch(level: Level, instance: str, reach: ReachKind, mode,
              policy: BudgetPolicy, seed, backend) -> tuple[Bounds, RunRecord]:
    mode_name = mode.value if isinstance(mode, Mode) else str(mode)
    if mode_name == "hybrid":
        bounds, moves = solve_hybrid(level, ascend_reach=reach, policy=policy,
                                     backend=backend)
        lurd = None if moves is None else to_lurd(level, SequentialPlan(moves))
    else:
        from .search import serialize

        bounds, plan = solve_sequential(level, Mode(mode_name), reach, policy,
                                        backend)
        lurd = None
        if plan is not None:
            moves = (plan.moves if isinstance(plan, SequentialPlan)
                     else serialize(level, plan))
            lurd = to_lurd(level, SequentialPlan(moves))
    record = RunRecord(
        instance=instance,
        game=level.game.value,
        mode=mode_name,
        reach=reach.value,
        lb=bounds.lower,
        ub=bounds.upper,
        status=bounds.status.value,
        horizon_times=[round(x, 6) for x in bounds.horizon_times],
        seed=seed,
        backend=repr(backend) if backend is not None else "default",
        lurd=lurd,
    )
    return bounds, record


def run_bench(directory: Path, reaches: list[ReachKind],
              mode: Mode | str = "hybrid", limit: float = 60.0,
              jobs: int = 1, seed: int | None = None,
              backend=None) -> BenchReport:
    """Run every (instance, reach) pair; failures are recorded, not fatal."""
    levels = discover_levels(directory)
    report = BenchReport(limit=limit)
    tasks = [(path, game, reach)
             for path, game in levels for reach in reaches]

    def work(task):
        path, game, reach = task
        try:
            level = parse_level(path.read_text(), game)
        except Exception as exc:  # noqa: BLE001
            return BenchRun(path.stem, reach.value, False, 0.0, error=str(exc))
        return run_instance(level, path.stem, reach, mode, limit, seed, backend)

    if jobs <= 1:
        report.runs = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            report.runs = list(pool.map(work, tasks))
    return report
