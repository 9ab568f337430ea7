"""SAT backends: external DIMACS solver processes and a bundled CDCL solver.

The external backend hands a DIMACS file to a solver process configured by a
command template and parses competition-style output ("s SATISFIABLE" /
"s UNSATISFIABLE" status lines and "v " value lines). The bundled backend is
a watched-literal CDCL solver, slower but dependency-free.

Timeouts are results (UNKNOWN); process failures raise BackendError.
Every SAT model is re-checked against the clause list before being returned.
"""

from __future__ import annotations

import enum
import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from .cnf import Formula

SOLVER_CMD_ENV = "SNOWPLAN_SOLVER_CMD"

# Solvers known to speak competition output, probed on PATH in this order.
KNOWN_SOLVERS = ("varisat", "kissat", "cadical", "glucose")


class BackendError(Exception):
    """The solver backend misbehaved (crash, garbage output, bad template)."""


class Status(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass
class SolveOutcome:
    status: Status
    model: dict[int, bool] | None = None
    elapsed: float = 0.0


def check_model(formula: Formula, model: dict[int, bool]) -> bool:
    """True iff the (total) assignment satisfies every clause."""
    for clause in formula.clauses:
        if not any(model.get(abs(lit), False) == (lit > 0) for lit in clause):
            return False
    return True


def _verified(formula: Formula, assignment: dict[int, bool], elapsed: float) -> SolveOutcome:
    model = {v: assignment.get(v, False) for v in range(1, formula.num_vars + 1)}
    if not check_model(formula, model):
        raise BackendError("backend returned an assignment that violates the formula")
    return SolveOutcome(Status.SAT, model, elapsed)


class ExternalSolver:
    """One-shot solver over a DIMACS file via a configurable command template.

    The template must contain an "{input}" placeholder for the CNF file path.
    """

    def __init__(self, command_template: str):
        if "{input}" not in command_template:
            raise BackendError(f"solver command template lacks {{input}}: {command_template!r}")
        self.command_template = command_template

    def __repr__(self) -> str:
        return f"ExternalSolver({self.command_template!r})"

    def solve(self, formula: Formula, budget: float | None = None) -> SolveOutcome:
        start = time.monotonic()
        with tempfile.NamedTemporaryFile(
            "w", suffix=".cnf", prefix="snowplan_", delete=False
        ) as handle:
            handle.write(formula.to_dimacs())
            path = handle.name
        try:
            cmd = self.command_template.format(input=path)
            try:
                proc = subprocess.run(
                    cmd,
                    shell=True,
                    capture_output=True,
                    text=True,
                    timeout=budget,
                )
            except subprocess.TimeoutExpired:
                return SolveOutcome(Status.UNKNOWN, None, time.monotonic() - start)
            except OSError as exc:
                raise BackendError(f"failed to run solver: {exc}") from exc
            return self._parse(formula, proc, time.monotonic() - start)
        finally:
            os.unlink(path)

    def _parse(self, formula: Formula, proc, elapsed: float) -> SolveOutcome:
        status = None
        values: list[int] = []
        for line in proc.stdout.splitlines():
            if line.startswith("s "):
                token = line.split(None, 1)[1].strip()
                if token == "SATISFIABLE":
                    status = Status.SAT
                elif token == "UNSATISFIABLE":
                    status = Status.UNSAT
                elif token == "UNKNOWN":
                    status = Status.UNKNOWN
            elif line.startswith("v ") or line == "v":
                values.extend(int(tok) for tok in line[1:].split())
        if status is None:
            raise BackendError(
                f"no status line from solver (exit {proc.returncode}): "
                f"{proc.stderr.strip()[:500] or proc.stdout.strip()[:500]}"
            )
        if status is Status.SAT:
            assignment = {abs(v): v > 0 for v in values if v != 0}
            return _verified(formula, assignment, elapsed)
        return SolveOutcome(status, None, elapsed)


class InProcessSolver:
    """Bundled CDCL solver (watched literals, VSIDS, phase saving, restarts)."""

    def __repr__(self) -> str:
        return "InProcessSolver()"

    def solve(self, formula: Formula, budget: float | None = None) -> SolveOutcome:
        start = time.monotonic()
        deadline = None if budget is None else start + budget
        result = _CDCL(formula.num_vars, formula.clauses, deadline).run()
        elapsed = time.monotonic() - start
        if result is None:
            return SolveOutcome(Status.UNKNOWN, None, elapsed)
        if result is False:
            return SolveOutcome(Status.UNSAT, None, elapsed)
        return _verified(formula, result, elapsed)


class _CDCL:
    """Conflict-driven clause learning over int literals.

    run() returns a model dict, False for UNSAT, or None on budget exhaustion.
    """

    def __init__(self, num_vars: int, clauses: list[list[int]], deadline: float | None):
        self.num_vars = num_vars
        self.deadline = deadline
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign: dict[int, bool] = {}
        self.level: dict[int, int] = {}
        self.reason: dict[int, int | None] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.phase = [False] * (num_vars + 1)
        self.units: list[int] = []
        self.empty_clause = False
        for clause in clauses:
            self._add_clause(clause)

    def _add_clause(self, clause: list[int]) -> None:
        clause = list(dict.fromkeys(clause))
        if any(-lit in clause for lit in clause):
            return  # tautology
        if not clause:
            self.empty_clause = True
            return
        if len(clause) == 1:
            self.units.append(clause[0])
            return
        idx = len(self.clauses)
        self.clauses.append(clause)
        self.watches.setdefault(clause[0], []).append(idx)
        self.watches.setdefault(clause[1], []).append(idx)

    def _value(self, lit: int):
        val = self.assign.get(abs(lit))
        if val is None:
            return None
        return val if lit > 0 else not val

    def _enqueue(self, lit: int, reason: int | None) -> None:
        var = abs(lit)
        self.assign[var] = lit > 0
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)

    def _propagate(self) -> int | None:
        """Unit propagation; returns a conflicting clause index or None."""
        head = getattr(self, "_qhead", 0)
        while head < len(self.trail):
            lit = self.trail[head]
            head += 1
            falsified = -lit
            watch_list = self.watches.get(falsified, [])
            i = 0
            while i < len(watch_list):
                idx = watch_list[i]
                clause = self.clauses[idx]
                if clause[0] == falsified:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._value(first) is True:
                    i += 1
                    continue
                moved = False
                for j in range(2, len(clause)):
                    if self._value(clause[j]) is not False:
                        clause[1], clause[j] = clause[j], clause[1]
                        self.watches.setdefault(clause[1], []).append(idx)
                        watch_list[i] = watch_list[-1]
                        watch_list.pop()
                        moved = True
                        break
                if moved:
                    continue
                if self._value(first) is False:
                    self._qhead = head - 1
                    return idx
                self._enqueue(first, idx)
                i += 1
        self._qhead = head
        return None

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.num_vars + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, conflict_idx: int) -> tuple[list[int], int]:
        """First-UIP conflict analysis; returns (learnt clause, backjump level)."""
        learnt: list[int] = []
        seen = set()
        counter = 0
        lit = None
        clause = self.clauses[conflict_idx]
        trail_pos = len(self.trail) - 1
        cur_level = len(self.trail_lim)
        while True:
            for q in clause if lit is None else clause[1:]:
                var = abs(q)
                if var in seen or self.level[var] == 0:
                    continue
                seen.add(var)
                self._bump(var)
                if self.level[var] == cur_level:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[trail_pos]) not in seen:
                trail_pos -= 1
            lit = self.trail[trail_pos]
            trail_pos -= 1
            seen.discard(abs(lit))
            counter -= 1
            if counter == 0:
                break
            reason = self.reason[abs(lit)]
            clause = self.clauses[reason]
            if clause[0] != lit:
                clause = [lit] + [x for x in clause if x != lit]
        learnt.insert(0, -lit)
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.level[abs(q)] for q in learnt[1:])
        return learnt, back

    def _backtrack(self, target_level: int) -> None:
        while len(self.trail_lim) > target_level:
            limit = self.trail_lim.pop()
            while len(self.trail) > limit:
                lit = self.trail.pop()
                var = abs(lit)
                self.phase[var] = self.assign[var]
                del self.assign[var]
                del self.level[var]
                del self.reason[var]
        self._qhead = len(self.trail)

    def _decide(self) -> int | None:
        best, best_act = None, -1.0
        for var in range(1, self.num_vars + 1):
            if var not in self.assign and self.activity[var] > best_act:
                best, best_act = var, self.activity[var]
        if best is None:
            return None
        return best if self.phase[best] else -best

    def run(self):
        if self.empty_clause:
            return False
        for lit in self.units:
            val = self._value(lit)
            if val is False:
                return False
            if val is None:
                self._enqueue(lit, None)
        conflicts = 0
        restart_limit = 100
        luby_idx = 1
        while True:
            conflict = self._propagate()
            if conflict is not None:
                if not self.trail_lim:
                    return False
                conflicts += 1
                if conflicts % 256 == 0 and self.deadline is not None:
                    if time.monotonic() > self.deadline:
                        return None
                learnt, back = self._analyze(conflict)
                self._backtrack(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    idx = len(self.clauses)
                    # second literal must be from the backjump level
                    for j in range(2, len(learnt)):
                        if self.level[abs(learnt[j])] > self.level[abs(learnt[1])]:
                            learnt[1], learnt[j] = learnt[j], learnt[1]
                    self.clauses.append(learnt)
                    self.watches.setdefault(learnt[0], []).append(idx)
                    self.watches.setdefault(learnt[1], []).append(idx)
                    self._enqueue(learnt[0], idx)
                self.var_inc /= 0.95
                if conflicts >= restart_limit:
                    conflicts = 0
                    luby_idx += 1
                    restart_limit = 100 * _luby(luby_idx)
                    self._backtrack(0)
            else:
                decision = self._decide()
                if decision is None:
                    return dict(self.assign)
                self.trail_lim.append(len(self.trail))
                self._enqueue(decision, None)


def _luby(i: int) -> int:
    k = 1
    while (1 << (k + 1)) - 1 <= i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1 + 1
        k = 1
        while (1 << (k + 1)) - 1 <= i:
            k += 1
    return 1 << (k - 1)


def default_backend():
    """Backend resolution: SNOWPLAN_SOLVER_CMD env, then PATH probe, then bundled."""
    template = os.environ.get(SOLVER_CMD_ENV)
    if template:
        return ExternalSolver(template)
    for name in KNOWN_SOLVERS:
        if shutil.which(name):
            return ExternalSolver(f"{name} {{input}}")
    return InProcessSolver()


def solve(formula: Formula, budget: float | None = None, backend=None) -> SolveOutcome:
    if backend is None:
        backend = default_backend()
    return backend.solve(formula, budget)
