"""Bounded-horizon planning encoder: compile a level and horizon T into CNF.

Four modes are supported. FULL is the plain sequential encoding with one
move/roll/push/pop per step. COLLAPSED drops walking: each step is one object
action whose pushing cell must be reachable from the agent's position, with
reachability encoded per timestep. PARALLEL allows several non-interfering
object actions per step under forall-step semantics (any ordering of a step
serializes), plus an exclusive jump action. DESCEND is COLLAPSED with a noop
action so horizons below a known upper bound can be probed.

Registry name grammar (consumed by the plan decoder):
  state      snow[r,c,t]  bs[r,c,t]  bm[r,c,t]  bl[r,c,t]
             agent[r,c,t]  box[r,c,t]  free[r,c,t]
  actions    dir[D,t] and move/roll/push/pop[r,c,D,t]   (FULL; r,c = agent cell)
             roll/push/pop[r,c,D,t]                     (others; r,c = ball cell)
             jump[r,c,t]  noop[t]
where D is one of N,S,E,W. Reachability fragments use the graph-module names
suffixed with ",t" (and ",jt" for the jump fragment, ",ck,t" for per-ball
path copies).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations

from . import levels as lv
from . import reach
from .cnf import Formula
from .game import Direction
from .levels import Cell, GameTag, Level


class Mode(enum.Enum):
    FULL = "full"
    COLLAPSED = "collapsed"
    PARALLEL = "parallel"
    DESCEND = "descend"


class ReachKind(enum.Enum):
    PATH = "path"
    DAG = "dag"
    TREE = "tree"


OBJECT_ACTION_NAMES = ("roll", "push", "pop")


@dataclass(frozen=True)
class EncodingConfig:
    mode: Mode
    horizon: int
    reach: ReachKind = ReachKind.PATH
    invariants_on: bool = True
    assert_goal: bool = True
    action_budget: int | None = None

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be >= 0")


@dataclass
class Encoding:
    """A compiled formula together with everything needed to decode models."""

    formula: Formula
    level: Level
    config: EncodingConfig
    graph: reach.Graph

    def var(self, name: str) -> int:
        return self.formula.var(name)


def encode(level: Level, config: EncodingConfig) -> Encoding:
    return _Encoder(level, config).build()


def encode_full(level: Level, T: int, *, assert_goal: bool = True) -> Encoding:
    return encode(level, EncodingConfig(Mode.FULL, T, assert_goal=assert_goal))


def encode_collapsed(level: Level, T: int, reach_kind: ReachKind = ReachKind.PATH,
                     *, invariants_on: bool = True,
                     assert_goal: bool = True) -> Encoding:
    return encode(level, EncodingConfig(Mode.COLLAPSED, T, reach_kind,
                                        invariants_on, assert_goal))


def encode_parallel(level: Level, T: int, reach_kind: ReachKind = ReachKind.TREE,
                    *, invariants_on: bool = True,
                    assert_goal: bool = True) -> Encoding:
    return encode(level, EncodingConfig(Mode.PARALLEL, T, reach_kind,
                                        invariants_on, assert_goal))


def encode_descend(level: Level, T: int, reach_kind: ReachKind = ReachKind.PATH,
                   action_budget: int | None = None, *,
                   invariants_on: bool = True) -> Encoding:
    return encode(level, EncodingConfig(Mode.DESCEND, T, reach_kind,
                                        invariants_on, True, action_budget))


class _Encoder:
    def __init__(self, level: Level, config: EncodingConfig):
        self.level = level
        self.cfg = config
        self.T = config.horizon
        self.f = Formula()
        self.graph = lv.grid_graph(level)
        self.vertex = {cell: i for i, cell in enumerate(self.graph.cell_of)}
        self.cells = sorted(level.floor)
        self.snowman = level.game is GameTag.SNOWMAN

        # state variables, keyed (cell, t)
        self.snow: dict[tuple[Cell, int], int] = {}
        self.bs: dict[tuple[Cell, int], int] = {}
        self.bm: dict[tuple[Cell, int], int] = {}
        self.bl: dict[tuple[Cell, int], int] = {}
        self.box: dict[tuple[Cell, int], int] = {}
        self.agent: dict[tuple[Cell, int], int] = {}
        self.free: dict[tuple[Cell, int], int] = {}

        # frame-axiom licensors, keyed (cell, t)
        self.ball_arrive: dict[tuple[Cell, int], list[int]] = {}
        self.ball_leave: dict[tuple[Cell, int], list[int]] = {}
        self.snow_clear: dict[tuple[Cell, int], list[int]] = {}
        self.agent_in: dict[tuple[Cell, int], list[int]] = {}
        self.agent_out: dict[tuple[Cell, int], list[int]] = {}

    # -- shared helpers -------------------------------------------------

    def _flags(self, cell: Cell, t: int) -> list[int]:
        if self.snowman:
            return [self.bs[cell, t], self.bm[cell, t], self.bl[cell, t]]
        return [self.box[cell, t]]

    def _lic(self, table, cell: Cell, t: int, var: int) -> None:
        table.setdefault((cell, t), []).append(var)

    def _make_state_vars(self) -> None:
        f = self.f
        for t in range(self.T + 1):
            for (r, c) in self.cells:
                cell = (r, c)
                self.agent[cell, t] = f.new_var(f"agent[{r},{c},{t}]")
                if self.snowman:
                    self.snow[cell, t] = f.new_var(f"snow[{r},{c},{t}]")
                    self.bs[cell, t] = f.new_var(f"bs[{r},{c},{t}]")
                    self.bm[cell, t] = f.new_var(f"bm[{r},{c},{t}]")
                    self.bl[cell, t] = f.new_var(f"bl[{r},{c},{t}]")
                else:
                    self.box[cell, t] = f.new_var(f"box[{r},{c},{t}]")

    def _make_free_vars(self) -> None:
        """free[v,t] is true iff no ball/box occupies v at time t."""
        f = self.f
        for t in range(self.T + 1):
            for (r, c) in self.cells:
                cell = (r, c)
                flags = self._flags(cell, t)
                fv = f.new_var(f"free[{r},{c},{t}]")
                self.free[cell, t] = fv
                for flag in flags:
                    f.add_clause([-fv, -flag])
                f.add_clause([fv] + flags)

    def _initial_state(self) -> None:
        f = self.f
        stacks = self.level.stack_map()
        for cell in self.cells:
            f.add_clause([self.agent[cell, 0] if cell == self.level.agent
                          else -self.agent[cell, 0]])
            if self.snowman:
                f.add_clause([self.snow[cell, 0] if cell in self.level.snow
                              else -self.snow[cell, 0]])
                sizes = set(stacks.get(cell, ()))
                for var, size in ((self.bs[cell, 0], lv.BallSize.SMALL),
                                  (self.bm[cell, 0], lv.BallSize.MEDIUM),
                                  (self.bl[cell, 0], lv.BallSize.LARGE)):
                    f.add_clause([var if size in sizes else -var])
            else:
                f.add_clause([self.box[cell, 0] if cell in self.level.boxes
                              else -self.box[cell, 0]])

    def _goal(self) -> None:
        f = self.f
        T = self.T
        if self.snowman:
            # no partial snowman anywhere: the three size flags agree per cell
            for cell in self.cells:
                s, m, l = self.bs[cell, T], self.bm[cell, T], self.bl[cell, T]
                f.add_clause([-s, m])
                f.add_clause([-m, s])
                f.add_clause([-m, l])
                f.add_clause([-l, m])
        else:
            for cell in self.cells:
                if cell not in self.level.goals:
                    f.add_clause([-self.box[cell, T]])

    def _invariants(self) -> None:
        """Snowball counting: larges never exceed, smalls never undercut,
        the snowman count."""
        count = self.level.snowman_count
        for t in range(self.T + 1):
            large = [self.bl[cell, t] for cell in self.cells]
            small = [self.bs[cell, t] for cell in self.cells]
            self.f.at_most_k(large, count)
            self.f.at_least_k(small, count)

    # -- object-action effect tables ------------------------------------

    def _roll_clauses(self, a: int, l: Cell, b: Cell, t: int) -> None:
        """Ball at l advances to the empty cell b, growing on snow."""
        f = self.f
        bs, bm, bl, sn = self.bs, self.bm, self.bl, self.snow
        f.add_clause([-a] + self._flags(l, t))
        for x, y in combinations(self._flags(l, t), 2):
            f.add_clause([-a, -x, -y])
        for flag in self._flags(b, t):
            f.add_clause([-a, -flag])
        for flag in self._flags(l, t + 1):
            f.add_clause([-a, -flag])
        if not self.snowman:
            f.add_clause([-a, self.box[b, t + 1]])
            self._record_move_licensors(a, l, b, t)
            return
        f.add_clause([-a, -sn[b, t + 1]])
        for pre, out in (
            ([bs[l, t], sn[b, t]], bm),
            ([bs[l, t], -sn[b, t]], bs),
            ([bm[l, t], sn[b, t]], bl),
            ([bm[l, t], -sn[b, t]], bm),
            ([bl[l, t]], bl),
        ):
            head = [-a] + [-p for p in pre]
            f.add_clause(head + [out[b, t + 1]])
            for other in (bs, bm, bl):
                if other is not out:
                    f.add_clause(head + [-other[b, t + 1]])
        self._record_move_licensors(a, l, b, t)

    def _push_clauses(self, a: int, l: Cell, b: Cell, t: int) -> None:
        """Single ball at l stacks onto the strictly-bigger top at b."""
        f = self.f
        bs, bm, bl = self.bs, self.bm, self.bl
        f.add_clause([-a, bs[l, t], bm[l, t]])       # pushed ball is not large
        f.add_clause([-a, -bl[l, t]])
        f.add_clause([-a, -bs[l, t], -bm[l, t]])      # exactly one ball at l
        for flag in self._flags(l, t + 1):
            f.add_clause([-a, -flag])
        # receiving stack's top must be strictly bigger than the pushed ball
        f.add_clause([-a, -bs[b, t]])
        f.add_clause([-a, -bs[l, t], bm[b, t], bl[b, t]])
        f.add_clause([-a, -bm[l, t], -bm[b, t]])
        f.add_clause([-a, -bm[l, t], bl[b, t]])
        # the pushed flag appears at b; everything else at b is unchanged
        f.add_clause([-a, -bs[l, t], bs[b, t + 1]])
        f.add_clause([-a, -bm[l, t], bm[b, t + 1]])
        f.add_clause([-a, -bm[l, t], -bs[b, t + 1]])
        f.add_clause([-a, -bs[l, t], -bm[b, t], bm[b, t + 1]])
        f.add_clause([-a, -bs[l, t], bm[b, t], -bm[b, t + 1]])
        f.add_clause([-a, -bl[b, t], bl[b, t + 1]])
        f.add_clause([-a, bl[b, t], -bl[b, t + 1]])
        self._lic(self.ball_leave, l, t, a)
        self._lic(self.ball_arrive, b, t, a)

    def _pop_clauses(self, a: int, l: Cell, b: Cell, t: int) -> None:
        """Top of a stack of >= 2 at l advances to the empty cell b."""
        f = self.f
        bs, bm, bl, sn = self.bs, self.bm, self.bl, self.snow
        # at least two balls at l
        for x, y in combinations(self._flags(l, t), 2):
            f.add_clause([-a, x, y])
        for flag in self._flags(b, t):
            f.add_clause([-a, -flag])
        f.add_clause([-a, -sn[b, t + 1]])
        # stacks list larger sizes below, so the top is the smallest flag
        # present; a stack of two or more never has a large top
        f.add_clause([-a, -bs[l, t], -bs[l, t + 1]])
        f.add_clause([-a, bs[l, t], -bm[l, t + 1]])
        f.add_clause([-a, -bs[l, t], -bm[l, t], bm[l, t + 1]])
        f.add_clause([-a, -bl[l, t], bl[l, t + 1]])
        for pre, out in (
            ([bs[l, t], sn[b, t]], bm),
            ([bs[l, t], -sn[b, t]], bs),
            ([-bs[l, t], sn[b, t]], bl),
            ([-bs[l, t], -sn[b, t]], bm),
        ):
            head = [-a] + [-p for p in pre]
            f.add_clause(head + [out[b, t + 1]])
            for other in (bs, bm, bl):
                if other is not out:
                    f.add_clause(head + [-other[b, t + 1]])
        self._lic(self.ball_leave, l, t, a)
        self._lic(self.ball_arrive, b, t, a)
        self._lic(self.snow_clear, b, t, a)

    def _record_move_licensors(self, a: int, l: Cell, b: Cell, t: int) -> None:
        self._lic(self.ball_leave, l, t, a)
        self._lic(self.ball_arrive, b, t, a)
        if self.snowman:
            self._lic(self.snow_clear, b, t, a)

    # -- frame axioms ---------------------------------------------------

    def _frame_axioms(self) -> None:
        """A state flip between t and t+1 needs a licensing action at t."""
        f = self.f
        for t in range(self.T):
            for cell in self.cells:
                arrive = self.ball_arrive.get((cell, t), [])
                leave = self.ball_leave.get((cell, t), [])
                if self.snowman:
                    sn = self.snow
                    f.add_clause([sn[cell, t], -sn[cell, t + 1]])
                    f.add_clause([-sn[cell, t], sn[cell, t + 1]]
                                 + self.snow_clear.get((cell, t), []))
                for now, nxt in zip(self._flags(cell, t),
                                    self._flags(cell, t + 1)):
                    f.add_clause([now, -nxt] + arrive)
                    f.add_clause([-now, nxt] + leave)

    def _agent_frame_axioms(self) -> None:
        f = self.f
        for t in range(self.T):
            for cell in self.cells:
                f.add_clause([self.agent[cell, t], -self.agent[cell, t + 1]]
                             + self.agent_in.get((cell, t), []))
                f.add_clause([-self.agent[cell, t], self.agent[cell, t + 1]]
                             + self.agent_out.get((cell, t), []))

    # -- FULL mode ------------------------------------------------------

    def _dest(self, cell: Cell, d: Direction) -> Cell | None:
        nxt = d.apply(cell)
        return None if self.level.is_wall(nxt) else nxt

    def _build_full(self) -> None:
        f = self.f
        for t in range(self.T):
            dirs = {d: f.new_var(f"dir[{d.name},{t}]") for d in Direction}
            f.exactly_one(list(dirs.values()))
            for cell in self.cells:
                r, c = cell
                for d in Direction:
                    m = self._dest(cell, d)
                    if m is None:
                        # wall straight ahead: this direction is unavailable
                        f.add_clause([-self.agent[cell, t], -dirs[d]])
                        continue
                    cases = []
                    mo = f.new_var(f"move[{r},{c},{d.name},{t}]")
                    cases.append(mo)
                    f.add_clause([-mo, self.agent[cell, t]])
                    f.add_clause([-mo, dirs[d]])
                    f.add_clause([-mo, -self.agent[cell, t + 1]])
                    f.add_clause([-mo, self.agent[m, t + 1]])
                    for flag in self._flags(m, t):
                        f.add_clause([-mo, -flag])
                    self._lic(self.agent_out, cell, t, mo)
                    self._lic(self.agent_in, m, t, mo)
                    b = self._dest(m, d)
                    if b is not None:
                        kinds = OBJECT_ACTION_NAMES if self.snowman else ("roll",)
                        for kind in kinds:
                            a = f.new_var(f"{kind}[{r},{c},{d.name},{t}]")
                            cases.append(a)
                            f.add_clause([-a, self.agent[cell, t]])
                            f.add_clause([-a, dirs[d]])
                            if kind == "pop":
                                self._pop_clauses(a, m, b, t)
                                f.add_clause([-a, self.agent[cell, t + 1]])
                            else:
                                if kind == "roll":
                                    self._roll_clauses(a, m, b, t)
                                else:
                                    self._push_clauses(a, m, b, t)
                                f.add_clause([-a, -self.agent[cell, t + 1]])
                                f.add_clause([-a, self.agent[m, t + 1]])
                                self._lic(self.agent_out, cell, t, a)
                                self._lic(self.agent_in, m, t, a)
                    # acting here in this direction requires one of the cases
                    f.add_clause([-self.agent[cell, t], -dirs[d]] + cases)
        self._frame_axioms()
        self._agent_frame_axioms()

    # -- collapsed-family modes -----------------------------------------

    def _object_actions(self, t: int) -> list[tuple[str, Cell, Direction, int]]:
        """Create this step's object-action variables and their clauses.

        Actions are named by the ball cell l; the agent acts from the pushing
        cell p = l - d and the ball heads to b = l + d (all three on floor).
        """
        f = self.f
        out = []
        kinds = OBJECT_ACTION_NAMES if self.snowman else ("roll",)
        for l in self.cells:
            r, c = l
            for d in Direction:
                b = self._dest(l, d)
                dr, dc = d.value
                p = (r - dr, c - dc)
                if b is None or self.level.is_wall(p):
                    continue
                for kind in kinds:
                    a = f.new_var(f"{kind}[{r},{c},{d.name},{t}]")
                    if kind == "roll":
                        self._roll_clauses(a, l, b, t)
                    elif kind == "push":
                        self._push_clauses(a, l, b, t)
                    else:
                        self._pop_clauses(a, l, b, t)
                    out.append((kind, l, d, a))
        return out

    def _agent_effects_sequential(self, actions, t: int) -> None:
        """COLLAPSED/DESCEND: the agent's next position is determined."""
        for kind, l, d, a in actions:
            if kind == "pop":
                dr, dc = d.value
                p = (l[0] - dr, l[1] - dc)
                self.f.add_clause([-a, self.agent[p, t + 1]])
            else:
                self.f.add_clause([-a, self.agent[l, t + 1]])

    def _reach_source(self, t: int) -> dict[int, int]:
        return {self.vertex[cell]: self.agent[cell, t] for cell in self.cells}

    def _pushing_vertex(self, l: Cell, d: Direction) -> int:
        dr, dc = d.value
        return self.vertex[(l[0] - dr, l[1] - dc)]

    def _attach_reach(self, actions, t: int, gate: dict[int, int]) -> None:
        """Require each action's pushing cell reachable from the agent."""
        f = self.f
        source = self._reach_source(t)
        if self.cfg.reach is ReachKind.DAG:
            frag = reach.encode_dag(f, self.graph, source, gate, tag=f",{t}")
        elif self.cfg.reach is ReachKind.TREE:
            frag = reach.encode_spanning_tree(f, self.graph, source, gate,
                                              tag=f",{t}")
        else:
            self._attach_reach_path(actions, t, gate, source)
            return
        for kind, l, d, a in actions:
            f.add_clause([-a, frag.reach[self._pushing_vertex(l, d)]])

    def _attach_reach_path(self, actions, t: int, gate: dict[int, int],
                           source: dict[int, int]) -> None:
        """Path encoding needs explicit targets: aim one copy per ball at
        each acting step's pushing cell. Sequential modes use one copy;
        PARALLEL replicates per ball. A copy with no target is released
        entirely through its selector literal (noop steps have no target).
        """
        f = self.f
        if self.cfg.mode is Mode.PARALLEL:
            balls = sum(len(s) for _, s in self.level.stacks)
            copies = max(1, balls or len(self.level.boxes))
        else:
            copies = 1
        n = self.graph.num_vertices
        by_copy = []
        for k in range(copies):
            tgt = {v: f.new_var(f"tgt[{v},c{k},{t}]") for v in range(n)}
            for x, y in combinations(tgt.values(), 2):
                f.add_clause([-x, -y])
            sel = f.new_var(f"sel[c{k},{t}]")
            for v in tgt.values():
                f.add_clause([-v, sel])
            f.add_clause([-sel] + list(tgt.values()))
            src = {}
            for v, ind in source.items():
                lit = f.new_var(f"src[{v},c{k},{t}]")
                f.add_clause([-lit, ind])
                f.add_clause([-lit, sel])
                f.add_clause([-ind, -sel, lit])
                src[v] = lit
            reach.encode_path(f, self.graph, src, tgt, gate, tag=f",c{k},{t}")
            by_copy.append(tgt)
        for kind, l, d, a in actions:
            p = self._pushing_vertex(l, d)
            f.add_clause([-a] + [tgt[p] for tgt in by_copy])

    def _build_collapsed(self, with_noop: bool) -> None:
        f = self.f
        for t in range(self.T + 1):
            f.exactly_one([self.agent[cell, t] for cell in self.cells])
        noops = []
        for t in range(self.T):
            actions = self._object_actions(t)
            avars = [a for _, _, _, a in actions]
            if with_noop:
                noop = f.new_var(f"noop[{t}]")
                noops.append(noop)
                for cell in self.cells:
                    f.add_clause([-noop, -self.agent[cell, t],
                                  self.agent[cell, t + 1]])
                f.exactly_one(avars + [noop])
            else:
                f.exactly_one(avars)
            self._agent_effects_sequential(actions, t)
            gate = {self.vertex[cell]: self.free[cell, t] for cell in self.cells}
            self._attach_reach(actions, t, gate)
        self._frame_axioms()
        # once idle, stay idle: pushes all noops to the tail of the plan
        for a, b in zip(noops, noops[1:]):
            f.add_clause([-a, b])
        if with_noop and self.cfg.action_budget is not None:
            f.at_most_k([-n for n in noops], self.cfg.action_budget)

    def _build_parallel(self) -> None:
        f = self.f
        for t in range(self.T + 1):
            f.exactly_one([self.agent[cell, t] for cell in self.cells])
        for t in range(self.T):
            actions = self._object_actions(t)
            avars = [a for _, _, _, a in actions]
            # direct interference: the balls' source/destination cells of two
            # simultaneous actions must not intersect
            spans = []
            for kind, l, d, a in actions:
                spans.append((a, {l, d.apply(l)}))
            for (a1, s1), (a2, s2) in combinations(spans, 2):
                if s1 & s2:
                    f.add_clause([-a1, -a2])
            # exclusive jump action under the plain time-t gate
            jumps = {cell: f.new_var(f"jump[{cell[0]},{cell[1]},{t}]")
                     for cell in self.cells}
            for x, y in combinations(jumps.values(), 2):
                f.add_clause([-x, -y])
            jumping = f.new_var(f"jumping[{t}]")
            for j in jumps.values():
                f.add_clause([-j, jumping])
            f.add_clause([-jumping] + list(jumps.values()))
            for a in avars:
                f.add_clause([-jumping, -a])
            f.add_clause(avars + list(jumps.values()))  # no idle steps
            # agent moves only by jumping
            for cell in self.cells:
                f.add_clause([-jumps[cell], self.agent[cell, t + 1]])
                f.add_clause([-self.agent[cell, t], jumping,
                              self.agent[cell, t + 1]])
            # object actions see cells occupied now or next as obstacles
            gate = {}
            for cell in self.cells:
                g = f.new_var(f"gate[{cell[0]},{cell[1]},{t}]")
                f.add_clause([-g, self.free[cell, t]])
                f.add_clause([-g, self.free[cell, t + 1]])
                f.add_clause([g, -self.free[cell, t], -self.free[cell, t + 1]])
                gate[self.vertex[cell]] = g
            self._attach_reach(actions, t, gate)
            # the jump destination is reachable under the time-t gate
            jgate = {self.vertex[cell]: self.free[cell, t]
                     for cell in self.cells}
            source = self._reach_source(t)
            jtgt = {self.vertex[cell]: j for cell, j in jumps.items()}
            if self.cfg.reach is ReachKind.PATH:
                # non-jump steps have no target; release the path through
                # the jumping indicator
                jsrc = {}
                for v, ind in source.items():
                    lit = f.new_var(f"jsrc[{v},{t}]")
                    f.add_clause([-lit, ind])
                    f.add_clause([-lit, jumping])
                    f.add_clause([-ind, -jumping, lit])
                    jsrc[v] = lit
                reach.encode_path(f, self.graph, jsrc, jtgt, jgate,
                                  tag=f",j{t}")
            elif self.cfg.reach is ReachKind.TREE:
                frag = reach.encode_spanning_tree(f, self.graph, source, jgate,
                                                  tag=f",j{t}")
                for v, j in jtgt.items():
                    f.add_clause([-j, frag.reach[v]])
            else:
                frag = reach.encode_dag(f, self.graph, source, jgate,
                                        tag=f",j{t}")
                for v, j in jtgt.items():
                    f.add_clause([-j, frag.reach[v]])
        self._frame_axioms()

    # -- driver ---------------------------------------------------------

    def build(self) -> Encoding:
        self._make_state_vars()
        if self.cfg.mode is not Mode.FULL:
            self._make_free_vars()
        self._initial_state()
        if self.cfg.mode is Mode.FULL:
            self._build_full()
        elif self.cfg.mode is Mode.COLLAPSED:
            self._build_collapsed(with_noop=False)
        elif self.cfg.mode is Mode.DESCEND:
            self._build_collapsed(with_noop=True)
        else:
            self._build_parallel()
        if self.snowman and self.cfg.invariants_on and self.cfg.mode is not Mode.FULL:
            self._invariants()
        if self.cfg.assert_goal:
            self._goal()
        return Encoding(self.f, self.level, self.cfg, self.graph)
