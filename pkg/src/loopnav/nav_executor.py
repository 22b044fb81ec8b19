#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# nav_executor.py - Constraint-guided symbolic execution of chain program forms

# MIT License

# Copyright (c) [2026] [Mischa Schirmer]

# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.

# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""
nav_executor.py — Navigating loops towards the target
=====================================================
Symbolic execution over the chain program form. The state carries, next to
the symbolic store and the path condition, the current value of every chain
counter. Nothing forks inside a chain; the only choice points are loop
nodes, where choose_chain picks the subchain whose execution brings the
counters closer to a solution of the active constraint systems, or decides
to leave the loop.

    state  -- enter root --> nodes in order
              loop node  : DecisionPoint, choose_chain
                           subchain  -> enter it, run it, count it, come back
                           continue  -> assume the loop node's condition
              dead end   : backtrack to the latest DecisionPoint

Counter bookkeeping:

  entering chain d   zero every counter whose reset chain is d, then
                     instantiate S(d) with the current store; counters
                     that keep running across d are shifted by their
                     current value
  finishing d        increment every counter whose update chain is d

A run ends with FeasiblePath, Infeasible or Inconclusive. Budgets (states,
counter values, wall time) only ever produce Inconclusive.
"""

from __future__ import annotations

import logging
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .chain_form import ChainNode, ChainProgramForm, NodeKind
from .config import NavConfig
from .constraint_builder import ConstraintTable, eval_expr
from .counter_solver import IntervalSolution, improvement_direction, is_solution, solve_intervals
from .errors import BudgetExceeded, ExternalSolverError, UnsupportedLiteral
from .feasibility_solver import SAT, UNKNOWN, Literal, check_sat
from .sym_expr import Alpha, Constraint, ConstraintSystem, Counter, SymExpr, sym

logger = logging.getLogger(__name__)

CONTINUE = -1                   # decision: leave the loop past its loop node


# ---------------------------------------------------------------------------
# Statistics and outcomes
# ---------------------------------------------------------------------------

@dataclass
class NavStats:
    """
    Per-run tallies in the layout of the performance table.

    Attributes
    ----------
    chains_root, chains_all : int
        Root chains and all chains of the program form.
    elim : int
        Root chains eliminated before navigation.
    constraints : int
        Constraints in the systems of the root chains.
    sstat : int
        Symbolic states visited.
    csol_initial, csol_rest : int
        Counter solver calls on chain entry, and at loop node decisions.
    smt : int
        Path condition checks.
    pc_len : int
        Literals in the path condition of a feasible path.
    unknown : int
        Path condition checks that came back undecided.
    time_chains, time_constraints, time_navigation : float
        Wall time of the three phases in seconds.
    """

    chains_root:      int   = 0
    chains_all:       int   = 0
    elim:             int   = 0
    constraints:      int   = 0
    sstat:            int   = 0
    csol_initial:     int   = 0
    csol_rest:        int   = 0
    smt:              int   = 0
    pc_len:           int   = 0
    unknown:          int   = 0
    time_chains:      float = 0.0
    time_constraints: float = 0.0
    time_navigation:  float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FeasiblePath:
    pc:       Tuple[Literal, ...]
    witness:  Dict[str, int]
    root:     int
    counters: Dict[Counter, int]
    stats:    NavStats

    @property
    def verdict(self) -> str:
        return "feasible"


@dataclass(frozen=True)
class Infeasible:
    evidence: str               # 'eliminated-roots' or 'exhausted-search'
    stats:    NavStats

    @property
    def verdict(self) -> str:
        return "infeasible"


@dataclass(frozen=True)
class Inconclusive:
    reason: str
    stats:  NavStats

    @property
    def verdict(self) -> str:
        return "inconclusive"


Outcome = Union[FeasiblePath, Infeasible, Inconclusive]


# ---------------------------------------------------------------------------
# Search state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """An active chain: next node to run and its system as instantiated on entry."""

    chain:  int
    index:  int
    system: ConstraintSystem


@dataclass(frozen=True)
class ExecState:
    """
    Attributes
    ----------
    store : dict
        Variable -> value over input symbols.
    counters : dict
        Counter -> current value.
    pc : tuple of Literal
        Path condition in execution order; always satisfiable.
    witness : dict
        Model of pc.
    frames : tuple of Frame
        Active chains, root first.
    """

    store:    Mapping[str, SymExpr]
    counters: Mapping[Counter, int]
    pc:       Tuple[Literal, ...]  = ()
    witness:  Mapping[str, int]    = field(default_factory=dict)
    frames:   Tuple[Frame, ...]    = ()

    @property
    def position(self) -> Tuple[int, int]:
        return self.frames[-1].chain, self.frames[-1].index

    @property
    def chain_stack(self) -> Tuple[int, ...]:
        return tuple(f.chain for f in self.frames)

    def advanced(self, **changes) -> "ExecState":
        """Copy with the innermost frame moved to its next node."""
        top = self.frames[-1]
        frames = self.frames[:-1] + (replace(top, index=top.index + 1),)
        return replace(self, frames=frames, **changes)


@dataclass
class DecisionPoint:
    """
    Snapshot at a loop node with the options not taken yet.

    untried holds subchain ids; continue_open is the option of leaving the loop.
    """

    state:         ExecState
    untried:       Set[int]
    continue_open: bool = True

    @property
    def exhausted(self) -> bool:
        return not self.untried and not self.continue_open


# ---------------------------------------------------------------------------
# chooseChain
# ---------------------------------------------------------------------------

def choose_chain(c: int, D: Iterable[int], A: ConstraintSystem, w: Mapping[Counter, int],
                 intervals: Optional[IntervalSolution] = None,
                 subtree: Optional[Callable[[int], FrozenSet[int]]] = None,
                 reverse: bool = False) -> Optional[int]:
    """
    Next chain to run at a loop node of chain c.

    None when A has no solution, c when w already solves A or no chain of D
    moves w towards the solutions, otherwise a chain of D. Chains that can
    grow a counter win over chains that can reset one; ties go to the
    lowest id (highest with reverse).
    """
    intervals = solve_intervals(A) if intervals is None else intervals
    if intervals.unsat:
        return None
    if is_solution(w, A):
        return c
    direction = improvement_direction(w, A, sorted(D), subtree, intervals)
    for group in (direction.update, direction.reset):
        if group:
            return max(group) if reverse else min(group)
    return c


# ---------------------------------------------------------------------------
# Navigator
# ---------------------------------------------------------------------------

class Navigator:
    """
    One navigation run over a chain program form.

    Parameters
    ----------
    cpf : ChainProgramForm
    table : ConstraintTable
        Resolved systems; table.eliminated lists roots that are skipped.
    config : NavConfig
    stats : NavStats, optional
        Tallies are added to this record.
    """

    def __init__(self, cpf: ChainProgramForm, table: ConstraintTable,
                 config: Optional[NavConfig] = None, stats: Optional[NavStats] = None):
        self.cpf     = cpf
        self.table   = table
        self.config  = config or NavConfig()
        self.stats   = stats or NavStats()
        self.scalars = cpf.cfg.scalars
        self.arrays  = cpf.cfg.arrays
        self.reverse = self.config.seed_order == "reverse"

        found = set()
        for system in table.systems.values():
            found |= system.counters
        self.counters = tuple(sorted(found, key=lambda k: k.sort_key()))
        self.by_update: Dict[int, List[Counter]] = defaultdict(list)
        self.by_reset:  Dict[int, List[Counter]] = defaultdict(list)
        for k in self.counters:
            self.by_update[k.update].append(k)
            self.by_reset[k.reset].append(k)

        self.truncated = False
        self.pruned    = False
        self.deadline  = None

    # -- budgets ------------------------------------------------------------

    def _tick(self):
        self.stats.sstat += 1
        if self.stats.sstat > self.config.max_states:
            raise BudgetExceeded(f"more than {self.config.max_states} symbolic states")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded(f"navigation exceeded {self.config.timeout_s} s")

    # -- chains -------------------------------------------------------------

    def initial_state(self) -> ExecState:
        store = {}
        for name in self.scalars:
            var = self.cpf.cfg.variables[name]
            store[name] = sym(Alpha(name)) if var.kind == "input" else sym(0)
        return ExecState(store, {k: 0 for k in self.counters})

    def enter_chain(self, state: ExecState, d: int) -> Optional[ExecState]:
        """Reset and instantiate for chain d; None if its system has no solution."""
        counters = dict(state.counters)
        for k in self.by_reset[d]:
            counters[k] = 0
        bindings = {Alpha(v): state.store[v] for v in self.scalars}
        for k in self.table.system(d).counters:
            if k.reset != d and counters.get(k, 0):
                bindings[k] = SymExpr.of(k) - counters[k]
        system = self.table.system(d).substitute(bindings)

        self.stats.csol_initial += 1
        if solve_intervals(system).unsat:
            logger.debug(f"Entering c{d}: instantiated system has no solution")
            return None
        return replace(state, counters=counters, frames=state.frames + (Frame(d, 0, system),))

    def finish_subchain(self, state: ExecState) -> Optional[ExecState]:
        """Count a completed subchain and return to its loop node."""
        d = state.frames[-1].chain
        counters = dict(state.counters)
        for k in self.by_update[d]:
            counters[k] += 1
            if counters[k] > self.config.max_counter:
                logger.debug(f"{k} would exceed {self.config.max_counter}")
                self.truncated = True
                return None
        return replace(state, counters=counters, frames=state.frames[:-1])

    # -- nodes --------------------------------------------------------------

    def execute_node(self, state: ExecState, node: ChainNode) -> Optional[ExecState]:
        """
        Run an Assume or Transform node, or the exit condition of a Loop node.

        Returns the advanced state, or None when the path condition becomes
        unsatisfiable or undecided. Raises UnsupportedLiteral for an array
        read at a symbolic index.
        """
        if node.kind is NodeKind.TRANSFORM:
            store = dict(state.store)
            store[node.var] = eval_expr(node.expr, state.store, self.arrays, strict=True)
            return state.advanced(store=store)

        left = eval_expr(node.cond.left, state.store, self.arrays, strict=True)
        right = eval_expr(node.cond.right, state.store, self.arrays, strict=True)
        literal = Literal.build(left, node.cond.op, right)
        if literal.constant:
            return state.advanced() if literal.holds({}) else None

        pc = state.pc + (literal,)
        self.stats.smt += 1
        try:
            result = check_sat(pc, self.config.external_smt)
        except ExternalSolverError as e:
            logger.warning(f"External solver failed, treating the query as undecided: {e}")
            self.stats.unknown += 1
            return None
        if result.status == UNKNOWN:
            self.stats.unknown += 1
            return None
        if result.status != SAT:
            return None
        return state.advanced(pc=pc, witness=result.witness)

    # -- loop nodes ---------------------------------------------------------

    def active_system(self, state: ExecState) -> ConstraintSystem:
        """
        Systems of all active chains plus what the rest of the path cannot
        change: counters no remaining chain updates keep their value, and
        counters no remaining chain resets cannot decrease.
        """
        remaining = set()
        for frame in state.frames:
            for index, node in self.cpf.chain(frame.chain).loop_nodes():
                if index >= frame.index:
                    for sub in node.subchains:
                        remaining |= self.cpf.subtree(sub)

        constraints = []
        contradiction = False
        for frame in state.frames:
            constraints.extend(frame.system)
            contradiction = contradiction or frame.system.contradiction
        mentioned = set()
        for constraint in constraints:
            mentioned |= constraint.counters()
        for k in sorted(mentioned, key=lambda k: k.sort_key()):
            if k.update not in remaining:
                constraints.append(Constraint(sym(k), "==", state.counters[k]))
            elif k.reset not in remaining:
                constraints.append(Constraint(sym(k), ">=", state.counters[k]))
        return ConstraintSystem(state.frames[-1].chain, tuple(constraints), contradiction)

    def decide(self, dp: DecisionPoint, stack: List[DecisionPoint]) -> Optional[ExecState]:
        """Take the next option of a decision point; push it back if options remain."""
        state = dp.state
        c, index = state.position
        node = self.cpf.chain(c).nodes[index]
        system = self.active_system(state)
        intervals = solve_intervals(system)
        self.stats.csol_rest += 1

        choice = choose_chain(c, dp.untried, system, state.counters, intervals,
                              self.cpf.subtree, self.reverse)
        if choice is None:
            logger.debug(f"c{c}[{index}]: counter constraints have no solution")
            return None
        if choice == c:
            if dp.continue_open:
                dp.continue_open = False
                choice = CONTINUE
            else:
                choice = self._fallback(dp, intervals)
                if choice is None:
                    return None
        if choice != CONTINUE:
            dp.untried.discard(choice)
        if not dp.exhausted:
            stack.append(dp)

        logger.debug(f"c{c}[{index}] w={self._show(state.counters)}: "
                     f"{'continue' if choice == CONTINUE else f'run c{choice}'}")
        if choice == CONTINUE:
            return self.execute_node(state, node)
        return self.enter_chain(state, choice)

    def _fallback(self, dp: DecisionPoint, intervals: IntervalSolution) -> Optional[int]:
        """Untried subchain whose counters can still grow, once leaving has failed."""
        w = dp.state.counters
        for sub in sorted(dp.untried, reverse=self.reverse):
            bounded = [intervals[k] for k in self.by_update[sub]]
            if all(r.hi is None or w[k] + 1 <= r.hi for k, r in zip(self.by_update[sub], bounded)):
                return sub
        return None

    def backtrack(self, stack: List[DecisionPoint]) -> Optional[ExecState]:
        """Restore the latest decision point that still yields a live state."""
        while stack:
            dp = stack.pop()
            state = self._guarded(lambda: self.decide(dp, stack))
            if state is not None:
                return state
        return None

    # -- driver -------------------------------------------------------------

    def _guarded(self, action) -> Optional[ExecState]:
        try:
            return action()
        except UnsupportedLiteral as e:
            logger.debug(f"Pruned: {e}")
            self.pruned = True
            return None

    def step(self, state: ExecState, stack: List[DecisionPoint]) -> Union[ExecState, FeasiblePath, None]:
        self._tick()
        c, index = state.position
        chain = self.cpf.chain(c)
        if index == len(chain.nodes):
            if chain.is_root:
                return FeasiblePath(state.pc, dict(state.witness), c, dict(state.counters), self.stats)
            return self.finish_subchain(state)
        node = chain.nodes[index]
        if node.kind is NodeKind.LOOP:
            dp = DecisionPoint(state, set(node.subchains))
            return self._guarded(lambda: self.decide(dp, stack))
        return self._guarded(lambda: self.execute_node(state, node))

    def run(self) -> Outcome:
        eliminated = set(self.table.eliminated)
        roots = [r for r in self.cpf.roots if r not in eliminated]
        if self.reverse:
            roots.reverse()
        if not roots:
            logger.info("Every root chain was eliminated, the target is unreachable")
            return Infeasible("eliminated-roots", self.stats)

        self.deadline = time.monotonic() + self.config.timeout_s
        try:
            for root in roots:
                logger.debug(f"Navigating root chain c{root}")
                stack: List[DecisionPoint] = []
                state = self.enter_chain(self.initial_state(), root)
                while True:
                    if state is None:
                        state = self.backtrack(stack)
                        if state is None:
                            break
                    result = self.step(state, stack)
                    if isinstance(result, FeasiblePath):
                        self.stats.pc_len = len(result.pc)
                        logger.info(f"Feasible path through c{root}, {len(result.pc)} literal(s)")
                        return result
                    state = result
        except BudgetExceeded as e:
            logger.info(f"Giving up: {e}")
            return Inconclusive(str(e), self.stats)

        if self.truncated:
            return Inconclusive(f"counter limit {self.config.max_counter} reached", self.stats)
        if self.stats.unknown:
            return Inconclusive(f"{self.stats.unknown} path condition(s) left undecided", self.stats)
        if self.pruned:
            return Inconclusive("a literal outside the solver fragment cut the search", self.stats)
        logger.info("Search exhausted without reaching the target")
        return Infeasible("exhausted-search", self.stats)

    @staticmethod
    def _show(counters: Mapping[Counter, int]) -> str:
        return "(" + ",".join(str(v) for v in counters.values()) + ")"


def navigate(cpf: ChainProgramForm, table: ConstraintTable, config: Optional[NavConfig] = None,
             stats: Optional[NavStats] = None) -> Outcome:
    """Phase three: search the chain program form for a path to the target."""
    started = time.perf_counter()
    navigator = Navigator(cpf, table, config, stats)
    outcome = navigator.run()
    navigator.stats.time_navigation = time.perf_counter() - started
    return outcome
