#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# constraint_builder.py - Counter constraint systems for every chain

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
constraint_builder.py — Building and pruning constraint systems
===============================================================
Each chain is executed symbolically once, starting from a store that maps
every variable v to its entry value a_v. At a loop node the subchains are
processed first; their summaries (variables as functions of their own
counters) are merged and instantiated with the current store. Assertions
that end up mentioning a counter become constraints of the chain.

At the end of a subchain every recurrent variable is expressed through a
temporary counter k_c^v. The temporary is resolved to the first enclosing
chain in which v no longer depends on its entry value, or to the root.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Collection, Dict, FrozenSet, List, Mapping, Optional, Tuple

from .chain_form import ChainProgramForm, NodeKind
from .counter_solver import solve_intervals
from .errors import AmbiguousReset, UnsupportedLiteral
from .ir_frontend import ArrayRead, Expr, Neg, Num, Var, format_expr
from .sym_expr import (
    NEGATED, OPS, STAR, Alpha, Constraint, ConstraintSystem, Counter, SymExpr,
    merge_values, render_function, solve_recurrence, substitute, sym,
)

logger = logging.getLogger(__name__)


def element(array: str, index: int) -> Alpha:
    """Input symbol of one array element."""
    return Alpha(f"{array}[{index}]")


def eval_expr(expr: Expr, store: Mapping[str, SymExpr], arrays: Mapping[str, int],
              strict: bool = False) -> SymExpr:
    """
    Symbolic value of an expression. An array read with a non-constant index
    is STAR, or raises UnsupportedLiteral when strict; a constant index out
    of bounds reads 0.
    """
    if isinstance(expr, Num):
        return sym(expr.value)
    if isinstance(expr, Var):
        return store[expr.name]
    if isinstance(expr, ArrayRead):
        index = eval_expr(expr.index, store, arrays, strict)
        if not index.is_const:
            if strict:
                raise UnsupportedLiteral(
                    f"{expr.array}[{format_expr(expr.index)}] has the symbolic index {index}")
            return STAR
        if not 0 <= index.const < arrays[expr.array]:
            return sym(0)
        return sym(element(expr.array, index.const))
    if isinstance(expr, Neg):
        return -eval_expr(expr.operand, store, arrays, strict)
    left = eval_expr(expr.left, store, arrays, strict)
    right = eval_expr(expr.right, store, arrays, strict)
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    return left * right


@dataclass(frozen=True)
class ChainSummary:
    """
    Attributes
    ----------
    chain : int
    values : dict
        Variable -> value at the end of the chain; for a subchain, the value
        after k executions as a function of its counter.
    reset_set : frozenset of str
        Variables for which the chain is the reset chain.
    loops : tuple of (node index, dict)
        Merged per-loop-node functions, before instantiation.
    """

    chain:     int
    values:    Dict[str, SymExpr]
    reset_set: FrozenSet[str]                           = frozenset()
    loops:     Tuple[Tuple[int, Dict[str, SymExpr]], ...] = ()

    def substitute(self, bindings) -> "ChainSummary":
        values = {v: substitute(e, bindings) for v, e in self.values.items()}
        loops = tuple((i, {v: substitute(e, bindings) for v, e in f.items()}) for i, f in self.loops)
        return ChainSummary(self.chain, values, self.reset_set, loops)

    def render(self) -> List[str]:
        lines = []
        for index, functions in self.loops:
            for var, value in functions.items():
                if value != sym(Alpha(var)):
                    lines.append(f"  node {index}: {render_function(var, value)}")
        return lines


@dataclass
class ConstraintTable:
    """
    Phase-2 result for a whole chain program form.

    claims records (temporary counter, chain) pairs until
    resolve_temporary_counters turns them into reset chains.
    """

    systems:   Dict[int, ConstraintSystem]
    summaries: Dict[int, ChainSummary]
    claims:    Tuple[Tuple[Counter, int], ...] = ()
    resolved:  bool                            = False
    eliminated: Tuple[int, ...]                 = ()

    def system(self, cid: int) -> ConstraintSystem:
        return self.systems.get(cid, ConstraintSystem(cid))

    def constraint_count(self, roots: Collection[int]) -> int:
        return sum(len(self.system(r)) for r in roots)

    def render(self) -> str:
        blocks = []
        for cid in sorted(self.systems):
            system, summary = self.systems[cid], self.summaries[cid]
            extra = summary.render()
            if not len(system) and not system.contradiction and not extra:
                continue
            block = [system.render()] if (len(system) or system.contradiction) else [f"S(c{cid}): empty"]
            if extra:
                block.append(f"summary c{cid}:")
                block.extend(extra)
            blocks.append("\n".join(block))
        return "\n\n".join(blocks)

    def to_dict(self) -> dict:
        return {
            "eliminated": list(self.eliminated),
            "systems": [self.systems[c].to_dict() for c in sorted(self.systems)],
            "summaries": [
                {"chain": c,
                 "reset_set": sorted(self.summaries[c].reset_set),
                 "functions": [line.strip() for line in self.summaries[c].render()]}
                for c in sorted(self.summaries)
            ],
        }


# ---------------------------------------------------------------------------
# Loop exits
# ---------------------------------------------------------------------------

def loop_exit_constraints(psi: Constraint, loop_chains: Collection[int], exits_loop: bool = True,
                          nested: Collection[int] = ()) -> List[Constraint]:
    """
    psi plus, where it is safe, the condition of the previous iteration.

    `loop_chains` are the update chains of the loop's own counters. The
    previous-iteration constraint needs psi to contain every one of them
    exactly once with coefficient 1, no counter of a chain nested deeper,
    and a loop node that leaves the loop.
    """
    result = [psi]
    if not exits_loop or not psi.lhs.is_linear or psi.guard is not None:
        return result
    coefs = psi.lhs.coefficients()
    own = [(k, c) for k, c in coefs.items() if isinstance(k, Counter) and k.update in loop_chains]
    if sorted(k.update for k, _ in own) != sorted(set(loop_chains)) or any(c != 1 for _, c in own):
        return result
    if any(isinstance(k, Counter) and k.update in nested for k in coefs):
        return result
    total = SymExpr.of(0)
    for k, _ in own:
        total = total + SymExpr.of(k)
    guard = Constraint(total, ">", 0)
    result.append(Constraint(psi.lhs, NEGATED[psi.op], psi.rhs + 1, guard))
    return result


# ---------------------------------------------------------------------------
# Algorithm
# ---------------------------------------------------------------------------

class _Builder:
    """Memoized symbolic execution of chains."""

    def __init__(self, cpf: ChainProgramForm):
        self.cpf     = cpf
        self.scalars = cpf.cfg.scalars
        self.arrays  = cpf.cfg.arrays
        self.results: Dict[int, Tuple[ConstraintSystem, ChainSummary, FrozenSet[Counter]]] = {}
        self.claims:  List[Tuple[Counter, int]] = []

    def eval(self, expr, store):
        return eval_expr(expr, store, self.arrays)

    def run(self, cid: int):
        if cid in self.results:
            return self.results[cid]
        chain = self.cpf.chain(cid)
        store = {v: sym(Alpha(v)) for v in self.scalars}
        constraints: List[Constraint] = []
        contradiction = False
        pending = set()
        loops = []

        for index, node in enumerate(chain.nodes):
            if node.kind is NodeKind.TRANSFORM:
                store[node.var] = self.eval(node.expr, store)
                continue
            if node.kind is NodeKind.LOOP:
                store, merged, inner = self._loop(node, store)
                loops.append((index, merged))
                pending |= inner
            psi = Constraint.build(self.eval(node.cond.left, store), node.cond.op,
                                   self.eval(node.cond.right, store))
            if psi is None:
                continue
            if not psi.counters():
                if not psi.lhs.terms and not OPS[psi.op](0, psi.rhs):
                    logger.debug(f"c{cid} node {index}: '{node}' is always false")
                    contradiction = True
                continue
            if node.kind is NodeKind.LOOP:
                nested = set()
                for sub in node.subchains:
                    nested |= self.cpf.subtree(sub) - {sub}
                constraints.extend(loop_exit_constraints(psi, node.subchains, node.exits_loop, nested))
            else:
                constraints.append(psi)

        reset_set = set()
        if chain.is_root:
            for k in pending:
                self.claims.append((k, cid))
                reset_set.add(k.var)
            values = dict(store)
            pending = set()
        else:
            for v in self.scalars:
                mine = {k for k in pending if k.var == v}
                if mine and Alpha(v) not in store[v].alphas():
                    self.claims.extend((k, cid) for k in mine)
                    pending -= mine
                    reset_set.add(v)
            values = {}
            for v in self.scalars:
                values[v] = solve_recurrence(v, Alpha(v), store[v], Counter(cid, var=v))
                pending |= {k for k in values[v].counters() if k.temporary and k.update == cid}

        result = (ConstraintSystem(cid, tuple(constraints), contradiction),
                  ChainSummary(cid, values, frozenset(reset_set), tuple(loops)),
                  frozenset(pending))
        self.results[cid] = result
        return result

    def _loop(self, node, store):
        results = [self.run(sub) for sub in node.subchains]
        inner = set()
        for _, _, sub_pending in results:
            inner |= sub_pending
        bindings = {Alpha(v): store[v] for v in self.scalars}
        merged, after = {}, {}
        for v in self.scalars:
            merged[v] = merge_values([summary.values[v] for _, summary, _ in results], Alpha(v))
            after[v] = substitute(merged[v], bindings)
        return after, merged, inner


def build_constraint_system(cpf: ChainProgramForm, cid: int,
                            builder: Optional[_Builder] = None) -> Tuple[ConstraintSystem, ChainSummary]:
    """
    System and summary of one chain, with temporary counters unresolved.
    Subchains below the chain are processed on the way.
    """
    builder = builder or _Builder(cpf)
    system, summary, _ = builder.run(cid)
    return system, summary


def resolve_temporary_counters(table: ConstraintTable) -> ConstraintTable:
    """Replace every temporary k_c^v by k_c^d for the chain d that claimed it."""
    resets: Dict[Counter, int] = {}
    for temp, chain in table.claims:
        if resets.get(temp, chain) != chain:
            raise AmbiguousReset(f"{temp} is reset by both c{resets[temp]} and c{chain}")
        resets[temp] = chain
    bindings = {temp: temp.resolved(chain) for temp, chain in resets.items()}
    systems = {cid: s.substitute(bindings) for cid, s in table.systems.items()}
    summaries = {cid: s.substitute(bindings) for cid, s in table.summaries.items()}
    for system in systems.values():
        left = [k for k in system.counters if k.temporary]
        if left:
            raise AmbiguousReset(f"no reset chain found for {', '.join(map(str, left))}")
    return ConstraintTable(systems, summaries, table.claims, True, table.eliminated)


def prune_infeasible_roots(systems: Mapping[int, ConstraintSystem]) -> List[int]:
    """Roots whose system has no solution over the non-negative integers."""
    eliminated = [cid for cid, system in sorted(systems.items()) if solve_intervals(system).unsat]
    if eliminated:
        logger.info(f"Eliminated root chain(s) {eliminated} before navigation")
    return eliminated


def build_all(cpf: ChainProgramForm) -> ConstraintTable:
    """Systems of all chains, resolved, with infeasible roots marked."""
    builder = _Builder(cpf)
    for root in cpf.roots:
        builder.run(root)
    raw = ConstraintTable({c: r[0] for c, r in builder.results.items()},
                          {c: r[1] for c, r in builder.results.items()},
                          tuple(builder.claims))
    table = resolve_temporary_counters(raw)
    table.eliminated = tuple(prune_infeasible_roots({r: table.system(r) for r in cpf.roots}))
    logger.info(f"Constraint systems: {table.constraint_count(cpf.roots)} root constraint(s), "
                f"{len(table.eliminated)} root(s) eliminated")
    return table
