#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# counter_solver.py - Interval reasoning over chain counters

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
counter_solver.py — Solving counter constraint systems
======================================================
Counters range over the non-negative integers. The solution set of a system
is over-approximated by one union of intervals per counter, obtained by
bound tightening until a fixpoint is reached:

  linear constraints      each term is bounded by the others' extremes
  guarded constraints     used only once the guard holds on every point
  geometric constraints   c*b^k op r with b >= 2 bound k by scanning powers
  disequalities           remove a single point from a one-counter constraint

Constraints still mentioning input symbols carry no counter information
and are skipped. solve_enumerate is the brute-force oracle for all of this.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from .sym_expr import MIRRORED, OPS, Constraint, ConstraintSystem, Counter, SymExpr

logger = logging.getLogger(__name__)

MAX_ROUNDS = 200
GRID_LIMIT = 2_000_000          # grid points evaluated at once by solve_enumerate

Bound = Optional[int]           # None stands for +infinity


# ---------------------------------------------------------------------------
# Interval unions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint, closed intervals [lo, hi] within [0, inf)."""

    parts: Tuple[Tuple[int, Bound], ...] = ((0, None),)

    @property
    def empty(self) -> bool:
        return not self.parts

    @property
    def lo(self) -> int:
        return self.parts[0][0]

    @property
    def hi(self) -> Bound:
        return self.parts[-1][1]

    def __contains__(self, x: int) -> bool:
        return any(lo <= x and (hi is None or x <= hi) for lo, hi in self.parts)

    def clip(self, lo: Optional[int] = None, hi: Bound = None) -> "IntervalSet":
        """Intersection with [lo, hi]; None leaves a side open."""
        lo = 0 if lo is None else max(lo, 0)
        kept = []
        for a, b in self.parts:
            a2 = max(a, lo)
            b2 = b if hi is None else (hi if b is None else min(b, hi))
            if b2 is None or a2 <= b2:
                kept.append((a2, b2))
        return IntervalSet(tuple(kept))

    def remove(self, x: int) -> "IntervalSet":
        kept = []
        for a, b in self.parts:
            if x < a or (b is not None and x > b):
                kept.append((a, b))
                continue
            if a <= x - 1:
                kept.append((a, x - 1))
            if b is None or x + 1 <= b:
                kept.append((x + 1, b))
        return IntervalSet(tuple(kept))

    def __str__(self):
        if self.empty:
            return "{}"
        return " u ".join(f"[{a}, {'inf)' if b is None else f'{b}]'}" for a, b in self.parts)


FULL = IntervalSet()


@dataclass(frozen=True)
class IntervalSolution:
    """Per-counter interval unions; unsat when some union is empty."""

    ranges: Dict[Counter, IntervalSet]
    unsat:  bool = False

    def __getitem__(self, counter: Counter) -> IntervalSet:
        return self.ranges.get(counter, FULL)

    def contains(self, valuation: Mapping[Counter, int]) -> bool:
        return not self.unsat and all(valuation.get(k, 0) in r for k, r in self.ranges.items())

    def to_dict(self) -> dict:
        return {"unsat": self.unsat,
                "ranges": {str(k): str(r) for k, r in sorted(self.ranges.items(), key=lambda kr: kr[0].sort_key())}}


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------

def _term_range(coef: int, r: IntervalSet) -> Tuple[Optional[int], Optional[int]]:
    """(min, max) of coef*x over r; None for an infinite end."""
    if coef >= 0:
        return coef * r.lo, None if r.hi is None else coef * r.hi
    return None if r.hi is None else coef * r.hi, coef * r.lo


def _linear_range(lhs: SymExpr, ranges) -> Tuple[Optional[int], Optional[int]]:
    low, high = 0, 0
    for atom, coef in lhs.coefficients().items():
        a, b = _term_range(coef, ranges[atom])
        low = None if low is None or a is None else low + a
        high = None if high is None or b is None else high + b
    return low, high


def _entailed(guard: Constraint, ranges) -> bool:
    if not guard.lhs.is_linear:
        return False
    low, high = _linear_range(guard.lhs, ranges)
    r, op = guard.rhs, guard.op
    if op == ">":
        return low is not None and low > r
    if op == ">=":
        return low is not None and low >= r
    if op == "<":
        return high is not None and high < r
    if op == "<=":
        return high is not None and high <= r
    if op == "==":
        return low == high == r
    return (high is not None and high < r) or (low is not None and low > r)


def _upper_bounds(lhs: SymExpr, r: int, ranges, out: Dict[Counter, IntervalSet]):
    """Tighten every counter of lhs so that lhs <= r stays satisfiable."""
    coefs = lhs.coefficients()
    mins = {atom: _term_range(coef, ranges[atom])[0] for atom, coef in coefs.items()}
    for atom, coef in coefs.items():
        rest = 0
        for other, m in mins.items():
            if other == atom:
                continue
            if m is None:
                rest = None
                break
            rest += m
        if rest is None:
            continue
        budget = r - rest
        if coef > 0:
            out[atom] = out[atom].clip(hi=budget // coef) if budget >= 0 else IntervalSet(())
        else:
            out[atom] = out[atom].clip(lo=-(budget // -coef))


def _linear(constraint: Constraint, ranges: Dict[Counter, IntervalSet]):
    lhs, op, r = constraint.lhs, constraint.op, constraint.rhs
    if op == "<":
        op, r = "<=", r - 1
    elif op == ">":
        op, r = ">=", r + 1
    if op in ("<=", "=="):
        _upper_bounds(lhs, r, ranges, ranges)
    if op in (">=", "==") and all(not ranges[k].empty for k in lhs.counters()):
        _upper_bounds(-lhs, -r, ranges, ranges)
    if op == "!=":
        coefs = lhs.coefficients()
        if len(coefs) == 1:
            (atom, coef), = coefs.items()
            if r % coef == 0:
                ranges[atom] = ranges[atom].remove(r // coef)


def _geometric(constraint: Constraint, ranges: Dict[Counter, IntervalSet]):
    (mono, coef), = constraint.lhs.terms
    if mono.factor or len(mono.powers) != 1:
        return
    (base, counter), = mono.powers
    op, r = constraint.op, constraint.rhs
    if base < 0:
        return
    if base == 0:
        # 0^0 = 1, 0^k = 0 for k >= 1
        rng = ranges[counter]
        if not OPS[op](coef, r):
            rng = rng.clip(lo=1)
        if not OPS[op](0, r):
            rng = rng.clip(hi=0)
        ranges[counter] = rng
        return
    if coef < 0:
        coef, op, r = -coef, MIRRORED[op], -r
    if op == "<":
        op, r = "<=", r - 1
    elif op == ">":
        op, r = ">=", r + 1
    rng = ranges[counter]
    if op in ("<=", "=="):
        if coef > r:
            ranges[counter] = IntervalSet(())
            return
        k = 0
        while coef * base ** (k + 1) <= r:
            k += 1
        rng = rng.clip(hi=k)
    if op in (">=", "=="):
        k = 0
        while coef * base ** k < r:
            k += 1
        rng = rng.clip(lo=k)
    if op == "!=":
        k = 0
        while coef * base ** k < r:
            k += 1
        if coef * base ** k == r:
            rng = rng.remove(k)
    ranges[counter] = rng


def solve_intervals(system: ConstraintSystem, counters: Iterable[Counter] = ()) -> IntervalSolution:
    """
    Interval over-approximation of the solutions of a system. Every counter
    of the system, plus any extra `counters`, gets an entry.
    """
    ranges: Dict[Counter, IntervalSet] = {k: FULL for k in system.counters}
    ranges.update({k: FULL for k in counters if k not in ranges})
    if system.contradiction:
        return IntervalSolution(ranges, unsat=True)

    usable = []
    for constraint in system:
        if not constraint.counter_only:
            continue
        if not constraint.lhs.terms:
            if constraint.guard is None and not OPS[constraint.op](0, constraint.rhs):
                return IntervalSolution(ranges, unsat=True)
            continue
        if constraint.lhs.is_linear or constraint.lhs.is_geometric:
            usable.append(constraint)

    for _ in range(MAX_ROUNDS):
        before = dict(ranges)
        for constraint in usable:
            if constraint.guard is not None and not _entailed(constraint.guard, ranges):
                continue
            if constraint.lhs.is_linear:
                _linear(constraint, ranges)
            else:
                _geometric(constraint, ranges)
            if any(r.empty for r in ranges.values()):
                return IntervalSolution(ranges, unsat=True)
        if ranges == before:
            break
    else:
        logger.debug(f"Interval propagation stopped after {MAX_ROUNDS} rounds")
    return IntervalSolution(ranges)


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------

def is_solution(valuation: Mapping[Counter, int], system: ConstraintSystem) -> bool:
    """Every counter-only constraint whose guard holds is satisfied."""
    if system.contradiction:
        return False
    env = {k: valuation.get(k, 0) for k in system.counters}
    return all(c.holds(env) for c in system if c.counter_only)


class Improvement(NamedTuple):
    reset:  FrozenSet[int]
    update: FrozenSet[int]


def improvement_direction(w: Mapping[Counter, int], system: ConstraintSystem,
                          candidates: Iterable[int],
                          subtree: Optional[Callable[[int], FrozenSet[int]]] = None,
                          intervals: Optional[IntervalSolution] = None) -> Improvement:
    """
    Split the candidate chains into those whose execution can move w towards
    the interval product of the system.

    A chain is in `update` when some counter updated by it (or by a chain
    nested in it) can still grow inside its interval, and in `reset` when
    some counter reset by it (or a nested chain) is above its interval.
    """
    subtree = subtree or (lambda d: frozenset({d}))
    intervals = solve_intervals(system) if intervals is None else intervals
    reachable = all(r.hi is None or r.hi >= w.get(k, 0) for k, r in intervals.ranges.items())
    update, reset = set(), set()
    for d in candidates:
        below = subtree(d)
        for k, r in intervals.ranges.items():
            value = w.get(k, 0)
            if reachable and k.update in below and (r.hi is None or r.hi > value):
                update.add(d)
            if k.reset in below and r.hi is not None and value > r.hi:
                reset.add(d)
    return Improvement(frozenset(reset), frozenset(update))


def _vectorizable(system: ConstraintSystem) -> bool:
    for c in system:
        if not c.counter_only:
            continue
        if not c.lhs.is_linear or (c.guard is not None and not c.guard.lhs.is_linear):
            return False
    return True


def _linear_values(lhs: SymExpr, axes: Dict[Counter, np.ndarray], size: int) -> np.ndarray:
    total = np.zeros(size, dtype=np.int64)
    for atom, coef in lhs.coefficients().items():
        total = total + coef * axes[atom]
    return total


def solve_enumerate(system: ConstraintSystem, bound: int) -> Optional[Dict[Counter, int]]:
    """
    First solution in lexicographic order (counters sorted by id) with every
    counter in [0, bound], or None.
    """
    if bound < 0:
        raise ValueError("bound must be non-negative")
    if system.contradiction:
        return None
    counters = sorted(system.counters, key=lambda k: k.sort_key())
    constraints = [c for c in system if c.counter_only]
    size = (bound + 1) ** len(counters)

    if counters and _vectorizable(system) and size <= GRID_LIMIT:
        grid = np.indices((bound + 1,) * len(counters)).reshape(len(counters), -1)
        axes = dict(zip(counters, grid))
        mask = np.ones(size, dtype=bool)
        for c in constraints:
            holds = OPS[c.op](_linear_values(c.lhs, axes, size), c.rhs)
            if c.guard is not None:
                holds = holds | ~OPS[c.guard.op](_linear_values(c.guard.lhs, axes, size), c.guard.rhs)
            mask &= holds
        if not mask.any():
            return None
        first = int(np.argmax(mask))
        return {k: int(axes[k][first]) for k in counters}

    for values in itertools.product(range(bound + 1), repeat=len(counters)):
        env = dict(zip(counters, values))
        if all(c.holds(env) for c in constraints):
            return env
    return None
