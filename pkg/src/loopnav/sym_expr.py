#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# sym_expr.py - Symbolic values over inputs, loop counters and the unknown value

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
sym_expr.py — The symbolic value algebra
========================================
A SymExpr is a polynomial with integer coefficients over two kinds of atoms:

  Alpha    — the value of a variable on entry to a chain (a_i), or an input
             symbol such as a single array element (a_A[3]).
  Counter  — the number of executions of an update chain since the last
             execution of a reset chain (k1^0). Before reset chains are known
             a counter is temporary and tagged with its variable (k1^i).

plus geometric monomials a_i*3^(k1^0), which are kept opaque, and the
absorbing unknown value STAR. Expressions are always stored in canonical
form, so equality of values is equality of objects.

Constraint and ConstraintSystem, the relations harvested from chains, live
here as well because both the builder and the solvers consume them.
"""

from __future__ import annotations

import logging
import operator
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Alpha:
    """Entry value of a scalar variable, or an input symbol."""

    name: str

    def sort_key(self):
        return (1, self.name, 0, "")

    def __str__(self):
        return f"a_{self.name}"


@dataclass(frozen=True)
class Counter:
    """
    Chain counter k_c^r.

    Attributes
    ----------
    update : int
        Id of the chain whose completions increment the counter.
    reset : int or None
        Id of the chain whose entry zeroes the counter; None while temporary.
    var : str or None
        Variable of a temporary counter k_c^v.
    """

    update: int
    reset:  Optional[int] = None
    var:    Optional[str] = None

    @property
    def temporary(self) -> bool:
        return self.reset is None

    def resolved(self, reset: int) -> "Counter":
        return Counter(self.update, reset)

    def sort_key(self):
        return (0, "", self.update, -1 if self.reset is None else self.reset, self.var or "")

    def __str__(self):
        tag = self.var if self.reset is None else self.reset
        return f"k{self.update}^{tag}"


Atom = Union[Alpha, Counter]


def _atom_key(atom: Atom):
    return atom.sort_key()


# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mono:
    """Product of atoms times a product of constant bases raised to counters."""

    factor: Tuple[Atom, ...]                  = ()
    powers: Tuple[Tuple[int, Counter], ...]   = ()

    @property
    def geometric(self) -> bool:
        return bool(self.powers)

    @property
    def degree(self) -> int:
        return len(self.factor)

    def atoms(self) -> set:
        found = set(self.factor)
        found.update(counter for _, counter in self.powers)
        return found

    def sort_key(self):
        return (self.geometric, len(self.factor),
                tuple(_atom_key(a) for a in self.factor),
                tuple((_atom_key(c), b) for b, c in self.powers))

    def __str__(self):
        parts = [str(a) for a in self.factor]
        parts += [f"{b}^({c})" for b, c in self.powers]
        return "*".join(parts)


def _make_mono(factor: Iterable[Atom], powers: Iterable[Tuple[int, Counter]]) -> Mono:
    """Canonical monomial; bases equal to 1 vanish."""
    merged: Dict[Counter, int] = {}
    for base, counter in powers:
        merged[counter] = merged.get(counter, 1) * base
    kept = tuple(sorted(((b, c) for c, b in merged.items() if b != 1),
                        key=lambda bc: _atom_key(bc[1])))
    return Mono(tuple(sorted(factor, key=_atom_key)), kept)


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    return _make_mono(m1.factor + m2.factor, m1.powers + m2.powers)


# ---------------------------------------------------------------------------
# SymExpr
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SymExpr:
    """
    Canonical symbolic value: sum of coefficient*monomial terms plus a constant.

    Invariants: coefficients are non-zero, terms are sorted, a geometric
    monomial never shares the expression with another non-constant term, and
    a STAR expression carries no terms.
    """

    terms: Tuple[Tuple[Mono, int], ...] = ()
    const: int                          = 0
    star:  bool                         = False

    # -- construction -------------------------------------------------------

    @staticmethod
    def of(value) -> "SymExpr":
        if isinstance(value, SymExpr):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not symbolic values")
        if isinstance(value, int):
            return SymExpr(const=value)
        if isinstance(value, (Alpha, Counter)):
            return SymExpr(terms=((Mono((value,)), 1),))
        raise TypeError(f"cannot build a SymExpr from {value!r}")

    @staticmethod
    def from_terms(terms: Mapping[Mono, int], const: int = 0) -> "SymExpr":
        kept = {m: c for m, c in terms.items() if c != 0}
        geo = [m for m in kept if m.geometric]
        if geo and len(kept) > 1:
            return STAR
        ordered = tuple(sorted(kept.items(), key=lambda mc: mc[0].sort_key()))
        return SymExpr(terms=ordered, const=int(const))

    # -- queries ------------------------------------------------------------

    @property
    def is_const(self) -> bool:
        return not self.star and not self.terms

    @property
    def is_linear(self) -> bool:
        return not self.star and all(m.degree == 1 and not m.geometric for m, _ in self.terms)

    @property
    def is_geometric(self) -> bool:
        return not self.star and len(self.terms) == 1 and self.terms[0][0].geometric

    def atoms(self) -> set:
        found = set()
        for mono, _ in self.terms:
            found |= mono.atoms()
        return found

    def counters(self) -> set:
        return {a for a in self.atoms() if isinstance(a, Counter)}

    def alphas(self) -> set:
        return {a for a in self.atoms() if isinstance(a, Alpha)}

    def coefficients(self) -> Dict[Atom, int]:
        """Atom -> coefficient of a linear expression."""
        if not self.is_linear:
            raise ValueError(f"{self} is not linear")
        return {mono.factor[0]: coef for mono, coef in self.terms}

    def without_const(self) -> "SymExpr":
        return self if self.star else SymExpr(self.terms, 0)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "SymExpr":
        other = SymExpr.of(other)
        if self.star or other.star:
            return STAR
        merged = dict(self.terms)
        for mono, coef in other.terms:
            merged[mono] = merged.get(mono, 0) + coef
        return SymExpr.from_terms(merged, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> "SymExpr":
        if self.star:
            return STAR
        return SymExpr(tuple((m, -c) for m, c in self.terms), -self.const)

    def __sub__(self, other) -> "SymExpr":
        return self + (-SymExpr.of(other))

    def __rsub__(self, other) -> "SymExpr":
        return SymExpr.of(other) - self

    def __mul__(self, other) -> "SymExpr":
        other = SymExpr.of(other)
        if self.star or other.star:
            return STAR
        left  = list(self.terms)  + ([(Mono(), self.const)] if self.const else [])
        right = list(other.terms) + ([(Mono(), other.const)] if other.const else [])
        merged: Dict[Mono, int] = {}
        for m1, c1 in left:
            for m2, c2 in right:
                mono = _mono_mul(m1, m2)
                merged[mono] = merged.get(mono, 0) + c1 * c2
        const = merged.pop(Mono(), 0)
        return SymExpr.from_terms(merged, const)

    __rmul__ = __mul__

    # -- rendering ----------------------------------------------------------

    def __str__(self):
        if self.star:
            return "*"
        pieces = []
        for mono, coef in self.terms:
            body = str(mono)
            magnitude = abs(coef)
            text = body if magnitude == 1 else f"{magnitude}*{body}"
            pieces.append(("-" if coef < 0 else "+", text))
        if self.const or not pieces:
            pieces.append(("-" if self.const < 0 else "+", str(abs(self.const))))
        sign, text = pieces[0]
        out = f"-{text}" if sign == "-" else text
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out


STAR = SymExpr(star=True)


def sym(value) -> SymExpr:
    """Shorthand for SymExpr.of."""
    return SymExpr.of(value)


def geometric(base: int, counter: Counter, factor: Iterable[Atom] = ()) -> SymExpr:
    """factor * base^counter as a SymExpr."""
    mono = _make_mono(tuple(factor), ((base, counter),))
    if not mono.powers and not mono.factor:
        return SymExpr(const=1)
    return SymExpr.from_terms({mono: 1})


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def simplify(e) -> SymExpr:
    """
    Canonical form of a value.

    Accepts a SymExpr, an int, an atom, or an expression tree of tuples
    ('+', x, y), ('-', x, y), ('*', x, y) and ('^', base, counter).
    """
    if isinstance(e, tuple):
        op, left, right = e
        if op == "^":
            base = simplify(left)
            if not base.is_const or not isinstance(right, Counter):
                return STAR
            return geometric(base.const, right)
        a, b = simplify(left), simplify(right)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        raise ValueError(f"unknown operator '{op}'")
    expr = SymExpr.of(e)
    if expr.star:
        return STAR
    return SymExpr.from_terms(dict(expr.terms), expr.const)


def substitute(e: SymExpr, bindings: Mapping[Atom, object]) -> SymExpr:
    """Simultaneous substitution of atoms, followed by simplification."""
    e = SymExpr.of(e)
    if e.star:
        return STAR
    if not bindings:
        return e
    result = SymExpr(const=e.const)
    for mono, coef in e.terms:
        term = SymExpr(const=coef)
        for atom in mono.factor:
            term = term * SymExpr.of(bindings.get(atom, atom))
        for base, counter in mono.powers:
            term = term * _power(base, counter, bindings.get(counter))
        result = result + term
        if result.star:
            return STAR
    return result


def _power(base: int, counter: Counter, value) -> SymExpr:
    if value is None:
        return geometric(base, counter)
    value = SymExpr.of(value)
    if value.is_const:
        if value.const < 0:
            return STAR
        return SymExpr(const=base ** value.const)
    if (value.const == 0 and len(value.terms) == 1 and value.terms[0][1] == 1
            and value.terms[0][0].degree == 1 and not value.terms[0][0].geometric
            and isinstance(value.terms[0][0].factor[0], Counter)):
        return geometric(base, value.terms[0][0].factor[0])
    return STAR


def evaluate(e: SymExpr, env: Mapping[Atom, int]) -> int:
    """Concrete value; every atom must be bound."""
    e = SymExpr.of(e)
    if e.star:
        raise ValueError("cannot evaluate the unknown value")
    total = e.const
    for mono, coef in e.terms:
        value = coef
        for atom in mono.factor:
            value *= env[atom]
        for base, counter in mono.powers:
            value *= base ** env[counter]
        total += value
    return total


def solve_recurrence(v: str, initial, one_pass: SymExpr, kappa: Counter) -> SymExpr:
    """
    Closed form of v after kappa executions of a chain whose single
    execution maps the initial value to one_pass.
    """
    start = SymExpr.of(Alpha(v) if initial is None else initial)
    one_pass = SymExpr.of(one_pass)
    if one_pass.star:
        return STAR
    if one_pass == start:
        return start
    step = one_pass - start
    if step.is_const:
        return start + SymExpr.of(kappa) * step.const
    # counters of nested chains are not reset by this chain, they keep
    # counting across its executions
    nested = step.without_const()
    if nested.is_linear and all(isinstance(a, Counter) and a.temporary and a.var == v
                                and a.update != kappa.update for a in nested.atoms()):
        return start + nested + SymExpr.of(kappa) * step.const
    # g * a_v
    if (one_pass.const == 0 and len(one_pass.terms) == 1
            and SymExpr(terms=((one_pass.terms[0][0], 1),)) == start):
        ratio = one_pass.terms[0][1]
        anchor = start.terms[0][0]
        if ratio not in (0, 1) and not anchor.geometric:
            return geometric(ratio, kappa, anchor.factor)
    return STAR


# ---------------------------------------------------------------------------
# Merging per-subchain values
# ---------------------------------------------------------------------------

def _shape(value: SymExpr, initial: SymExpr):
    """('alpha'|'const'|'arith'|'geo'|'other', payload) of a closed form."""
    if value.star:
        return "other", None
    if value == initial:
        return "alpha", None
    if value.is_const:
        return "const", value.const
    anchor = initial.terms[0][0] if len(initial.terms) == 1 else None
    rest = value - initial
    if (anchor is not None and not rest.star and rest.const == 0 and rest.terms
            and all(m.degree == 1 and not m.geometric and isinstance(m.factor[0], Counter)
                    for m, _ in rest.terms)):
        return "arith", dict(rest.terms)
    if (anchor is not None and value.is_geometric and value.const == 0
            and value.terms[0][1] == 1 and value.terms[0][0].factor == anchor.factor):
        return "geo", value.terms[0][0].powers
    return "other", None


def merge_values(values: Iterable[SymExpr], initial) -> SymExpr:
    """
    One function of all counters valid for every interleaving of the
    subchains, or STAR when the shapes cannot be combined.
    """
    initial = SymExpr.of(initial)
    shapes = [_shape(SymExpr.of(v), initial) for v in values]
    if not shapes:
        return initial
    kinds = {kind for kind, _ in shapes}
    if "other" in kinds:
        return STAR
    if kinds == {"alpha"}:
        return initial
    if kinds == {"const"}:
        consts = {payload for _, payload in shapes}
        return SymExpr(const=consts.pop()) if len(consts) == 1 else STAR
    if "const" in kinds:
        return STAR
    if kinds <= {"alpha", "arith"}:
        merged: Dict[Mono, int] = {}
        for kind, payload in shapes:
            for mono, coef in (payload or {}).items():
                merged[mono] = merged.get(mono, 0) + coef
        return initial + SymExpr.from_terms(merged)
    if kinds <= {"alpha", "geo"}:
        powers = []
        for kind, payload in shapes:
            powers.extend(payload or ())
        anchor = initial.terms[0][0]
        mono = _make_mono(anchor.factor, powers)
        return SymExpr.from_terms({mono: 1})
    return STAR


def render_function(var: str, value: SymExpr) -> str:
    """'i(k1^0,k2^0) = k1^0 + k2^0 + a_i'."""
    counters = sorted(SymExpr.of(value).counters(), key=_atom_key)
    args = ",".join(str(c) for c in counters)
    return f"{var}({args}) = {value}"


# ---------------------------------------------------------------------------
# Relations
# ---------------------------------------------------------------------------

OPS = {
    "<":  operator.lt,
    "<=": operator.le,
    ">":  operator.gt,
    ">=": operator.ge,
    "==": operator.eq,
    "!=": operator.ne,
}
NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}
MIRRORED = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


def compare(left: int, op: str, right: int) -> bool:
    return OPS[op](left, right)


@dataclass(frozen=True)
class Constraint:
    """
    Relation `lhs op rhs` with all constants moved to the integer rhs, plus
    an optional guard under which the relation is required to hold.
    """

    lhs:   SymExpr
    op:    str
    rhs:   int
    guard: Optional["Constraint"] = None

    @staticmethod
    def build(left, op: str, right, guard: Optional["Constraint"] = None) -> Optional["Constraint"]:
        """Canonical constraint for left op right; None if it involves STAR."""
        if op not in OPS:
            raise ValueError(f"unknown relation '{op}'")
        diff = SymExpr.of(left) - SymExpr.of(right)
        if diff.star:
            return None
        return Constraint(diff.without_const(), op, -diff.const, guard)

    def atoms(self) -> set:
        found = self.lhs.atoms()
        if self.guard is not None:
            found |= self.guard.atoms()
        return found

    def counters(self) -> set:
        return {a for a in self.atoms() if isinstance(a, Counter)}

    @property
    def counter_only(self) -> bool:
        """All atoms are counters (solvable by the counter solver)."""
        return all(isinstance(a, Counter) for a in self.atoms())

    @property
    def constant(self) -> bool:
        return self.lhs.is_const and (self.guard is None or self.guard.constant)

    def negated(self) -> "Constraint":
        return Constraint(self.lhs, NEGATED[self.op], self.rhs)

    def relation_holds(self, env: Mapping[Atom, int]) -> bool:
        return compare(evaluate(self.lhs, env), self.op, self.rhs)

    def holds(self, env: Mapping[Atom, int]) -> bool:
        """True when the guard fails or the relation holds."""
        if self.guard is not None and not self.guard.relation_holds(env):
            return True
        return self.relation_holds(env)

    def substitute(self, bindings: Mapping[Atom, object]) -> Optional["Constraint"]:
        guard = None
        if self.guard is not None:
            guard = self.guard.substitute(bindings)
            if guard is None:
                return None
        return Constraint.build(substitute(self.lhs, bindings), self.op, self.rhs, guard)

    def __str__(self):
        text = f"{self.lhs} {self.op} {self.rhs}"
        if self.guard is not None:
            text += f"  if {self.guard.lhs} {self.guard.op} {self.guard.rhs}"
        return text


@dataclass(frozen=True)
class ConstraintSystem:
    """
    Counter constraints of one chain.

    Attributes
    ----------
    owner : int
        Chain id.
    constraints : tuple of Constraint
    contradiction : bool
        Set when a counter-free assertion of the chain is statically false.
    """

    owner:         int
    constraints:   Tuple[Constraint, ...] = ()
    contradiction: bool                   = False

    @property
    def counters(self) -> frozenset:
        found = set()
        for c in self.constraints:
            found |= c.counters()
        return frozenset(found)

    def __len__(self):
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def extended(self, extra: Iterable[Constraint]) -> "ConstraintSystem":
        return ConstraintSystem(self.owner, self.constraints + tuple(extra), self.contradiction)

    def substitute(self, bindings: Mapping[Atom, object]) -> "ConstraintSystem":
        """
        Instantiate atoms. Constraints that become STAR are dropped, constant
        ones are decided on the spot.
        """
        kept = []
        contradiction = self.contradiction
        for constraint in self.constraints:
            inst = constraint.substitute(bindings)
            if inst is None:
                continue
            if inst.guard is not None and inst.guard.constant:
                if not compare(0, inst.guard.op, inst.guard.rhs):
                    continue
                inst = Constraint(inst.lhs, inst.op, inst.rhs)
            if inst.lhs.is_const and inst.guard is None:
                if not compare(inst.lhs.const, inst.op, inst.rhs):
                    contradiction = True
                continue
            kept.append(inst)
        return ConstraintSystem(self.owner, tuple(kept), contradiction)

    def render(self) -> str:
        lines = [f"S(c{self.owner}):"]
        if self.contradiction:
            lines.append("  false")
        for n, constraint in enumerate(self.constraints, start=1):
            lines.append(f"  ({n}) {constraint}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "owner": self.owner,
            "contradiction": self.contradiction,
            "constraints": [
                {"relation": f"{c.lhs} {c.op} {c.rhs}",
                 "guard": None if c.guard is None else f"{c.guard.lhs} {c.guard.op} {c.guard.rhs}"}
                for c in self.constraints
            ],
        }
