#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# feasibility_solver.py - Satisfiability of path conditions over input symbols

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
feasibility_solver.py — Path conditions
=======================================
A path condition is a conjunction of literals `terms op constant` over input
symbols (scalar inputs and single array elements). Literals are grouped
into clusters of symbols that share a literal; clusters are independent.

  one symbol      solved exactly: an interval plus excluded points
  several         exact integer elimination of equalities and inequalities
  nonlinear       Unknown, unless another cluster is already unsatisfiable

Unknown queries can be handed to an external SMT-LIB2 solver.
"""

from __future__ import annotations

import logging
import math
import re
import shlex
import subprocess
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import ExternalSolverError, UnsupportedLiteral
from .sym_expr import OPS, SymExpr

logger = logging.getLogger(__name__)

SAT, UNSAT, UNKNOWN = "sat", "unsat", "unknown"


@dataclass(frozen=True)
class Literal:
    """Relation `lhs op rhs` over input symbols, constants on the right."""

    lhs: SymExpr
    op:  str
    rhs: int

    @staticmethod
    def build(left, op: str, right) -> "Literal":
        diff = SymExpr.of(left) - SymExpr.of(right)
        if diff.star:
            raise UnsupportedLiteral(f"literal '{left} {op} {right}' has an unknown value")
        if diff.counters():
            raise UnsupportedLiteral(f"literal '{left} {op} {right}' mentions a counter")
        return Literal(diff.without_const(), op, -diff.const)

    @property
    def constant(self) -> bool:
        return not self.lhs.terms

    def symbols(self) -> List[str]:
        return sorted(a.name for a in self.lhs.alphas())

    def holds(self, witness: Dict[str, int]) -> bool:
        total = self.lhs.const
        for mono, coef in self.lhs.terms:
            value = coef
            for atom in mono.factor:
                value *= witness.get(atom.name, 0)
            total += value
        return OPS[self.op](total, self.rhs)

    def __str__(self):
        return f"{_plain(self.lhs)} {self.op} {self.rhs}"


def _plain(expr: SymExpr) -> str:
    """Expression text with input symbols under their own names."""
    text = str(expr)
    for atom in sorted(expr.alphas(), key=lambda a: -len(a.name)):
        text = text.replace(str(atom), atom.name)
    return text


@dataclass
class SatResult:
    status:  str
    witness: Dict[str, int] = field(default_factory=dict)

    @property
    def sat(self) -> bool:
        return self.status == SAT


# ---------------------------------------------------------------------------
# Built-in procedure
# ---------------------------------------------------------------------------

def _clusters(literals: Sequence[Literal]) -> List[Tuple[List[str], List[Literal]]]:
    graph = nx.Graph()
    for lit in literals:
        names = lit.symbols()
        graph.add_nodes_from(names)
        graph.add_edges_from(zip(names, names[1:]))
    groups = []
    for component in sorted(nx.connected_components(graph), key=lambda c: sorted(c)):
        members = set(component)
        groups.append((sorted(members), [l for l in literals if set(l.symbols()) <= members]))
    return groups


def _first_free(lo: Optional[int], hi: Optional[int], excluded) -> Optional[int]:
    """Value of [lo, hi] outside `excluded` closest to zero, non-negative first."""
    x = 0 if lo is None else max(lo, 0)
    while hi is None or x <= hi:
        if x not in excluded:
            return x
        x += 1
    x = -1 if hi is None else min(hi, -1)
    while lo is None or x >= lo:
        if x not in excluded:
            return x
        x -= 1
    return None


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _single(name: str, literals: Sequence[Literal]) -> SatResult:
    """Exact decision for literals a*x op r over one symbol."""
    lo: Optional[int] = None
    hi: Optional[int] = None
    excluded = set()

    def tighten(new_lo=None, new_hi=None):
        nonlocal lo, hi
        if new_lo is not None:
            lo = new_lo if lo is None else max(lo, new_lo)
        if new_hi is not None:
            hi = new_hi if hi is None else min(hi, new_hi)

    for lit in literals:
        (mono, a), = lit.lhs.terms
        r, op = lit.rhs, lit.op
        if op == "<":
            op, r = "<=", r - 1
        elif op == ">":
            op, r = ">=", r + 1
        if op == "==":
            if r % a:
                return SatResult(UNSAT)
            tighten(r // a, r // a)
        elif op == "!=":
            if r % a == 0:
                excluded.add(r // a)
        elif (op == "<=") == (a > 0):
            tighten(new_hi=_floor_div(r, a) if a > 0 else _floor_div(-r, -a))
        else:
            tighten(new_lo=_ceil_div(r, a) if a > 0 else _ceil_div(-r, -a))
    if lo is not None and hi is not None and lo > hi:
        return SatResult(UNSAT)
    x = _first_free(lo, hi, excluded)
    return SatResult(UNSAT) if x is None else SatResult(SAT, {name: x})


# A row (coefs, const) stands for sum(coefs[x] * x) + const compared with
# zero: `== 0` for equalities, `>= 0` for inequalities, `!= 0` for
# disequalities.
Row = Tuple[Dict[str, int], int]


def _rows(literals: Sequence[Literal]) -> Tuple[List[Row], List[Row], List[Row]]:
    eqs, geqs, neqs = [], [], []
    for lit in literals:
        coefs = {atom.name: c for atom, c in lit.lhs.coefficients().items()}
        negated = {n: -c for n, c in coefs.items()}
        r = lit.rhs
        if lit.op == "==":
            eqs.append((coefs, -r))
        elif lit.op == "!=":
            neqs.append((coefs, -r))
        elif lit.op == ">=":
            geqs.append((coefs, -r))
        elif lit.op == ">":
            geqs.append((coefs, -r - 1))
        elif lit.op == "<=":
            geqs.append((negated, r))
        else:
            geqs.append((negated, r - 1))
    return eqs, geqs, neqs


def _value(row: Row, values: Dict[str, int]) -> int:
    coefs, const = row
    return const + sum(c * values.get(n, 0) for n, c in coefs.items())


def _substitute(row: Row, name: str, definition: Row) -> Row:
    """Replace `name` in `row` by the expression `definition`."""
    coefs, const = row
    a = coefs.get(name, 0)
    if not a:
        return row
    out = {n: c for n, c in coefs.items() if n != name}
    for n, c in definition[0].items():
        out[n] = out.get(n, 0) + a * c
    return {n: c for n, c in out.items() if c}, const + a * definition[1]


def _tighten(geqs: Sequence[Row]) -> Optional[List[Row]]:
    """
    Inequalities divided by the gcd of their coefficients, one row per
    direction with the tightest constant. None if a row is false or two
    opposite rows leave no room.
    """
    best: Dict[tuple, int] = {}
    for coefs, const in geqs:
        coefs = {n: c for n, c in coefs.items() if c}
        if not coefs:
            if const < 0:
                return None
            continue
        g = reduce(math.gcd, coefs.values(), 0)
        key = tuple(sorted((n, c // g) for n, c in coefs.items()))
        const = _floor_div(const, g)
        best[key] = min(const, best.get(key, const))
    for key, const in best.items():
        opposite = tuple((n, -c) for n, c in key)
        if opposite in best and const + best[opposite] < 0:
            return None
    return [(dict(key), const) for key, const in sorted(best.items())]


def _shadow(name: str, lows: Sequence[Row], ups: Sequence[Row], dark: bool) -> List[Row]:
    """Rows left after combining every lower bound of `name` with every upper bound."""
    rows = []
    for low, low_const in lows:
        a = low[name]
        for up, up_const in ups:
            b = -up[name]
            coefs: Dict[str, int] = {}
            for n, c in low.items():
                if n != name:
                    coefs[n] = coefs.get(n, 0) + b * c
            for n, c in up.items():
                if n != name:
                    coefs[n] = coefs.get(n, 0) + a * c
            slack = (a - 1) * (b - 1) if dark else 0
            rows.append((coefs, b * low_const + a * up_const - slack))
    return rows


def _pick(name: str, geqs: Sequence[Row], values: Dict[str, int]) -> Optional[int]:
    """Value of `name` closest to zero that satisfies `geqs` under `values`."""
    lo: Optional[int] = None
    hi: Optional[int] = None
    for coefs, const in geqs:
        a = coefs.get(name, 0)
        if not a:
            continue
        rest = const + sum(c * values.get(n, 0) for n, c in coefs.items() if n != name)
        if a > 0:
            bound = _ceil_div(-rest, a)
            lo = bound if lo is None else max(lo, bound)
        else:
            bound = _floor_div(rest, -a)
            hi = bound if hi is None else min(hi, bound)
    return _first_free(lo, hi, ())


class Elimination:
    """
    Exact decision procedure for conjunctions of linear integer rows.

    Equalities are removed by substitution; a coefficient without a unit
    entry is reduced first with a fresh variable. Inequalities are
    eliminated one variable at a time: exactly when the variable has a unit
    coefficient on one side, otherwise through the dark shadow and, should
    that be empty while the real shadow is not, the finite set of splinter
    equalities next to the lower bounds. Disequalities are split into two
    strict inequalities only when a solution violates them.
    """

    def __init__(self):
        self.fresh = 0
        self.calls = 0

    def decide(self, eqs: Sequence[Row], geqs: Sequence[Row],
               neqs: Sequence[Row]) -> Optional[Dict[str, int]]:
        values = self.solve(eqs, geqs)
        if values is None:
            return None
        for k, row in enumerate(neqs):
            if _value(row, values) != 0:
                continue
            coefs, const = row
            others = list(neqs[:k]) + list(neqs[k + 1:])
            above = (coefs, const - 1)
            below = ({n: -c for n, c in coefs.items()}, -const - 1)
            for branch in (above, below):
                found = self.decide(eqs, list(geqs) + [branch], others)
                if found is not None:
                    return found
            return None
        return values

    def solve(self, eqs: Sequence[Row], geqs: Sequence[Row]) -> Optional[Dict[str, int]]:
        self.calls += 1
        eqs, geqs = list(eqs), list(geqs)
        definitions: List[Tuple[str, Row]] = []
        while eqs:
            coefs, const = eqs.pop(0)
            coefs = {n: c for n, c in coefs.items() if c}
            if not coefs:
                if const:
                    return None
                continue
            g = reduce(math.gcd, coefs.values(), 0)
            if const % g:
                return None
            coefs = {n: c // g for n, c in coefs.items()}
            const //= g
            units = sorted(n for n, c in coefs.items() if abs(c) == 1)
            if units:
                name = units[0]
                a = coefs[name]
                definition = ({n: -a * c for n, c in coefs.items() if n != name}, -a * const)
                reduced = None
            else:
                name = min(coefs, key=lambda n: (abs(coefs[n]), n))
                if coefs[name] < 0:
                    coefs = {n: -c for n, c in coefs.items()}
                    const = -const
                a = coefs[name]
                self.fresh += 1
                fresh = f"#{self.fresh}"
                steps = {n: -(c // a) for n, c in coefs.items() if n != name and c // a}
                definition = ({fresh: 1, **steps}, -(const // a))
                # a*fresh plus the residues of the other coefficients modulo a
                reduced = _substitute((coefs, const), name, definition)
            definitions.append((name, definition))
            eqs = [_substitute(r, name, definition) for r in eqs]
            if reduced is not None:
                eqs.insert(0, reduced)
            geqs = [_substitute(r, name, definition) for r in geqs]

        values = self.eliminate(geqs)
        if values is None:
            return None
        for name, definition in reversed(definitions):
            values[name] = _value(definition, values)
        return values

    def eliminate(self, geqs: Sequence[Row]) -> Optional[Dict[str, int]]:
        geqs = _tighten(geqs)
        if geqs is None:
            return None
        names = sorted({n for coefs, _ in geqs for n in coefs})
        if not names:
            return {}
        lows = {n: [r for r in geqs if r[0].get(n, 0) > 0] for n in names}
        ups = {n: [r for r in geqs if r[0].get(n, 0) < 0] for n in names}

        def exact(n: str) -> bool:
            return (all(r[0][n] == 1 for r in lows[n])
                    or all(r[0][n] == -1 for r in ups[n]))

        name = min(names, key=lambda n: (bool(lows[n]) and bool(ups[n]), not exact(n),
                                         len(lows[n]) * len(ups[n]), n))
        rest = [r for r in geqs if name not in r[0]]
        if not lows[name] or not ups[name]:
            return self._extend(name, geqs, self.eliminate(rest))
        real = _shadow(name, lows[name], ups[name], dark=False)
        if exact(name):
            return self._extend(name, geqs, self.eliminate(rest + real))

        values = self.eliminate(rest + _shadow(name, lows[name], ups[name], dark=True))
        if values is not None:
            return self._extend(name, geqs, values)
        if self.eliminate(rest + real) is None:
            return None
        logger.debug(f"Dark shadow of '{name}' is empty, trying splinters")
        b_max = max(-r[0][name] for r in ups[name])
        for coefs, const in lows[name]:
            a = coefs[name]
            for i in range((a * b_max - a - b_max) // b_max + 1):
                values = self.solve([(coefs, const - i)], geqs)
                if values is not None:
                    return values
        return None

    @staticmethod
    def _extend(name: str, geqs: Sequence[Row],
                values: Optional[Dict[str, int]]) -> Optional[Dict[str, int]]:
        if values is None:
            return None
        value = _pick(name, geqs, values)
        if value is None:
            return None
        values[name] = value
        return values


def _linear(names: Sequence[str], literals: Sequence[Literal]) -> SatResult:
    solver = Elimination()
    values = solver.decide(*_rows(literals))
    logger.debug(f"Elimination over {len(names)} symbol(s) took {solver.calls} step(s)")
    if values is None:
        return SatResult(UNSAT)
    witness = {n: values.get(n, 0) for n in names}
    if not all(l.holds(witness) for l in literals):
        logger.warning(f"Elimination witness {witness} violates the path condition, "
                       f"leaving it undecided")
        return SatResult(UNKNOWN)
    return SatResult(SAT, witness)


def check_sat(pc: Sequence[Literal], external_smt: Optional[str] = None,
              timeout: float = 10.0) -> SatResult:
    """
    Decide a path condition. A satisfiable answer carries a witness that
    assigns every symbol of the condition.
    """
    pc = list(pc)
    for lit in pc:
        if lit.constant and not OPS[lit.op](0, lit.rhs):
            return SatResult(UNSAT)
    literals = [l for l in pc if not l.constant]

    witness: Dict[str, int] = {}
    unknown = False
    for names, group in _clusters(literals):
        if not all(l.lhs.is_linear for l in group):
            unknown = True
            continue
        result = _single(names[0], group) if len(names) == 1 else _linear(names, group)
        if result.status == UNSAT:
            return result
        if result.status == UNKNOWN:
            unknown = True
            continue
        witness.update(result.witness)

    if not unknown:
        return SatResult(SAT, witness)
    if external_smt:
        return run_external(pc, external_smt, timeout)
    return SatResult(UNKNOWN)


# ---------------------------------------------------------------------------
# SMT-LIB2
# ---------------------------------------------------------------------------

def smt_name(symbol: str) -> str:
    """'A[3]' -> 'A_3'."""
    return re.sub(r"\[(\d+)\]", r"_\1", symbol)


def _smt_int(value: int) -> str:
    return str(value) if value >= 0 else f"(- {-value})"


def _smt_term(expr: SymExpr) -> str:
    parts = []
    for mono, coef in expr.terms:
        factors = [smt_name(a.name) for a in mono.factor]
        if coef != 1:
            factors.insert(0, _smt_int(coef))
        parts.append(factors[0] if len(factors) == 1 else f"(* {' '.join(factors)})")
    if not parts:
        return "0"
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


def export_smtlib(pc: Sequence[Literal]) -> str:
    """
    SMT-LIB2 script asserting every literal, followed by check-sat and
    get-model. The logic is QF_LIA, or QF_NIA once a literal multiplies
    symbols. An empty condition is just `(check-sat)`.
    """
    pc = list(pc)
    if not pc:
        return "(check-sat)\n"
    symbols = sorted({s for lit in pc for s in lit.symbols()})
    logic = "QF_LIA" if all(lit.lhs.is_linear for lit in pc) else "QF_NIA"
    lines = [f"(set-logic {logic})"]
    lines += [f"(declare-const {smt_name(s)} Int)" for s in symbols]
    for lit in pc:
        lhs, rhs = _smt_term(lit.lhs), _smt_int(lit.rhs)
        if lit.op == "!=":
            lines.append(f"(assert (not (= {lhs} {rhs})))")
        else:
            op = "=" if lit.op == "==" else lit.op
            lines.append(f"(assert ({op} {lhs} {rhs}))")
    lines.append("(check-sat)")
    if symbols:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


_DEFINE = re.compile(r"\(define-fun\s+(\S+)\s+\(\)\s+Int\s+(\(\s*-\s*\d+\s*\)|-?\d+)\s*\)")


def parse_model(text: str, symbols: Iterable[str]) -> Dict[str, int]:
    back = {smt_name(s): s for s in symbols}
    model = {}
    for name, raw in _DEFINE.findall(text):
        if name in back:
            model[back[name]] = int(raw.strip("()").replace(" ", ""))
    return model


def run_external(pc: Sequence[Literal], command: str, timeout: float = 10.0) -> SatResult:
    """Answer a query with an external solver reading SMT-LIB2 on stdin."""
    script = export_smtlib(pc)
    logger.debug(f"Calling external solver '{command}' on {len(pc)} literal(s)")
    try:
        result = subprocess.run(shlex.split(command), input=script, capture_output=True,
                                encoding="UTF-8", timeout=timeout)
    except (OSError, subprocess.TimeoutExpired) as e:
        raise ExternalSolverError(f"external solver '{command}' failed: {e}") from e
    lines = result.stdout.strip().splitlines()
    verdict = lines[0].strip() if lines else ""
    if verdict == UNSAT:
        return SatResult(UNSAT)
    if verdict == SAT:
        symbols = {s for lit in pc for s in lit.symbols()}
        model = parse_model(result.stdout, symbols)
        return SatResult(SAT, {s: model.get(s, 0) for s in sorted(symbols)})
    if verdict == UNKNOWN:
        return SatResult(UNKNOWN)
    raise ExternalSolverError(f"external solver answered {verdict!r}: {result.stderr.strip()}")
