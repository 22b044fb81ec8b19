#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# ir_frontend.py - LoopNav-IR parser, control flow graph and assignment renaming

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
ir_frontend.py — From LoopNav-IR text to a control flow graph
=============================================================
LoopNav-IR is a small C-like language:

    input int A[15];          // read-only input array
    input int n;              // read-only scalar input
    int a = 0, b = 0;
    for (int i = 0; i < 15; ++i) { if (A[i] == 1) { ++a; } }
    while (a < n) { a = a + 2; }
    if (a > 12 && a + b == 23) { target; }

Three stages live here:

  parse_program          — pyparsing grammar producing an immutable AST
  build_cfg              — lowering to a networkx MultiDiGraph with one start,
                           one terminal and one target vertex; && and || are
                           decomposed into cascades of branch vertices
  normalize_assignments  — renames straight-line re-assignments so that every
                           chain assigns each variable at most once

format_program pretty-prints an AST back to source text.
"""

from __future__ import annotations

import logging
from collections import defaultdict, deque
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple, Union

import networkx as nx
from pyparsing import (
    Forward, Group, Keyword, Literal, MatchFirst, OpAssoc, Optional as Opt,
    ParseBaseException, ParseFatalException, ParserElement, StringEnd, Suppress,
    Word, ZeroOrMore, alphanums, alphas, cpp_style_comment, delimited_list,
    infix_notation, nums, one_of,
)

from .errors import (
    IRSyntaxError, IrreducibleCfg, MissingTarget, MultipleTargets,
    NormalizationUnsupported, SemanticError, UnreachableCode,
)
from .sym_expr import NEGATED

logger = logging.getLogger(__name__)

ParserElement.enable_packrat()


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class ArrayRead:
    array: str
    index: "Expr"


@dataclass(frozen=True)
class BinOp:
    op:    str
    left:  "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


Expr = Union[Num, Var, ArrayRead, BinOp, Neg]


@dataclass(frozen=True)
class Compare:
    op:    str
    left:  Expr
    right: Expr


@dataclass(frozen=True)
class And:
    left:  "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Or:
    left:  "Cond"
    right: "Cond"


@dataclass(frozen=True)
class Not:
    operand: "Cond"


Cond = Union[Compare, And, Or, Not]


@dataclass(frozen=True)
class Decl:
    name: str
    init: Expr


@dataclass(frozen=True)
class InputDecl:
    name:   str
    length: Optional[int] = None      # None for a scalar input


@dataclass(frozen=True)
class Assign:
    name: str
    expr: Expr


@dataclass(frozen=True)
class If:
    cond:   Cond
    then:   Tuple["Stmt", ...]
    orelse: Tuple["Stmt", ...] = ()


@dataclass(frozen=True)
class While:
    cond: Cond
    body: Tuple["Stmt", ...]


@dataclass(frozen=True)
class For:
    init: Union[Decl, Assign]
    cond: Cond
    step: Assign
    body: Tuple["Stmt", ...]


@dataclass(frozen=True)
class Target:
    pass


Stmt = Union[Decl, InputDecl, Assign, If, While, For, Target]


@dataclass(frozen=True)
class VarId:
    """A declared name. kind is 'scalar', 'input' (scalar input) or 'array'."""

    name:   str
    kind:   str           = "scalar"
    length: Optional[int] = None

    @property
    def is_input(self) -> bool:
        return self.kind in ("input", "array")


@dataclass(frozen=True)
class Program:
    body:      Tuple[Stmt, ...]
    variables: Tuple[VarId, ...]

    @property
    def scalars(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables if v.kind != "array")

    @property
    def arrays(self) -> Dict[str, int]:
        return {v.name: v.length for v in self.variables if v.kind == "array"}

    @property
    def inputs(self) -> Tuple[VarId, ...]:
        return tuple(v for v in self.variables if v.is_input)

    def loops(self) -> int:
        return sum(1 for s in walk_statements(self.body) if isinstance(s, (While, For)))

    def targets(self) -> int:
        return sum(1 for s in walk_statements(self.body) if isinstance(s, Target))


def walk_statements(body: Iterable[Stmt]):
    """Pre-order iteration over nested statements."""
    for stmt in body:
        yield stmt
        if isinstance(stmt, If):
            yield from walk_statements(stmt.then)
            yield from walk_statements(stmt.orelse)
        elif isinstance(stmt, While):
            yield from walk_statements(stmt.body)
        elif isinstance(stmt, For):
            yield stmt.init
            yield stmt.step
            yield from walk_statements(stmt.body)


def negate_compare(cond: Compare) -> Compare:
    return Compare(NEGATED[cond.op], cond.left, cond.right)


# ---------------------------------------------------------------------------
# Grammar
# ---------------------------------------------------------------------------

def _fold_binary(tokens):
    items = tokens[0]
    result = items[0]
    for i in range(1, len(items), 2):
        result = BinOp(items[i], result, items[i + 1])
    return result


def _unary_minus(tokens):
    operand = tokens[0][1]
    if isinstance(operand, Num):
        return Num(-operand.value)
    return Neg(operand)


def _fold_cond(kind):
    def action(tokens):
        items = tokens[0]
        result = items[0]
        for i in range(2, len(items), 2):
            result = kind(result, items[i])
        return result
    return action


def _reject_array_write(s, loc, tokens):
    raise ParseFatalException(s, loc, "array writes are not supported")


def _sugar(tokens):
    """x += e, x -= e, x *= e, ++x, x++, --x, x--."""
    if tokens[0] in ("++", "--"):
        name, op = tokens[1], tokens[0][0]
        return Assign(name, BinOp(op, Var(name), Num(1)))
    name, op = tokens[0], tokens[1]
    if op in ("++", "--"):
        return Assign(name, BinOp(op[0], Var(name), Num(1)))
    return Assign(name, BinOp(op[0], Var(name), tokens[2]))


def _build_grammar():
    LPAR, RPAR, LBRACE, RBRACE, LBRACK, RBRACK, SEMI = map(Suppress, "(){}[];")
    EQ = Suppress(Literal("=") + ~Literal("="))
    words = ("int", "input", "if", "else", "while", "for", "target")
    INT, INPUT, IF, ELSE, WHILE, FOR, TARGET = (Suppress(Keyword(w)) for w in words)
    keyword = MatchFirst(Keyword(w) for w in words)

    ident = ~keyword + Word(alphas + "_", alphanums + "_")
    integer = Word(nums)

    expr = Forward()
    number = integer.copy().set_parse_action(lambda t: Num(int(t[0])))
    array_read = (ident + LBRACK + expr + RBRACK).set_parse_action(lambda t: ArrayRead(t[0], t[1]))
    variable = ident.copy().set_parse_action(lambda t: Var(t[0]))
    operand = number | array_read | variable
    expr <<= infix_notation(operand, [
        (Literal("-"), 1, OpAssoc.RIGHT, _unary_minus),
        (Literal("*"), 2, OpAssoc.LEFT, _fold_binary),
        (one_of("+ -"), 2, OpAssoc.LEFT, _fold_binary),
    ])

    comparison = (expr + one_of("<= >= == != < >") + expr).set_parse_action(
        lambda t: Compare(t[1], t[0], t[2]))
    cond = infix_notation(comparison, [
        (Literal("!"), 1, OpAssoc.RIGHT, lambda t: Not(t[0][1])),
        (Literal("&&"), 2, OpAssoc.LEFT, _fold_cond(And)),
        (Literal("||"), 2, OpAssoc.LEFT, _fold_cond(Or)),
    ])

    array_write = (ident + LBRACK + expr + RBRACK + one_of("= += -= *=")).set_parse_action(
        _reject_array_write)
    compound = (ident + one_of("+= -= *=") + expr).set_parse_action(_sugar)
    incr = ((one_of("++ --") + ident) | (ident + one_of("++ --"))).set_parse_action(_sugar)
    plain = (ident + EQ + expr).set_parse_action(lambda t: Assign(t[0], t[1]))
    simple = array_write | compound | incr | plain

    stmt = Forward()
    block = LBRACE + Group(ZeroOrMore(stmt)) + RBRACE

    declarator = Group(ident + Opt(EQ + expr))
    decl = (INT + delimited_list(declarator) + SEMI).set_parse_action(
        lambda t: [Decl(d[0], d[1] if len(d) > 1 else Num(0)) for d in t])
    input_decl = (INPUT + INT + ident + Opt(LBRACK + integer + RBRACK) + SEMI).set_parse_action(
        lambda t: InputDecl(t[0], int(t[1]) if len(t) > 1 else None))

    if_stmt = Forward()
    if_stmt <<= (IF + LPAR + cond + RPAR + block + Opt(ELSE + (block | Group(if_stmt)))).set_parse_action(
        lambda t: If(t[0], tuple(t[1]), tuple(t[2]) if len(t) > 2 else ()))
    while_stmt = (WHILE + LPAR + cond + RPAR + block).set_parse_action(
        lambda t: While(t[0], tuple(t[1])))
    for_decl = (INT + ident + EQ + expr).set_parse_action(lambda t: Decl(t[0], t[1]))
    for_stmt = (FOR + LPAR + (for_decl | simple) + SEMI + cond + SEMI + simple + RPAR + block
                ).set_parse_action(lambda t: For(t[0], t[1], t[2], tuple(t[3])))
    target_stmt = (TARGET + SEMI).set_parse_action(lambda t: Target())
    assign_stmt = simple + SEMI

    stmt <<= decl | input_decl | if_stmt | while_stmt | for_stmt | target_stmt | assign_stmt
    program = ZeroOrMore(stmt) + StringEnd()
    program.ignore(cpp_style_comment)
    return program


_GRAMMAR = None


def _grammar():
    global _GRAMMAR
    if _GRAMMAR is None:
        _GRAMMAR = _build_grammar()
    return _GRAMMAR


# ---------------------------------------------------------------------------
# Parsing and validation
# ---------------------------------------------------------------------------

def parse_program(src: str) -> Program:
    """Parse LoopNav-IR source text into a validated Program."""
    try:
        tokens = _grammar().parse_string(src, parse_all=True)
    except ParseBaseException as e:
        raise IRSyntaxError(e.msg, e.lineno, e.col) from e

    body = tuple(tokens)
    targets = sum(1 for s in walk_statements(body) if isinstance(s, Target))
    if targets == 0:
        raise MissingTarget("program has no 'target;' statement")
    if targets > 1:
        raise MultipleTargets(f"program has {targets} 'target;' statements")

    variables = _validate(body)
    program = Program(body, tuple(variables.values()))
    logger.debug(f"Parsed program with {program.loops()} loops and {len(program.variables)} names")
    return program


def _validate(body: Tuple[Stmt, ...]) -> Dict[str, VarId]:
    """Declaration order checks; returns all names in declaration order."""
    names: Dict[str, VarId] = {}

    def check_expr(e: Expr):
        if isinstance(e, Var):
            known = names.get(e.name)
            if known is None:
                raise SemanticError(f"'{e.name}' used before declaration")
            if known.kind == "array":
                raise SemanticError(f"array '{e.name}' used without an index")
        elif isinstance(e, ArrayRead):
            known = names.get(e.array)
            if known is None or known.kind != "array":
                raise SemanticError(f"'{e.array}' is not a declared input array")
            check_expr(e.index)
        elif isinstance(e, BinOp):
            check_expr(e.left)
            check_expr(e.right)
        elif isinstance(e, Neg):
            check_expr(e.operand)

    def check_cond(c: Cond):
        if isinstance(c, Compare):
            check_expr(c.left)
            check_expr(c.right)
        elif isinstance(c, (And, Or)):
            check_cond(c.left)
            check_cond(c.right)
        else:
            check_cond(c.operand)

    def assign(name: str, e: Expr, declare: bool):
        check_expr(e)
        known = names.get(name)
        if known is not None and known.is_input:
            raise SemanticError(f"input '{name}' is read-only")
        if known is None:
            if not declare:
                raise SemanticError(f"'{name}' assigned before declaration")
            names[name] = VarId(name)

    def visit(stmts):
        for s in stmts:
            if isinstance(s, InputDecl):
                if s.name in names:
                    raise SemanticError(f"'{s.name}' declared twice")
                if s.length is not None and s.length < 1:
                    raise SemanticError(f"array '{s.name}' needs a positive length")
                names[s.name] = VarId(s.name, "input" if s.length is None else "array", s.length)
            elif isinstance(s, Decl):
                assign(s.name, s.init, declare=True)
            elif isinstance(s, Assign):
                assign(s.name, s.expr, declare=False)
            elif isinstance(s, If):
                check_cond(s.cond)
                visit(s.then)
                visit(s.orelse)
            elif isinstance(s, While):
                check_cond(s.cond)
                visit(s.body)
            elif isinstance(s, For):
                visit((s.init,))
                check_cond(s.cond)
                visit(s.body)
                visit((s.step,))

    visit(body)
    return names


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

def format_expr(e: Expr) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, ArrayRead):
        return f"{e.array}[{format_expr(e.index)}]"
    if isinstance(e, Neg):
        return f"-{format_expr(e.operand)}"
    return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"


def format_cond(c: Cond) -> str:
    if isinstance(c, Compare):
        return f"{format_expr(c.left)} {c.op} {format_expr(c.right)}"
    if isinstance(c, And):
        return f"({format_cond(c.left)} && {format_cond(c.right)})"
    if isinstance(c, Or):
        return f"({format_cond(c.left)} || {format_cond(c.right)})"
    return f"!({format_cond(c.operand)})"


def _format_simple(s: Union[Decl, Assign]) -> str:
    if isinstance(s, Decl):
        return f"int {s.name} = {format_expr(s.init)}"
    return f"{s.name} = {format_expr(s.expr)}"


def format_program(program: Program, indent: str = "    ") -> str:
    """Source text that parses back to the same Program."""
    lines: List[str] = []

    def emit(stmts, depth):
        pad = indent * depth
        for s in stmts:
            if isinstance(s, InputDecl):
                size = "" if s.length is None else f"[{s.length}]"
                lines.append(f"{pad}input int {s.name}{size};")
            elif isinstance(s, (Decl, Assign)):
                lines.append(f"{pad}{_format_simple(s)};")
            elif isinstance(s, Target):
                lines.append(f"{pad}target;")
            elif isinstance(s, If):
                lines.append(f"{pad}if ({format_cond(s.cond)}) {{")
                emit(s.then, depth + 1)
                if s.orelse:
                    lines.append(f"{pad}}} else {{")
                    emit(s.orelse, depth + 1)
                lines.append(f"{pad}}}")
            elif isinstance(s, While):
                lines.append(f"{pad}while ({format_cond(s.cond)}) {{")
                emit(s.body, depth + 1)
                lines.append(f"{pad}}}")
            elif isinstance(s, For):
                lines.append(f"{pad}for ({_format_simple(s.init)}; {format_cond(s.cond)}; "
                             f"{_format_simple(s.step)}) {{")
                emit(s.body, depth + 1)
                lines.append(f"{pad}}}")

    emit(program.body, 0)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Control flow graph
# ---------------------------------------------------------------------------

class VertexKind(Enum):
    START    = "start"
    TERMINAL = "terminal"
    ASSIGN   = "assign"
    BRANCH   = "branch"
    TARGET   = "target"


# Edge labels: the branch condition holds, fails, or the edge is unconditional.
TRUE, FALSE, PLAIN = "c", "!c", ""
_LABEL_ORDER = {TRUE: 0, FALSE: 1, PLAIN: 2}


@dataclass(frozen=True)
class Vertex:
    id:   int
    kind: VertexKind
    var:  Optional[str]     = None
    expr: Optional[Expr]    = None
    cond: Optional[Compare] = None

    def __str__(self):
        if self.kind is VertexKind.ASSIGN:
            return f"{self.var} = {format_expr(self.expr)}"
        if self.kind is VertexKind.BRANCH:
            return format_cond(self.cond)
        return self.kind.value


class Cfg:
    """
    Control flow graph.

    Parameters
    ----------
    graph : networkx.MultiDiGraph
        Vertex ids as nodes with a 'vertex' attribute; edges keyed by label.
    start, terminal, target : int
        Ids of the distinguished vertices.
    variables : dict
        name -> VarId for every scalar and input.
    """

    def __init__(self, graph: nx.MultiDiGraph, start: int, terminal: int, target: int,
                 variables: Dict[str, VarId]):
        self.graph     = graph
        self.start     = start
        self.terminal  = terminal
        self.target    = target
        self.variables = dict(variables)

    def vertex(self, vid: int) -> Vertex:
        return self.graph.nodes[vid]["vertex"]

    def vertices(self) -> List[Vertex]:
        return [self.vertex(v) for v in sorted(self.graph.nodes)]

    def successors(self, vid: int) -> List[Tuple[str, int]]:
        """(label, successor) pairs, the 'c' edge first."""
        out = [(key, w) for _, w, key in self.graph.out_edges(vid, keys=True)]
        return sorted(out, key=lambda lw: (_LABEL_ORDER[lw[0]], lw[1]))

    @property
    def scalars(self) -> Tuple[str, ...]:
        return tuple(n for n, v in self.variables.items() if v.kind != "array")

    @property
    def arrays(self) -> Dict[str, int]:
        return {n: v.length for n, v in self.variables.items() if v.kind == "array"}

    def branch_vertices(self) -> List[Vertex]:
        return [v for v in self.vertices() if v.kind is VertexKind.BRANCH]

    def dominators(self) -> Dict[int, int]:
        return nx.immediate_dominators(nx.DiGraph(self.graph), self.start)

    def dominates(self, a: int, b: int, idom: Optional[Dict[int, int]] = None) -> bool:
        idom = self.dominators() if idom is None else idom
        while True:
            if b == a:
                return True
            parent = idom.get(b)
            if parent is None or parent == b:
                return False
            b = parent

    def back_edges(self) -> List[Tuple[int, int, str]]:
        """Edges whose target dominates their source."""
        idom = self.dominators()
        return [(u, v, k) for u, v, k in self.graph.edges(keys=True)
                if self.dominates(v, u, idom)]

    def check_reducible(self):
        """Raise IrreducibleCfg if some cycle is entered other than through its header."""
        idom = self.dominators()
        state: Dict[int, int] = {}
        stack = [(self.start, iter(self.successors(self.start)))]
        state[self.start] = 1
        while stack:
            u, edges = stack[-1]
            for _, w in edges:
                if state.get(w) == 1 and not self.dominates(w, u, idom):
                    raise IrreducibleCfg(f"retreating edge {u} -> {w} does not target a loop header")
                if w not in state:
                    state[w] = 1
                    stack.append((w, iter(self.successors(w))))
                    break
            else:
                state[u] = 2
                stack.pop()

    def summary(self) -> str:
        return (f"{self.graph.number_of_nodes()} vertices, {self.graph.number_of_edges()} edges, "
                f"{len(self.back_edges())} back edges")


class _Lowering:
    """Builds the graph statement by statement, threading dangling exits."""

    def __init__(self):
        self.graph = nx.MultiDiGraph()
        self.next_id = 0
        self.target = None

    def new_vertex(self, kind: VertexKind, **fields) -> int:
        vid = self.next_id
        self.next_id += 1
        self.graph.add_node(vid, vertex=Vertex(vid, kind, **fields))
        if kind is VertexKind.TARGET:
            self.target = vid
        return vid

    def connect(self, exits, vid):
        for u, label in exits:
            self.graph.add_edge(u, vid, key=label, label=label)

    def block(self, stmts, exits):
        for s in stmts:
            exits = self.stmt(s, exits)
        return exits

    def stmt(self, s, exits):
        if isinstance(s, InputDecl):
            return exits
        if isinstance(s, Decl):
            return self._assign(s.name, s.init, exits)
        if isinstance(s, Assign):
            return self._assign(s.name, s.expr, exits)
        if isinstance(s, Target):
            v = self.new_vertex(VertexKind.TARGET)
            self.connect(exits, v)
            return [(v, PLAIN)]
        if isinstance(s, If):
            yes, no = self.cond(s.cond, exits)
            return self.block(s.then, yes) + self.block(s.orelse, no)
        if isinstance(s, While):
            return self._loop(s.cond, s.body, exits)
        if isinstance(s, For):
            exits = self.stmt(s.init, exits)
            return self._loop(s.cond, s.body + (s.step,), exits)
        raise TypeError(f"unknown statement {s!r}")

    def _assign(self, name, expr, exits):
        v = self.new_vertex(VertexKind.ASSIGN, var=name, expr=expr)
        self.connect(exits, v)
        return [(v, PLAIN)]

    def _loop(self, cond, body, exits):
        header = self.next_id
        yes, no = self.cond(cond, exits)
        self.connect(self.block(body, yes), header)
        return no

    def cond(self, c, exits):
        """(exits where c holds, exits where c fails)."""
        if isinstance(c, Compare):
            v = self.new_vertex(VertexKind.BRANCH, cond=c)
            self.connect(exits, v)
            return [(v, TRUE)], [(v, FALSE)]
        if isinstance(c, And):
            yes, no = self.cond(c.left, exits)
            yes2, no2 = self.cond(c.right, yes)
            return yes2, no + no2
        if isinstance(c, Or):
            yes, no = self.cond(c.left, exits)
            yes2, no2 = self.cond(c.right, no)
            return yes + yes2, no2
        yes, no = self.cond(c.operand, exits)
        return no, yes


def build_cfg(program: Program) -> Cfg:
    """Lower a Program to its control flow graph."""
    lowering = _Lowering()
    start = lowering.new_vertex(VertexKind.START)
    exits = lowering.block(program.body, [(start, PLAIN)])
    terminal = lowering.new_vertex(VertexKind.TERMINAL)
    lowering.connect(exits, terminal)

    cfg = Cfg(lowering.graph, start, terminal, lowering.target,
              {v.name: v for v in program.variables})
    _check_reachability(cfg)
    logger.debug(f"CFG: {cfg.summary()}")
    return cfg


def _check_reachability(cfg: Cfg):
    graph = cfg.graph
    forward = nx.descendants(graph, cfg.start) | {cfg.start}
    backward = nx.ancestors(graph, cfg.terminal) | {cfg.terminal}
    bad = sorted((set(graph.nodes) - forward) | (set(graph.nodes) - backward))
    if bad:
        raise UnreachableCode(f"vertices {bad} are not on any start-to-terminal path")
    if cfg.target is None:
        raise UnreachableCode("graph has no target vertex")


# ---------------------------------------------------------------------------
# Assignment renaming
# ---------------------------------------------------------------------------

def expr_reads(e: Expr) -> set:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, ArrayRead):
        return expr_reads(e.index)
    if isinstance(e, BinOp):
        return expr_reads(e.left) | expr_reads(e.right)
    if isinstance(e, Neg):
        return expr_reads(e.operand)
    return set()


def vertex_reads(v: Vertex) -> set:
    if v.kind is VertexKind.ASSIGN:
        return expr_reads(v.expr)
    if v.kind is VertexKind.BRANCH:
        return expr_reads(v.cond.left) | expr_reads(v.cond.right)
    return set()


def _rename_expr(e: Expr, old: str, new: str) -> Expr:
    if isinstance(e, Var):
        return Var(new) if e.name == old else e
    if isinstance(e, ArrayRead):
        return ArrayRead(e.array, _rename_expr(e.index, old, new))
    if isinstance(e, BinOp):
        return BinOp(e.op, _rename_expr(e.left, old, new), _rename_expr(e.right, old, new))
    if isinstance(e, Neg):
        return Neg(_rename_expr(e.operand, old, new))
    return e


def _rename_vertex(v: Vertex, old: str, new: str) -> Vertex:
    if v.kind is VertexKind.ASSIGN:
        return replace(v, var=new if v.var == old else v.var, expr=_rename_expr(v.expr, old, new))
    if v.kind is VertexKind.BRANCH:
        c = v.cond
        return replace(v, cond=Compare(c.op, _rename_expr(c.left, old, new), _rename_expr(c.right, old, new)))
    return v


def natural_loops(cfg: Cfg) -> Dict[int, set]:
    """Loop header -> vertices of its natural loop (header included)."""
    loops: Dict[int, set] = defaultdict(set)
    for u, header, _ in cfg.back_edges():
        body = {header}
        work = deque([u])
        while work:
            x = work.popleft()
            if x in body:
                continue
            body.add(x)
            work.extend(cfg.graph.predecessors(x))
        loops[header] |= body
    return dict(loops)


def normalize_assignments(cfg: Cfg) -> Cfg:
    """
    Rename re-assignments in loop-free code so that each chain assigns every
    variable at most once. Raises NormalizationUnsupported for a loop body
    path that assigns a variable twice where the second assignment reads it.
    """
    loops = natural_loops(cfg)
    innermost: Dict[int, Optional[int]] = {}
    for vid in cfg.graph.nodes:
        owners = [h for h, body in loops.items() if vid in body]
        innermost[vid] = min(owners, key=lambda h: len(loops[h])) if owners else None

    vertices = {v.id: v for v in cfg.vertices()}
    assigns = [v for v in vertices.values() if v.kind is VertexKind.ASSIGN]

    # loop-carried double assignment
    for header, body in loops.items():
        inside = nx.MultiDiGraph(cfg.graph.subgraph(body - {header}))
        local = [v for v in assigns if innermost[v.id] == header]
        for first in local:
            reach = nx.descendants(inside, first.id) if first.id in inside else set()
            for second in local:
                if second.id in reach and second.var == first.var and first.var in expr_reads(second.expr):
                    raise NormalizationUnsupported(
                        f"'{first.var}' is assigned twice on one path through the loop at vertex "
                        f"{header} and the second assignment reads the first")

    idom = cfg.dominators()
    dag = nx.DiGraph(cfg.graph)
    dag.remove_edges_from([(u, v) for u, v, _ in cfg.back_edges()])
    order = list(nx.lexicographical_topological_sort(dag))
    reach_all = {vid: nx.descendants(cfg.graph, vid) for vid in cfg.graph.nodes}
    reach_dag = {vid: nx.descendants(dag, vid) for vid in dag.nodes}

    variables = dict(cfg.variables)
    versions: Dict[str, int] = defaultdict(lambda: 1)
    renamed = 0
    for vid in order:
        vertex = vertices[vid]
        if vertex.kind is not VertexKind.ASSIGN or innermost[vid] is not None:
            continue
        name = vertex.var
        earlier = [u for u, v in vertices.items()
                   if u != vid and v.kind is VertexKind.ASSIGN and v.var == name
                   and innermost[u] is None and vid in reach_dag[u]]
        if not earlier:
            continue
        readers = [r for r in reach_all[vid] if r != vid
                   and (name in vertex_reads(vertices[r])
                        or (vertices[r].kind is VertexKind.ASSIGN and vertices[r].var == name))]
        if not all(cfg.dominates(vid, r, idom) for r in readers):
            logger.debug(f"Cannot rename '{name}' at vertex {vid}: a later use is not dominated by it")
            continue
        versions[name] += 1
        fresh = f"{name}_{versions[name]}"
        while fresh in variables:
            versions[name] += 1
            fresh = f"{name}_{versions[name]}"
        vertices[vid] = replace(vertex, var=fresh)
        for r in readers:
            vertices[r] = _rename_vertex(vertices[r], name, fresh)
        variables[fresh] = VarId(fresh)
        renamed += 1

    graph = cfg.graph.copy()
    for vid, vertex in vertices.items():
        graph.nodes[vid]["vertex"] = vertex
    if renamed:
        logger.info(f"Renamed {renamed} assignment(s) for single assignment per chain")
    return Cfg(graph, cfg.start, cfg.terminal, cfg.target, variables)
