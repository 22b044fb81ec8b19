#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# interpreter.py - Concrete execution of LoopNav-IR programs and graphs

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
interpreter.py — Concrete interpreters
======================================
Two interpreters that must agree on every program:

  concrete_interpret  — big-step evaluation of the AST; the oracle every
                        reported witness is checked against
  run_cfg             — walks the control flow graph and records the
                        (vertex, label) trace that replay_trace maps onto
                        the chain program form

Inputs are keyed like witnesses: "n" for a scalar input, "A[3]" for an
array element. Missing inputs and out-of-range array reads are 0.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Tuple

from .ir_frontend import (
    FALSE, PLAIN, TRUE, And, ArrayRead, Assign, BinOp, Cfg, Compare, Decl, For,
    If, InputDecl, Neg, Num, Or, Program, Target, Var, VertexKind, While,
)
from .sym_expr import compare

logger = logging.getLogger(__name__)


class RunStatus(Enum):
    REACHED_TARGET = "reached-target"
    TERMINATED     = "terminated"
    STEP_LIMIT     = "step-limit"


class _Stop(Exception):
    def __init__(self, status: RunStatus):
        super().__init__(status.value)
        self.status = status


def _read(inputs: Mapping[str, int], array: str, length: int, index: int) -> int:
    if not 0 <= index < length:
        return 0
    return int(inputs.get(f"{array}[{index}]", 0))


class _Machine:
    """Store, step budget and expression evaluation shared by both walkers."""

    def __init__(self, arrays: Mapping[str, int], inputs: Mapping[str, int], step_limit: int):
        self.arrays     = dict(arrays)
        self.inputs     = dict(inputs)
        self.step_limit = step_limit
        self.steps      = 0
        self.store: Dict[str, int] = {}

    def tick(self):
        self.steps += 1
        if self.steps > self.step_limit:
            raise _Stop(RunStatus.STEP_LIMIT)

    def value(self, e) -> int:
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Var):
            return self.store.get(e.name, 0)
        if isinstance(e, ArrayRead):
            return _read(self.inputs, e.array, self.arrays[e.array], self.value(e.index))
        if isinstance(e, Neg):
            return -self.value(e.operand)
        left, right = self.value(e.left), self.value(e.right)
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        return left * right

    def holds(self, c) -> bool:
        if isinstance(c, Compare):
            return compare(self.value(c.left), c.op, self.value(c.right))
        if isinstance(c, And):
            return self.holds(c.left) and self.holds(c.right)
        if isinstance(c, Or):
            return self.holds(c.left) or self.holds(c.right)
        return not self.holds(c.operand)


# ---------------------------------------------------------------------------
# AST interpreter
# ---------------------------------------------------------------------------

def _execute(m: _Machine, body):
    for s in body:
        m.tick()
        if isinstance(s, InputDecl):
            if s.length is None:
                m.store[s.name] = int(m.inputs.get(s.name, 0))
        elif isinstance(s, Decl):
            m.store[s.name] = m.value(s.init)
        elif isinstance(s, Assign):
            m.store[s.name] = m.value(s.expr)
        elif isinstance(s, Target):
            raise _Stop(RunStatus.REACHED_TARGET)
        elif isinstance(s, If):
            _execute(m, s.then if m.holds(s.cond) else s.orelse)
        elif isinstance(s, While):
            while m.holds(s.cond):
                _execute(m, s.body)
                m.tick()
        elif isinstance(s, For):
            _execute(m, (s.init,))
            while m.holds(s.cond):
                _execute(m, s.body + (s.step,))
                m.tick()


def concrete_interpret(program: Program, inputs: Mapping[str, int],
                       step_limit: int = 1_000_000) -> RunStatus:
    """Run a program on concrete inputs until the target, the end or the step limit."""
    m = _Machine(program.arrays, inputs, step_limit)
    try:
        _execute(m, program.body)
    except _Stop as stop:
        return stop.status
    return RunStatus.TERMINATED


# ---------------------------------------------------------------------------
# Graph interpreter
# ---------------------------------------------------------------------------

@dataclass
class CfgRun:
    """
    Attributes
    ----------
    status : RunStatus
    trace : list of (vertex id, label)
        Assign and branch vertices in execution order.
    store : dict
        Final values of the scalars.
    """

    status: RunStatus
    trace:  List[Tuple[int, str]] = field(default_factory=list)
    store:  Dict[str, int]        = field(default_factory=dict)


def run_cfg(cfg: Cfg, inputs: Mapping[str, int], step_limit: int = 1_000_000) -> CfgRun:
    """Walk the graph from the start vertex on concrete inputs."""
    m = _Machine(cfg.arrays, inputs, step_limit)
    for name, var in cfg.variables.items():
        if var.kind == "input":
            m.store[name] = int(inputs.get(name, 0))
    run = CfgRun(RunStatus.TERMINATED, store=m.store)
    vid = cfg.start
    try:
        while True:
            vertex = cfg.vertex(vid)
            if vertex.kind is VertexKind.TARGET:
                run.status = RunStatus.REACHED_TARGET
                break
            if vertex.kind is VertexKind.TERMINAL:
                break
            m.tick()
            label = PLAIN
            if vertex.kind is VertexKind.ASSIGN:
                m.store[vertex.var] = m.value(vertex.expr)
            elif vertex.kind is VertexKind.BRANCH:
                label = TRUE if m.holds(vertex.cond) else FALSE
            if vertex.kind is not VertexKind.START:
                run.trace.append((vid, label))
            vid = next(w for key, w in cfg.successors(vid) if key == label)
    except _Stop as stop:
        run.status = stop.status
    return run
