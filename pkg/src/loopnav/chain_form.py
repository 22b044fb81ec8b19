#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# chain_form.py - Chain program form: root chains, subchains and loop nodes

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
chain_form.py — Chain program form
==================================
The control flow graph is unfolded from the start vertex. Every simple path
that reaches the target vertex becomes a root chain. Every time the current
path runs back into one of its own vertices v, the part of the path from v
onwards is a subchain: one trip around the loop headed by v, in the context
of the path prefix that led to v.

Chains are sequences of nodes:

  Assume     — a branch vertex together with the direction taken
  Transform  — an assignment
  Loop       — a loop header in a chain that also has subchains for it; the
               node carries the direction the chain takes at the header and
               the ids of the subchains that may run before it

A subchain is bound to exactly one loop node. When two chains share the
prefix up to a loop header, each gets its own copies of the subchains, so
that counters of different parents never alias.

Ids: root chains first in discovery order (the 'c' edge is explored before
'!c'), then subchains breadth-first as loop nodes are bound.
"""

from __future__ import annotations

import logging
from collections import Counter as Tally
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .errors import ChainExplosion, IrreducibleCfg
from .ir_frontend import (
    PLAIN, TRUE, Cfg, Compare, Expr, VertexKind, format_cond, format_expr,
    negate_compare,
)

logger = logging.getLogger(__name__)

Step = Tuple[int, str]          # (vertex id, label of the edge taken out of it)


class NodeKind(Enum):
    ASSUME    = "assume"
    TRANSFORM = "transform"
    LOOP      = "loop"


@dataclass(frozen=True)
class ChainNode:
    """
    One node of a chain.

    Attributes
    ----------
    kind : NodeKind
    source_vertex : int
        CFG vertex the node was made from.
    label : str
        Edge label taken out of the vertex ('c', '!c' or '').
    var, expr
        Assigned variable and right-hand side of a Transform node.
    cond : Compare or None
        Condition of an Assume or Loop node, oriented along the label.
    subchains : tuple of int
        Ids of the subchains bound to a Loop node.
    exits_loop : bool
        The Loop node's direction is one no subchain starts with, i.e. it
        leaves the loop.
    """

    kind:          NodeKind
    source_vertex: int
    label:         str               = PLAIN
    var:           Optional[str]     = None
    expr:          Optional[Expr]    = None
    cond:          Optional[Compare] = None
    subchains:     Tuple[int, ...]   = ()
    exits_loop:    bool              = False

    @property
    def step(self) -> Step:
        return (self.source_vertex, self.label)

    def __str__(self):
        if self.kind is NodeKind.TRANSFORM:
            return f"{self.var} = {format_expr(self.expr)}"
        if self.kind is NodeKind.ASSUME:
            return format_cond(self.cond)
        subs = ", ".join(f"c{s}" for s in self.subchains)
        return f"loop {format_cond(self.cond)} : {{{subs}}}"


@dataclass(frozen=True)
class Chain:
    """
    Attributes
    ----------
    id : int
    kind : str
        'root' or 'sub'.
    nodes : tuple of ChainNode
    steps : tuple of Step
        Underlying CFG path; a root starts at the start vertex and ends at the
        target vertex, a subchain starts at its loop header.
    context : tuple of Step
        Path prefix leading to the loop header of a subchain; empty for roots.
    parent : (chain id, node index) or None
        The loop node the subchain is bound to.
    """

    id:      int
    kind:    str
    nodes:   Tuple[ChainNode, ...]
    steps:   Tuple[Step, ...]
    context: Tuple[Step, ...]              = ()
    parent:  Optional[Tuple[int, int]]     = None

    @property
    def is_root(self) -> bool:
        return self.kind == "root"

    @property
    def entry_vertex(self) -> int:
        return self.steps[0][0]

    @property
    def parent_loop_nodes(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset() if self.parent is None else frozenset({self.parent})

    def loop_nodes(self) -> List[Tuple[int, ChainNode]]:
        return [(i, n) for i, n in enumerate(self.nodes) if n.kind is NodeKind.LOOP]

    def instructions(self) -> Tuple[Step, ...]:
        return tuple(n.step for n in self.nodes)


class ChainProgramForm:
    """
    All chains of a program.

    Parameters
    ----------
    chains : sequence of Chain
        Indexed by id.
    roots : tuple of int
    cfg : Cfg
        Graph the chains were extracted from.
    """

    def __init__(self, chains: Sequence[Chain], roots: Tuple[int, ...], cfg: Cfg):
        self.chains = tuple(chains)
        self.roots  = tuple(roots)
        self.cfg    = cfg
        self._subtree_cache: Dict[int, FrozenSet[int]] = {}

    def __len__(self):
        return len(self.chains)

    def __iter__(self):
        return iter(self.chains)

    def chain(self, cid: int) -> Chain:
        return self.chains[cid]

    @property
    def subchain_ids(self) -> Tuple[int, ...]:
        return tuple(c.id for c in self.chains if not c.is_root)

    def children(self, cid: int) -> Tuple[int, ...]:
        """Subchains bound to the loop nodes of a chain."""
        return tuple(s for _, node in self.chain(cid).loop_nodes() for s in node.subchains)

    def subtree(self, cid: int) -> FrozenSet[int]:
        """The chain and every chain nested below it."""
        cached = self._subtree_cache.get(cid)
        if cached is None:
            found = {cid}
            work = list(self.children(cid))
            while work:
                sub = work.pop()
                if sub not in found:
                    found.add(sub)
                    work.extend(self.children(sub))
            cached = self._subtree_cache[cid] = frozenset(found)
        return cached

    def root_of(self, cid: int) -> int:
        while self.chain(cid).parent is not None:
            cid = self.chain(cid).parent[0]
        return cid

    def render(self) -> str:
        """Listing in the 'c0: ... / c1: ...' style."""
        lines = []
        for chain in self.chains:
            if chain.is_root:
                head = f"c{chain.id} (root)"
            else:
                owner, index = chain.parent
                head = f"c{chain.id} (sub of c{owner}, node {index})"
            lines.append(f"{head}:")
            for i, node in enumerate(chain.nodes):
                lines.append(f"  [{i}] {node}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "roots": list(self.roots),
            "chains": [
                {
                    "id": chain.id,
                    "kind": chain.kind,
                    "entry_vertex": chain.entry_vertex,
                    "parent": None if chain.parent is None else list(chain.parent),
                    "nodes": [
                        {
                            "kind": node.kind.value,
                            "vertex": node.source_vertex,
                            "text": str(node),
                            "subchains": list(node.subchains),
                            "exits_loop": node.exits_loop,
                        }
                        for node in chain.nodes
                    ],
                }
                for chain in self.chains
            ],
        }


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

def _unfold(cfg: Cfg, chain_cap: int):
    """
    Depth-first unfolding of the graph from the start vertex.

    Returns the root paths and, per (prefix, header) key, the loop-closing
    path suffixes found in that context.
    """
    roots: List[Tuple[Step, ...]] = []
    loops: Dict[Tuple[Tuple[Step, ...], int], List[Tuple[Step, ...]]] = {}
    found = 0

    path = [cfg.start]
    labels: List[str] = []
    on_path = {cfg.start: 0}
    stack: List[Iterator[Tuple[str, int]]] = [iter(cfg.successors(cfg.start))]

    while stack:
        try:
            label, w = next(stack[-1])
        except StopIteration:
            stack.pop()
            del on_path[path.pop()]
            if labels:
                labels.pop()
            continue

        steps = tuple(zip(path, labels + [label]))
        if w == cfg.target:
            roots.append(steps + ((cfg.target, PLAIN),))
            found += 1
        elif w == cfg.terminal:
            continue
        elif w in on_path:
            if cfg.vertex(w).kind is not VertexKind.BRANCH:
                raise IrreducibleCfg(f"cycle closes at vertex {w}, which is not a loop condition")
            k = on_path[w]
            loops.setdefault((steps[:k], w), []).append(steps[k:])
            found += 1
        else:
            labels.append(label)
            on_path[w] = len(path)
            path.append(w)
            stack.append(iter(cfg.successors(w)))
            continue

        if found > chain_cap:
            raise ChainExplosion(f"more than {chain_cap} chains while unfolding the graph")
    return roots, loops


def _node(cfg: Cfg, step: Step, subchains: Tuple[int, ...] = (), exits_loop: bool = False) -> ChainNode:
    vid, label = step
    vertex = cfg.vertex(vid)
    if vertex.kind is VertexKind.ASSIGN:
        return ChainNode(NodeKind.TRANSFORM, vid, label, var=vertex.var, expr=vertex.expr)
    cond = vertex.cond if label == TRUE else negate_compare(vertex.cond)
    kind = NodeKind.LOOP if subchains else NodeKind.ASSUME
    return ChainNode(kind, vid, label, cond=cond, subchains=subchains, exits_loop=exits_loop)


def extract_chains(cfg: Cfg, chain_cap: int = 100_000) -> ChainProgramForm:
    """
    Unfold a normalized CFG into its chain program form.

    Raises IrreducibleCfg when a cycle is not entered through a single loop
    condition and ChainExplosion once more than chain_cap chains exist.
    """
    cfg.check_reducible()
    root_paths, loops = _unfold(cfg, chain_cap)

    # (id, kind, steps, context, parent)
    pending = [(cid, "root", steps, (), None) for cid, steps in enumerate(root_paths)]
    next_id = len(pending)
    chains: List[Chain] = []
    head = 0
    while head < len(pending):
        cid, kind, steps, context, parent = pending[head]
        head += 1
        full = context + steps
        nodes = []
        for j, step in enumerate(steps):
            vertex = cfg.vertex(step[0])
            if vertex.kind in (VertexKind.START, VertexKind.TARGET):
                continue
            bodies = loops.get((full[:len(context) + j], step[0])) if (kind == "root" or j > 0) else None
            if not bodies:
                nodes.append(_node(cfg, step))
                continue
            ids = tuple(range(next_id, next_id + len(bodies)))
            next_id += len(bodies)
            if next_id > chain_cap:
                raise ChainExplosion(f"more than {chain_cap} chains while binding subchains")
            for sub, body in zip(ids, bodies):
                pending.append((sub, "sub", body, full[:len(context) + j], (cid, len(nodes))))
            leaves = all(body[0][1] != step[1] for body in bodies)
            nodes.append(_node(cfg, step, ids, exits_loop=leaves))
        chains.append(Chain(cid, kind, tuple(nodes), steps, context, parent))

    cpf = ChainProgramForm(chains, tuple(range(len(root_paths))), cfg)
    logger.info(f"Chain form: {len(cpf.roots)} root chain(s), {len(cpf.subchain_ids)} subchain(s)")
    return cpf


# ---------------------------------------------------------------------------
# Checks and oracles
# ---------------------------------------------------------------------------

def check_single_assignment(cpf: ChainProgramForm) -> List[Tuple[int, str]]:
    """(chain id, variable) for every variable assigned more than once by one chain."""
    violations = []
    for chain in cpf:
        tally = Tally(n.var for n in chain.nodes if n.kind is NodeKind.TRANSFORM)
        violations.extend((chain.id, var) for var, count in sorted(tally.items()) if count > 1)
    if violations:
        logger.warning(f"{len(violations)} single assignment violation(s): {violations}")
    return violations


def enumerate_execution_paths(cpf: ChainProgramForm, budget: int) -> List[Tuple[Step, ...]]:
    """
    Instruction sequences of every execution path with at most `budget`
    instructions. A loop node runs any sequence of its subchains and then
    its own instruction. Duplicates are kept.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")

    def chain_runs(cid: int, budget: int) -> Iterator[Tuple[Step, ...]]:
        nodes = cpf.chain(cid).nodes

        def rest(index: int, budget: int):
            if index == len(nodes):
                yield ()
                return
            for head in node_runs(nodes[index], budget):
                for tail in rest(index + 1, budget - len(head)):
                    yield head + tail

        yield from rest(0, budget)

    def node_runs(node: ChainNode, budget: int) -> Iterator[Tuple[Step, ...]]:
        if budget < 1:
            return
        if node.kind is not NodeKind.LOOP:
            yield (node.step,)
            return
        yield (node.step,)
        for sub in node.subchains:
            for run in chain_runs(sub, budget - 1):
                for more in node_runs(node, budget - len(run)):
                    yield run + more

    paths = []
    for root in cpf.roots:
        paths.extend(chain_runs(root, budget))
    return paths


@dataclass(frozen=True)
class ChainTrace:
    """
    A concrete run mapped onto the chain program form.

    events holds ('enter', id) and ('finish', id) pairs in execution order.
    """

    root:   int
    events: Tuple[Tuple[str, int], ...]

    def completions(self) -> Dict[int, int]:
        return dict(Tally(cid for what, cid in self.events if what == "finish"))

    def counter_values(self, counters) -> Dict[object, int]:
        """Value of every counter (update, reset) at the end of the run."""
        values = {k: 0 for k in counters}
        for what, cid in self.events:
            for k in counters:
                if what == "enter" and k.reset == cid:
                    values[k] = 0
                elif what == "finish" and k.update == cid:
                    values[k] += 1
        return values


def replay_trace(cpf: ChainProgramForm, trace: Sequence[Step]) -> Optional[ChainTrace]:
    """
    Parse a CFG trace (assign and branch steps up to the target) into the
    chain execution it corresponds to; None if no root chain matches.
    """
    trace = tuple(trace)

    def run_chain(cid: int, pos: int, events: tuple):
        events = events + (("enter", cid),)
        yield from run_nodes(cid, 0, pos, events)

    def run_nodes(cid: int, index: int, pos: int, events: tuple):
        nodes = cpf.chain(cid).nodes
        if index == len(nodes):
            yield pos, events
            return
        node = nodes[index]
        if node.kind is NodeKind.LOOP:
            for sub in node.subchains:
                if pos < len(trace) and trace[pos] == cpf.chain(sub).nodes[0].step:
                    for end, evs in run_chain(sub, pos, events):
                        yield from run_nodes(cid, index, end, evs + (("finish", sub),))
        if pos < len(trace) and trace[pos] == node.step:
            yield from run_nodes(cid, index + 1, pos + 1, events)

    for root in cpf.roots:
        for end, events in run_chain(root, 0, ()):
            if end == len(trace):
                return ChainTrace(root, events)
    return None
