#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# bench.py - The three-phase pipeline, run reports and the benchmark corpus

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
bench.py — Pipeline and benchmark corpus
========================================
prepare() runs the first two phases on LoopNav-IR source text,
analyze_source() adds navigation and checks every witness with the
concrete interpreter before a report leaves this module.

CORPUS holds the nine benchmark programs shipped in loopnav/benchmarks/;
six of them reach their target and three do not.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Tuple

from . import BENCHMARK_DIR, get_resource
from .chain_form import ChainProgramForm, extract_chains
from .config import NavConfig
from .constraint_builder import ConstraintTable, build_all
from .errors import ValidationFailure
from .interpreter import RunStatus, concrete_interpret
from .ir_frontend import Program, build_cfg, normalize_assignments, parse_program
from .nav_executor import FeasiblePath, Infeasible, NavStats, Outcome, navigate

logger = logging.getLogger(__name__)

FEASIBLE, INFEASIBLE, INCONCLUSIVE = "feasible", "infeasible", "inconclusive"


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

@dataclass
class Prepared:
    """Phase one and two results for one program."""

    program: Program
    cpf:     ChainProgramForm
    table:   ConstraintTable
    stats:   NavStats


def prepare(source: str, config: Optional[NavConfig] = None) -> Prepared:
    """Parse, build chains and constraint systems, and prune roots."""
    config = config or NavConfig()
    stats = NavStats()

    started = time.perf_counter()
    program = parse_program(source)
    cfg = normalize_assignments(build_cfg(program))
    cpf = extract_chains(cfg, config.chain_cap)
    stats.time_chains = time.perf_counter() - started
    stats.chains_root = len(cpf.roots)
    stats.chains_all = len(cpf)

    started = time.perf_counter()
    table = build_all(cpf)
    stats.time_constraints = time.perf_counter() - started
    stats.elim = len(table.eliminated)
    stats.constraints = table.constraint_count(cpf.roots)
    return Prepared(program, cpf, table, stats)


@dataclass
class RunReport:
    """
    Attributes
    ----------
    name : str
    outcome : str
        'feasible', 'infeasible' or 'inconclusive'.
    stats : NavStats
    witness : dict or None
        Concrete inputs, present iff the outcome is feasible.
    pc : tuple of str
        Path condition literals of a feasible path.
    evidence : str or None
        Why a path is infeasible, or why the run gave up.
    expected : str or None
        Expected outcome of a benchmark case.
    """

    name:     str
    outcome:  str
    stats:    NavStats
    witness:  Optional[Dict[str, int]] = None
    pc:       Tuple[str, ...]          = ()
    evidence: Optional[str]            = None
    expected: Optional[str]            = None

    @property
    def matches_expected(self) -> bool:
        return self.expected is None or self.expected == self.outcome

    def to_dict(self) -> dict:
        return {
            "program":  self.name,
            "outcome":  self.outcome,
            "expected": self.expected,
            "evidence": self.evidence,
            "pc":       list(self.pc),
            "witness":  self.witness,
            "stats":    self.stats.as_dict(),
        }


def validate_witness(program: Program, outcome: FeasiblePath, step_limit: int = 1_000_000):
    """Raise ValidationFailure unless the witness drives the program to its target."""
    status = concrete_interpret(program, outcome.witness, step_limit)
    if status is not RunStatus.REACHED_TARGET:
        raise ValidationFailure(f"witness {outcome.witness} ends with '{status.value}' instead of the target")


def _report(name: str, outcome: Outcome) -> RunReport:
    if isinstance(outcome, FeasiblePath):
        return RunReport(name, FEASIBLE, outcome.stats, dict(sorted(outcome.witness.items())),
                         tuple(str(l) for l in outcome.pc))
    if isinstance(outcome, Infeasible):
        return RunReport(name, INFEASIBLE, outcome.stats, evidence=outcome.evidence)
    return RunReport(name, INCONCLUSIVE, outcome.stats, evidence=outcome.reason)


def analyze_source(source: str, config: Optional[NavConfig] = None, name: str = "<input>") -> RunReport:
    """All three phases; a feasible outcome is validated before it is reported."""
    config = config or NavConfig()
    prepared = prepare(source, config)
    outcome = navigate(prepared.cpf, prepared.table, config, prepared.stats)
    if isinstance(outcome, FeasiblePath):
        validate_witness(prepared.program, outcome, config.step_limit)
    report = _report(name, outcome)
    logger.info(f"{name}: {report.outcome} ({prepared.stats.sstat} states, "
                f"{prepared.stats.smt} path condition checks)")
    return report


def analyze_file(path, config: Optional[NavConfig] = None) -> RunReport:
    path = Path(path)
    return analyze_source(path.read_text(), config, name=path.name)


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchCase:
    """
    Attributes
    ----------
    name : str
    source : str
        File name under loopnav/benchmarks/.
    expected : str
        'feasible' or 'infeasible'.
    overrides : dict
        NavConfig fields changed for this case.
    """

    name:      str
    source:    str
    expected:  str
    overrides: Dict[str, object] = field(default_factory=dict)

    @property
    def path(self) -> str:
        return get_resource(os.path.join(BENCHMARK_DIR, self.source))

    def read(self) -> str:
        with open(self.path, "r") as f:
            return f.read()


CORPUS: Tuple[BenchCase, ...] = (
    BenchCase("Hello",    "hello.ln",    FEASIBLE),
    BenchCase("HW",       "hw.ln",       FEASIBLE),
    BenchCase("HWM",      "hwm.ln",      FEASIBLE),
    BenchCase("DOIF",     "doif.ln",     FEASIBLE),
    BenchCase("DOIFex",   "doifex.ln",   FEASIBLE),
    BenchCase("EQCNT",    "eqcnt.ln",    FEASIBLE),
    BenchCase("EQCNTex",  "eqcntex.ln",  INFEASIBLE),
    BenchCase("OneLoop",  "oneloop.ln",  INFEASIBLE),
    BenchCase("TwoLoops", "twoloops.ln", INFEASIBLE),
)


def select_cases(pattern: Optional[str] = None) -> Tuple[BenchCase, ...]:
    """Cases whose name contains pattern (case-insensitive), sorted by name."""
    cases = CORPUS if not pattern else tuple(c for c in CORPUS if pattern.lower() in c.name.lower())
    return tuple(sorted(cases, key=lambda c: c.name))


def run_case(case: BenchCase, config: Optional[NavConfig] = None) -> RunReport:
    """Run one corpus program through the pipeline."""
    config = (config or NavConfig()).with_overrides(**case.overrides)
    report = analyze_source(case.read(), config, name=case.name)
    report.expected = case.expected
    if not report.matches_expected:
        logger.warning(f"{case.name}: expected {case.expected}, got {report.outcome}")
    return report
