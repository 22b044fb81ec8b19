#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# errors.py - Exception hierarchy shared by all loopnav phases

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
errors.py — Exceptions raised by loopnav
========================================
Everything the library raises derives from LoopNavError, so the command
line only needs a single except clause to turn failures into exit codes.
"""


class LoopNavError(Exception):
    """Base class of all loopnav errors."""


# ---------------------------------------------------------------------------
# Front end
# ---------------------------------------------------------------------------

class IRSyntaxError(LoopNavError):
    """
    Source text does not follow the LoopNav-IR grammar.

    Attributes
    ----------
    line, column : int
        1-based position of the offending token.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line   = line
        self.column = column


class MultipleTargets(LoopNavError):
    """More than one `target;` statement."""


class MissingTarget(LoopNavError):
    """No `target;` statement."""


class SemanticError(LoopNavError):
    """Undeclared names, writes to inputs or array writes."""


class UnreachableCode(LoopNavError):
    """A CFG vertex is unreachable from the start or cannot reach the terminal."""


class IrreducibleCfg(LoopNavError):
    """A back edge whose target does not dominate its source."""


class NormalizationUnsupported(LoopNavError):
    """An assignment pattern the renaming pass cannot bring into chain SSA form."""


# ---------------------------------------------------------------------------
# Chains and constraint systems
# ---------------------------------------------------------------------------

class ChainExplosion(LoopNavError):
    """Number of chains exceeds the configured cap."""


class AmbiguousReset(LoopNavError):
    """Two superchains claim to reset the same temporary counter."""


# ---------------------------------------------------------------------------
# Navigation
# ---------------------------------------------------------------------------

class UnsupportedLiteral(LoopNavError):
    """A literal outside the solver fragment, e.g. a symbolic array index."""


class BudgetExceeded(LoopNavError):
    """A navigation budget (states, counter value, wall time) ran out."""


class ValidationFailure(LoopNavError):
    """A reported witness does not drive the interpreter to the target."""


class ExternalSolverError(LoopNavError):
    """The configured external SMT solver failed or answered garbage."""
