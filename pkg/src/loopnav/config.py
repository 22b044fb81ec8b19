#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# config.py - Navigation budgets and solver settings

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
config.py — NavConfig
=====================
Budgets for the constraint-guided search and the knobs of the solvers.
Values come from the dataclass defaults, then from LOOPNAV_* environment
variables, then from command line flags.
"""

import os
import logging
from dataclasses import dataclass, replace, asdict
from typing import Optional

logger = logging.getLogger(__name__)

SEED_ORDERS = ("dfs", "reverse")


@dataclass(frozen=True)
class NavConfig:
    """
    Attributes
    ----------
    max_states : int
        Symbolic states visited before the search gives up.
    max_counter : int
        Largest value any single chain counter may reach.
    timeout_s : float
        Wall-clock budget of one navigation run.
    chain_cap : int
        Number of chains after which extraction raises ChainExplosion.
    step_limit : int
        Steps of the concrete interpreter.
    external_smt : str or None
        Shell command of an SMT-LIB2 solver reading a script on stdin.
    seed_order : str
        "dfs" tries roots and breaks ties by ascending chain id,
        "reverse" by descending id.
    """

    max_states:   int           = 100_000
    max_counter:  int           = 10_000
    timeout_s:    float         = 60.0
    chain_cap:    int           = 100_000
    step_limit:   int           = 1_000_000
    external_smt: Optional[str] = None
    seed_order:   str           = "dfs"

    def __post_init__(self):
        if self.seed_order not in SEED_ORDERS:
            raise ValueError(f"seed_order must be one of {SEED_ORDERS}, got '{self.seed_order}'")
        if self.max_states < 1 or self.max_counter < 1 or self.chain_cap < 1:
            raise ValueError("budgets must be positive")

    @classmethod
    def from_env(cls, environ=None) -> "NavConfig":
        """Defaults overridden by LOOPNAV_* variables."""
        env = os.environ if environ is None else environ
        values = {}
        for key, name, cast in (
            ("max_states",   "LOOPNAV_MAX_STATES",  int),
            ("max_counter",  "LOOPNAV_MAX_COUNTER", int),
            ("timeout_s",    "LOOPNAV_TIMEOUT_S",   float),
            ("external_smt", "LOOPNAV_SMT",         str),
        ):
            raw = env.get(name)
            if raw is None or raw == "":
                continue
            try:
                value = cast(raw)
                cls(**{key: value})
            except ValueError as e:
                logger.warning(f"Ignoring {name}={raw!r}: {e}")
                continue
            values[key] = value
        return cls(**values)

    def with_overrides(self, **overrides) -> "NavConfig":
        """Copy with every non-None override applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def as_dict(self) -> dict:
        return asdict(self)
