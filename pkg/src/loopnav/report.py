#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# report.py - Benchmark summary tables and plots

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
report.py — Benchmark summaries
===============================
One astropy Table row per run report:

    test  expected  outcome  chains  elim  size  sstat  csol  smt  pc  time

`chains` is root/all, `csol` is initial/rest. The table prints as text,
writes to any astropy table format (ECSV by default) and plots as bars on
a log scale.
"""

import logging
from typing import Sequence

import numpy as np
from astropy.table import Table

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import RunReport

logger = logging.getLogger(__name__)

COLUMNS = ("test", "expected", "outcome", "chains", "elim", "size",
           "sstat", "csol", "smt", "pc", "time")


def summary_table(reports: Sequence[RunReport]) -> Table:
    """Performance table of a list of reports, in the given order."""
    rows = []
    for r in reports:
        s = r.stats
        total = s.time_chains + s.time_constraints + s.time_navigation
        rows.append((r.name, r.expected or "-", r.outcome,
                     f"{s.chains_root}/{s.chains_all}", s.elim, s.constraints,
                     s.sstat, f"{s.csol_initial} / {s.csol_rest}", s.smt, s.pc_len,
                     round(total, 3)))
    table = Table(rows=rows or None, names=COLUMNS,
                  dtype=(str, str, str, str, int, int, int, str, int, int, float))
    table["time"].unit = "s"
    table["time"].format = ".3f"
    return table


def format_table(table: Table) -> str:
    return "\n".join(table.pformat(max_lines=-1, max_width=-1))


def write_table(table: Table, path: str):
    """Write the table; the format follows the file extension, ECSV otherwise."""
    fmt = None if path.endswith((".ecsv", ".csv", ".fits", ".html", ".tex")) else "ascii.ecsv"
    table.write(path, format=fmt, overwrite=True)
    logger.info(f"Wrote summary of {len(table)} run(s) to {path}")


def plot_summary(reports: Sequence[RunReport], path: str):
    """Bar chart of states, solver calls and path condition length per run."""
    names = [r.name for r in reports]
    metrics = {
        "states":     np.array([r.stats.sstat for r in reports]),
        "csol":       np.array([r.stats.csol_initial + r.stats.csol_rest for r in reports]),
        "smt":        np.array([r.stats.smt for r in reports]),
        "pc literals": np.array([r.stats.pc_len for r in reports]),
    }
    x = np.arange(len(names))
    width = 0.8 / len(metrics)

    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(names)), 4))
    for n, (label, values) in enumerate(metrics.items()):
        # log axis: zero bars stay empty
        ax.bar(x + (n - 1.5) * width, np.maximum(values, 0.5), width, label=label)
    ax.set_yscale("log")
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("count")
    ax.legend(fontsize="small")
    ax.grid(True, axis="y", color="gray", linestyle="--", alpha=0.5)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    logger.info(f"Wrote plot to {path}")
