#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# workers.py - Background workers for benchmark runs

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
workers.py — Background workers for loopnav
===========================================
Benchmark cases are independent, so `bench` can run them side by side.
Each worker follows the same pattern:

    worker = BenchWorker(case, config, finished=on_report, error=on_error)
    pool.submit(worker.run)

run_workers() drives a list of cases on a thread pool and hands back the
reports and errors ordered by case name.

  BenchWorker  — runs one BenchCase through the full pipeline.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

from .bench import BenchCase, RunReport, run_case
from .config import NavConfig
from .errors import LoopNavError, ValidationFailure

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# BenchWorker
# ---------------------------------------------------------------------------

class BenchWorker:
    """
    Runs one benchmark case.

    Callbacks
    ---------
    finished(RunReport)
        Called on success with the validated report.
    error(str, Exception)
        Called on failure with the case name and the exception.
    """

    def __init__(self, case: BenchCase, config: NavConfig,
                 finished: Optional[Callable[[RunReport], None]] = None,
                 error: Optional[Callable[[str, Exception], None]] = None):
        self.case     = case
        self.config   = config
        self.finished = finished
        self.error    = error

    def run(self):
        """Entry point, called from a pool thread."""
        try:
            report = run_case(self.case, self.config)
            if self.finished is not None:
                self.finished(report)

        except ValidationFailure as vf:
            logger.error(f"{self.case.name}: witness failed validation: {vf}")
            if self.error is not None:
                self.error(self.case.name, vf)

        except LoopNavError as e:
            logger.error(f"{self.case.name}: {e}")
            if self.error is not None:
                self.error(self.case.name, e)

        except Exception as e:
            logger.error(f"{self.case.name}: unexpected error: {e}", exc_info=True)
            if self.error is not None:
                self.error(self.case.name, e)


def run_workers(cases: Sequence[BenchCase], config: NavConfig,
                workers: int = 1) -> Tuple[List[RunReport], List[Tuple[str, Exception]]]:
    """Run cases on `workers` threads; results are ordered by case name."""
    reports: List[RunReport] = []
    errors: List[Tuple[str, Exception]] = []
    lock = threading.Lock()

    def on_report(report):
        with lock:
            reports.append(report)

    def on_error(name, exc):
        with lock:
            errors.append((name, exc))

    jobs = [BenchWorker(case, config, finished=on_report, error=on_error) for case in cases]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for job in jobs:
            pool.submit(job.run)

    reports.sort(key=lambda r: r.name)
    errors.sort(key=lambda e: e[0])
    return reports, errors
