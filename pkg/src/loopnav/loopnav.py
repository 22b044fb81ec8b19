#!/usr/bin/env python3
# -*- coding: utf-8 -*-

# loopnav.py - Command line front end of the loop-navigating symbolic executor

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

import sys
import json
import logging
import argparse
from importlib.metadata import version, PackageNotFoundError

from . import resolve_program
from .bench import FEASIBLE, INFEASIBLE, analyze_file, prepare, select_cases
from .config import SEED_ORDERS, NavConfig
from .errors import LoopNavError, ValidationFailure
from .report import format_table, plot_summary, summary_table, write_table
from .workers import run_workers

# Set up basic logging to terminal
logging.basicConfig(level=logging.INFO, format='%(levelname)s: %(message)s')
logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INCONCLUSIVE, EXIT_ERROR, EXIT_VALIDATION = 0, 1, 2, 3


def build_parser(current_version: str) -> argparse.ArgumentParser:
    # Flags accepted before and after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--debug', action='store_true', default=argparse.SUPPRESS,
                        help="Enable verbose logging")
    common.add_argument('--json', action='store_true', default=argparse.SUPPRESS,
                        help="Print machine readable output")
    common.add_argument('--max-states', type=int, default=argparse.SUPPRESS,
                        help="Symbolic states before giving up")
    common.add_argument('--max-counter', type=int, default=argparse.SUPPRESS,
                        help="Largest value of a single chain counter")
    common.add_argument('--timeout-s', type=float, default=argparse.SUPPRESS,
                        help="Wall-clock budget of one navigation run")
    common.add_argument('--external-smt', metavar='CMD', default=argparse.SUPPRESS,
                        help="SMT-LIB2 solver command for undecided path conditions")
    common.add_argument('--seed-order', choices=SEED_ORDERS, default=argparse.SUPPRESS,
                        help="Order of roots and tie-breaks by chain id")

    parser = argparse.ArgumentParser(prog="loopnav", parents=[common],
                                     description="loopnav: loop-navigating symbolic execution")
    parser.add_argument('-v', '--version', action='version', version=f'%(prog)s {current_version}')
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("analyze", "Run all phases and report the outcome"),
                       ("prove", "Succeed iff the target is proven unreachable"),
                       ("dump-chains", "Print the chain program form"),
                       ("dump-constraints", "Print the constraint systems")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('file', help="LoopNav-IR source, or the name of a shipped benchmark")

    p = sub.add_parser("bench", parents=[common], help="Run the benchmark corpus")
    p.add_argument('--filter', metavar='NAME', help="Only cases whose name contains NAME")
    p.add_argument('--output', metavar='FILE', help="Write the summary table (ECSV unless the extension says otherwise)")
    p.add_argument('--plot', metavar='FILE', help="Save a bar chart of the run metrics")
    p.add_argument('--workers', type=int, default=1, help="Cases run in parallel")
    return parser


def make_config(args) -> NavConfig:
    """Environment first, then command line flags."""
    return NavConfig.from_env().with_overrides(
        max_states=getattr(args, "max_states", None),
        max_counter=getattr(args, "max_counter", None),
        timeout_s=getattr(args, "timeout_s", None),
        external_smt=getattr(args, "external_smt", None),
        seed_order=getattr(args, "seed_order", None),
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _print_report(report, as_json: bool, config: NavConfig):
    if as_json:
        data = report.to_dict()
        data["config"] = config.as_dict()
        print(json.dumps(data, indent=2))
        return
    print(f"{report.name}: {report.outcome}")
    if report.evidence:
        print(f"  evidence: {report.evidence}")
    if report.pc:
        print(f"  path condition ({len(report.pc)} literals):")
        for literal in report.pc:
            print(f"    {literal}")
    if report.witness is not None:
        print("  witness: " + ", ".join(f"{k}={v}" for k, v in report.witness.items()))
    stats = report.stats
    print(f"  chains {stats.chains_root}/{stats.chains_all}, elim {stats.elim}, "
          f"sstat {stats.sstat}, csol {stats.csol_initial}/{stats.csol_rest}, smt {stats.smt}")


def cmd_analyze(args, config: NavConfig) -> int:
    report = analyze_file(resolve_program(args.file), config)
    _print_report(report, getattr(args, "json", False), config)
    return EXIT_INCONCLUSIVE if report.outcome not in (FEASIBLE, INFEASIBLE) else EXIT_OK


def cmd_prove(args, config: NavConfig) -> int:
    report = analyze_file(resolve_program(args.file), config)
    _print_report(report, getattr(args, "json", False), config)
    return EXIT_OK if report.outcome == INFEASIBLE else EXIT_INCONCLUSIVE


def _prepare_file(args, config: NavConfig):
    with open(resolve_program(args.file), "r") as f:
        return prepare(f.read(), config)


def cmd_dump_chains(args, config: NavConfig) -> int:
    prepared = _prepare_file(args, config)
    if getattr(args, "json", False):
        print(json.dumps(prepared.cpf.to_dict(), indent=2))
    else:
        print(prepared.cpf.render())
    return EXIT_OK


def cmd_dump_constraints(args, config: NavConfig) -> int:
    prepared = _prepare_file(args, config)
    if getattr(args, "json", False):
        print(json.dumps(prepared.table.to_dict(), indent=2))
    else:
        print(prepared.table.render())
        if prepared.table.eliminated:
            print("\neliminated: " + ", ".join(f"c{c}" for c in prepared.table.eliminated))
    return EXIT_OK


def cmd_bench(args, config: NavConfig) -> int:
    cases = select_cases(args.filter)
    if not cases:
        logger.error(f"No benchmark matches '{args.filter}'")
        return EXIT_ERROR
    reports, errors = run_workers(cases, config, args.workers)
    table = summary_table(reports)

    if getattr(args, "json", False):
        print(json.dumps([r.to_dict() for r in reports], indent=2))
    else:
        print(format_table(table))
    if args.output:
        write_table(table, args.output)
    if args.plot:
        plot_summary(reports, args.plot)

    if any(isinstance(exc, ValidationFailure) for _, exc in errors):
        return EXIT_VALIDATION
    if errors:
        return EXIT_ERROR
    mismatched = [r.name for r in reports if not r.matches_expected]
    if mismatched:
        logger.warning(f"Unexpected outcome for {', '.join(mismatched)}")
        return EXIT_INCONCLUSIVE
    return EXIT_OK


COMMANDS = {
    "analyze":          cmd_analyze,
    "prove":            cmd_prove,
    "dump-chains":      cmd_dump_chains,
    "dump-constraints": cmd_dump_constraints,
    "bench":            cmd_bench,
}


def main(argv=None) -> int:
    # 1. Versioning
    try:
        current_version = version("loopnav")
    except PackageNotFoundError:
        current_version = "dev-local"

    # 2. CLI Arguments
    args = build_parser(current_version).parse_args(argv)
    if getattr(args, "debug", False):
        logging.getLogger("loopnav").setLevel(logging.DEBUG)

    # 3. Run
    try:
        config = make_config(args)
        return COMMANDS[args.command](args, config)
    except ValidationFailure as vf:
        logger.error(f"Witness validation failed: {vf}")
        return EXIT_VALIDATION
    except LoopNavError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR
    except (OSError, ValueError) as e:
        logger.error(f"{e}")
        return EXIT_ERROR
    except Exception as e:
        logger.critical(f"loopnav crashed: {e}", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
