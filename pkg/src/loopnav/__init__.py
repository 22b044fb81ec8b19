"""loopnav: loop-navigating symbolic execution for LoopNav-IR programs."""

import os

BENCHMARK_DIR = "benchmarks"


def get_resource(filename):
    """Get the absolute path to a resource file within the package."""
    return os.path.join(os.path.dirname(__file__), filename)


def resolve_program(path):
    """A path as given, or the shipped benchmark of that name when no such file exists."""
    if os.path.exists(path):
        return path
    shipped = get_resource(os.path.join(BENCHMARK_DIR, os.path.basename(path)))
    return shipped if os.path.exists(shipped) else path
