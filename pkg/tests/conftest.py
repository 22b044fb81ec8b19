import os

import pytest

from loopnav import BENCHMARK_DIR, get_resource
from loopnav.chain_form import extract_chains
from loopnav.constraint_builder import build_all
from loopnav.ir_frontend import build_cfg, normalize_assignments, parse_program


def read_benchmark(name):
    with open(get_resource(os.path.join(BENCHMARK_DIR, name)), "r") as f:
        return f.read()


def pipeline(source):
    """(program, cfg, cpf, table) of a source text."""
    program = parse_program(source)
    cfg = normalize_assignments(build_cfg(program))
    cpf = extract_chains(cfg)
    return program, cfg, cpf, build_all(cpf)


def fig1_inputs(ones, twos):
    """A with `ones` leading ones, B with `twos` leading twos."""
    inputs = {f"A[{i}]": 1 if i < ones else 0 for i in range(15)}
    inputs.update({f"B[{j}]": 2 if j < twos else 0 for j in range(15)})
    return inputs


@pytest.fixture
def fig1_source():
    return read_benchmark("fig1.ln")


@pytest.fixture
def fig1(fig1_source):
    return pipeline(fig1_source)


def cfg_paths(cfg, budget):
    """(vertex, label) sequences of every start-to-target walk with at most `budget` steps."""
    found = []

    def walk(vid, steps):
        if vid == cfg.target:
            found.append(steps)
            return
        if vid == cfg.terminal or len(steps) == budget:
            return
        for label, w in cfg.successors(vid):
            walk(w, steps + ((vid, label),))

    for _, w in cfg.successors(cfg.start):
        walk(w, ())
    return found


def random_program(rng, statements=6):
    """Structured program over one input with loops, branches and one target."""
    blocks = []
    loops = 0

    def block(depth, size):
        nonlocal loops
        stmts = []
        for _ in range(size):
            roll = rng.random()
            if depth < 2 and loops < 2 and roll < 0.3:
                loops += 1
                stmts.append(("while", rng.randint(1, 3), block(depth + 1, rng.randint(1, 2))))
            elif depth < 2 and roll < 0.6:
                stmts.append(("if", rng.randint(0, 3), block(depth + 1, rng.randint(1, 2)),
                              block(depth + 1, rng.randint(0, 2))))
            else:
                stmts.append(("assign", rng.randint(0, 3)))
        blocks.append(stmts)
        return stmts

    body = block(0, rng.randint(2, statements))
    chosen = rng.choice(blocks)
    chosen.insert(rng.randint(0, len(chosen)), ("target",))

    def render(stmts):
        text = []
        for s in stmts:
            if s[0] == "assign":
                text.append(f"x = n + {s[1]};")
            elif s[0] == "target":
                text.append("target;")
            elif s[0] == "while":
                text.append(f"while (x < {s[1]}) {{ {render(s[2])} }}")
            else:
                orelse = f" else {{ {render(s[3])} }}" if s[3] else ""
                text.append(f"if (n > {s[1]}) {{ {render(s[2])} }}{orelse}")
        return " ".join(text)

    return "input int n; int x = 0; " + render(body)
