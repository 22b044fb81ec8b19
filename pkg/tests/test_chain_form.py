import random
from collections import Counter as Tally

import pytest

from loopnav.chain_form import (
    NodeKind, check_single_assignment, enumerate_execution_paths, extract_chains,
    replay_trace,
)
from loopnav.errors import ChainExplosion
from loopnav.interpreter import RunStatus, run_cfg
from loopnav.ir_frontend import FALSE, TRUE
from loopnav.sym_expr import Counter

from conftest import cfg_paths, fig1_inputs, pipeline, random_program

POSITIVE_SUM = """
input int A[4];
int s = 0;
for (int i = 0; i < 4; ++i) {
    if (A[i] > 0) {
        s = s + A[i];
    }
}
if (s >= 0) {
    target;
}
"""

DIAMOND = """
input int n;
int x = 0;
if (n > 0) {
    x = n;
} else {
    x = 0 - n;
}
target;
"""

COUNT_TO_TWO = """
int i = 0;
while (i < 2) {
    i = i + 1;
}
if (i == 2) {
    target;
}
"""


def transforms(chain):
    return {n.var for n in chain.nodes if n.kind is NodeKind.TRANSFORM}


def test_running_example_structure(fig1):
    _, _, cpf, _ = fig1
    assert len(cpf) == 5
    assert cpf.roots == (0,)
    assert cpf.subchain_ids == (1, 2, 3, 4)
    assert cpf.children(0) == (1, 2, 3, 4)
    assert cpf.subtree(0) == frozenset(range(5))
    assert cpf.subtree(3) == frozenset({3})
    assert cpf.root_of(4) == 0

    loops = cpf.chain(0).loop_nodes()
    assert [node.subchains for _, node in loops] == [(1, 2), (3, 4)]
    assert all(node.exits_loop for _, node in loops)
    assert cpf.chain(1).parent == (0, loops[0][0])
    assert cpf.chain(3).parent == (0, loops[1][0])

    assert transforms(cpf.chain(1)) == {"a", "i"}
    assert transforms(cpf.chain(2)) == {"i"}
    assert transforms(cpf.chain(3)) == {"b", "j"}
    assert transforms(cpf.chain(4)) == {"j"}


def test_running_example_single_assignment(fig1):
    _, _, cpf, _ = fig1
    assert check_single_assignment(cpf) == []


def test_render_and_dict(fig1):
    _, _, cpf, _ = fig1
    text = cpf.render()
    assert "c0 (root):" in text
    assert "c1 (sub of c0" in text
    data = cpf.to_dict()
    assert data["roots"] == [0]
    assert [c["kind"] for c in data["chains"]] == ["root", "sub", "sub", "sub", "sub"]


def test_chain_cap(fig1):
    _, cfg, _, _ = fig1
    with pytest.raises(ChainExplosion):
        extract_chains(cfg, chain_cap=2)


def test_concrete_runs_map_onto_chains():
    _, cfg, cpf, _ = pipeline(POSITIVE_SUM)
    rng = random.Random(7)
    for _ in range(50):
        inputs = {f"A[{i}]": rng.randint(-3, 3) for i in range(4)}
        run = run_cfg(cfg, inputs)
        assert run.status is RunStatus.REACHED_TARGET
        trace = replay_trace(cpf, run.trace)
        assert trace is not None
        assert sum(trace.completions().values()) == 4


def test_running_example_trace_counters(fig1):
    _, cfg, cpf, _ = fig1
    run = run_cfg(cfg, fig1_inputs(15, 8))
    assert run.status is RunStatus.REACHED_TARGET
    trace = replay_trace(cpf, run.trace)
    counters = [Counter(c, 0) for c in (1, 2, 3, 4)]
    assert trace.counter_values(counters) == dict(zip(counters, (15, 0, 8, 7)))


def test_trace_off_the_chains_is_rejected(fig1):
    _, cfg, cpf, _ = fig1
    run = run_cfg(cfg, fig1_inputs(15, 8))
    assert replay_trace(cpf, run.trace[:-1]) is None


def test_enumerated_paths_replay():
    _, cfg, cpf, _ = pipeline(COUNT_TO_TWO)
    paths = enumerate_execution_paths(cpf, 9)
    assert paths
    for path in paths:
        assert replay_trace(cpf, path) is not None

    run = run_cfg(cfg, {})
    assert run.status is RunStatus.REACHED_TARGET
    assert tuple(run.trace) in paths


def test_enumerate_needs_budget(fig1):
    _, _, cpf, _ = fig1
    with pytest.raises(ValueError):
        enumerate_execution_paths(cpf, 0)


def test_diamond_has_two_roots_and_no_subchains():
    _, cfg, cpf, _ = pipeline(DIAMOND)
    (branch,) = cfg.branch_vertices()
    assert [label for label, _ in cfg.successors(branch.id)] == [TRUE, FALSE]
    assert len(cpf.roots) == 2
    assert cpf.subchain_ids == ()
    paths = enumerate_execution_paths(cpf, 12)
    assert len(paths) == 2
    assert sorted(paths) == sorted(cfg_paths(cfg, 12))


def test_execution_paths_match_graph_walks():
    rng = random.Random(1)
    compared = 0
    while compared < 200:
        source = random_program(rng, statements=3)
        _, cfg, cpf, _ = pipeline(source)
        if cfg.graph.number_of_nodes() > 8:
            continue
        assert len(cfg.back_edges()) <= 2
        compared += 1
        expected = Tally(cfg_paths(cfg, 12))
        assert Tally(enumerate_execution_paths(cpf, 12)) == expected, source
        for path in expected:
            assert replay_trace(cpf, path) is not None, source
