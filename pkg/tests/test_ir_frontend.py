import networkx as nx
import pytest

from loopnav.errors import (
    IRSyntaxError, IrreducibleCfg, MissingTarget, MultipleTargets, NormalizationUnsupported,
    SemanticError, UnreachableCode,
)
from loopnav.ir_frontend import (
    FALSE, PLAIN, TRUE, Cfg, Decl, Num, Program, VarId, Vertex, VertexKind, build_cfg,
    format_program, natural_loops, normalize_assignments, parse_program,
)

from conftest import read_benchmark


def test_parse_running_example(fig1_source):
    program = parse_program(fig1_source)
    assert program.arrays == {"A": 15, "B": 15}
    assert program.scalars == ("a", "b", "i", "j")
    assert program.loops() == 2
    assert program.targets() == 1


@pytest.mark.parametrize("name", ["fig1.ln", "doif.ln", "eqcnt.ln", "oneloop.ln"])
def test_format_parses_back(name):
    program = parse_program(read_benchmark(name))
    assert parse_program(format_program(program)) == program


def test_sugar_expands_to_assignments():
    program = parse_program("int x = 0; x += 3; x--; ++x; if (x == 3) { target; }")
    text = format_program(program)
    assert "x = (x + 3);" in text
    assert "x = (x - 1);" in text
    assert "x = (x + 1);" in text


@pytest.mark.parametrize("source, error", [
    ("int a = 0;", MissingTarget),
    ("target; target;", MultipleTargets),
    ("int a = b; target;", SemanticError),
    ("input int n; n = 1; target;", SemanticError),
    ("input int A[2]; int x = A; target;", SemanticError),
    ("x = 1; target;", SemanticError),
    ("int a = ; target;", IRSyntaxError),
    ("input int A[2]; A[0] = 1; target;", IRSyntaxError),
])
def test_rejected_programs(source, error):
    with pytest.raises(error):
        parse_program(source)


def test_syntax_error_has_position():
    with pytest.raises(IRSyntaxError) as info:
        parse_program("int a = 0;\nint b = ;\ntarget;")
    assert info.value.line == 2


def test_cfg_of_running_example(fig1_source):
    cfg = build_cfg(parse_program(fig1_source))
    assert cfg.vertex(cfg.start).kind is VertexKind.START
    assert cfg.vertex(cfg.target).kind is VertexKind.TARGET
    assert cfg.vertex(cfg.terminal).kind is VertexKind.TERMINAL
    assert len(cfg.back_edges()) == 2
    assert len(natural_loops(cfg)) == 2
    cfg.check_reducible()

    for vertex in cfg.branch_vertices():
        labels = [label for label, _ in cfg.successors(vertex.id)]
        assert labels == [TRUE, FALSE]


def test_conjunction_becomes_branch_cascade():
    cfg = build_cfg(parse_program("input int n; if (n > 1 && n < 5) { target; }"))
    assert len(cfg.branch_vertices()) == 2


def test_straight_line_reassignment_is_renamed():
    cfg = normalize_assignments(build_cfg(parse_program(
        "int x = 0; x = x + 1; if (x == 1) { target; }")))
    assigned = [v.var for v in cfg.vertices() if v.kind is VertexKind.ASSIGN]
    assert assigned == ["x", "x_2"]
    (branch,) = cfg.branch_vertices()
    assert str(branch) == "x_2 == 1"
    assert "x_2" in cfg.scalars


def test_loop_reassignment_that_reads_itself_is_unsupported():
    cfg = build_cfg(parse_program(
        "input int n; int x = 0; int i = 0;"
        "while (i < 3) { x = x + 1; x = x + 2; i = i + 1; }"
        "if (x == n) { target; }"))
    with pytest.raises(NormalizationUnsupported):
        normalize_assignments(cfg)


def test_graph_without_target_is_rejected():
    with pytest.raises(UnreachableCode):
        build_cfg(Program((Decl("x", Num(0)),), (VarId("x"),)))


def test_cycle_entered_twice_is_irreducible():
    graph = nx.MultiDiGraph()
    kinds = [VertexKind.START, VertexKind.BRANCH, VertexKind.BRANCH, VertexKind.ASSIGN,
             VertexKind.TERMINAL]
    for vid, kind in enumerate(kinds):
        graph.add_node(vid, vertex=Vertex(vid, kind))
    for u, w, label in [(0, 1, PLAIN), (1, 2, TRUE), (1, 3, FALSE), (2, 3, TRUE),
                        (2, 4, FALSE), (3, 2, PLAIN)]:
        graph.add_edge(u, w, key=label, label=label)
    cfg = Cfg(graph, 0, 4, None, {})
    with pytest.raises(IrreducibleCfg):
        cfg.check_reducible()


def test_if_else_is_a_diamond():
    cfg = build_cfg(parse_program("input int n; int x = 0; if (n > 0) { x = 1; } else { x = 2; } target;"))
    (branch,) = cfg.branch_vertices()
    then_side, else_side = (w for _, w in cfg.successors(branch.id))
    assert [label for label, _ in cfg.successors(branch.id)] == [TRUE, FALSE]
    (join_a,) = [w for _, w in cfg.successors(then_side)]
    (join_b,) = [w for _, w in cfg.successors(else_side)]
    assert join_a == join_b == cfg.target
    assert cfg.back_edges() == []
