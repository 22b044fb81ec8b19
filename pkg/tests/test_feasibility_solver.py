import itertools
import random
import shutil

import numpy as np
import pytest

from loopnav.bench import FEASIBLE, analyze_source
from loopnav.errors import ExternalSolverError, UnsupportedLiteral
from loopnav.feasibility_solver import (
    SAT, UNKNOWN, UNSAT, Literal, check_sat, export_smtlib, parse_model, run_external,
)
from loopnav.sym_expr import OPS, STAR, Alpha, Counter, sym

W, X, Y, Z = (sym(Alpha(n)) for n in "wxyz")
A0, A1 = (sym(Alpha(f"A[{i}]")) for i in range(2))


def lit(left, op, right):
    return Literal.build(left, op, right)


def test_literal_text_and_checks():
    literal = lit(A0, "==", 1)
    assert str(literal) == "A[0] == 1"
    assert literal.symbols() == ["A[0]"]
    assert literal.holds({"A[0]": 1})
    assert not literal.holds({})
    assert lit(sym(3), "<", 5).constant


def test_literal_rejects_unknowns_and_counters():
    with pytest.raises(UnsupportedLiteral):
        Literal.build(STAR, "==", 1)
    with pytest.raises(UnsupportedLiteral):
        Literal.build(sym(Counter(1, 0)), "==", 1)


def test_single_symbol():
    assert check_sat([lit(X, "==", 1), lit(X, "!=", 1)]).status == UNSAT
    assert check_sat([lit(X * 2, "==", 5)]).status == UNSAT
    result = check_sat([lit(X, ">", 3), lit(X, "<", 6), lit(X, "!=", 4)])
    assert result.status == SAT
    assert result.witness == {"x": 5}
    assert check_sat([lit(X * -3, ">=", 7)]).witness == {"x": -3}


def test_constant_literals():
    assert check_sat([lit(sym(1), "==", 2)]).status == UNSAT
    assert check_sat([lit(sym(1), "==", 1)]).status == SAT
    assert check_sat([]).sat


def test_several_symbols():
    result = check_sat([lit(X + Y, "==", 5), lit(X - Y, "==", 1)])
    assert result.status == SAT
    assert result.witness == {"x": 3, "y": 2}
    assert check_sat([lit(X + Y, "<=", 1), lit(X, ">=", 1), lit(Y, ">=", 1)]).status == UNSAT


def test_independent_clusters_combine():
    result = check_sat([lit(X, "==", 4), lit(Y + Z, "==", 2), lit(Y, ">=", 2)])
    assert result.status == SAT
    assert result.witness == {"x": 4, "y": 2, "z": 0}


def test_nonlinear_is_unknown_unless_another_cluster_fails():
    product = lit(X * Y, "==", 6)
    assert check_sat([product]).status == UNKNOWN
    assert check_sat([product, lit(Z, "==", 1), lit(Z, "==", 2)]).status == UNSAT


def brute_force(pc, names, bound=8):
    """Whether some point of the box [-bound, bound]^n satisfies every literal."""
    grid = np.array(list(itertools.product(range(-bound, bound + 1), repeat=len(names))))
    ok = np.ones(len(grid), dtype=bool)
    for l in pc:
        coefs = {atom.name: c for atom, c in l.lhs.coefficients().items()}
        ok &= OPS[l.op](grid @ np.array([coefs.get(n, 0) for n in names]), l.rhs)
    return bool(ok.any())


def test_agrees_with_brute_force():
    rng = random.Random(5)
    ops = ["<", "<=", ">", ">=", "==", "!="]
    symbols = dict(zip("wxyz", (W, X, Y, Z)))
    for _ in range(300):
        names = sorted(rng.sample("wxyz", rng.randint(1, 4)))
        pc = []
        for n in names:
            pc += [lit(symbols[n], ">=", -8), lit(symbols[n], "<=", 8)]
        for _ in range(rng.randint(1, 4)):
            lhs = sym(0)
            for n in rng.sample(names, rng.randint(1, len(names))):
                lhs = lhs + symbols[n] * rng.choice([-3, -2, -1, 1, 2, 3])
            pc.append(lit(lhs, rng.choice(ops), rng.randint(-10, 10)))
        result = check_sat(pc)
        assert result.status == (SAT if brute_force(pc, names) else UNSAT)
        if result.sat:
            assert all(l.holds(result.witness) for l in pc)


def test_large_linear_values_are_decided():
    result = check_sat([lit(A0 + A1, "==", 200)])
    assert result.status == SAT
    assert result.witness["A[0]"] + result.witness["A[1]"] == 200

    result = check_sat([lit(X * 3 + Y * 5, "==", 1001), lit(X, ">=", 300), lit(Y, ">=", 10)])
    assert result.sat
    assert 3 * result.witness["x"] + 5 * result.witness["y"] == 1001
    assert result.witness["x"] >= 300 and result.witness["y"] >= 10

    result = check_sat([lit(X - Y, ">", 1000), lit(X + Y, "<", -1000), lit(X, "!=", 0)])
    assert result.sat
    assert result.witness["x"] - result.witness["y"] > 1000


def test_integer_gaps_are_unsat():
    assert check_sat([lit(X * 2 - Y * 2, "==", 1)]).status == UNSAT
    assert check_sat([lit(X * 4 + Y * 6, ">=", 1), lit(X * 4 + Y * 6, "<=", 1)]).status == UNSAT
    assert check_sat([lit(X * 3 - Y * 3, ">", 0), lit(X * 3 - Y * 3, "<", 3)]).status == UNSAT
    # real solutions exist, integer ones do not
    pc = [lit(X * 11 + Y * 13, ">=", 27), lit(X * 11 + Y * 13, "<=", 45),
          lit(X * 7 - Y * 9, ">=", -10), lit(X * 7 - Y * 9, "<=", 4)]
    assert check_sat(pc).status == UNSAT


def test_disequalities_between_symbols():
    pc = [lit(X - Y, "!=", 0), lit(X, ">=", 0), lit(X, "<=", 0), lit(Y, ">=", -1), lit(Y, "<=", 0)]
    assert check_sat(pc).witness == {"x": 0, "y": -1}
    pc = [lit(X - Y, "!=", 0), lit(X + Y, "==", 0), lit(X, ">=", 0), lit(X, "<=", 0)]
    assert check_sat(pc).status == UNSAT


def test_smtlib_export():
    script = export_smtlib([lit(A0, "==", 1), lit(sym(Alpha("n")), "!=", -2)])
    assert script.splitlines() == [
        "(set-logic QF_LIA)",
        "(declare-const A_0 Int)",
        "(declare-const n Int)",
        "(assert (= A_0 1))",
        "(assert (not (= n (- 2))))",
        "(check-sat)",
        "(get-model)",
    ]


def test_smtlib_export_of_products_and_empty_conditions():
    script = export_smtlib([lit(A0 * A1, "==", 6)])
    assert script.splitlines()[0] == "(set-logic QF_NIA)"
    assert "(assert (= (* A_0 A_1) 6))" in script.splitlines()
    assert export_smtlib([]) == "(check-sat)\n"


def test_program_with_a_large_linear_guard_is_feasible():
    report = analyze_source("input int A[2]; if (A[0] + A[1] > 500) { target; }")
    assert report.outcome == FEASIBLE
    assert report.witness.get("A[0]", 0) + report.witness.get("A[1]", 0) > 500


def test_model_parsing():
    text = "sat\n(\n  (define-fun A_0 () Int 1)\n  (define-fun n () Int (- 5))\n)\n"
    assert parse_model(text, ["A[0]", "n"]) == {"A[0]": 1, "n": -5}


@pytest.mark.skipif(shutil.which("sh") is None, reason="needs a POSIX shell")
def test_external_solver(tmp_path):
    script = tmp_path / "solver.sh"
    script.write_text("cat > /dev/null\necho sat\necho '(model (define-fun x () Int 4))'\n")
    result = run_external([lit(X, ">", 3)], f"sh {script}")
    assert result.status == SAT
    assert result.witness == {"x": 4}

    unknown_script = tmp_path / "unknown.sh"
    unknown_script.write_text("cat > /dev/null\necho unknown\n")
    assert run_external([lit(X, ">", 3)], f"sh {unknown_script}").status == UNKNOWN


def test_external_solver_failures(tmp_path):
    with pytest.raises(ExternalSolverError):
        run_external([lit(X, ">", 3)], str(tmp_path / "no-such-solver"))
