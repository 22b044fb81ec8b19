from loopnav.chain_form import replay_trace
from loopnav.config import NavConfig
from loopnav.interpreter import RunStatus, concrete_interpret, run_cfg
from loopnav.nav_executor import (
    FeasiblePath, Inconclusive, Infeasible, NavStats, Navigator, choose_chain, navigate,
)
from loopnav.sym_expr import Constraint, ConstraintSystem, Counter, sym

from conftest import pipeline, read_benchmark

K1, K2, K3, K4 = (Counter(c, 0) for c in (1, 2, 3, 4))


def test_running_example_is_feasible(fig1):
    program, cfg, cpf, table = fig1
    stats = NavStats()
    outcome = navigate(cpf, table, NavConfig(), stats)

    assert isinstance(outcome, FeasiblePath)
    assert outcome.verdict == "feasible"
    assert outcome.root == 0
    assert len(outcome.pc) == 30
    assert stats.pc_len == 30
    assert outcome.counters == {K1: 15, K2: 0, K3: 8, K4: 7}
    assert stats.sstat > 0
    assert stats.csol_initial > 0
    assert stats.csol_rest > 0

    assert all(outcome.witness[f"A[{i}]"] == 1 for i in range(15))
    assert all(outcome.witness[f"B[{j}]"] == 2 for j in range(8))
    assert all(outcome.witness[f"B[{j}]"] != 2 for j in range(8, 15))
    assert concrete_interpret(program, outcome.witness) is RunStatus.REACHED_TARGET


def test_counters_match_the_replayed_run(fig1):
    _, cfg, cpf, table = fig1
    outcome = navigate(cpf, table)
    run = run_cfg(cfg, outcome.witness)
    trace = replay_trace(cpf, run.trace)
    assert trace.root == outcome.root
    assert trace.counter_values(list(outcome.counters)) == outcome.counters


def test_eliminated_roots_need_no_search():
    for name in ("fig1_a17.ln", "oneloop.ln", "twoloops.ln"):
        _, _, cpf, table = pipeline(read_benchmark(name))
        outcome = navigate(cpf, table)
        assert isinstance(outcome, Infeasible)
        assert outcome.evidence == "eliminated-roots"
        assert outcome.stats.sstat == 0


def test_unreachable_counts_need_an_exhausted_search():
    _, _, cpf, table = pipeline(read_benchmark("eqcntex.ln"))
    assert not table.eliminated
    outcome = navigate(cpf, table)
    assert isinstance(outcome, Infeasible)
    assert outcome.evidence == "exhausted-search"
    assert outcome.stats.sstat > 0
    assert outcome.stats.smt > 0


def test_rejected_guard_backtracks_to_another_path():
    program, _, cpf, table = pipeline(
        "input int A[3]; int c = 0;"
        "for (int i = 0; i < 3; ++i) { if (A[i] == 1) { c = c + 1; } }"
        "if (c == 2 && A[0] != 1) { target; }")
    outcome = navigate(cpf, table)
    assert isinstance(outcome, FeasiblePath)
    assert outcome.witness["A[0]"] != 1
    assert outcome.witness["A[1]"] == 1 and outcome.witness["A[2]"] == 1
    # the first descent takes A[0] == 1 and is refused at the guard
    assert outcome.stats.smt > len(outcome.pc)
    assert concrete_interpret(program, outcome.witness) is RunStatus.REACHED_TARGET


def test_backtrack_on_an_empty_stack(fig1):
    _, _, cpf, table = fig1
    assert Navigator(cpf, table).backtrack([]) is None


def test_state_budget_is_inconclusive(fig1):
    _, _, cpf, table = fig1
    outcome = navigate(cpf, table, NavConfig(max_states=5))
    assert isinstance(outcome, Inconclusive)
    assert outcome.verdict == "inconclusive"


def test_counter_budget_is_inconclusive(fig1):
    _, _, cpf, table = fig1
    outcome = navigate(cpf, table, NavConfig(max_counter=3))
    assert isinstance(outcome, Inconclusive)


def test_reverse_seed_order_still_reaches_target(fig1):
    program, _, cpf, table = fig1
    outcome = navigate(cpf, table, NavConfig(seed_order="reverse"))
    assert isinstance(outcome, FeasiblePath)
    assert concrete_interpret(program, outcome.witness) is RunStatus.REACHED_TARGET


def test_choose_chain():
    exact = ConstraintSystem(0, (Constraint.build(sym(K1), "==", 3),))
    assert choose_chain(0, [1, 2], exact, {K1: 0}) == 1
    assert choose_chain(0, [1, 2], exact, {K1: 3}) == 0
    assert choose_chain(0, [1, 2], ConstraintSystem(0, contradiction=True), {K1: 0}) is None

    shared = ConstraintSystem(0, (Constraint.build(sym(K1) + sym(K2), "==", 4),))
    assert choose_chain(0, [1, 2], shared, {K1: 0, K2: 0}) == 1
    assert choose_chain(0, [1, 2], shared, {K1: 0, K2: 0}, reverse=True) == 2


def test_choose_chain_resets_an_overshooting_counter():
    system = ConstraintSystem(0, (Constraint.build(sym(Counter(1, 5)), "<=", 2),
                                  Constraint.build(sym(K2), ">=", 1)))
    assert choose_chain(0, [2, 5], system, {Counter(1, 5): 1, K2: 0}) == 2
    assert choose_chain(0, [2, 5], system, {Counter(1, 5): 4, K2: 0}) == 5
