import functools
import itertools
import random

import numpy as np
import pytest

from loopnav.counter_solver import (
    FULL, IntervalSet, improvement_direction, is_solution, solve_enumerate,
    solve_intervals,
)
from loopnav.sym_expr import OPS, Constraint, ConstraintSystem, Counter, geometric, sym

from conftest import pipeline, read_benchmark

K1, K2, K3, K4 = (Counter(c, 0) for c in (1, 2, 3, 4))


def system(*constraints, owner=0):
    return ConstraintSystem(owner, tuple(constraints))


def test_interval_set_operations():
    r = FULL.clip(2, 5)
    assert r.parts == ((2, 5),)
    assert r.remove(3).parts == ((2, 2), (4, 5))
    assert 3 not in r.remove(3)
    assert FULL.clip(6, 5).empty
    assert FULL.remove(0).parts == ((1, None),)
    assert str(r) == "[2, 5]"


def test_running_example_intervals(fig1):
    _, _, _, table = fig1
    solution = solve_intervals(table.system(0))
    assert not solution.unsat
    assert solution[K1].parts == ((13, 15),)
    assert solution[K2].parts == ((0, 2),)
    assert solution[K3].parts == ((8, 10),)
    assert solution[K4].parts == ((5, 7),)


def test_unreachable_running_example_is_unsat():
    _, _, _, table = pipeline(read_benchmark("fig1_a17.ln"))
    assert solve_intervals(table.system(0)).unsat


def test_geometric_constraints():
    assert solve_intervals(system(Constraint.build(geometric(2, K1), "==", 8)))[K1].parts == ((3, 3),)
    assert solve_intervals(system(Constraint.build(geometric(2, K1), "==", 7))).unsat
    assert solve_intervals(system(Constraint.build(geometric(3, K1), "<", 10)))[K1].parts == ((0, 2),)


def test_disequality_removes_a_point():
    solution = solve_intervals(system(Constraint.build(sym(K1) * 2, "!=", 4),
                                      Constraint.build(sym(K1), "<=", 3)))
    assert solution[K1].parts == ((0, 1), (3, 3))


def test_contradiction_and_extra_counters():
    assert solve_intervals(ConstraintSystem(0, (), contradiction=True)).unsat
    solution = solve_intervals(system(), counters=[K2])
    assert solution[K2] == FULL
    assert solution.contains({K2: 100})


def test_enumerate_is_lexicographic():
    assert solve_enumerate(system(Constraint.build(sym(K1) + sym(K2), "==", 3)), 5) == {K1: 0, K2: 3}
    assert solve_enumerate(system(Constraint.build(sym(K1), ">", 5)), 5) is None
    with pytest.raises(ValueError):
        solve_enumerate(system(), -1)


@functools.lru_cache(maxsize=None)
def box(n, bound):
    return np.array(list(itertools.product(range(bound + 1), repeat=n)))


def grid_solutions(s, counters, bound=20):
    """Every point of [0, bound]^n that satisfies the unguarded system."""
    points = box(len(counters), bound)
    ok = np.ones(len(points), dtype=bool)
    for c in s:
        coefs = c.lhs.coefficients()
        ok &= OPS[c.op](points @ np.array([coefs.get(k, 0) for k in counters]) + c.lhs.const, c.rhs)
    return points[ok]


def test_intervals_contain_every_grid_solution():
    rng = random.Random(11)
    ops = ["<", "<=", ">", ">=", "==", "!="]
    for _ in range(500):
        counters = rng.sample([K1, K2, K3, K4], rng.randint(1, 4))
        constraints = []
        for _ in range(rng.randint(1, 3)):
            lhs = sym(0)
            for k in rng.sample(counters, rng.randint(1, len(counters))):
                lhs = lhs + sym(k) * rng.choice([-3, -2, -1, 1, 2, 3])
            constraints.append(Constraint.build(lhs, rng.choice(ops), rng.randint(-5, 20)))
        s = system(*constraints)
        solution = solve_intervals(s, counters=counters)
        points = grid_solutions(s, counters)
        if len(points):
            assert not solution.unsat
            assert is_solution(dict(zip(counters, map(int, points[0]))), s)
        for j, k in enumerate(counters):
            for value in np.unique(points[:, j]):
                assert int(value) in solution[k]


def test_is_solution_respects_guards(fig1):
    _, _, _, table = fig1
    s = table.system(0)
    assert is_solution({K1: 15, K2: 0, K3: 8, K4: 7}, s)
    assert not is_solution({K1: 15, K2: 1, K3: 8, K4: 7}, s)
    assert not is_solution({K1: 12, K2: 3, K3: 11, K4: 4}, s)


def test_improvement_direction():
    s = system(Constraint.build(sym(K1), "==", 3))
    grow = improvement_direction({K1: 1}, s, [1, 2])
    assert grow.update == frozenset({1})
    assert grow.reset == frozenset()

    shrink = improvement_direction({K1: 5}, s, [0, 1])
    assert shrink.update == frozenset()
    assert shrink.reset == frozenset({0})
