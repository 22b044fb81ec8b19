import random

import pytest

from loopnav.sym_expr import (
    STAR, Alpha, Constraint, ConstraintSystem, Counter, evaluate, geometric,
    merge_values, simplify, solve_recurrence, substitute, sym,
)

K1 = Counter(1, 0)
K2 = Counter(2, 0)
X = Alpha("x")


def test_like_terms_collapse():
    assert str(sym(K1) + sym(K1)) == "2*k1^0"
    assert (sym(3) + 4).is_const
    assert (sym(X) - sym(X)) == sym(0)


def test_geometric_next_to_other_terms_is_unknown():
    assert (geometric(2, K1) + sym(X)).star
    assert not (geometric(2, K1) + 5).star


def test_simplify_expression_tree():
    e = simplify(("+", ("*", 2, K1), ("-", K2, K1)))
    assert e == sym(K1) + sym(K2)
    assert simplify(("^", 3, K1)) == geometric(3, K1)
    assert simplify(("^", X, K1)).star


def test_substitute_powers():
    assert substitute(geometric(2, K1), {K1: 3}) == sym(8)
    assert substitute(geometric(2, K1), {K1: sym(K2)}) == geometric(2, K2)
    assert substitute(geometric(2, K1), {K1: -1}).star
    assert substitute(sym(K1) + sym(X), {X: 4, K1: sym(K2)}) == sym(K2) + 4


def test_evaluate_needs_every_atom():
    assert evaluate(geometric(2, K1, (X,)), {K1: 4, X: 3}) == 48
    with pytest.raises(ValueError):
        evaluate(STAR, {})


def test_recurrence_arithmetic():
    kappa = Counter(1, var="i")
    value = solve_recurrence("i", None, sym(Alpha("i")) + 1, kappa)
    assert value == sym(Alpha("i")) + sym(kappa)


def test_recurrence_geometric():
    kappa = Counter(1, var="x")
    value = solve_recurrence("x", None, sym(X) * 2, kappa)
    assert value == geometric(2, kappa, (X,))
    assert evaluate(value, {X: 3, kappa: 4}) == 48


def test_recurrence_unchanged_and_unknown():
    kappa = Counter(1, var="x")
    assert solve_recurrence("x", None, sym(X), kappa) == sym(X)
    assert solve_recurrence("x", None, sym(5), kappa).star
    assert solve_recurrence("x", None, STAR, kappa).star


def test_recurrence_keeps_nested_counters():
    kappa = Counter(2, var="c")
    inner = Counter(3, var="c")
    start = sym(Alpha("c"))
    assert solve_recurrence("c", None, start + sym(inner), kappa) == start + sym(inner)


def test_merge_values():
    a_i = sym(Alpha("i"))
    k1, k2 = Counter(1, var="i"), Counter(2, var="i")
    assert merge_values([a_i + sym(k1), a_i + sym(k2)], Alpha("i")) == a_i + sym(k1) + sym(k2)
    assert merge_values([a_i + sym(k1), a_i], Alpha("i")) == a_i + sym(k1)
    assert merge_values([sym(7), sym(7)], Alpha("i")) == sym(7)
    assert merge_values([sym(7), a_i + sym(k1)], Alpha("i")).star
    assert merge_values([], Alpha("i")) == a_i


def test_constraint_moves_constants_right():
    c = Constraint.build(sym(K1) + 3, ">=", 5)
    assert (str(c.lhs), c.op, c.rhs) == ("k1^0", ">=", 2)
    assert Constraint.build(STAR, "==", 1) is None
    assert c.negated().op == "<"


def test_guarded_constraint():
    c = Constraint(sym(K1), "<", 16, guard=Constraint(sym(K1), ">", 0))
    assert c.holds({K1: 0})
    assert c.holds({K1: 15})
    assert not c.holds({K1: 20})
    assert str(c) == "k1^0 < 16  if k1^0 > 0"


def test_system_substitution_decides_constants():
    system = ConstraintSystem(0, (Constraint.build(sym(K1), ">=", 15),
                                  Constraint.build(sym(K1) + sym(K2), "<=", 20)))
    assert system.counters == frozenset({K1, K2})

    fixed = system.substitute({K1: 3})
    assert fixed.contradiction
    assert len(fixed) == 1

    shifted = system.substitute({K1: sym(K1) - 2})
    assert not shifted.contradiction
    assert str(shifted.constraints[0]) == "k1^0 >= 17"


def iterate(x0, passes):
    value = x0
    for g, d in passes:
        value = g * value + d
    return value


def test_recurrence_matches_iteration():
    rng = random.Random(3)
    kappa = Counter(1, var="x")
    for _ in range(400):
        g, d, x0, n = rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(0, 6)
        value = solve_recurrence("x", None, sym(X) * g + d, kappa)
        if g == 0 or (g != 1 and d != 0):
            assert value.star
            continue
        assert evaluate(value, {X: x0, kappa: n}) == iterate(x0, [(g, d)] * n)


def test_merge_matches_every_interleaving():
    rng = random.Random(4)
    k1, k2 = Counter(1, var="x"), Counter(2, var="x")
    for _ in range(400):
        passes = []
        for _ in range(2):
            if rng.random() < 0.5:
                passes.append((1, rng.randint(-3, 3)))
            else:
                passes.append((rng.randint(-3, 3), 0))
        values = [solve_recurrence("x", None, sym(X) * g + d, k) for (g, d), k in zip(passes, (k1, k2))]
        merged = merge_values(values, X)

        adds = any(g == 1 and d != 0 for g, d in passes)
        muls = any(g not in (0, 1) for g, d in passes)
        if any(g == 0 for g, _ in passes) or (adds and muls):
            assert merged.star
            continue
        assert not merged.star
        for _ in range(5):
            x0, n1, n2 = rng.randint(-3, 3), rng.randint(0, 6), rng.randint(0, 6)
            order = [0] * n1 + [1] * n2
            rng.shuffle(order)
            expected = iterate(x0, [passes[i] for i in order])
            assert evaluate(merged, {X: x0, k1: n1, k2: n2}) == expected


def test_merge_of_mixed_shapes_is_unknown():
    k1, k2 = Counter(1, var="x"), Counter(2, var="x")
    assert merge_values([sym(X) + sym(k1) * 2, geometric(2, k2, (X,))], X).star
    assert merge_values([geometric(2, k2, (X,)), sym(X) + sym(k1)], X).star


def test_merge_of_geometric_values_multiplies():
    k1, k2 = Counter(1, var="x"), Counter(2, var="x")
    merged = merge_values([geometric(2, k1, (X,)), geometric(3, k2, (X,))], X)
    assert not merged.star
    assert evaluate(merged, {X: 5, k1: 2, k2: 1}) == 5 * 4 * 3
