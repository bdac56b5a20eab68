import random
from fractions import Fraction

import pytest

from behavineq.laurent import SIGMA, SIGMA_INV, PolyMatrix
from behavineq.trajectory import (Extension, Trajectory, apply, comparison_indices, from_csv,
                                  inner_product, orthant_check, satisfies, to_csv)

from oracles import random_finite

EX1 = PolyMatrix([[SIGMA ** 2 - SIGMA + 1]])
TWO = Trajectory.constant_value((2,))


def test_extension_semantics():
    f = Trajectory.finite([(1,), (2,)], start=3)
    assert f.value_at(3) == (1,) and f.value_at(10) == (0,)
    qc = Trajectory.quasi_constant((7,), [(1,)], start=0)
    assert qc.value_at(0) == (1,) and qc.value_at(-5) == (7,)
    p = Trajectory.periodic([(1,), (2,), (3,)], start=1)
    assert [p.value_at(k)[0] for k in range(-1, 5)] == [2, 3, 1, 2, 3, 1]
    b = Trajectory.bounded([(1,)], start=4)
    assert b.is_defined(4) and not b.is_defined(5)
    with pytest.raises(IndexError):
        b.value_at(5)


def test_validation():
    with pytest.raises(ValueError):
        Trajectory(1, 0, ((1, 2),))
    with pytest.raises(ValueError):
        Trajectory(1, 0, ((Fraction(1),),), Extension.QUASI_CONSTANT)
    with pytest.raises(ValueError):
        Trajectory.finite([])


def test_semantic_equality():
    assert Trajectory.finite([(0,), (1,)], start=0) == Trajectory.finite([(1,)], start=1)
    assert Trajectory.constant_value((2,)) == Trajectory.quasi_constant((2,), [(2,), (2,)], 5)
    assert Trajectory.periodic([(1,), (2,)]) == Trajectory.periodic([(2,), (1,), (2,), (1,)], 1)
    assert Trajectory.periodic([(1,), (2,)]) != Trajectory.periodic([(2,), (1,)])


def test_impulses_and_support():
    t = Trajectory.impulses(2, {(0, -1): 3, (1, 2): -1})
    assert t.support() == (-1, 2)
    assert t.value_at(2) == (0, -1)
    assert Trajectory.zeros(2).support() is None


def test_shift_operator():
    w = Trajectory.finite([(1,), (2,), (3,)], start=0)
    assert apply(PolyMatrix([[SIGMA]]), w).value_at(0) == (2,)
    assert apply(PolyMatrix([[SIGMA_INV]]), w).value_at(1) == (1,)


def test_apply_constant_and_periodic():
    assert apply(EX1, Trajectory.constant_value((1,))) == Trajectory.constant_value((1,))
    p = Trajectory.periodic([(1,), (0,)])
    # w(k+2) - w(k+1) + w(k) = 2 w(k) - w(k+1) for period 2
    assert apply(EX1, p) == Trajectory.periodic([(2,), (-1,)])


def test_apply_bounded_keeps_interior():
    w = Trajectory.bounded([(1,), (1,), (1,), (1,)], start=1)
    r = apply(EX1, w)
    assert r.window == (1, 2)


def test_inner_product():
    x = Trajectory.finite([(1, 2)], start=0)
    y = Trajectory.constant_value((3, 4))
    assert inner_product(x, y) == 11
    assert inner_product(y, x) == 11
    with pytest.raises(ValueError):
        inner_product(y, y)


def test_orthant_check():
    assert orthant_check(Trajectory.constant_value((0, 1)))
    assert not orthant_check(Trajectory.quasi_constant((0,), [(1,)], 0).scale(-1))
    assert not orthant_check(Trajectory.quasi_constant((-1,), [(1,)], 0))


@pytest.mark.parametrize("w, ok", [
    (Trajectory.constant_value((1,)), True),
    (Trajectory.constant_value((2,)), True),
    (Trajectory.constant_value((3,)), False),
    (Trajectory.quasi_constant((0,), [(1,), (1,), (Fraction(1, 2),)], start=1), True),
])
def test_satisfies_example1(w, ok):
    assert satisfies(EX1, w, TWO, "leq") is ok


def test_satisfies_equality():
    assert satisfies(EX1, Trajectory.constant_value((2,)), TWO, "eq")
    assert not satisfies(EX1, Trajectory.constant_value((1,)), TWO, "eq")
    with pytest.raises(ValueError):
        satisfies(EX1, Trajectory.constant_value((1,)), TWO, "lt")


def test_comparison_indices_cover_periods():
    a = Trajectory.periodic([(1,), (2,)], start=0)
    b = Trajectory.periodic([(1,), (2,), (3,)], start=0)
    r = comparison_indices([a, b])
    assert r.start <= -6 and r.stop >= 9


def test_arithmetic():
    a = Trajectory.quasi_constant((1,), [(5,)], 0)
    b = Trajectory.finite([(1,)], 2)
    s = a + b
    assert s.value_at(0) == (5,) and s.value_at(2) == (2,) and s.value_at(9) == (1,)
    assert (a - a) == Trajectory.constant_value((0,))
    with pytest.raises(ValueError):
        a + Trajectory.finite([(1, 2)])


def test_stack_split():
    a = Trajectory.finite([(1,)], 0)
    b = Trajectory.finite([(2, 3)], 1)
    st = Trajectory.stack([a, b])
    assert st.dim == 3
    x, y = st.split([1, 2])
    assert x == a and y == b


@pytest.mark.parametrize("t", [
    Trajectory.finite([(1, Fraction(-1, 3))], start=-2),
    Trajectory.quasi_constant((4, 5), [(1, 2)], start=3),
    Trajectory.periodic([(1,), (2,)], start=1),
    Trajectory.bounded([(1,), (Fraction(5, 2),)], start=1),
])
def test_csv_round_trip(t):
    assert from_csv(to_csv(t, ["note"])) == t


def test_csv_rejects_gaps():
    with pytest.raises(ValueError):
        from_csv("k,c1\n0,1\n2,1\n")


def test_random_finite_round_trip():
    rng = random.Random(3)
    for _ in range(20):
        t = random_finite(rng, 2)
        assert from_csv(to_csv(t)) == t
