import random
from fractions import Fraction

import pytest

from behavineq import model as M
from behavineq.laurent import PolyMatrix
from behavineq.model import augment_slack
from behavineq.parametrize import (RolloutError, build_recursive_form, required_footprint,
                                   residual_slack, rollout)
from behavineq.trajectory import Trajectory, apply, orthant_check, satisfies

from oracles import example1_recurrence, random_finite


def ex1_form():
    sys = M.example1()
    return build_recursive_form(sys.H, sys.g, sys.variable_names())


def ex2_form():
    sys = M.example2()
    return build_recursive_form(sys.H, sys.g, sys.variable_names())


def test_example2_equations():
    form = ex2_form()
    assert form.reduced.rank == 2
    assert form.equations() == [
        "w1(k) + w2(k+1) + s2(k) = 10",
        "w2(k) - w2(k+1) - w2(k+2) + s1(k) - s2(k) - s2(k+1) = -5",
    ]
    assert form.transformed_rhs == Trajectory.constant_value((10, -5))
    assert form.free_slack_indices == (0, 1)


def test_scalar_identity_row():
    form = build_recursive_form(PolyMatrix([[1]]), Trajectory.constant_value((5,)))
    assert form.equations() == ["w1(k) + s1(k) = 5"]


def test_example1_lead_term():
    form = ex1_form()
    (row,) = form.rows
    assert row.pivot == 0 and row.lead == 2 and row.lead_coeff == 1
    assert str(form).splitlines()[0] == "w(k) - w(k+1) + w(k+2) + s1(k) = 2"


def test_example1_footprint():
    assert required_footprint(ex1_form(), 1, 5) == [(0, 1), (0, 2)]


@pytest.mark.parametrize("slack_value", [0, 1, Fraction(1, 3), 2])
def test_example1_against_hand_recurrence(slack_value):
    w = rollout(ex1_form(), {(0, 1): 1, (0, 2): 1},
                Trajectory.constant_value((slack_value,)), horizon=6)
    expected = example1_recurrence(1, 1, lambda k: slack_value, 5)
    assert [w.value_at(k)[0] for k in range(1, 8)] == expected


def test_example1_slack_zero_gives_equality():
    sys = M.example1()
    w = rollout(ex1_form(), {(0, 1): 1, (0, 2): 1}, Trajectory.constant_value((0,)), horizon=5)
    assert w.value_at(3) == (2,)
    assert satisfies(sys.H, w, sys.g, "eq")


def test_example1_unit_slack_gives_ones():
    w = rollout(ex1_form(), {(0, 1): 1, (0, 2): 1}, Trajectory.constant_value((1,)), horizon=5)
    assert w == Trajectory.bounded([(1,)] * 6, 1)
    assert residual_slack(M.example1().H, M.example1().g, w) == Trajectory.bounded([(1,)] * 4, 1)


def test_example2_zero_rollout():
    form = ex2_form()
    need = required_footprint(form, 0, 6)
    w = rollout(form, {jt: 0 for jt in need}, Trajectory.constant_value((15, 10)), 6, 0)
    assert all(v == (0, 0) for v in w.values)


def test_missing_and_extra_initial_values():
    with pytest.raises(RolloutError, match="missing"):
        rollout(ex1_form(), {(0, 1): 1}, None, 4, 1)
    with pytest.raises(RolloutError, match="over-determined"):
        rollout(ex1_form(), {(0, 1): 1, (0, 2): 1, (0, 3): 5}, None, 4, 1)


def test_slack_checks():
    init = {(0, 1): 1, (0, 2): 1}
    with pytest.raises(RolloutError, match="nonnegative"):
        rollout(ex1_form(), init, Trajectory.constant_value((-1,)), 4)
    with pytest.raises(RolloutError, match="shorter"):
        rollout(ex1_form(), init, Trajectory.bounded([(0,)] * 2, 1), 6)
    with pytest.raises(RolloutError, match="dim"):
        rollout(ex1_form(), init, Trajectory.constant_value((0, 0)), 4)
    with pytest.raises(ValueError):
        rollout(ex1_form(), init, None, -1)


def test_residual_flags_non_solution():
    sys = M.example1()
    s = residual_slack(sys.H, sys.g, Trajectory.constant_value((3,)))
    assert not orthant_check(s)
    assert residual_slack(sys.H, sys.g, Trajectory.constant_value((1,))) == \
        Trajectory.constant_value((1,))


def test_random_slack_soundness_and_round_trip():
    rng = random.Random(31)
    sys = M.example2()
    form = ex2_form()
    need = required_footprint(form, 0, 8)
    for _ in range(25):
        init = {jt: Fraction(rng.randint(-5, 5)) for jt in need}
        vals = [tuple(Fraction(rng.randint(0, 6), rng.randint(1, 3)) for _ in range(2))
                for _ in range(12)]
        slack = Trajectory.bounded(vals, 0)
        w = rollout(form, init, slack, 8, 0)
        assert satisfies(sys.H, w, sys.g, "leq")
        res = residual_slack(sys.H, sys.g, w)
        assert all(res.value_at(k) == slack.value_at(k) for k in range(res.start, res.end + 1))


def test_reduced_system_equivalence():
    rng = random.Random(37)
    sys = M.example2()
    hs, g = augment_slack(sys.H, sys.g)
    form = ex2_form()
    u, t = form.reduced.U, form.reduced.T
    for _ in range(30):
        ws = random_finite(rng, 4, span=3)
        lhs = apply(hs, ws)
        assert apply(u, lhs) == apply(t, ws)
        for target in (lhs, lhs + Trajectory.impulses(2, {(rng.randint(0, 1), 0): 1})):
            assert (lhs == target) == (apply(t, ws) == apply(u, target))
    ws = Trajectory.constant_value((0, 0, 15, 10))
    assert apply(hs, ws) == g and apply(t, ws) == form.transformed_rhs
