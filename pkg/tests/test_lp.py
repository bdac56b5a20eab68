import itertools
import random
from fractions import Fraction

import pytest

from behavineq.lp import lp_solve


def _solve_square(a, b):
    """Gauss-Jordan over the rationals; ``None`` if singular."""
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(a, b)]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c]), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        m[c] = [x / m[c][c] for x in m[c]]
        for r in range(n):
            if r != c and m[r][c]:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[-1] for row in m]


def vertex_oracle(A, b, cost):
    """Minimize ``cost.x`` over ``A x <= b`` with ``x >= 0`` by enumerating vertices."""
    n = len(cost)
    rows = [list(r) for r in A] + [[-1 if i == j else 0 for j in range(n)] for i in range(n)]
    rhs = list(b) + [0] * n
    best = None
    for active in itertools.combinations(range(len(rows)), n):
        x = _solve_square([rows[i] for i in active], [rhs[i] for i in active])
        if x is None:
            continue
        if all(sum(Fraction(a) * v for a, v in zip(r, x)) <= h for r, h in zip(rows, rhs)):
            val = sum(Fraction(c) * v for c, v in zip(cost, x))
            if best is None or val < best:
                best = val
    return best


def test_simple_max():
    res = lp_solve([[1]], ["<="], [3], [1], maximize=True, nonneg=[True])
    assert res.optimal and res.value == 3 and res.x == (3,)


def test_infeasible():
    res = lp_solve([[1], [1]], ["<=", ">="], [1, 2], [0])
    assert res.status == "infeasible" and not res.optimal


def test_unbounded():
    res = lp_solve([[1]], [">="], [0], [1], maximize=True)
    assert res.status == "unbounded"


def test_free_variable_goes_negative():
    res = lp_solve([[1]], [">="], [-5], [1])
    assert res.value == -5


def test_equalities_and_redundant_rows():
    A = [[1, 1], [2, 2], [1, -1]]
    res = lp_solve(A, ["=", "=", "="], [2, 4, 0], [1, 0])
    assert res.optimal and res.x == (1, 1)


def test_degenerate_cycling_example():
    # classic instance on which the largest-coefficient rule cycles
    A = [[Fraction(1, 2), Fraction(-11, 2), Fraction(-5, 2), 9],
         [Fraction(1, 2), Fraction(-3, 2), Fraction(-1, 2), 1],
         [1, 0, 0, 0]]
    res = lp_solve(A, ["<="] * 3, [0, 0, 1], [10, -57, -9, -24], maximize=True,
                   nonneg=[True] * 4)
    assert res.optimal and res.value == 1


def test_input_validation():
    with pytest.raises(ValueError):
        lp_solve([[1]], ["<"], [1], [1])
    with pytest.raises(ValueError):
        lp_solve([[1, 2]], ["<="], [1], [1])
    with pytest.raises(ValueError):
        lp_solve([[1]], ["<=", "<="], [1], [1])


def test_against_vertex_enumeration():
    rng = random.Random(13)
    for _ in range(60):
        n, m = rng.randint(1, 3), rng.randint(1, 4)
        A = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
        b = [rng.randint(0, 6) for _ in range(m)]
        # box keeps the problem bounded so the vertex oracle is exact
        A += [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        b += [5] * n
        cost = [rng.randint(-3, 3) for _ in range(n)]
        res = lp_solve(A, ["<="] * len(A), b, cost, nonneg=[True] * n)
        assert res.optimal
        assert res.value == vertex_oracle(A, b, cost)
