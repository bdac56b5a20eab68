"""Unimodular row reduction over the Laurent ring.

The reduction works column by column.  Within a column it repeatedly picks
the entry of smallest degree span, scales it by a unit so that its lowest
exponent is 0 and its constant term is 1, and divides the other entries of
the column by it.  Spans strictly decrease, so the loop terminates with a
single nonzero entry which becomes the pivot.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .laurent import LaurentPoly, PolyMatrix, exact_div, is_unit, poly_divmod

__all__ = [
    "ReducedForm",
    "reduce",
    "det",
    "adjugate",
    "rank",
    "kernel_rank_deficit",
    "inverse_unimodular",
    "row_equivalence_multiplier",
    "is_staircase",
]


@dataclass(frozen=True)
class ReducedForm:
    U: PolyMatrix
    T: PolyMatrix
    rank: int
    pivot_cols: tuple[int, ...]

    def __str__(self):
        cols = ", ".join(str(c + 1) for c in self.pivot_cols)
        return (f"rank: {self.rank}\npivot columns: {cols or '-'}\n"
                f"U =\n{self.U}\nT =\n{self.T}")


def _normalizer(p: LaurentPoly) -> LaurentPoly:
    """The unit that turns ``p`` into lowest exponent 0 with constant term 1."""
    return LaurentPoly({-p.min_degree(): 1 / p.trailing_coeff()})


def reduce(m: PolyMatrix) -> ReducedForm:
    nrows, ncols = m.shape
    rows = [list(r) for r in m.entries]
    u = [list(r) for r in PolyMatrix.identity(nrows).entries]

    def scale_row(i, f):
        rows[i] = [f * e for e in rows[i]]
        u[i] = [f * e for e in u[i]]

    def sub_row(i, f, p):
        rows[i] = [a - f * b if b else a for a, b in zip(rows[i], rows[p])]
        u[i] = [a - f * b if b else a for a, b in zip(u[i], u[p])]

    r = 0
    pivots = []
    for c in range(ncols):
        if r == nrows:
            break
        while True:
            cand = [i for i in range(r, nrows) if rows[i][c]]
            if not cand:
                break
            p = min(cand, key=lambda i: (rows[i][c].span(), i))
            f = _normalizer(rows[p][c])
            if f != 1:
                scale_row(p, f)
            others = [i for i in cand if i != p]
            if not others:
                rows[r], rows[p] = rows[p], rows[r]
                u[r], u[p] = u[p], u[r]
                pivots.append(c)
                r += 1
                break
            for i in others:
                q, _ = poly_divmod(rows[i][c], rows[p][c])
                sub_row(i, q, p)
    return ReducedForm(PolyMatrix(u, cols=nrows), PolyMatrix(rows, cols=ncols), r, tuple(pivots))


def is_staircase(t: PolyMatrix, rank: int, pivot_cols: Sequence[int]) -> bool:
    """Rows below ``rank`` vanish and each pivot row starts at its pivot column."""
    if len(pivot_cols) != rank or list(pivot_cols) != sorted(set(pivot_cols)):
        return False
    for i in range(t.rows):
        row = t.row(i)
        if i >= rank:
            if any(row):
                return False
            continue
        c = pivot_cols[i]
        if not row[c] or any(row[j] for j in range(c)):
            return False
    return True


def det(m: PolyMatrix) -> LaurentPoly:
    """Exact determinant by Laplace expansion along the first free row."""
    if m.rows != m.cols:
        raise ValueError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    if n == 0:
        return LaurentPoly.const(1)
    entries = m.entries

    @lru_cache(maxsize=None)
    def minor(row: int, cols: frozenset) -> LaurentPoly:
        if row == n:
            return LaurentPoly.const(1)
        acc = LaurentPoly()
        for sign_idx, j in enumerate(sorted(cols)):
            e = entries[row][j]
            if not e:
                continue
            term = e * minor(row + 1, cols - {j})
            acc = acc - term if sign_idx % 2 else acc + term
        return acc

    return minor(0, frozenset(range(n)))


def adjugate(m: PolyMatrix) -> PolyMatrix:
    n = m.rows
    if n != m.cols:
        raise ValueError("adjugate of a non-square matrix")
    if n == 1:
        return PolyMatrix([[1]])
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = m.submatrix([r for r in range(n) if r != i], [c for c in range(n) if c != j])
            cof = det(sub)
            out[j][i] = -cof if (i + j) % 2 else cof
    return PolyMatrix(out, cols=n)


def inverse_unimodular(m: PolyMatrix) -> PolyMatrix:
    d = det(m)
    if not is_unit(d):
        raise ValueError(f"matrix is not unimodular (determinant {d})")
    return adjugate(m).map(lambda e: exact_div(e, d))


def rank(m: PolyMatrix) -> int:
    return reduce(m).rank


def kernel_rank_deficit(m: PolyMatrix) -> int:
    """Number of columns minus rank: the count of freely choosable kernel coordinates."""
    return m.cols - reduce(m).rank


def row_equivalence_multiplier(target: PolyMatrix, t: PolyMatrix) -> PolyMatrix | None:
    """Find a unimodular ``W`` with ``W @ t == target``, or ``None``.

    ``t`` must have full row rank.  ``W`` is solved on the pivot columns of
    ``t`` and then checked against every column.
    """
    if target.shape != t.shape:
        return None
    red = reduce(t)
    if red.rank != t.rows:
        raise ValueError("row_equivalence_multiplier needs a full-row-rank matrix")
    piv = list(red.pivot_cols)
    tp = t.submatrix(range(t.rows), piv)
    d = det(tp)
    num = target.submatrix(range(target.rows), piv) @ adjugate(tp)
    entries = []
    for row in num.entries:
        out = []
        for e in row:
            q = exact_div(e, d)
            if q is None:
                return None
            out.append(q)
        entries.append(out)
    w = PolyMatrix(entries, cols=t.rows)
    if w @ t != target or not is_unit(det(w)):
        return None
    return w
