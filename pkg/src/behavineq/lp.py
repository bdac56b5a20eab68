"""Exact two-phase simplex over the rationals.

Dense tableau, :class:`~fractions.Fraction` entries, Bland's least-index rule
for both the entering and leaving choice so that degenerate problems cannot
cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .laurent import as_fraction

__all__ = ["LPResult", "lp_solve"]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int], ncols: int):
        self.rows = rows          # each row: ncols coefficients then rhs
        self.basis = basis
        self.ncols = ncols
        self.reduced: list[Fraction] = []
        self.obj = Fraction(0)

    def set_cost(self, cost: Sequence[Fraction]):
        red = list(cost) + [Fraction(0)]
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j, v in enumerate(row):
                    if v:
                        red[j] -= cb * v
        self.reduced = red[:-1]
        self.obj = -red[-1]

    def pivot(self, r: int, c: int):
        prow = self.rows[r]
        piv = prow[c]
        if piv != 1:
            prow = [v / piv for v in prow]
            self.rows[r] = prow
        nz = [j for j, v in enumerate(prow) if v]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        f = self.reduced[c]
        if f:
            for j in nz:
                if j < self.ncols:
                    self.reduced[j] -= f * prow[j]
            self.obj += f * prow[-1]
        self.basis[r] = c

    def run(self, allowed: Sequence[bool]) -> str:
        while True:
            enter = next((j for j in range(self.ncols)
                          if allowed[j] and self.reduced[j] < 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)


def lp_solve(A: Sequence[Sequence], relations: Sequence[str], b: Sequence,
             objective: Sequence, *, maximize: bool = False,
             nonneg: Sequence[bool] | None = None) -> LPResult:
    """Optimize ``objective . x`` subject to ``A x (rel) b`` row by row.

    ``relations`` holds ``"<="``, ``">="`` or ``"="`` per row.  Variables are
    free unless ``nonneg[j]`` is true.
    """
    n = len(objective)
    m = len(A)
    if len(relations) != m or len(b) != m:
        raise ValueError("A, relations and b must have the same number of rows")
    if any(len(row) != n for row in A):
        raise ValueError("every constraint row needs one coefficient per variable")
    if nonneg is None:
        nonneg = [False] * n
    if len(nonneg) != n:
        raise ValueError("nonneg mask has the wrong length")

    # structural columns: nonneg vars get one column, free vars a +/- pair
    var_cols: list[list[tuple[int, int]]] = []
    ncols = 0
    for j in range(n):
        if nonneg[j]:
            var_cols.append([(ncols, 1)])
            ncols += 1
        else:
            var_cols.append([(ncols, 1), (ncols + 1, -1)])
            ncols += 2
    slack_of = {}
    for i, rel in enumerate(relations):
        if rel not in ("<=", ">=", "="):
            raise ValueError(f"unknown relation {rel!r}")
        if rel != "=":
            slack_of[i] = ncols
            ncols += 1

    rows: list[list[Fraction]] = []
    for i in range(m):
        row = [Fraction(0)] * ncols
        for j, a in enumerate(A[i]):
            a = as_fraction(a)
            if a:
                for col, sgn in var_cols[j]:
                    row[col] = sgn * a
        if i in slack_of:
            row[slack_of[i]] = Fraction(1 if relations[i] == "<=" else -1)
        rhs = as_fraction(b[i])
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        rows.append(row + [rhs])

    basis = []
    n_art = 0
    for i, row in enumerate(rows):
        s = slack_of.get(i)
        if s is not None and row[s] == 1:
            basis.append(s)
        else:
            basis.append(-1)
            n_art += 1
    total = ncols + n_art
    art = ncols
    for i, row in enumerate(rows):
        row[ncols:ncols] = [Fraction(0)] * n_art
        if basis[i] == -1:
            row[art] = Fraction(1)
            basis[i] = art
            art += 1

    tab = _Tableau(rows, basis, total)
    if n_art:
        tab.set_cost([Fraction(0)] * ncols + [Fraction(1)] * n_art)
        tab.run([True] * total)
        if tab.obj > 0:
            return LPResult(INFEASIBLE)
        # drive zero-level artificials out; drop rows that are redundant
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= ncols:
                row = tab.rows[i]
                c = next((j for j in range(ncols) if row[j]), None)
                if c is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, c)
            i += 1

    cost = [Fraction(0)] * total
    sign = -1 if maximize else 1
    for j in range(n):
        cj = as_fraction(objective[j])
        for col, sg in var_cols[j]:
            cost[col] = sign * sg * cj
    tab.set_cost(cost)
    status = tab.run([j < ncols for j in range(total)])
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    level = [Fraction(0)] * total
    for i, bcol in enumerate(tab.basis):
        level[bcol] = tab.rows[i][-1]
    x = tuple(sum((sg * level[col] for col, sg in var_cols[j]), Fraction(0)) for j in range(n))
    value = sum((as_fraction(objective[j]) * x[j] for j in range(n)), Fraction(0))
    return LPResult(OPTIMAL, x, value)
