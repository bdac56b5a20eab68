"""Slack parametrization of ``H w <= g``.

The inequality is rewritten as ``[H I] (w, s) = g`` with ``s >= 0`` and
row-reduced to ``U [H I] (w, s) = U g``.  Each nonzero row of the reduced
matrix has a pivot polynomial with lowest exponent 0, so the row can be
solved for the pivot variable at its highest shift.  Given initial values
and any nonnegative slack, :func:`rollout` runs these recurrences forward.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .laurent import PolyMatrix, as_fraction
from .model import augment_slack
from .reduction import ReducedForm, reduce
from .trajectory import Trajectory, apply, orthant_check, satisfies

__all__ = [
    "RecurrenceRow",
    "RecursiveForm",
    "RolloutError",
    "build_recursive_form",
    "required_footprint",
    "rollout",
    "residual_slack",
]


class RolloutError(ValueError):
    pass


@dataclass(frozen=True)
class RecurrenceRow:
    row: int
    pivot: int
    lead: int
    terms: tuple[tuple[int, int, Fraction], ...]  # (column, shift, coefficient)

    @property
    def lead_coeff(self) -> Fraction:
        return next(c for j, sh, c in self.terms if j == self.pivot and sh == self.lead)


@dataclass(frozen=True)
class RecursiveForm:
    H: PolyMatrix
    g: Trajectory
    reduced: ReducedForm
    transformed_rhs: Trajectory
    rows: tuple[RecurrenceRow, ...]
    free_slack_indices: tuple[int, ...]
    free_w_indices: tuple[int, ...]
    names: tuple[str, ...]

    @property
    def q(self) -> int:
        return self.H.cols

    @property
    def l(self) -> int:  # noqa: E743
        return self.H.rows

    def determined_slack_indices(self) -> tuple[int, ...]:
        return tuple(r.pivot - self.q for r in self.rows if r.pivot >= self.q)

    def equations(self) -> list[str]:
        """The recurrences written out, one string per pivot row."""
        out = []
        for rec in self.rows:
            parts = []
            for j, sh, c in rec.terms:
                t = "k" if sh == 0 else f"k{sh:+d}"
                mag = abs(c)
                body = f"{self.names[j]}({t})" if mag == 1 else f"{mag}*{self.names[j]}({t})"
                if not parts:
                    parts.append(("-" if c < 0 else "") + body)
                else:
                    parts.append((" - " if c < 0 else " + ") + body)
            rhs = self.transformed_rhs.component(rec.row)
            const = rhs.constant_part()
            rhs_text = str(const[0]) if const is not None else f"r{rec.row + 1}(k)"
            out.append("".join(parts) + f" = {rhs_text}")
        return out

    def __str__(self):
        free = ", ".join(self.names[self.q + i] for i in self.free_slack_indices) or "-"
        return "\n".join(self.equations() + [f"free slacks: {free}"])


def build_recursive_form(H: PolyMatrix, g: Trajectory,
                         names: tuple[str, ...] | None = None) -> RecursiveForm:
    hs, _ = augment_slack(H, g)
    red = reduce(hs)
    rhs = apply(red.U, g)
    q, l = H.cols, H.rows
    if names is None:
        names = tuple(f"w{i + 1}" for i in range(q))
    names = tuple(names) + tuple(f"s{i + 1}" for i in range(l))
    rows = []
    for r, c in enumerate(red.pivot_cols):
        terms = tuple((j, sh, coef) for j, e in enumerate(red.T.row(r)) for sh, coef in e.terms)
        rows.append(RecurrenceRow(r, c, red.T[r, c].max_degree(), terms))
    pivots = set(red.pivot_cols)
    free_s = tuple(j - q for j in range(q, q + l) if j not in pivots)
    free_w = tuple(j for j in range(q) if j not in pivots)
    return RecursiveForm(H, g, red, rhs, tuple(rows), free_s, free_w, names)


class _Solver:
    def __init__(self, form: RecursiveForm, start: int, initial: Mapping, slack, record=None):
        self.form = form
        self.start = start
        self.initial = initial
        self.slack = slack
        self.record = record
        self.memo: dict[tuple[int, int], Fraction] = {}
        self.by_pivot = {r.pivot: r for r in form.rows}

    def value(self, j: int, t: int) -> Fraction:
        key = (j, t)
        if key in self.memo:
            return self.memo[key]
        form = self.form
        row = self.by_pivot.get(j)
        if row is None:
            if j >= form.q:
                v = self._slack(j - form.q, t)
            else:
                v = as_fraction(self.initial.get(key, 0))
        elif key in self.initial:
            v = as_fraction(self.initial[key])
        elif t < self.start + row.lead:
            if self.record is None:
                raise RolloutError(f"missing initial value {form.names[j]}({t})")
            self.record.add(key)
            v = Fraction(0)
        else:
            k = t - row.lead
            acc = self.form.transformed_rhs.value_at(k)[row.row]
            for col, sh, c in row.terms:
                if col == j and sh == row.lead:
                    continue
                acc -= c * self.value(col, k + sh)
            v = acc / row.lead_coeff
        self.memo[key] = v
        return v

    def _slack(self, i: int, t: int) -> Fraction:
        if self.slack is None:
            return Fraction(0)
        if not self.slack.is_defined(t):
            raise RolloutError(f"slack window [{self.slack.start}, {self.slack.end}] "
                               f"is shorter than the horizon (needs index {t})")
        return self.slack.value_at(t)[i]


def _run(form: RecursiveForm, solver: _Solver, start: int, horizon: int) -> list[list[Fraction]]:
    order = [r.pivot for r in reversed(form.rows) if r.pivot < form.q]
    order += list(form.free_w_indices)
    grid = [[Fraction(0)] * form.q for _ in range(horizon + 1)]
    for j in order:
        for t in range(start, start + horizon + 1):
            grid[t - start][j] = solver.value(j, t)
    for r in form.rows:
        if r.pivot >= form.q:
            for t in range(start, start + horizon + 1):
                solver.value(r.pivot, t)
    return grid


def required_footprint(form: RecursiveForm, start: int, horizon: int) -> list[tuple[int, int]]:
    """The ``(column, time)`` pairs a rollout over ``[start, start+horizon]`` needs as input.

    Free slack components are not part of the footprint; they come from the
    slack trajectory.  Free ``w`` components default to zero.
    """
    seen: set[tuple[int, int]] = set()
    _run(form, _Solver(form, start, {}, None, record=seen), start, horizon)
    return sorted(seen, key=lambda jt: (jt[0], jt[1]))


def rollout(form: RecursiveForm, initial: Mapping[tuple[int, int], object],
            slack: Trajectory | None = None, horizon: int = 10,
            start: int | None = None) -> Trajectory:
    """Run the recurrences forward and return ``w`` on ``[start, start + horizon]``.

    ``initial`` maps ``(column, time)`` to a value and must cover exactly
    :func:`required_footprint`.  ``slack`` has one component per inequality
    row; components that the reduction determines are computed rather than
    read, and unspecified slack is zero.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    if start is None:
        start = min((t for _, t in initial), default=0)
    if slack is not None:
        if slack.dim != form.l:
            raise RolloutError(f"slack has dim {slack.dim}, expected {form.l}")
        if not orthant_check(slack):
            raise RolloutError("slack must be nonnegative")
    need = set(required_footprint(form, start, horizon))
    have = set(initial)
    missing = need - have
    if missing:
        listed = ", ".join(f"{form.names[j]}({t})" for j, t in sorted(missing))
        raise RolloutError(f"initial assignment incomplete: missing {listed}")
    extra = {(j, t) for j, t in have - need if j not in form.free_w_indices}
    if extra:
        listed = ", ".join(f"{form.names[j]}({t})" for j, t in sorted(extra))
        raise RolloutError(f"initial assignment over-determined: {listed} are computed")

    solver = _Solver(form, start, dict(initial), slack)
    grid = _run(form, solver, start, horizon)
    for (j, t), v in solver.memo.items():
        if j >= form.q and j in solver.by_pivot and v < 0:
            raise RolloutError(f"determined slack {form.names[j]}({t}) = {v} is negative")
    w = Trajectory.bounded([tuple(r) for r in grid], start)
    try:
        ok = satisfies(form.H, w, form.g, "leq")
    except ValueError:
        ok = True  # horizon shorter than the operator's reach: nothing to check
    if not ok:
        raise RolloutError("rolled-out trajectory violates the inequality; "
                           "initial values are inconsistent with the system")
    return w


def residual_slack(H: PolyMatrix, g: Trajectory, w: Trajectory) -> Trajectory:
    """``g - H w``; nonnegative exactly when ``w`` solves ``H w <= g``."""
    return g - apply(H, w)
