"""Behavioral systems ``{R w = d, H w <= g}`` and the ``.bsys`` text format.

A model file is sectioned plain text::

    # comment
    [vars]
    x1 x2 u
    [eq]
    s - 2 | 0     | 0  = 0
    -1    | s + 1 | -1 = 0
    [ineq]
    1 | 0 | 0 <= 5

Entries are Laurent polynomials in ``s`` separated by ``|``.  The right-hand
side is a rational constant, optionally followed by a finite perturbation
``{k: value, ...}`` giving the row's value at individual time indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .laurent import SIGMA, LaurentPoly, PolyMatrix, as_fraction
from .trajectory import Extension, Trajectory

__all__ = [
    "BehavioralSystem",
    "ModelSyntaxError",
    "ModelDimensionError",
    "augment_mixed",
    "augment_slack",
    "lti_to_behavior",
    "lti_matrices",
    "box_constraint",
    "parse_poly",
    "parse_matrix",
    "parse_model",
    "serialize_model",
    "load_model",
    "inventory_model",
    "inventory_cost",
    "example1",
    "example2",
    "example3_slack",
    "example4",
]


class ModelSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ModelDimensionError(ValueError):
    def __init__(self, block: str, message: str):
        super().__init__(f"[{block}] {message}")
        self.block = block


@dataclass(frozen=True)
class BehavioralSystem:
    q: int
    R: PolyMatrix | None = None
    d: Trajectory | None = None
    H: PolyMatrix | None = None
    g: Trajectory | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        if (self.R is None) != (self.d is None):
            raise ModelDimensionError("eq", "R and d must be given together")
        if (self.H is None) != (self.g is None):
            raise ModelDimensionError("ineq", "H and g must be given together")
        if self.R is None and self.H is None:
            raise ModelDimensionError("model", "need at least one equality or inequality block")
        for block, m, rhs in (("eq", self.R, self.d), ("ineq", self.H, self.g)):
            if m is None:
                continue
            if m.cols != self.q:
                raise ModelDimensionError(block, f"{m.cols} columns but {self.q} variables")
            if rhs.dim != m.rows:
                raise ModelDimensionError(block, f"right-hand side has dim {rhs.dim} "
                                                 f"but there are {m.rows} rows")
            if rhs.extension is not Extension.QUASI_CONSTANT:
                raise ModelDimensionError(block, "right-hand side must be quasi-constant")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != self.q:
                raise ModelDimensionError("vars", f"{len(self.names)} names for {self.q} variables")

    @property
    def n_eq(self) -> int:
        return 0 if self.R is None else self.R.rows

    @property
    def n_ineq(self) -> int:
        return 0 if self.H is None else self.H.rows

    def variable_names(self) -> tuple[str, ...]:
        return self.names or tuple(f"w{i + 1}" for i in range(self.q))

    def stacked_operator(self) -> PolyMatrix:
        """``[R; H]``, whose adjoint is the dual operator of the mixed system."""
        return PolyMatrix.vstack(self.R, self.H)


def _stack_rhs(parts: Sequence[Trajectory]) -> Trajectory:
    lo = min(p.start for p in parts)
    hi = max(p.end for p in parts)
    vals = tuple(sum((p.value_at(k) for p in parts), ()) for k in range(lo, hi + 1))
    const = sum((p.constant for p in parts), ())
    return Trajectory(len(const), lo, vals, Extension.QUASI_CONSTANT, const)


def augment_mixed(sys: BehavioralSystem) -> tuple[PolyMatrix, Trajectory]:
    """Rewrite ``R w = d, H w <= g`` as the single inequality ``[R; -R; H] w <= [d; -d; g]``."""
    if sys.R is None:
        return sys.H, sys.g
    mats = [sys.R, -sys.R] + ([sys.H] if sys.H is not None else [])
    rhs = [sys.d, -sys.d] + ([sys.g] if sys.g is not None else [])
    return PolyMatrix.vstack(*mats), _stack_rhs(rhs)


def augment_slack(h: PolyMatrix, g: Trajectory) -> tuple[PolyMatrix, Trajectory]:
    """``[H I]``: the inequality ``H w <= g`` becomes ``H w + s = g`` with ``s >= 0``."""
    return PolyMatrix.hstack(h, PolyMatrix.identity(h.rows)), g


# -- LTI systems ------------------------------------------------------------

def _const_matrix(a, rows: int | None = None, cols: int | None = None) -> list[list[Fraction]]:
    if a is None:
        return [[Fraction(0)] * (cols or 0) for _ in range(rows or 0)]
    out = [[as_fraction(x) for x in (r if isinstance(r, (list, tuple)) else [r])] for r in a]
    if rows is not None and len(out) != rows:
        raise ValueError(f"expected {rows} rows, got {len(out)}")
    if cols is not None and any(len(r) != cols for r in out):
        raise ValueError(f"expected {cols} columns")
    return out


def box_constraint(lower: Sequence, upper: Sequence) -> tuple[list[list[int]], list]:
    """``lower <= v <= upper`` as ``F v <= bound``, two rows per component."""
    n = len(lower)
    f, bound = [], []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        f.append(e)
        bound.append(upper[i])
        f.append([-x for x in e])
        bound.append(-as_fraction(lower[i]))
    return f, bound


def lti_to_behavior(A, B, C=None, D=None, constraints: Iterable = ()) -> BehavioralSystem:
    """Kernel form of ``x(k+1) = A x + B u``, ``y = C x + D u`` plus polytopic limits.

    ``w`` stacks ``(x, u, y)``; without ``C`` the output block is dropped.
    Each constraint is ``(selector, F, bound)`` meaning ``F v <= bound`` where
    ``v`` is the state, input or output, or ``(s - 1) u`` for ``"input-rate"``.
    """
    a = _const_matrix(A)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("A must be square")
    b = _const_matrix(B, rows=n)
    m = len(b[0]) if b else 0
    p = 0
    if C is not None:
        c = _const_matrix(C, cols=n)
        p = len(c)
        d = _const_matrix(D, rows=p, cols=m) if D is not None else _const_matrix(None, p, m)
    q = n + m + p
    rows = []
    for i in range(n):
        row = [(SIGMA if i == j else 0) - a[i][j] for j in range(n)]
        row += [-x for x in b[i]] + [0] * p
        rows.append(row)
    for i in range(p):
        row = [-x for x in c[i]] + [-x for x in d[i]]
        row += [1 if i == j else 0 for j in range(p)]
        rows.append(row)
    R = PolyMatrix(rows, cols=q)

    slots = {"state": (0, n), "input": (n, m), "output": (n + m, p), "input-rate": (n, m)}
    h_rows, g_vals = [], []
    for selector, F, bound in constraints:
        if selector not in slots:
            raise ValueError(f"unknown constraint selector {selector!r}")
        off, width = slots[selector]
        f = _const_matrix(F, cols=width)
        if len(bound) != len(f):
            raise ValueError(f"{selector} constraint: {len(f)} rows but {len(bound)} bounds")
        mult = SIGMA - 1 if selector == "input-rate" else LaurentPoly.const(1)
        for fr, bnd in zip(f, bound):
            row = [LaurentPoly()] * q
            for j, x in enumerate(fr):
                row[off + j] = mult * x
            h_rows.append(row)
            g_vals.append(as_fraction(bnd))
    names = [f"x{i + 1}" for i in range(n)]
    names += ["u"] if m == 1 else [f"u{i + 1}" for i in range(m)]
    names += ["y"] if p == 1 else [f"y{i + 1}" for i in range(p)]
    H = g = None
    if h_rows:
        H = PolyMatrix(h_rows, cols=q)
        g = Trajectory.constant_value(g_vals)
    return BehavioralSystem(q, R, Trajectory.constant_value([0] * R.rows), H, g, tuple(names))


def lti_matrices(sys: BehavioralSystem) -> tuple[list[list[Fraction]], list[list[Fraction]]]:
    """Recover ``(A, B)`` from an equality block of the form ``[sI - A, -B, 0; ...]``."""
    if sys.R is None:
        raise ValueError("model has no equality block")
    rng = sys.R.degree_range()
    if rng is None or rng[0] < 0 or rng[1] > 1:
        raise ValueError("equality block is not a first-order state recursion")
    lead = sys.R.coefficient(1)
    n = sum(1 for r in lead if any(r))
    for i in range(sys.R.rows):
        expect = [Fraction(1 if (i == j and i < n) else 0) for j in range(sys.q)]
        if lead[i] != expect:
            raise ValueError("equality block is not of the form [sI - A, -B, ...]")
    c0 = sys.R.coefficient(0)
    a = [[-c0[i][j] for j in range(n)] for i in range(n)]
    m = sys.q - n - (sys.R.rows - n)
    b = [[-c0[i][j] for j in range(n, n + m)] for i in range(n)]
    return a, b


# -- polynomial grammar -----------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+|\.\d+)?)|(?P<sym>[s^*+\-]))")


class _PolyCursor:
    def __init__(self, text: str, line: int, column: int):
        self.line = line
        self.toks = []
        pos = 0
        end = len(text.rstrip())
        while pos < end:
            mt = _TOKEN.match(text, pos)
            if not mt:
                j = pos + len(text[pos:]) - len(text[pos:].lstrip())
                raise ModelSyntaxError(f"unexpected character {text[j]!r}", line, column + j)
            kind = "num" if mt.group("num") else mt.group("sym")
            self.toks.append((kind, mt.group(mt.lastgroup), column + mt.start(mt.lastgroup)))
            pos = mt.end()
        self.end_col = column + end
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end_col)

    def advance(self):
        self.i += 1

    def fail(self, what):
        k, v, c = self.peek()
        got = "end of input" if k is None else repr(v)
        raise ModelSyntaxError(f"expected {what}, got {got}", self.line, c)

    def exponent(self) -> int:
        if self.peek()[0] != "^":
            return 1
        self.advance()
        sign = 1
        if self.peek()[0] in ("+", "-"):
            sign = -1 if self.peek()[0] == "-" else 1
            self.advance()
        k, v, _ = self.peek()
        if k != "num" or not v.isdigit():
            self.fail("an integer exponent after '^'")
        self.advance()
        return sign * int(v)


def parse_poly(text: str, line: int = 1, column: int = 1) -> LaurentPoly:
    """Parse ``c*s^k`` terms joined by ``+`` and ``-``, e.g. ``1 - s^-1 - 1/2*s^-2``.

    ``line`` and ``column`` locate ``text`` inside a larger file for error
    messages.
    """
    cur = _PolyCursor(text, line, column)
    if not cur.toks:
        raise ModelSyntaxError("empty polynomial", line, column)
    acc = LaurentPoly()
    first = True
    while cur.peek()[0] is not None:
        sign = 1
        k = cur.peek()[0]
        if k in ("+", "-"):
            sign = -1 if k == "-" else 1
            cur.advance()
        elif not first:
            cur.fail("'+' or '-' between terms")
        first = False
        k, v, _ = cur.peek()
        if k == "num":
            coeff = Fraction(v)
            cur.advance()
            if cur.peek()[0] == "*":
                cur.advance()
                if cur.peek()[0] != "s":
                    cur.fail("'s' after '*'")
            if cur.peek()[0] == "s":
                cur.advance()
                acc += LaurentPoly({cur.exponent(): sign * coeff})
            else:
                acc += LaurentPoly({0: sign * coeff})
        elif k == "s":
            cur.advance()
            acc += LaurentPoly({cur.exponent(): sign})
        else:
            cur.fail("a number or 's'")
    return acc


def parse_matrix(text: str, line: int = 1, column: int = 1) -> PolyMatrix:
    """Parse ``a | b ; c | d`` (rows separated by ``;``, entries by ``|``)."""
    rows = []
    offset = 0
    for chunk in text.split(";"):
        cells = []
        col_off = offset
        for cell in chunk.split("|"):
            lead = len(cell) - len(cell.lstrip())
            cells.append(parse_poly(cell.strip(), line, column + col_off + lead))
            col_off += len(cell) + 1
        rows.append(cells)
        offset += len(chunk) + 1
    if len({len(r) for r in rows}) != 1:
        raise ModelDimensionError("matrix", "rows have different numbers of entries")
    return PolyMatrix(rows)


# -- model files ------------------------------------------------------------

_SECTION = re.compile(r"^\[(\w+)\]$")
_RHS = re.compile(r"(<=|=)")


def _parse_rhs(text: str, line: int, column: int) -> tuple[Fraction, dict[int, Fraction]]:
    text_s = text.strip()
    lead = len(text) - len(text.lstrip())
    pert: dict[int, Fraction] = {}
    base = text_s
    if "{" in text_s:
        brace = text_s.index("{")
        if not text_s.endswith("}"):
            raise ModelSyntaxError("unterminated perturbation '{...}'", line,
                                   column + lead + len(text_s))
        base = text_s[:brace].strip()
        body = text_s[brace + 1:-1]
        for item in filter(None, (x.strip() for x in body.split(","))):
            if ":" not in item:
                raise ModelSyntaxError(f"expected 'index: value', got {item!r}", line,
                                       column + lead + brace)
            k, v = item.split(":", 1)
            try:
                pert[int(k)] = Fraction(v.strip())
            except ValueError:
                raise ModelSyntaxError(f"bad perturbation entry {item!r}", line,
                                       column + lead + brace) from None
    try:
        value = Fraction(base)
    except (ValueError, ZeroDivisionError):
        raise ModelSyntaxError(f"expected a rational right-hand side, got {base!r}", line,
                               column + lead) from None
    return value, pert


def _rhs_trajectory(entries: list[tuple[Fraction, dict[int, Fraction]]]) -> Trajectory:
    const = tuple(c for c, _ in entries)
    idx = sorted({k for _, p in entries for k in p})
    if not idx:
        return Trajectory.constant_value(const)
    lo, hi = idx[0], idx[-1]
    vals = [tuple(p.get(k, c) for c, p in entries) for k in range(lo, hi + 1)]
    return Trajectory.quasi_constant(const, vals, lo)


def parse_model(text: str) -> BehavioralSystem:
    names = None
    section = None
    blocks: dict[str, list] = {"eq": [], "ineq": []}
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        mt = _SECTION.match(stripped)
        if mt:
            section = mt.group(1)
            if section not in ("vars", "eq", "ineq"):
                raise ModelSyntaxError(f"unknown section [{section}]", lineno,
                                       line.index("[") + 1)
            if section in seen:
                raise ModelSyntaxError(f"duplicate section [{section}]", lineno,
                                       line.index("[") + 1)
            seen.add(section)
            continue
        if section is None:
            raise ModelSyntaxError("content before the first section header", lineno,
                                   len(line) - len(line.lstrip()) + 1)
        if section == "vars":
            if names is not None:
                raise ModelSyntaxError("[vars] takes a single line", lineno, 1)
            names = tuple(stripped.split())
            continue
        rel = "<=" if section == "ineq" else "="
        ops = [(m.start(), m.group(1)) for m in _RHS.finditer(line)]
        if len(ops) != 1 or ops[0][1] != rel:
            col = ops[0][0] + 1 if ops else len(line) + 1
            raise ModelSyntaxError(f"each [{section}] row needs exactly one '{rel}'", lineno, col)
        at = ops[0][0]
        lhs, rhs = line[:at], line[at + len(rel):]
        cells = []
        off = 0
        for cell in lhs.split("|"):
            lead = len(cell) - len(cell.lstrip())
            if not cell.strip():
                raise ModelSyntaxError("empty matrix entry", lineno, off + lead + 1)
            cells.append(parse_poly(cell.strip(), lineno, off + lead + 1))
            off += len(cell) + 1
        blocks[section].append((lineno, cells, _parse_rhs(rhs, lineno, at + len(rel) + 1)))

    all_rows = blocks["eq"] + blocks["ineq"]
    if not all_rows:
        raise ModelDimensionError("model", "no equality or inequality rows")
    q = len(names) if names is not None else len(all_rows[0][1])
    for block in ("eq", "ineq"):
        for lineno, cells, _ in blocks[block]:
            if len(cells) != q:
                raise ModelDimensionError(block, f"row on line {lineno} has {len(cells)} "
                                                 f"entries, expected {q}")
    parts = {}
    for block in ("eq", "ineq"):
        rows = blocks[block]
        if rows:
            parts[block] = (PolyMatrix([c for _, c, _ in rows], cols=q),
                            _rhs_trajectory([r for _, _, r in rows]))
    R, d = parts.get("eq", (None, None))
    H, g = parts.get("ineq", (None, None))
    return BehavioralSystem(q, R, d, H, g, names)


def _rhs_text(traj: Trajectory, i: int) -> str:
    c = traj.constant[i]
    pert = {k: traj.value_at(k)[i] for k in range(traj.start, traj.end + 1)
            if traj.value_at(k)[i] != c}
    if not pert:
        return str(c)
    return f"{c} {{" + ", ".join(f"{k}: {v}" for k, v in pert.items()) + "}"


def serialize_model(sys: BehavioralSystem, comments: Sequence[str] = ()) -> str:
    out = [f"# {c}" for c in comments]
    if sys.names is not None:
        out += ["[vars]", " ".join(sys.names)]
    for block, m, rhs, rel in (("eq", sys.R, sys.d, "="), ("ineq", sys.H, sys.g, "<=")):
        if m is None:
            continue
        out.append(f"[{block}]")
        cells = [[str(e) for e in row] for row in m.entries]
        widths = [max(len(cells[i][j]) for i in range(m.rows)) for j in range(m.cols)]
        for i, row in enumerate(cells):
            lhs = " | ".join(c.ljust(w) for c, w in zip(row, widths))
            out.append(f"{lhs} {rel} {_rhs_text(rhs, i)}")
    return "\n".join(out) + "\n"


def load_model(path) -> BehavioralSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


# -- worked systems ---------------------------------------------------------

def example1() -> BehavioralSystem:
    """``(s^2 - s + 1) w <= 2``."""
    H = PolyMatrix([[SIGMA**2 - SIGMA + 1]])
    return BehavioralSystem(1, H=H, g=Trajectory.constant_value([2]), names=("w",))


def example2() -> BehavioralSystem:
    H = PolyMatrix([[SIGMA + 1, 1], [1, SIGMA]])
    return BehavioralSystem(2, H=H, g=Trajectory.constant_value([15, 10]), names=("w1", "w2"))


def example3_slack() -> BehavioralSystem:
    """Example 2 with explicit slacks: ``[H I] (w, s) = g`` and ``s >= 0``."""
    ex = example2()
    hs, g = augment_slack(ex.H, ex.g)
    nonneg = PolyMatrix([[0, 0, -1, 0], [0, 0, 0, -1]])
    return BehavioralSystem(4, hs, g, nonneg, Trajectory.constant_value([0, 0]),
                            names=("w1", "w2", "s1", "s2"))


def example4() -> BehavioralSystem:
    """Unstable ``x1`` under box limits: infeasible."""
    return lti_to_behavior(
        A=[[2, 0], [1, -1]],
        B=[[0], [1]],
        constraints=[
            ("state", *box_constraint([1, -5], [5, 5])),
            ("input", *box_constraint([-1], [1])),
        ],
    )


def inventory_model(printed_sign: bool = False) -> BehavioralSystem:
    """Warehouse stock ``x``, orders ``u`` and demand ``d`` with ``w = (x, u, d)``.

    The dynamics ``x(k+1) = x(k) + u(k) - d(k)`` give the equality row
    ``[s - 1, -1, 1]``.  ``printed_sign=True`` uses ``[s - 1, -1, -1]``
    instead, which is how the row is sometimes displayed.
    """
    R = PolyMatrix([[SIGMA - 1, -1, -1 if printed_sign else 1]])
    H = PolyMatrix([[-1, -1, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]])
    return BehavioralSystem(3, R, Trajectory.constant_value([0]), H,
                            Trajectory.constant_value([0, 0, 0, 0]), names=("x", "u", "d"))


def inventory_cost(w: Trajectory, cost: Trajectory, u_index: int = 1) -> Fraction:
    """``J = sum_k c_k u(k)`` over the window of ``w``; ``cost`` must cover that window."""
    lo, hi = w.window
    stored_only = cost.extension in (Extension.FINITE, Extension.BOUNDED)
    if stored_only and (cost.start > lo or cost.end < hi):
        raise ValueError(f"cost weights on [{cost.start}, {cost.end}] do not cover "
                         f"the trajectory window [{lo}, {hi}]")
    return sum((cost.value_at(k)[0] * w.value_at(k)[u_index] for k in range(lo, hi + 1)),
               Fraction(0))
