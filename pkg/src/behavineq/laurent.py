"""Exact Laurent polynomials in the shift indeterminate and matrices of them.

Coefficients are :class:`fractions.Fraction`; nothing in here uses floating
point.  The shift ``s`` stands for the forward shift and ``s^-1`` for the
delay, so ``s - 2`` acting on a sequence ``w`` gives ``w(k+1) - 2 w(k)``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

__all__ = [
    "LaurentPoly",
    "PolyMatrix",
    "as_fraction",
    "poly_mul",
    "poly_divmod",
    "exact_div",
    "mat_mul",
    "adjoint",
    "is_unit",
    "unit_test",
    "SIGMA",
    "SIGMA_INV",
]


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, decimal strings and floats to an exact Fraction.

    Floats go through ``repr`` so that ``0.1`` becomes ``1/10`` rather than
    the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


class LaurentPoly:
    """A Laurent polynomial ``sum c_i s^i`` with rational coefficients.

    Immutable.  The zero polynomial has no terms and its degree queries
    return ``None``.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for deg, coeff in items:
            if not isinstance(deg, int) or isinstance(deg, bool):
                raise TypeError(f"degree must be an int, got {deg!r}")
            acc[deg] = acc.get(deg, Fraction(0)) + as_fraction(coeff)
        self._terms = tuple(sorted((d, c) for d, c in acc.items() if c != 0))
        self._hash = None

    @classmethod
    def const(cls, c) -> LaurentPoly:
        return cls({0: c})

    @classmethod
    def monomial(cls, c, k: int) -> LaurentPoly:
        return cls({k: c})

    @classmethod
    def coerce(cls, value) -> LaurentPoly:
        if isinstance(value, LaurentPoly):
            return value
        return cls.const(value)

    @property
    def terms(self) -> tuple[tuple[int, Fraction], ...]:
        """``(degree, coefficient)`` pairs in increasing degree."""
        return self._terms

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def min_degree(self) -> int | None:
        return self._terms[0][0] if self._terms else None

    def max_degree(self) -> int | None:
        return self._terms[-1][0] if self._terms else None

    def span(self) -> int | None:
        if not self._terms:
            return None
        return self._terms[-1][0] - self._terms[0][0]

    def coeff(self, k: int) -> Fraction:
        for d, c in self._terms:
            if d == k:
                return c
        return Fraction(0)

    def leading_coeff(self) -> Fraction | None:
        return self._terms[-1][1] if self._terms else None

    def trailing_coeff(self) -> Fraction | None:
        return self._terms[0][1] if self._terms else None

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by ``s^k``."""
        return LaurentPoly((d + k, c) for d, c in self._terms)

    def reflect(self) -> LaurentPoly:
        """Substitute ``s -> s^-1``."""
        return LaurentPoly((-d, c) for d, c in self._terms)

    def scale(self, c) -> LaurentPoly:
        c = as_fraction(c)
        return LaurentPoly((d, c * v) for d, v in self._terms)

    def evaluate(self, x=1) -> Fraction:
        x = as_fraction(x)
        if x == 0 and self._terms and self._terms[0][0] < 0:
            raise ZeroDivisionError("negative powers at s = 0")
        return sum((c * x**d for d, c in self._terms), Fraction(0))

    def __add__(self, other):
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        acc = dict(self._terms)
        for d, c in other._terms:
            acc[d] = acc.get(d, Fraction(0)) + c
        return LaurentPoly(acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly((d, -c) for d, c in self._terms)

    def __sub__(self, other):
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other):
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not is_unit(self):
                raise ValueError("only units have negative powers")
            ((d, c),) = self._terms
            return LaurentPoly({d * n: c**n})
        out = LaurentPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self._terms == other._terms
        try:
            return self._terms == LaurentPoly.coerce(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"LaurentPoly({str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for d, c in reversed(self._terms):
            mag = abs(c)
            if d == 0:
                body = str(mag)
            else:
                sym = "s" if d == 1 else f"s^{d}"
                body = sym if mag == 1 else f"{mag}*{sym}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)


SIGMA = LaurentPoly({1: 1})
SIGMA_INV = LaurentPoly({-1: 1})


def poly_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    acc: dict[int, Fraction] = {}
    for d1, c1 in p.terms:
        for d2, c2 in q.terms:
            acc[d1 + d2] = acc.get(d1 + d2, Fraction(0)) + c1 * c2
    return LaurentPoly(acc)


def is_unit(p: LaurentPoly) -> bool:
    """True iff ``p = c s^k`` with ``c != 0``; these are the units of the ring."""
    return len(p.terms) == 1


unit_test = is_unit


def poly_divmod(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Division with remainder measured by degree span.

    Returns ``(q, r)`` with ``a = q*b + r`` and either ``r == 0`` or
    ``span(r) < span(b)``.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return LaurentPoly(), LaurentPoly()
    ma, mb = a.min_degree(), b.min_degree()
    rem = dict(a.shift(-ma).terms)
    bt = b.shift(-mb).terms
    bdeg, blead = bt[-1]
    quot: dict[int, Fraction] = {}
    while rem:
        top = max(rem)
        if top < bdeg:
            break
        f = rem[top] / blead
        quot[top - bdeg] = f
        for d, c in bt:
            k = d + top - bdeg
            v = rem.get(k, Fraction(0)) - f * c
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    q = LaurentPoly(quot).shift(ma - mb)
    r = LaurentPoly(rem).shift(ma)
    return q, r


def exact_div(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly | None:
    """``a / b`` when it is a Laurent polynomial, else ``None``."""
    q, r = poly_divmod(a, b)
    return q if r.is_zero() else None


class PolyMatrix:
    """Dense matrix of Laurent polynomials.  Immutable."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, entries: Sequence[Sequence[object]], cols: int | None = None):
        grid = tuple(tuple(LaurentPoly.coerce(e) for e in row) for row in entries)
        if grid:
            ncols = len(grid[0])
            if any(len(r) != ncols for r in grid):
                raise ValueError("ragged matrix rows")
            if cols is not None and cols != ncols:
                raise ValueError(f"expected {cols} columns, got {ncols}")
        else:
            ncols = cols or 0
        self.rows = len(grid)
        self.cols = ncols
        self._entries = grid

    @classmethod
    def identity(cls, n: int) -> PolyMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> PolyMatrix:
        return cls([[0] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def hstack(cls, *blocks: PolyMatrix) -> PolyMatrix:
        blocks = tuple(b for b in blocks if b is not None)
        nrows = {b.rows for b in blocks}
        if len(nrows) != 1:
            raise ValueError(f"hstack needs equal row counts, got {sorted(nrows)}")
        (n,) = nrows
        return cls([sum((b.row(i) for b in blocks), ()) for i in range(n)],
                   cols=sum(b.cols for b in blocks))

    @classmethod
    def vstack(cls, *blocks: PolyMatrix) -> PolyMatrix:
        blocks = tuple(b for b in blocks if b is not None)
        ncols = {b.cols for b in blocks}
        if len(ncols) != 1:
            raise ValueError(f"vstack needs equal column counts, got {sorted(ncols)}")
        return cls([r for b in blocks for r in b.entries], cols=ncols.pop())

    @property
    def entries(self) -> tuple[tuple[LaurentPoly, ...], ...]:
        return self._entries

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def row(self, i: int) -> tuple[LaurentPoly, ...]:
        return self._entries[i]

    def column(self, j: int) -> tuple[LaurentPoly, ...]:
        return tuple(r[j] for r in self._entries)

    def __getitem__(self, ij: tuple[int, int]) -> LaurentPoly:
        i, j = ij
        return self._entries[i][j]

    def transpose(self) -> PolyMatrix:
        return PolyMatrix([self.column(j) for j in range(self.cols)], cols=self.rows)

    def map(self, fn) -> PolyMatrix:
        return PolyMatrix([[fn(e) for e in r] for r in self._entries], cols=self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> PolyMatrix:
        return PolyMatrix([[self._entries[i][j] for j in cols] for i in rows], cols=len(cols))

    def degree_range(self) -> tuple[int, int] | None:
        """Smallest and largest exponent over all entries, ``None`` if all zero."""
        lo = hi = None
        for r in self._entries:
            for e in r:
                if e.is_zero():
                    continue
                a, b = e.min_degree(), e.max_degree()
                lo = a if lo is None else min(lo, a)
                hi = b if hi is None else max(hi, b)
        return None if lo is None else (lo, hi)

    def coefficient(self, k: int) -> list[list[Fraction]]:
        """The constant matrix multiplying ``s^k``."""
        return [[e.coeff(k) for e in r] for r in self._entries]

    def evaluate(self, x=1) -> list[list[Fraction]]:
        return [[e.evaluate(x) for e in r] for r in self._entries]

    def is_zero(self) -> bool:
        return all(e.is_zero() for r in self._entries for e in r)

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        return mat_mul(self, other)

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        self._check_same_shape(other)
        return PolyMatrix([[a + b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self._entries, other._entries)], cols=self.cols)

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        self._check_same_shape(other)
        return PolyMatrix([[a - b for a, b in zip(r1, r2)]
                           for r1, r2 in zip(self._entries, other._entries)], cols=self.cols)

    def __neg__(self) -> PolyMatrix:
        return self.map(lambda e: -e)

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, self._entries))

    def __repr__(self):
        return f"PolyMatrix({[[str(e) for e in r] for r in self._entries]!r})"

    def __str__(self):
        cells = [[str(e) for e in r] for r in self._entries]
        if not cells:
            return f"[] ({self.rows}x{self.cols})"
        widths = [max(len(cells[i][j]) for i in range(self.rows)) for j in range(self.cols)]
        return "\n".join(
            "[ " + "  ".join(c.rjust(w) for c, w in zip(row, widths)) + " ]" for row in cells
        )


def mat_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    out = []
    for i in range(a.rows):
        ai = a.row(i)
        row = []
        for j in range(b.cols):
            acc = LaurentPoly()
            for k in range(a.cols):
                if ai[k] and b[k, j]:
                    acc = acc + ai[k] * b[k, j]
            row.append(acc)
        out.append(row)
    return PolyMatrix(out, cols=b.cols)


def adjoint(m: PolyMatrix) -> PolyMatrix:
    """Transpose with ``s`` and ``s^-1`` exchanged in every entry.

    This is the adjoint of the shift operator for the pairing
    ``<x, y> = sum_k x(k)^T y(k)``.
    """
    return PolyMatrix([[m[i, j].reflect() for i in range(m.rows)] for j in range(m.cols)],
                      cols=m.rows)
