"""Vector-valued sequences over the integers.

A :class:`Trajectory` stores a window of values plus a rule for what happens
outside the window:

``finite``
    zero outside the window (finite support);
``quasi-constant``
    a fixed vector outside the window;
``periodic``
    the window is one period and repeats over all integers;
``bounded``
    nothing is known outside the window.  Operators applied to such data
    only report indices whose shifted reads all land inside the window.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .laurent import PolyMatrix, as_fraction

__all__ = [
    "Extension",
    "Trajectory",
    "apply",
    "inner_product",
    "orthant_check",
    "satisfies",
    "comparison_indices",
    "to_csv",
    "from_csv",
]


class Extension(str, Enum):
    FINITE = "finite"
    QUASI_CONSTANT = "quasi-constant"
    PERIODIC = "periodic"
    BOUNDED = "bounded"


Vector = tuple[Fraction, ...]


def _vectors(values: Sequence, dim: int | None = None) -> tuple[Vector, ...]:
    vals = tuple(_vec(v, dim) for v in values)
    if not vals:
        raise ValueError("trajectory window must contain at least one index")
    return vals


def _vec(v, dim: int | None = None) -> Vector:
    if isinstance(v, (list, tuple)):
        out = tuple(as_fraction(x) for x in v)
    else:
        out = (as_fraction(v),)
    if dim is not None and len(out) != dim:
        raise ValueError(f"expected a vector of length {dim}, got {len(out)}")
    return out


@dataclass(frozen=True, eq=False)
class Trajectory:
    dim: int
    start: int
    values: tuple[Vector, ...]
    extension: Extension = Extension.FINITE
    constant: Vector | None = None

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("trajectory dimension must be positive")
        if not self.values:
            raise ValueError("trajectory window must contain at least one index")
        if any(len(v) != self.dim for v in self.values):
            raise ValueError("every stored vector must have length dim")
        ext = Extension(self.extension)
        object.__setattr__(self, "extension", ext)
        if ext is Extension.QUASI_CONSTANT:
            if self.constant is None or len(self.constant) != self.dim:
                raise ValueError("quasi-constant trajectory needs a constant of length dim")
        elif self.constant is not None:
            raise ValueError(f"{ext.value} trajectory takes no constant part")

    # -- constructors -------------------------------------------------------

    @classmethod
    def finite(cls, values: Sequence, start: int = 0, dim: int | None = None) -> Trajectory:
        vals = _vectors(values, dim)
        return cls(len(vals[0]), start, vals, Extension.FINITE)

    @classmethod
    def zeros(cls, dim: int, start: int = 0, length: int = 1) -> Trajectory:
        return cls(dim, start, tuple((Fraction(0),) * dim for _ in range(length)))

    @classmethod
    def impulses(cls, dim: int, spikes: Mapping[tuple[int, int], object]) -> Trajectory:
        """Finite-support trajectory from ``{(component, time): value}``."""
        if not spikes:
            return cls.zeros(dim)
        times = [t for _, t in spikes]
        lo, hi = min(times), max(times)
        grid = [[Fraction(0)] * dim for _ in range(hi - lo + 1)]
        for (i, t), v in spikes.items():
            grid[t - lo][i] += as_fraction(v)
        return cls(dim, lo, tuple(tuple(r) for r in grid))

    @classmethod
    def constant_value(cls, vec) -> Trajectory:
        c = _vec(vec)
        return cls(len(c), 0, (c,), Extension.QUASI_CONSTANT, c)

    @classmethod
    def quasi_constant(cls, const, values: Sequence = (), start: int = 0) -> Trajectory:
        c = _vec(const)
        if not values:
            return cls.constant_value(c)
        vals = tuple(_vec(v, len(c)) for v in values)
        return cls(len(c), start, vals, Extension.QUASI_CONSTANT, c)

    @classmethod
    def periodic(cls, values: Sequence, start: int = 0) -> Trajectory:
        vals = _vectors(values)
        return cls(len(vals[0]), start, vals, Extension.PERIODIC)

    @classmethod
    def bounded(cls, values: Sequence, start: int = 0) -> Trajectory:
        vals = _vectors(values)
        return cls(len(vals[0]), start, vals, Extension.BOUNDED)

    # -- queries ------------------------------------------------------------

    @property
    def end(self) -> int:
        return self.start + len(self.values) - 1

    @property
    def window(self) -> tuple[int, int]:
        return self.start, self.end

    @property
    def period(self) -> int:
        """Period of the pattern outside the stored window."""
        return len(self.values) if self.extension is Extension.PERIODIC else 1

    def covers_all(self) -> bool:
        return self.extension is not Extension.BOUNDED

    def is_defined(self, k: int) -> bool:
        return self.covers_all() or self.start <= k <= self.end

    def value_at(self, k: int) -> Vector:
        if self.start <= k <= self.end:
            return self.values[k - self.start]
        ext = self.extension
        if ext is Extension.FINITE:
            return (Fraction(0),) * self.dim
        if ext is Extension.QUASI_CONSTANT:
            return self.constant
        if ext is Extension.PERIODIC:
            return self.values[(k - self.start) % len(self.values)]
        raise IndexError(f"index {k} outside bounded window [{self.start}, {self.end}]")

    def __getitem__(self, k: int) -> Vector:
        return self.value_at(k)

    def component(self, i: int) -> Trajectory:
        const = None if self.constant is None else (self.constant[i],)
        return Trajectory(1, self.start, tuple((v[i],) for v in self.values),
                          self.extension, const)

    def constant_part(self) -> Vector | None:
        """The vector this trajectory equals at every index, if there is one."""
        if self.extension is Extension.BOUNDED:
            return None
        if self.extension is Extension.FINITE:
            c = (Fraction(0),) * self.dim
        elif self.extension is Extension.QUASI_CONSTANT:
            c = self.constant
        else:
            c = self.values[0]
        return c if all(v == c for v in self.values) else None

    def support(self) -> tuple[int, int] | None:
        """Smallest window holding every nonzero value of a finite trajectory."""
        if self.extension is not Extension.FINITE:
            raise ValueError("support is only finite for finite trajectories")
        nz = [self.start + i for i, v in enumerate(self.values) if any(v)]
        return (nz[0], nz[-1]) if nz else None

    def trimmed(self) -> Trajectory:
        if self.extension is not Extension.FINITE:
            return self
        sup = self.support()
        if sup is None:
            return Trajectory.zeros(self.dim)
        lo, hi = sup
        return Trajectory(self.dim, lo, self.values[lo - self.start:hi - self.start + 1])

    def restrict(self, lo: int, hi: int) -> Trajectory:
        """Bounded trajectory carrying this one's values on ``[lo, hi]``."""
        return Trajectory(self.dim, lo, tuple(self.value_at(k) for k in range(lo, hi + 1)),
                          Extension.BOUNDED)

    # -- arithmetic ---------------------------------------------------------

    def _combine(self, other: Trajectory, op) -> Trajectory:
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")
        kinds = {self.extension, other.extension}

        def values_on(lo, hi):
            return tuple(tuple(op(a, b) for a, b in zip(self.value_at(k), other.value_at(k)))
                         for k in range(lo, hi + 1))

        if Extension.BOUNDED in kinds:
            lo, hi = _defined_intersection([self, other])
            if lo > hi:
                raise ValueError("bounded operands have disjoint windows")
            return Trajectory(self.dim, lo, values_on(lo, hi), Extension.BOUNDED)
        if Extension.PERIODIC in kinds:
            for t in (self, other):
                if t.extension is not Extension.PERIODIC and t.constant_part() is None:
                    raise ValueError("periodic plus a locally perturbed trajectory "
                                     "is not representable")
            p = math.lcm(self.period, other.period)
            start = self.start if self.extension is Extension.PERIODIC else other.start
            return Trajectory(self.dim, start, values_on(start, start + p - 1),
                              Extension.PERIODIC)
        lo = min(self.start, other.start)
        hi = max(self.end, other.end)
        vals = values_on(lo, hi)
        if Extension.QUASI_CONSTANT in kinds:
            const = tuple(op(a, b) for a, b in zip(self.value_at(lo - 1), other.value_at(lo - 1)))
            return Trajectory(self.dim, lo, vals, Extension.QUASI_CONSTANT, const)
        return Trajectory(self.dim, lo, vals, Extension.FINITE)

    def __add__(self, other: Trajectory) -> Trajectory:
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: Trajectory) -> Trajectory:
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> Trajectory:
        return self.scale(-1)

    def scale(self, c) -> Trajectory:
        c = as_fraction(c)
        const = None if self.constant is None else tuple(c * x for x in self.constant)
        return Trajectory(self.dim, self.start, tuple(tuple(c * x for x in v) for v in self.values),
                          self.extension, const)

    @staticmethod
    def stack(parts: Sequence[Trajectory]) -> Trajectory:
        """Concatenate finite trajectories componentwise."""
        if any(p.extension is not Extension.FINITE for p in parts):
            raise ValueError("stack is defined for finite trajectories only")
        lo = min(p.start for p in parts)
        hi = max(p.end for p in parts)
        vals = tuple(sum((p.value_at(k) for p in parts), ()) for k in range(lo, hi + 1))
        return Trajectory(sum(p.dim for p in parts), lo, vals)

    def split(self, sizes: Sequence[int]) -> list[Trajectory]:
        if sum(sizes) != self.dim:
            raise ValueError("split sizes must add up to dim")
        out, off = [], 0
        for n in sizes:
            const = None if self.constant is None else self.constant[off:off + n]
            out.append(Trajectory(n, self.start, tuple(v[off:off + n] for v in self.values),
                                  self.extension, const))
            off += n
        return out

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        if self.dim != other.dim or self.covers_all() != other.covers_all():
            return False
        if not self.covers_all():
            return self.window == other.window and self.values == other.values
        return all(self.value_at(k) == other.value_at(k)
                   for k in comparison_indices([self, other]))

    __hash__ = None

    def __repr__(self):
        extra = "" if self.constant is None else f", constant={_fmt_vec(self.constant)}"
        return (f"Trajectory({self.extension.value}, dim={self.dim}, "
                f"window=[{self.start}, {self.end}]{extra})")


def _fmt_vec(v: Vector) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _defined_intersection(trajs: Iterable[Trajectory]) -> tuple[int, int]:
    lo, hi = -math.inf, math.inf
    for t in trajs:
        if not t.covers_all():
            lo, hi = max(lo, t.start), min(hi, t.end)
    return lo, hi


def comparison_indices(trajs: Sequence[Trajectory]) -> range:
    """A finite index range on which pointwise checks decide the whole question.

    For trajectories defined on all integers, every index left of the joint
    window repeats with the lcm of the periods, and likewise on the right,
    so one extra period on each side is enough.  Bounded operands restrict
    the range to their common window.
    """
    if any(not t.covers_all() for t in trajs):
        lo, hi = _defined_intersection(trajs)
        return range(lo, hi + 1) if lo <= hi else range(0)
    lo = min(t.start for t in trajs)
    hi = max(t.end for t in trajs)
    p = math.lcm(*(t.period for t in trajs))
    return range(lo - p, hi + p + 1)


def apply(m: PolyMatrix, w: Trajectory) -> Trajectory:
    """Apply the shift operator ``m`` to ``w``: ``r(k) = sum_i M_i w(k+i)``."""
    if m.cols != w.dim:
        raise ValueError(f"operator has {m.cols} columns but trajectory has dim {w.dim}")
    if m.rows == 0:
        raise ValueError("operator has no rows")
    rng = m.degree_range()
    lo_deg, hi_deg = rng if rng is not None else (0, 0)
    coeffs = {k: m.coefficient(k) for k in range(lo_deg, hi_deg + 1)}
    coeffs = {k: c for k, c in coeffs.items() if any(x for row in c for x in row)}

    def at(k: int) -> Vector:
        out = [Fraction(0)] * m.rows
        for i, ci in coeffs.items():
            v = w.value_at(k + i)
            for r in range(m.rows):
                row = ci[r]
                s = out[r]
                for j in range(m.cols):
                    if row[j] and v[j]:
                        s += row[j] * v[j]
                out[r] = s
        return tuple(out)

    ext = w.extension
    if ext is Extension.PERIODIC:
        lo, hi = w.start, w.end
    elif ext is Extension.BOUNDED:
        lo, hi = w.start - lo_deg, w.end - hi_deg
        if lo > hi:
            raise ValueError("window too short: no index has all shifted reads defined")
    else:
        lo, hi = w.start - hi_deg, w.end - lo_deg
    vals = tuple(at(k) for k in range(lo, hi + 1))
    const = None
    if ext is Extension.QUASI_CONSTANT:
        m1 = m.evaluate(1)
        const = tuple(sum((m1[r][j] * w.constant[j] for j in range(m.cols)), Fraction(0))
                      for r in range(m.rows))
    return Trajectory(m.rows, lo, vals, ext, const)


def inner_product(x: Trajectory, y: Trajectory) -> Fraction:
    """``sum_k x(k)^T y(k)``; one operand must have finite support."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch {x.dim} vs {y.dim}")
    if x.extension is not Extension.FINITE:
        if y.extension is not Extension.FINITE:
            raise ValueError("inner product needs a finitely supported operand")
        x, y = y, x
    total = Fraction(0)
    for k in range(x.start, x.end + 1):
        xv = x.value_at(k)
        if not any(xv):
            continue
        if not y.is_defined(k):
            raise ValueError(f"second operand undefined at index {k} inside the support")
        total += sum((a * b for a, b in zip(xv, y.value_at(k))), Fraction(0))
    return total


def orthant_check(w: Trajectory) -> bool:
    """True iff every component is >= 0 at every index where ``w`` is defined."""
    if any(x < 0 for v in w.values for x in v):
        return False
    if w.constant is not None and any(x < 0 for x in w.constant):
        return False
    return True


def satisfies(m: PolyMatrix, w: Trajectory, rhs: Trajectory, relation: str = "leq") -> bool:
    """Check ``m w <= rhs`` (``relation='leq'``) or ``m w = rhs`` (``'eq'``).

    The comparison runs over every index where both sides are defined.
    """
    if relation not in ("eq", "leq"):
        raise ValueError(f"unknown relation {relation!r}")
    if rhs.dim != m.rows:
        raise ValueError(f"right-hand side has dim {rhs.dim}, operator has {m.rows} rows")
    lhs = apply(m, w)
    for k in comparison_indices([lhs, rhs]):
        a, b = lhs.value_at(k), rhs.value_at(k)
        if relation == "eq":
            if a != b:
                return False
        elif any(x > y for x, y in zip(a, b)):
            return False
    return True


# -- CSV --------------------------------------------------------------------

def to_csv(traj: Trajectory, header: Sequence[str] = (), names: Sequence[str] | None = None) -> str:
    """Serialize as CSV: comment lines, a column header, then one row per index."""
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    meta = f"# extension={traj.extension.value} dim={traj.dim}"
    if traj.constant is not None:
        meta += " constant=" + ",".join(str(x) for x in traj.constant)
    buf.write(meta + "\n")
    names = list(names) if names else [f"c{i + 1}" for i in range(traj.dim)]
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", *names])
    for k in range(traj.start, traj.end + 1):
        writer.writerow([k, *(str(x) for x in traj.value_at(k))])
    return buf.getvalue()


def _parse_meta(line: str) -> dict[str, str]:
    out = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            key, val = tok.split("=", 1)
            out[key] = val
    return out


def read_csv_table(text: str) -> tuple[list[str], list[str], list[list[str]]]:
    """Split a trajectory-style CSV into comment lines, column names and rows."""
    comments, body = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise ValueError("CSV has no header row")
    return comments, rows[0], rows[1:]


def from_csv(text: str) -> Trajectory:
    comments, columns, rows = read_csv_table(text)
    meta = {}
    for c in comments:
        if c.startswith("extension="):
            meta = _parse_meta(c)
    ext = Extension(meta.get("extension", Extension.FINITE.value))
    dim = len(columns) - 1
    if not rows:
        raise ValueError("trajectory CSV has no data rows")
    idx = [int(r[0]) for r in rows]
    if idx != list(range(idx[0], idx[0] + len(idx))):
        raise ValueError("trajectory CSV indices must be consecutive")
    vals = tuple(tuple(as_fraction(x) for x in r[1:]) for r in rows)
    if any(len(v) != dim for v in vals):
        raise ValueError("trajectory CSV row has the wrong number of columns")
    const = None
    if ext is Extension.QUASI_CONSTANT:
        const = tuple(as_fraction(x) for x in meta["constant"].split(","))
    return Trajectory(dim, idx[0], vals, ext, const)
