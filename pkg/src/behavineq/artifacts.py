"""Files and tables produced by the command line: certificate and witness
CSVs, the quiver field of a planar state recursion, and the run report."""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .feasibility import Certificate
from .laurent import as_fraction
from .model import BehavioralSystem, lti_matrices
from .trajectory import Trajectory, from_csv, read_csv_table, to_csv

__all__ = [
    "RunReport",
    "certificate_to_csv",
    "certificate_from_csv",
    "witness_to_csv",
    "witness_from_csv",
    "digest",
    "grid_points",
    "state_box",
    "quiver_rows",
    "quiver_csv",
    "step",
]


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def certificate_to_csv(cert: Certificate, n_eq: int, n_ineq: int) -> str:
    parts = [p for p in (cert.y, cert.z) if p is not None]
    names = [f"y{i + 1}" for i in range(n_eq)] + [f"z{i + 1}" for i in range(n_ineq)]
    header = ["certificate", f"eq_rows={n_eq} ineq_rows={n_ineq}",
              f"objective={cert.objective}"]
    return to_csv(Trajectory.stack(parts), header, names)


def certificate_from_csv(text: str) -> Certificate:
    comments, _, _ = read_csv_table(text)
    meta = {}
    for c in comments:
        for tok in c.split():
            if "=" in tok:
                k, v = tok.split("=", 1)
                meta[k] = v
    if "certificate" not in comments:
        raise ValueError("not a certificate file")
    n_eq, n_ineq = int(meta["eq_rows"]), int(meta["ineq_rows"])
    stacked = from_csv(text)
    sizes = [n for n in (n_eq, n_ineq) if n]
    parts = iter(stacked.split(sizes))
    y = next(parts) if n_eq else None
    z = next(parts) if n_ineq else None
    return Certificate(y, z, as_fraction(meta["objective"]))


def witness_to_csv(w: Trajectory, names: Sequence[str]) -> str:
    return to_csv(w, ["witness"], names)


def witness_from_csv(text: str) -> Trajectory:
    return from_csv(text)


@dataclass
class RunReport:
    command: str
    model_digest: str
    verdict: str
    certificate_path: str | None = None
    witness_path: str | None = None
    seconds: float = 0.0
    schedule: list[str] = field(default_factory=list)
    objective: Fraction | None = None
    note: str = ""

    def rows(self) -> list[tuple[str, str]]:
        out = [("command", self.command), ("model_digest", self.model_digest),
               ("verdict", self.verdict.upper())]
        if self.objective is not None:
            out.append(("objective", str(self.objective)))
        if self.certificate_path:
            out.append(("certificate", self.certificate_path))
        if self.witness_path:
            out.append(("witness", self.witness_path))
        out.append(("schedule", " ".join(self.schedule)))
        out.append(("seconds", f"{self.seconds:.3f}"))
        if self.note:
            out.append(("note", self.note))
        return out

    def text(self) -> str:
        lines = [self.verdict.upper()]
        lines += [f"  {k}: {v}" for k, v in self.rows()[3:]]
        lines.insert(1, f"  model: {self.model_digest}")
        return "\n".join(lines)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(self.rows())
        return buf.getvalue()


# -- quiver -----------------------------------------------------------------

def grid_points(text: str) -> list[tuple[Fraction, Fraction]]:
    """Parse ``lo:hi:n,lo:hi:n`` into the rational grid it describes."""
    axes = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise ValueError(f"grid axis {part!r} must look like lo:hi:n")
        lo, hi, n = as_fraction(bits[0]), as_fraction(bits[1]), int(bits[2])
        if n < 1:
            raise ValueError("grid axis needs at least one point")
        axes.append([lo] if n == 1 else [lo + (hi - lo) * i / (n - 1) for i in range(n)])
    if len(axes) != 2:
        raise ValueError("grid needs exactly two axes")
    return [(a, b) for a in axes[0] for b in axes[1]]


def step(A, x) -> tuple[Fraction, ...]:
    return tuple(sum((A[i][j] * x[j] for j in range(len(x))), Fraction(0))
                 for i in range(len(A)))


def state_box(sys: BehavioralSystem, n: int) -> list[tuple[Fraction | None, Fraction | None]]:
    """Per-state ``(lower, upper)`` bounds read off single-variable inequality rows."""
    box: list[list[Fraction | None]] = [[None, None] for _ in range(n)]
    if sys.H is None:
        return [tuple(b) for b in box]
    for r in range(sys.H.rows):
        row = sys.H.row(r)
        nz = [j for j, e in enumerate(row) if e]
        if len(nz) != 1 or nz[0] >= n:
            continue
        j = nz[0]
        e = row[j]
        if e.span() != 0 or e.min_degree() != 0:
            continue
        a = e.coeff(0)
        bound = sys.g.constant[r] / a
        lo, hi = box[j]
        if a > 0:
            box[j][1] = bound if hi is None else min(hi, bound)
        else:
            box[j][0] = bound if lo is None else max(lo, bound)
    return [tuple(b) for b in box]


def quiver_rows(sys: BehavioralSystem, points) -> tuple[list, list]:
    """One-step displacement ``(A - I) x`` with zero input, plus the state-box corners."""
    A, _ = lti_matrices(sys)
    if len(A) != 2:
        raise ValueError(f"quiver needs a 2-dimensional state, this model has {len(A)}")
    field_rows = []
    for x in points:
        nx = step(A, x)
        field_rows.append((x[0], x[1], nx[0] - x[0], nx[1] - x[1]))
    box = state_box(sys, 2)
    corners = []
    if all(lo is not None and hi is not None for lo, hi in box):
        (a, b), (c, d) = box
        corners = [(a, c), (b, c), (b, d), (a, d)]
    return field_rows, corners


def quiver_csv(field_rows, corners) -> str:
    buf = io.StringIO()
    buf.write("# one-step displacement of x(k+1) = A x(k) with zero input\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "x1", "x2", "dx1", "dx2"])
    for x1, x2, d1, d2 in field_rows:
        w.writerow(["field", x1, x2, d1, d2])
    for x1, x2 in corners:
        w.writerow(["corner", x1, x2, "", ""])
    return buf.getvalue()
