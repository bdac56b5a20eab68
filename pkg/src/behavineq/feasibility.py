"""Feasibility of ``{R w = d, H w <= g}``: Farkas certificates and witnesses.

A certificate is a finitely supported dual pair ``(y, z)`` with ``z >= 0``,
``[R* H*] (y, z) = 0`` at every index, and ``<y, d> + <z, g> < 0``, where
``*`` is the adjoint.  Its existence rules out every solution.  A witness is
a constant or periodic trajectory that satisfies the system outright.

Neither search is complete on its own: certificates are looked for on a
growing window of dual support and witnesses on a growing period, so
:func:`decide` can come back with :class:`Unknown`.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .laurent import PolyMatrix, adjoint
from .lp import lp_solve
from .model import BehavioralSystem
from .reduction import kernel_rank_deficit
from .trajectory import Extension, Trajectory, apply, inner_product, orthant_check, satisfies

__all__ = [
    "Certificate",
    "Feasible",
    "Infeasible",
    "Unknown",
    "Verdict",
    "dual_operator",
    "certificate_search",
    "witness_search",
    "verify_certificate",
    "verify_witness",
    "decide",
    "DEFAULT_WINDOWS",
    "DEFAULT_PERIODS",
]

log = logging.getLogger(__name__)

DEFAULT_WINDOWS = (1, 2, 4, 8)
DEFAULT_PERIODS = (1, 2, 4)


@dataclass(frozen=True)
class Certificate:
    y: Trajectory | None
    z: Trajectory | None
    objective: Fraction


@dataclass(frozen=True)
class Verdict:
    tried: tuple[tuple[str, int], ...] = ()

    kind = "verdict"


@dataclass(frozen=True)
class Feasible(Verdict):
    witness: Trajectory | None = None
    period: int = 1
    kind = "feasible"


@dataclass(frozen=True)
class Infeasible(Verdict):
    certificate: Certificate | None = None
    window: int = 0
    kind = "infeasible"


@dataclass(frozen=True)
class Unknown(Verdict):
    windows_tried: tuple[int, ...] = ()
    periods_tried: tuple[int, ...] = ()
    note: str = ""
    kind = "unknown"


def dual_operator(sys: BehavioralSystem) -> PolyMatrix:
    """``[R* H*]``, the adjoint of the stacked operator ``[R; H]``."""
    return adjoint(sys.stacked_operator())


def certificate_search(sys: BehavioralSystem, window: int) -> Certificate | None:
    """Look for a certificate whose dual support lies in ``[-window, window]``.

    The kernel equations are imposed at every index where the dual operator
    can produce a nonzero value, so the result is in the kernel as a full
    trajectory and not just on interior indices.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    dual = dual_operator(sys)
    le, li = sys.n_eq, sys.n_ineq
    nd = le + li
    width = 2 * window + 1

    def var(j: int, k: int) -> int:
        return j * width + (k + window)

    nvars = nd * width
    rng = dual.degree_range()
    if rng is None:
        lo_deg = hi_deg = 0
        coeffs = {}
    else:
        lo_deg, hi_deg = rng
        coeffs = {i: dual.coefficient(i) for i in range(lo_deg, hi_deg + 1)}

    A, rel, b = [], [], []
    for k in range(-window - hi_deg, window - lo_deg + 1):
        for r in range(dual.rows):
            row = [Fraction(0)] * nvars
            touched = False
            for i, ci in coeffs.items():
                t = k + i
                if not -window <= t <= window:
                    continue
                for j in range(nd):
                    if ci[r][j]:
                        row[var(j, t)] += ci[r][j]
                        touched = True
            if touched:
                A.append(row)
                rel.append("=")
                b.append(Fraction(0))

    rhs = [(sys.d, c) for c in range(le)] + [(sys.g, c) for c in range(li)]
    cost = [Fraction(0)] * nvars
    for j, (traj, c) in enumerate(rhs):
        for k in range(-window, window + 1):
            cost[var(j, k)] = traj.value_at(k)[c]
    A.append(cost)
    rel.append(">=")
    b.append(Fraction(-1))
    nonneg = [j >= le for j in range(nd) for _ in range(width)]

    res = lp_solve(A, rel, b, cost, nonneg=nonneg)
    if not res.optimal or res.value >= 0:
        return None

    def block(j0: int, n: int) -> Trajectory | None:
        if n == 0:
            return None
        vals = tuple(tuple(res.x[var(j, k)] for j in range(j0, j0 + n))
                     for k in range(-window, window + 1))
        return Trajectory(n, -window, vals).trimmed()

    return Certificate(block(0, le), block(le, li), res.value)


def witness_search(sys: BehavioralSystem, period: int = 1) -> Trajectory | None:
    """Look for a witness repeating with ``period``.

    For ``period == 1`` this is a constant vector ``w`` with ``R(1) w = d`` and
    ``H(1) w <= g``; longer periods give the circulant system over one period.
    Only the constant parts of ``d`` and ``g`` enter the search; the result is
    then checked against the full right-hand sides.
    """
    if period < 1:
        raise ValueError("period must be at least 1")
    q = sys.q

    def var(j: int, t: int) -> int:
        return t * q + j

    A, rel, b = [], [], []
    for m, rhs, relation in ((sys.R, sys.d, "="), (sys.H, sys.g, "<=")):
        if m is None:
            continue
        rng = m.degree_range() or (0, 0)
        coeffs = {i: m.coefficient(i) for i in range(rng[0], rng[1] + 1)}
        for t in range(period):
            for r in range(m.rows):
                row = [Fraction(0)] * (q * period)
                for i, ci in coeffs.items():
                    tt = (t + i) % period
                    for j in range(q):
                        if ci[r][j]:
                            row[var(j, tt)] += ci[r][j]
                A.append(row)
                rel.append(relation)
                b.append(rhs.constant[r])
    res = lp_solve(A, rel, b, [0] * (q * period))
    if not res.optimal:
        return None
    vals = [tuple(res.x[var(j, t)] for j in range(q)) for t in range(period)]
    if period == 1:
        w = Trajectory.constant_value(vals[0])
    else:
        w = Trajectory.periodic(vals)
    return w if verify_witness(sys, w) else None


def verify_certificate(sys: BehavioralSystem, cert: Certificate) -> bool:
    """Replay every certificate condition with exact arithmetic."""
    parts = []
    for traj, n, nonneg in ((cert.y, sys.n_eq, False), (cert.z, sys.n_ineq, True)):
        if n == 0:
            if traj is not None:
                return False
            continue
        if traj is None or traj.dim != n or traj.extension is not Extension.FINITE:
            return False
        if nonneg and not orthant_check(traj):
            return False
        parts.append(traj)
    residual = apply(dual_operator(sys), Trajectory.stack(parts))
    if any(x for v in residual.values for x in v):
        return False
    objective = Fraction(0)
    if sys.n_eq:
        objective += inner_product(cert.y, sys.d)
    if sys.n_ineq:
        objective += inner_product(cert.z, sys.g)
    return objective < 0 and objective == cert.objective


def verify_witness(sys: BehavioralSystem, w: Trajectory) -> bool:
    """True iff ``w`` is defined on all integers and satisfies both blocks."""
    if w.dim != sys.q or not w.covers_all():
        return False
    if sys.R is not None and not satisfies(sys.R, w, sys.d, "eq"):
        return False
    if sys.H is not None and not satisfies(sys.H, w, sys.g, "leq"):
        return False
    return True


@dataclass
class _Budget:
    windows: tuple[int, ...]
    periods: tuple[int, ...]
    tasks: list[tuple[str, int]] = field(default_factory=list)

    def __post_init__(self):
        for i in range(max(len(self.windows), len(self.periods))):
            if i < len(self.periods):
                self.tasks.append(("witness", self.periods[i]))
            if i < len(self.windows):
                self.tasks.append(("certificate", self.windows[i]))


def _run_task(sys: BehavioralSystem, task: tuple[str, int]):
    kind, n = task
    if kind == "witness":
        return witness_search(sys, n)
    return certificate_search(sys, n)


def _verdict(task, result, tried) -> Verdict:
    kind, n = task
    if kind == "witness":
        return Feasible(tuple(tried), result, n)
    return Infeasible(tuple(tried), result, n)


def decide(sys: BehavioralSystem, windows=DEFAULT_WINDOWS, periods=DEFAULT_PERIODS,
           jobs: int = 1) -> Verdict:
    """Interleave witness and certificate searches until one succeeds.

    Results depend only on the schedule, never on ``jobs``: with several
    workers the searches run concurrently but the earliest successful entry
    of the schedule wins.
    """
    windows, periods = tuple(windows), tuple(periods)
    if kernel_rank_deficit(dual_operator(sys)) == 0:
        # trivial dual kernel: no finitely supported certificate can exist
        tried = []
        for p in periods:
            tried.append(("witness", p))
            w = witness_search(sys, p)
            if w is not None:
                return Feasible(tuple(tried), w, p)
        return Unknown(tuple(tried), (), periods,
                       "dual operator has full column rank, so no certificate exists; "
                       "no constant or periodic witness found within budget")

    tasks = _Budget(windows, periods).tasks
    tried: list[tuple[str, int]] = []
    if jobs <= 1:
        for task in tasks:
            tried.append(task)
            log.debug("running %s search with parameter %d", *task)
            result = _run_task(sys, task)
            if result is not None:
                return _verdict(task, result, tried)
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        try:
            futures = [pool.submit(_run_task, sys, task) for task in tasks]
            for task, fut in zip(tasks, futures):
                tried.append(task)
                result = fut.result()
                if result is not None:
                    return _verdict(task, result, tried)
        finally:
            pool.shutdown(wait=False, cancel_futures=True)
    return Unknown(tuple(tried), windows, periods,
                   "no certificate or witness within budget")
