"""Command line front end.

Exit codes for ``check``: 0 feasible, 1 infeasible, 2 usage or parse error,
3 unknown.  ``verify`` exits 0 when the file checks out and 4 when it does
not; the other subcommands exit 0 on success and 2 on bad input.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import artifacts
from .feasibility import DEFAULT_PERIODS, decide, verify_certificate, verify_witness
from .laurent import adjoint
from .model import (BehavioralSystem, ModelDimensionError, ModelSyntaxError, augment_slack,
                    inventory_cost, parse_matrix, parse_model)
from .parametrize import RolloutError, build_recursive_form, required_footprint, rollout
from .reduction import reduce
from .trajectory import from_csv, read_csv_table, to_csv

log = logging.getLogger("behavineq")

EXIT = {"feasible": 0, "infeasible": 1, "unknown": 3}
BUDGET_ENV = "BEHAVINEQ_BUDGET"


class UsageError(Exception):
    pass


def _windows_up_to(n: int) -> tuple[int, ...]:
    out, w = [], 1
    while w <= n:
        out.append(w)
        w *= 2
    if out and out[-1] != n:
        out.append(n)
    return tuple(out)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"expected a list of integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise UsageError("schedule entries must be positive integers")
    return vals


def _env_budget() -> dict[str, str]:
    out = {}
    for tok in os.environ.get(BUDGET_ENV, "").split():
        if "=" in tok:
            k, v = tok.split("=", 1)
            out[k] = v
    return out


def _read_model(path: str) -> tuple[BehavioralSystem, str]:
    text = Path(path).read_text(encoding="utf-8")
    return parse_model(text), text


# -- subcommands ------------------------------------------------------------

def cmd_check(args) -> int:
    sys_, text = _read_model(args.model)
    env = _env_budget()
    window_max = args.window_max or int(env.get("window-max", 8))
    periods = _int_list(args.periods or env.get("periods", ",".join(map(str, DEFAULT_PERIODS))))
    windows = _windows_up_to(window_max)
    t0 = time.perf_counter()
    verdict = decide(sys_, windows, periods, jobs=args.jobs)
    report = artifacts.RunReport(
        command=" ".join(["check", args.model]), model_digest=artifacts.digest(text),
        verdict=verdict.kind, seconds=time.perf_counter() - t0,
        schedule=[f"{k}:{n}" for k, n in verdict.tried])
    stem = Path(args.model).with_suffix("")
    if verdict.kind == "infeasible":
        path = Path(f"{stem}.certificate.csv")
        path.write_text(artifacts.certificate_to_csv(verdict.certificate, sys_.n_eq,
                                                     sys_.n_ineq))
        report.certificate_path = str(path)
        report.objective = verdict.certificate.objective
    elif verdict.kind == "feasible":
        path = Path(f"{stem}.witness.csv")
        path.write_text(artifacts.witness_to_csv(verdict.witness, sys_.variable_names()))
        report.witness_path = str(path)
    else:
        report.note = verdict.note
    print(report.csv() if args.format == "csv" else report.text(), end="\n" if
          args.format == "text" else "")
    return EXIT[verdict.kind]


def cmd_verify(args) -> int:
    sys_, _ = _read_model(args.model)
    if args.certificate:
        cert = artifacts.certificate_from_csv(Path(args.certificate).read_text())
        ok = verify_certificate(sys_, cert)
        print(f"certificate {'VALID' if ok else 'INVALID'} (objective {cert.objective})")
        return 0 if ok else 4
    w = artifacts.witness_from_csv(Path(args.witness).read_text())
    ok = verify_witness(sys_, w)
    print(f"witness {'VALID' if ok else 'INVALID'}")
    return 0 if ok else 4


def _reduce_target(sys_: BehavioralSystem, target: str):
    if target == "auto":
        target = "ineq" if sys_.H is not None else "eq"
    if target == "eq":
        m = sys_.R
    elif target == "ineq":
        m = sys_.H
    elif target == "adjoint":
        m = adjoint(sys_.H) if sys_.H is not None else None
    elif target == "dual":
        m = adjoint(sys_.stacked_operator())
    elif target == "slack":
        m = augment_slack(sys_.H, sys_.g)[0] if sys_.H is not None else None
    else:
        raise UsageError(f"unknown target {target!r}")
    if m is None:
        raise UsageError(f"model has no block for target {target!r}")
    return m


def cmd_reduce(args) -> int:
    if args.matrix:
        m = parse_matrix(args.matrix)
    elif args.model:
        m = _reduce_target(_read_model(args.model)[0], args.target)
    else:
        raise UsageError("give a model file or --matrix")
    red = reduce(m)
    if args.format == "csv":
        print("matrix,row,col,entry")
        for name, mat in (("U", red.U), ("T", red.T)):
            for i in range(mat.rows):
                for j in range(mat.cols):
                    print(f"{name},{i + 1},{j + 1},{mat[i, j]}")
        print(f"rank,,,{red.rank}")
        print(f"pivots,,,{' '.join(str(c + 1) for c in red.pivot_cols)}")
    else:
        print(red)
    return 0


def _read_initial(path: str, names: tuple[str, ...]) -> dict[tuple[int, int], Fraction]:
    _, columns, rows = read_csv_table(Path(path).read_text())
    if not columns or columns[0] != "k":
        raise UsageError("initial-condition CSV must start with a 'k' column")
    index = {n: i for i, n in enumerate(names)}
    out = {}
    for col in columns[1:]:
        if col not in index:
            raise UsageError(f"unknown variable {col!r} in initial-condition CSV")
    for r in rows:
        k = int(r[0])
        for col, cell in zip(columns[1:], r[1:]):
            if cell.strip():
                out[(index[col], k)] = Fraction(cell.strip())
    return out


def cmd_rollout(args) -> int:
    sys_, _ = _read_model(args.model)
    if sys_.H is None or sys_.R is not None:
        raise UsageError("rollout needs an inequality-only model")
    form = build_recursive_form(sys_.H, sys_.g, sys_.variable_names())
    if args.show_form or args.footprint:
        print("\n".join(f"# {line}" for line in str(form).splitlines()))
    initial = _read_initial(args.initial, form.names) if args.initial else {}
    start = args.start if args.start is not None else min((t for _, t in initial), default=0)
    if args.footprint:
        need = required_footprint(form, start, args.horizon)
        print("variable,k")
        for j, t in need:
            print(f"{form.names[j]},{t}")
        return 0
    slack = from_csv(Path(args.slack).read_text()) if args.slack else None
    w = rollout(form, initial, slack, args.horizon, start)
    sys.stdout.write(to_csv(w, ["rollout"], sys_.variable_names()))
    return 0


def cmd_quiver(args) -> int:
    sys_, _ = _read_model(args.model)
    rows, corners = artifacts.quiver_rows(sys_, artifacts.grid_points(args.grid))
    sys.stdout.write(artifacts.quiver_csv(rows, corners))
    return 0


def cmd_cost(args) -> int:
    sys_, _ = _read_model(args.model)
    names = sys_.variable_names()
    if args.variable not in names:
        raise UsageError(f"model has no variable {args.variable!r}")
    w = from_csv(Path(args.trajectory).read_text())
    c = from_csv(Path(args.cost).read_text())
    if w.dim != sys_.q:
        raise UsageError(f"trajectory has dim {w.dim}, model has {sys_.q} variables")
    print(inventory_cost(w, c, names.index(args.variable)))
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="behavineq", description=(
        "Feasibility, reduction and slack parametrization of behavioral inequalities."))
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--format", choices=("text", "csv"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="decide feasibility and write a certificate or witness")
    c.add_argument("model")
    c.add_argument("--window-max", type=int, default=None,
                   help="largest dual support half-width (schedule 1, 2, 4, ...)")
    c.add_argument("--periods", default=None, help="witness periods, e.g. 1,2,4")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("verify", help="re-check a certificate or witness file")
    v.add_argument("model")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--certificate")
    g.add_argument("--witness")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="unimodular row reduction")
    r.add_argument("model", nargs="?")
    r.add_argument("--target", default="auto",
                   choices=("auto", "eq", "ineq", "adjoint", "dual", "slack"))
    r.add_argument("--matrix", help="matrix literal, rows split by ';' and entries by '|'")
    r.set_defaults(func=cmd_reduce)

    ro = sub.add_parser("rollout", help="solve the slack recurrences forward")
    ro.add_argument("model")
    ro.add_argument("--initial")
    ro.add_argument("--slack")
    ro.add_argument("--horizon", type=int, default=10)
    ro.add_argument("--start", type=int, default=None)
    ro.add_argument("--footprint", action="store_true",
                    help="print the initial values the rollout needs and exit")
    ro.add_argument("--show-form", action="store_true")
    ro.set_defaults(func=cmd_rollout)

    q = sub.add_parser("quiver", help="displacement field of a planar LTI model as CSV")
    q.add_argument("model")
    q.add_argument("--grid", default="1:5:5,-5:5:5", help="lo:hi:n,lo:hi:n")
    q.set_defaults(func=cmd_quiver)

    co = sub.add_parser("cost", help="evaluate J = sum_k c_k u(k) on a trajectory")
    co.add_argument("model")
    co.add_argument("--trajectory", required=True)
    co.add_argument("--cost", required=True)
    co.add_argument("--variable", default="u")
    co.set_defaults(func=cmd_cost)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ModelSyntaxError, ModelDimensionError, UsageError, RolloutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
