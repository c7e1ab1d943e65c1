"""Command-line front end: ``ave <solve|compare|trace|generate> ...``.

Exit codes: 0 when every run converged, 2 when some run stopped without
converging, 1 on bad input (unreadable files, size mismatch, bad flags).
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys

from .errors import AveError
from .problem import GENERATORS, generate, read_problem, read_vector, write_problem, write_vector
from .solvers import SolverOptions, solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_CONVERGED = 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fmt_csv(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _fmt_table(v):
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def _emit(rows, columns, fmt, out):
    if fmt == "csv":
        out.write(",".join(columns) + "\n")
        for row in rows:
            out.write(",".join(_fmt_csv(row.get(c, "")) for c in columns) + "\n")
    elif fmt == "ndjson":
        for row in rows:
            out.write(json.dumps({c: row[c] for c in columns if c in row}) + "\n")
    else:
        cells = [list(columns)] + [[_fmt_table(row.get(c, "")) for c in columns] for row in rows]
        widths = [max(len(r[k]) for r in cells) for k in range(len(columns))]
        for r in cells:
            out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _methods(args, default):
    method = args.method or default
    return ["bcda", "mgsm"] if method == "both" else [method]


def _sizes(args):
    if args.sizes:
        try:
            return [int(s) for s in args.sizes.split(",") if s.strip()]
        except ValueError:
            raise InputError(f"bad --sizes list {args.sizes!r}") from None
    return [args.n]


def _problems(args, multi=False):
    """Yield the problems named on the command line."""
    if args.generator and (args.matrix or args.rhs):
        raise InputError("--generator cannot be combined with --matrix/--rhs")
    if args.generator:
        if args.generator not in GENERATORS:
            raise InputError(f"unknown generator {args.generator!r}; choose from {', '.join(GENERATORS)}")
        sizes = _sizes(args) if multi else [args.n]
        try:
            return [generate(args.generator, n, seed=args.seed, margin=args.margin) for n in sizes]
        except ValueError as exc:
            raise InputError(str(exc)) from None
    if not (args.matrix and args.rhs):
        raise InputError("give either --generator or both --matrix and --rhs")
    return [read_problem(args.matrix, args.rhs)]


def _options(args, problem, trace=False):
    x0 = None
    if args.x0 not in (None, "zero"):
        x0 = read_vector(args.x0)
    return SolverOptions(
        tol=args.tol,
        max_updates=args.max_updates,
        x0=x0,
        record_trace=trace,
        record_iterates=trace and problem.n == 2,
        divergence_cap=args.divergence_cap,
        cycle_window=args.cycle_window,
        res_check=args.res_check,
        mgsm_sign_at_zero=float(args.mgsm_sign_at_zero),
    )


def _summary_row(problem, report):
    cert = report.certificate
    return {
        "n": problem.n,
        "method": report.method,
        "status": report.status.value,
        "it": report.it,
        "sweeps": report.sweeps,
        "time": report.elapsed_seconds,
        "res": report.res_final,
        "spd": bool(cert.is_spd) if cert is not None else "",
    }


SUMMARY_COLUMNS = ("n", "method", "status", "it", "sweeps", "time", "res", "spd")


def cmd_solve(args):
    (problem,) = _problems(args)
    methods = _methods(args, "bcda")
    reports = [solve(problem, m, _options(args, problem)) for m in methods]
    if args.out:
        for rep in reports:
            path = args.out if len(reports) == 1 else f"{args.out}.{rep.method}"
            write_vector(path, rep.x_final)
    _emit([_summary_row(problem, r) for r in reports], SUMMARY_COLUMNS, args.format, sys.stdout)
    for rep in reports:
        if rep.message:
            print(f"{rep.method}: {rep.message}", file=sys.stderr)
    return EXIT_OK if all(r.converged for r in reports) else EXIT_NOT_CONVERGED


def _comparison_table(rows, out):
    sizes = sorted({r["n"] for r in rows})
    by_key = {(r["n"], r["method"]): r for r in rows}
    methods = [m for m in ("bcda", "mgsm") if any(r["method"] == m for r in rows)]
    header = ["Method", "Metric"] + [f"n={n}" for n in sizes]
    cells = [header]
    for m in methods:
        for label, key in (("IT", "it"), ("Time", "time"), ("RES", "res"), ("Status", "status")):
            cells.append([m.upper() if label == "IT" else "", label]
                         + [_fmt_table(by_key[(n, m)][key]) if (n, m) in by_key else "" for n in sizes])
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    for r in cells:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")


def cmd_compare(args):
    problems = _problems(args, multi=True)
    methods = _methods(args, "both")
    rows = []
    for problem in problems:
        for m in methods:
            rep = solve(problem, m, _options(args, problem))
            rows.append(_summary_row(problem, rep))
    rows.sort(key=lambda r: (r["n"], r["method"]))
    with _output(args.out) as out:
        if args.format == "table":
            _comparison_table(rows, out)
        else:
            _emit(rows, SUMMARY_COLUMNS, args.format, out)
    return EXIT_OK if all(r["status"] == "Converged" for r in rows) else EXIT_NOT_CONVERGED


TRACE_COLUMNS = ("method", "update_index", "sweep_index", "f_value", "res")


def cmd_trace(args):
    (problem,) = _problems(args)
    methods = _methods(args, "bcda")
    columns = TRACE_COLUMNS + (("x1", "x2") if problem.n == 2 else ())
    rows = []
    ok = True
    for m in methods:
        rep = solve(problem, m, _options(args, problem, trace=True))
        ok = ok and rep.converged
        for rec in rep.trace:
            row = {
                "method": m,
                "update_index": rec.update_index,
                "sweep_index": rec.sweep_index,
                "f_value": rec.f_value,
                "res": rec.res,
            }
            if rec.x is not None:
                row["x1"], row["x2"] = rec.x
            rows.append(row)
    with _output(args.out) as out:
        _emit(rows, columns, args.format, out)
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_generate(args):
    if not (args.matrix and args.rhs):
        raise InputError("generate needs --matrix and --rhs output paths")
    if not args.generator:
        raise InputError("generate needs --generator")
    if args.generator not in GENERATORS:
        raise InputError(f"unknown generator {args.generator!r}")
    try:
        problem = generate(args.generator, args.n, seed=args.seed, margin=args.margin)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    write_problem(problem, args.matrix, args.rhs)
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("problem source")
    src.add_argument("--matrix", help="Matrix Market file with A")
    src.add_argument("--rhs", help="file with b, one value per line")
    src.add_argument("--generator", help=f"built-in problem: {', '.join(GENERATORS)}")
    src.add_argument("--n", type=int, default=None, help="dimension for tridiag / random-spd")
    src.add_argument("--sizes", help="comma-separated dimensions (compare)")
    src.add_argument("--seed", type=int, default=0, help="seed for random-spd")
    src.add_argument("--margin", type=float, default=0.1, help="lambda_min(A - I) lower bound for random-spd")

    run = common.add_argument_group("solver")
    run.add_argument("--method", choices=("bcda", "mgsm", "both"))
    run.add_argument("--x0", default=None, help="initial point file, or 'zero' (default)")
    run.add_argument("--tol", type=float, default=1e-6)
    run.add_argument("--max-updates", type=int, default=10**6)
    run.add_argument("--cycle-window", type=int, default=0)
    run.add_argument("--divergence-cap", type=float, default=1e12)
    run.add_argument("--res-check", choices=("update", "sweep"), default="update",
                     help="BCDA: test the residual after every block or once per sweep")
    run.add_argument("--mgsm-sign-at-zero", choices=("0", "1"), default="1",
                     help="MGSM: sign used for zero entries in A - D(y)")

    io = common.add_argument_group("output")
    io.add_argument("--format", choices=("table", "csv", "ndjson"), default=None)
    io.add_argument("--out", help="output path (solve: x_final; compare/trace: records)")

    parser = _Parser(prog="ave", description="Solve absolute value equations A x - |x| = b.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="run one or both solvers").set_defaults(
        func=cmd_solve, default_format="table")
    sub.add_parser("compare", aliases=["bench"], parents=[common],
                   help="IT / Time / RES table for both solvers").set_defaults(
        func=cmd_compare, default_format="table")
    sub.add_parser("trace", parents=[common], help="per-update records for plotting").set_defaults(
        func=cmd_trace, default_format="csv")
    sub.add_parser("generate", parents=[common], help="write a built-in problem to files").set_defaults(
        func=cmd_generate, default_format="table")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.func(args)
    except (InputError, AveError, OSError, ValueError) as exc:
        print(f"ave: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
