"""Command-line benchmark driver.

Subcommands: ``bench spmv`` and ``bench solver`` run timed measurements and
write a report; ``bench compare`` joins a baseline and a candidate report and
attaches speedup and overhead columns.  Exit code 0 on success, 1 when any
record failed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from .bench import (
    bench_solver,
    bench_spmv,
    compare_reports,
    emit_report,
    load_report,
)
from .core import Precision, create_device
from .errors import SparseOpsError


def _add_common(p: argparse.ArgumentParser, default_precision: str):
    p.add_argument("--device", choices=("reference", "omp"), default="reference")
    p.add_argument("--threads", type=int, default=None,
                   help="thread count for the omp device (default: hardware)")
    p.add_argument("--precision", choices=("single", "double"), default=default_precision)
    p.add_argument("--warmups", type=int, default=3)
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--emit", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bench",
                                     description="sparse kernel benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True)

    spmv = sub.add_parser("spmv", help="time x = A*b")
    spmv.add_argument("--matrix", required=True)
    spmv.add_argument("--format", choices=("csr", "coo"), default="csr")
    spmv.add_argument("--seed", type=int, default=0)
    _add_common(spmv, "single")

    solver = sub.add_parser("solver", help="time a fixed-iteration solve of A*x = b")
    solver.add_argument("--matrix", required=True)
    solver.add_argument("--config", default=None, help="JSON solver config")
    solver.add_argument("--solver", choices=("cg", "cgs", "gmres"), default=None)
    solver.add_argument("--iters", type=int, default=1000)
    _add_common(solver, "double")
    solver.set_defaults(warmups=0, reps=1)

    compare = sub.add_parser("compare", help="attach speedup/overhead columns")
    compare.add_argument("--baseline", required=True)
    compare.add_argument("--candidate", required=True)
    compare.add_argument("--out", default=None)
    compare.add_argument("--emit", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compare":
            records = compare_reports(load_report(args.baseline), load_report(args.candidate))
        else:
            device = create_device(args.device, threads=args.threads)
            precision = Precision(args.precision)
            if args.command == "spmv":
                records = [bench_spmv(args.matrix, format=args.format, device=device,
                                      precision=precision, warmups=args.warmups,
                                      reps=args.reps, seed=args.seed)]
            else:
                if args.config is None and args.solver is None:
                    print("bench solver: pass --config and/or --solver", file=sys.stderr)
                    return 2
                records = [bench_solver(args.matrix, config=args.config, solver=args.solver,
                                        device=device, precision=precision,
                                        fixed_iters=args.iters, warmups=args.warmups,
                                        reps=args.reps)]
        text = emit_report(records, format=args.emit, path=args.out)
        if args.out is None:
            sys.stdout.write(text)
        return 0 if all(r.ok for r in records) else 1
    except (SparseOpsError, OSError) as exc:
        print(f"bench: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
