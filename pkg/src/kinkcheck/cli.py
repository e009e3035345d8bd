"""``kinkcheck`` command line.

Exit codes: 0 success, 1 equivalence violations found, 2 parse or usage
error, 3 infeasible point, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .absnormal import AbsNormalProblem
from .errors import EvaluationError, InfeasiblePointError, ParseError, SimplexError
from .fileformat import dump_problem, parse_problem
from .multipliers import MultiplierSet
from .policy import DEFAULT, Tolerances
from .reform import MpccProblem, build_counterpart_mpcc, build_slack_nlp
from .report import REPORT_SCHEMA, SUITE_SCHEMA, dumps, validate

__all__ = ["main", "build_parser", "cmd_analyze", "cmd_convert", "cmd_check_equivalence"]

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _json_arg(value, what):
    """Inline JSON, or a path to a JSON file."""
    if value is None:
        return None
    text = value
    if not value.lstrip().startswith(("{", "[")) and os.path.exists(value):
        text = _read_text(value)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--{what}: invalid JSON ({exc.msg})") from None


def _load_problem(path, abs_only=True):
    p = parse_problem(_read_text(path))
    if abs_only and not isinstance(p, AbsNormalProblem):
        raise UsageError("expected an abs-normal problem (file has an mpcc section)")
    return p


def _parse_point(text, n):
    if text is None:
        raise UsageError("--point is required")
    try:
        x = np.array([float(v) for v in text.split(",") if v.strip()], dtype=float)
    except ValueError:
        raise UsageError(f"--point: cannot parse {text!r}") from None
    if x.size != n:
        raise UsageError(f"--point has {x.size} entries, the problem has {n} variables")
    return x


def _policy(args) -> Tolerances:
    data = _json_arg(args.tol_policy, "tol-policy")
    if data is None:
        return DEFAULT
    try:
        return Tolerances.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--tol-policy: {exc}") from None


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_analyze(args):
    from .analysis import analyze

    p = _load_problem(args.file)
    x = _parse_point(args.point, p.n)
    lam = None
    raw = _json_arg(args.multipliers, "multipliers")
    if raw is not None:
        lam = MultiplierSet.from_dict(raw)
    report = analyze(p, x, lam, _policy(args), seed=args.seed)
    data = report.to_dict()
    if args.no_timing:
        data.pop("timing", None)
    validate(data, REPORT_SCHEMA)
    _emit(dumps(data), args.out)
    return EXIT_OK


def cmd_convert(args):
    p = _load_problem(args.file, abs_only=False)
    if isinstance(p, MpccProblem):
        # already a complementarity program: re-serialize so conversions have a fixpoint
        if args.to == "slack":
            raise UsageError("slack conversion needs an abs-normal problem")
        q = p
    elif args.to == "slack":
        try:
            q = build_slack_nlp(p)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        q = build_counterpart_mpcc(p, "I" if args.to == "mpcc-i" else "E")
    _emit(dump_problem(q), args.out)
    return EXIT_OK


def cmd_check_equivalence(args):
    from .analysis import run_suite

    tol = _policy(args)
    if args.random:
        if args.file:
            raise UsageError("give either a problem file or --random, not both")
        data = run_suite(seed=args.seed, samples=args.samples, n_random=args.random, tol=tol)
    else:
        if not args.file:
            raise UsageError("a problem file is required unless --random is given")
        p = _load_problem(args.file)
        x = _parse_point(args.point, p.n)
        data = run_suite(p, x, seed=args.seed, samples=args.samples, tol=tol)
    if args.no_timing:
        data.pop("timing", None)
    validate(data, SUITE_SCHEMA)
    _emit(dumps(data), args.out)
    return EXIT_VIOLATION if data["violations"] else EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="kinkcheck",
                                 description="Abs-normal / MPCC optimality analysis.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, point=True):
        if point:
            sp.add_argument("--point", help="comma-separated values of all variables")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--tol-policy", help="tolerance overrides as JSON or a JSON file")
            sp.add_argument("--no-timing", action="store_true",
                            help="omit the timing field from the report")
        sp.add_argument("--out", help="write to this path instead of stdout")

    a = sub.add_parser("analyze", help="analyze one feasible point")
    a.add_argument("file", help="problem file, '-' for stdin")
    a.add_argument("--multipliers", help="multipliers to verify, JSON or a JSON file")
    common(a)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("convert", help="emit the slack form or a counterpart MPCC")
    c.add_argument("file")
    c.add_argument("--to", choices=("slack", "mpcc-i", "mpcc-e"), required=True)
    common(c, point=False)
    c.set_defaults(func=cmd_convert)

    e = sub.add_parser("check-equivalence", help="compare both sides at sampled points")
    e.add_argument("file", nargs="?")
    e.add_argument("--samples", type=int, default=7,
                   help="number of extra feasible points near --point")
    e.add_argument("--random", type=int, default=0, metavar="N",
                   help="run on N generated instances instead of a file")
    common(e)
    e.set_defaults(func=cmd_check_equivalence, seed=42)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError) as exc:
        print(f"kinkcheck: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"kinkcheck: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InfeasiblePointError as exc:
        print(f"kinkcheck: infeasible point: {exc}", file=sys.stderr)
        for k, v in exc.residuals.items():
            print(f"  {k}: {v}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (EvaluationError, SimplexError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"kinkcheck: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
