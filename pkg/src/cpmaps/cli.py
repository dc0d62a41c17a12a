"""Command-line interface.

Exit status: 0 pass, 1 verification failed, 2 input error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import files
from .channel import identity_channel, index, pinching, random_cp, zero_map
from .compose import verify_factorization
from .exceptions import DimensionMismatch, NumericalError
from .files import ChannelFileError
from .gns import EQUALITY_ATOL, morita_witness, verify_theorem1
from .numerics import RankPolicy

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3

DEFAULT_MAX_N = 4


class InputError(Exception):
    pass


def _policy(args) -> RankPolicy:
    if args.tol_abs is not None and not args.tol_abs >= 0:
        raise InputError(f"--tol-abs must be non-negative, got {args.tol_abs}")
    return RankPolicy(absolute=args.tol_abs)


def _load(path: str):
    try:
        return files.read_channel(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except (ChannelFileError, DimensionMismatch, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _format_value(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return files.dumps(report) + "\n"
    lines = [f"command: {report['command']}"]
    policy = report["policy"]
    lines.append("policy: " + ", ".join(f"{k}={_format_value(v)}" for k, v in policy.items()))
    for key, value in report["results"].items():
        if isinstance(value, list):
            continue
        lines.append(f"{key}: {_format_value(value)}")
    lines.append(f"pass: {_format_value(report['pass'])}")
    lines.append(f"wall_time: {_format_value(report['wall_time'])}")
    return "\n".join(lines) + "\n"


def _emit(args, text: str, out: Optional[str]) -> None:
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def cmd_make(args) -> int:
    if args.n < 1:
        raise InputError("n must be positive")
    seed = None
    if args.kind == "pinching":
        p = pinching(args.n)
    elif args.kind == "identity":
        p = identity_channel(args.n)
    elif args.kind == "zero":
        p = zero_map(args.n)
    else:
        if args.N is None or args.N < 1:
            raise InputError("random channels need a positive Kraus count N")
        seed = args.seed if args.seed is not None else 0
        p = random_cp(args.n, args.N, seed)
    _emit(args, files.channel_to_text(p, name=args.kind, seed=seed), args.out)
    return EXIT_PASS


def _run_report(args, command: str, body: Callable[[], tuple]) -> int:
    start = time.perf_counter()
    results, passed = body()
    report = {
        "command": command,
        "argv": list(args.argv),
        "policy": args.policy.describe(),
        "results": results,
        "pass": passed,
        "wall_time": time.perf_counter() - start,
    }
    _emit(args, _render(report, args.format), getattr(args, "report_out", None))
    return EXIT_PASS if passed else EXIT_FAIL


def cmd_index(args) -> int:
    p = _load(args.channel)

    def body():
        rep = index(p, args.policy)
        return {"n": p.n, "kraus_count": len(p), **rep.as_dict()}, rep.agree

    return _run_report(args, "index", body)


def cmd_verify_theorem1(args) -> int:
    p = _load(args.channel)

    def body():
        rep = verify_theorem1(p, args.policy)
        results = rep.as_dict()
        passed = results.pop("pass")
        return {"n": p.n, **results}, passed

    return _run_report(args, "verify-theorem1", body)


def cmd_verify_compose(args) -> int:
    p1, p2 = _load(args.ch1), _load(args.ch2)
    if p1.n != p2.n:
        raise InputError(f"channels act on different sizes: {p1.n} vs {p2.n}")
    if p1.n > args.max_n:
        raise InputError(f"n={p1.n} exceeds --max-n {args.max_n}")

    def body():
        rep = verify_factorization(p1, p2, args.policy)
        results = rep.as_dict()
        passed = results.pop("pass")
        return {"n": p1.n, **results}, passed

    return _run_report(args, "verify-compose", body)


def cmd_witness(args) -> int:
    p = _load(args.channel)

    def body():
        w = morita_witness(p, args.policy)
        results = {
            "n": p.n,
            "d": w.d,
            "rows": int(w.isometry.shape[0]),
            "cols": int(w.isometry.shape[1]),
            "residual": w.residual,
            "tolerance": EQUALITY_ATOL,
        }
        if args.out:
            try:
                Path(args.out).write_text(files.matrix_to_text(w.isometry))
            except OSError as exc:
                raise InputError(f"cannot write {args.out}: {exc}") from exc
        else:
            results["isometry"] = files.encode_matrix(w.isometry)
        return results, w.residual <= EQUALITY_ATOL

    return _run_report(args, "witness", body)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cpmaps",
        description="Completely positive maps on M_n(C) and their GNS correspondences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol-abs", type=float, default=None,
                       help="absolute rank threshold (default: dim*eps*max(lambda_max,1))")
        p.add_argument("--format", choices=("json", "text"), default="text")

    make = sub.add_parser("make", help="write a channel file")
    make.add_argument("kind", choices=("pinching", "identity", "random", "zero"))
    make.add_argument("n", type=int)
    make.add_argument("N", type=int, nargs="?", help="Kraus count (random only)")
    make.add_argument("--seed", type=int, default=None)
    make.add_argument("--out", default=None, help="output path (default: stdout)")
    make.set_defaults(func=cmd_make)

    idx = sub.add_parser("index", help="compute d(P) three ways")
    idx.add_argument("channel")
    common(idx)
    idx.add_argument("--out", dest="report_out", default=None)
    idx.set_defaults(func=cmd_index)

    thm = sub.add_parser("verify-theorem1", help="compare the F_P and corner Gram matrices")
    thm.add_argument("channel")
    common(thm)
    thm.add_argument("--out", dest="report_out", default=None)
    thm.set_defaults(func=cmd_verify_theorem1)

    comp = sub.add_parser("verify-compose", help="check the two-step tensor factorization")
    comp.add_argument("ch1")
    comp.add_argument("ch2")
    common(comp)
    comp.add_argument("--max-n", type=int, default=DEFAULT_MAX_N)
    comp.add_argument("--out", dest="report_out", default=None)
    comp.set_defaults(func=cmd_verify_compose)

    wit = sub.add_parser("witness", help="isometry identifying F_P with C^d")
    wit.add_argument("channel")
    common(wit)
    wit.add_argument("--out", default=None, help="matrix file for the isometry")
    wit.set_defaults(func=cmd_witness)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    args.argv = argv
    try:
        if hasattr(args, "tol_abs"):
            args.policy = _policy(args)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
