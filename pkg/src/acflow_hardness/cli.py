"""Command-line entry point.

Exit status: 0 success or verdict true, 1 verdict false or failed
certificate, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import jsonio
from .bounds import verify_bounds
from .cnf import CnfFormatError, SizeError, brute_force_sat, format_assignment, parse_assignment, parse_cnf
from .gadget import analyze_b
from .network import NetworkError, check_feasible, throughput
from .reduction import EncodingError, compile_instance, decode_witness, encode_witness

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc.strerror}") from None


def cmd_analyze_b(args) -> int:
    if args.delta_grid < 2:
        raise UsageError("--delta-grid must be at least 2")
    report = analyze_b(args.delta_grid)
    _emit(jsonio.dumps(report), args.out)
    return EXIT_OK if all(b["holds"] for b in report["bounds"]) else EXIT_FALSE


def cmd_verify_constants(args) -> int:
    try:
        certs = verify_bounds(args.grid_step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(jsonio.dumps([c.to_dict() for c in certs]), args.out)
    return EXIT_OK if all(c.holds for c in certs) else EXIT_FALSE


def cmd_compile(args) -> int:
    inst = compile_instance(parse_cnf(_read(args.input)))
    _emit(jsonio.dumps(jsonio.instance_to_dict(inst)), args.output)
    return EXIT_OK


def cmd_encode(args) -> int:
    inst = jsonio.instance_from_dict(_read_json(args.instance))
    a = parse_assignment(_read(args.assignment), inst.cnf.num_vars)
    try:
        pt = encode_witness(inst, a, saturate=args.saturate)
    except EncodingError as exc:
        print(f"encode-witness: {exc}", file=sys.stderr)
        return EXIT_FALSE
    _emit(jsonio.dumps(jsonio.point_to_dict(pt)), args.output)
    return EXIT_OK


def cmd_decode(args) -> int:
    inst = jsonio.instance_from_dict(_read_json(args.instance))
    pt = jsonio.point_from_dict(_read_json(args.point))
    report = decode_witness(inst, pt)
    _emit(jsonio.dumps(report.to_dict()), None)
    return EXIT_OK if report.consistent and report.one_in_three_ok else EXIT_FALSE


def cmd_check(args) -> int:
    if args.epsilon < 0:
        raise UsageError("--epsilon must be nonnegative")
    inst = jsonio.instance_from_dict(_read_json(args.instance))
    pt = jsonio.point_from_dict(_read_json(args.point))
    report = check_feasible(inst.network, pt, args.epsilon)
    slack = args.slack
    if slack is None:
        slack = 2e-2 * (inst.cnf.num_vars + inst.cnf.num_clauses)
    demand = throughput(inst.network, pt, inst.load)
    out = report.to_dict()
    out.update(
        demand=demand,
        threshold=inst.threshold,
        threshold_slack=slack,
        threshold_met=demand >= inst.threshold - slack,
    )
    _emit(jsonio.dumps(out), None)
    return EXIT_OK if report.verdict and out["threshold_met"] else EXIT_FALSE


def cmd_oracle(args) -> int:
    a = brute_force_sat(parse_cnf(_read(args.input)))
    if a is None:
        print("UNSAT")
        return EXIT_FALSE
    sys.stdout.write(format_assignment(a))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="acflow",
        description="Lossless AC power-flow feasibility, B gadget analysis, and the 1-in-3 SAT reduction.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    s = sub.add_parser("analyze-b", help="sweep the B gadget manifold and report mode ranges", formatter_class=fmt)
    s.add_argument("--delta-grid", type=int, default=10001, help="number of delta grid points")
    s.add_argument("--out", default=None, help="output file (default: stdout)")
    s.set_defaults(func=cmd_analyze_b)

    s = sub.add_parser("verify-constants", help="emit bound certificates", formatter_class=fmt)
    s.add_argument("--grid-step", type=float, default=1e-5, help="certificate grid spacing (<= 1e-4)")
    s.add_argument("--out", default=None, help="output file (default: stdout)")
    s.set_defaults(func=cmd_verify_constants)

    s = sub.add_parser("compile", help="compile a 1-in-3 SAT DIMACS file to a THROUGHPUT instance", formatter_class=fmt)
    s.add_argument("input", help="DIMACS file with 3 literals per clause")
    s.add_argument("-o", "--output", default=None, help="instance JSON (default: stdout)")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("encode-witness", help="operating point for an assignment", formatter_class=fmt)
    s.add_argument("instance", help="instance JSON from compile")
    s.add_argument("assignment", help="assignment file, lines 'j 0|1'")
    s.add_argument("-o", "--output", default=None, help="operating point JSON (default: stdout)")
    s.add_argument("--saturate", action="store_true", help="clamp overloaded drain lines instead of failing")
    s.set_defaults(func=cmd_encode)

    s = sub.add_parser("decode-witness", help="extract an assignment from an operating point", formatter_class=fmt)
    s.add_argument("instance")
    s.add_argument("point")
    s.set_defaults(func=cmd_decode)

    s = sub.add_parser("check", help="epsilon-feasibility and demand check", formatter_class=fmt)
    s.add_argument("instance")
    s.add_argument("point")
    s.add_argument("--epsilon", type=float, default=1e-6, help="coupling and balance tolerance")
    s.add_argument(
        "--slack", type=float, default=None, help="allowed demand shortfall below threshold (default: 0.02 (n + m))"
    )
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("oracle", help="brute-force 1-in-3 SAT", formatter_class=fmt)
    s.add_argument("input")
    s.set_defaults(func=cmd_oracle)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, CnfFormatError, SizeError, jsonio.JsonFormatError, NetworkError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
