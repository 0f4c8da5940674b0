"""Command line: ``ik6rp solve | fk | check``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .chain import JointVector, forward_arr
from .dualquat import canonicalize
from .errors import DegeneracyError, IKError
from .io import format_pose, parse_chain, parse_pose, report_json, report_table
from .solver import SolverOptions, solve_ik_report
from .spaces import left_families, right_families

TOL_ENV = "IK6RP_TOL"

EXIT_OK, EXIT_IO, EXIT_DEGENERATE = 0, 1, 2


def default_options() -> SolverOptions:
    opts = SolverOptions()
    env = os.environ.get(TOL_ENV)
    if env:
        opts = replace(opts, pose_tolerance=float(env))
    return opts


def _trace(result, out):
    print("# trace", file=out)
    for key, fam in result.family_objects.items():
        print(f"{key}: {fam.name} segment {fam.segment}{fam.segment_params} "
              f"in_S={fam.in_study_quadric} condition [{fam.condition}]", file=out)
        with np.printoptions(precision=6, suppress=True, linewidth=140):
            for k in range(fam.coeffs.shape[0]):
                print(f"  coefficient of {fam.param}^{k}:", file=out)
                print("  " + str(fam.coeffs[k]).replace("\n", "\n  "), file=out)
    print(f"subset {list(result.subset)}", file=out)
    print(f"deg f = {result.f_degrees}, deg g = {result.g_degrees}", file=out)
    print(f"deg r = {result.resultant_degree}; real roots: "
          + ", ".join(f"{u:.12g}" for u in result.resultant_roots), file=out)
    for rej in result.rejected:
        print(f"rejected (u, w) = ({rej['u']:.9g}, {rej['w']:.9g}): {rej['reason']}", file=out)


def cmd_solve(args) -> int:
    opts = default_options()
    if args.tol is not None:
        opts = replace(opts, pose_tolerance=args.tol)
    if args.accept is not None:
        opts = replace(opts, accept_tolerance=args.accept)
    chain = parse_chain(args.chain)
    pose = parse_pose(args.pose, opts.pose_tolerance)
    result = solve_ik_report(chain, pose.point, opts)
    if args.trace:
        _trace(result, sys.stderr if args.format == "json" else sys.stdout)
    if args.format == "json":
        sys.stdout.write(report_json(chain, result, pose, timing=not args.no_timing))
    else:
        if pose.correction > 0:
            print(f"pose projected onto the Study quadric (relative correction {pose.correction:.2e})")
        sys.stdout.write(report_table(chain, result))
    return EXIT_OK


def cmd_fk(args) -> int:
    chain = parse_chain(args.chain)
    vals = [float(x) for x in args.joints.replace(" ", "").split(",") if x]
    if len(vals) != 6:
        raise ValueError(f"expected 6 joint values, got {len(vals)}")
    joints = JointVector.from_external(chain, vals)
    pose = forward_arr(chain, joints)
    if not args.raw:
        pose = canonicalize(pose)
    if args.format == "json":
        print(json.dumps({"pose": [float(x) for x in pose]}))
    else:
        print(format_pose(pose, 17))
    return EXIT_OK


def describe_family(fam) -> str:
    if fam.in_study_quadric:
        return f"{fam.name} in Study quadric ({fam.reason or fam.condition})"
    return f"{fam.name} usable (needs not [{fam.condition}])"


def cmd_check(args) -> int:
    chain = parse_chain(args.chain)
    print(f"chain {chain.name or args.chain}: pattern {chain.pattern} ({chain.kind})")
    left = left_families(chain)
    right = right_families(chain, np.eye(8)[0])
    for side, fams in (("left", left), ("right", right)):
        for key in ("first", "last"):
            print(describe_family(fams[key]))
        chosen = next((f.name for f in (fams["first"], fams["last"]) if f.usable), None)
        print(f"{side} family: {chosen if chosen else 'none usable (unsupported chain)'}")
    ok = any(f.usable for f in left.values()) and any(f.usable for f in right.values())
    return EXIT_OK if ok else EXIT_DEGENERATE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ik6rp", description="Inverse kinematics of 6R/2RP3R/2R2P2R/3RP2R chains.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="all real IK solutions for a pose")
    s.add_argument("--chain", required=True, help="chain JSON file")
    s.add_argument("--pose", required=True, help="x0,...,y3 or a row-major 3x4/4x4 matrix")
    s.add_argument("--tol", type=float, help=f"pose Study-residual tolerance (env {TOL_ENV})")
    s.add_argument("--accept", type=float, help="forward-kinematics acceptance tolerance")
    s.add_argument("--format", choices=("table", "json"), default="table")
    s.add_argument("--trace", action="store_true", help="print intermediate objects")
    s.add_argument("--no-timing", action="store_true", help="omit timing from JSON output")
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("fk", help="forward kinematics (angles in degrees)")
    f.add_argument("--chain", required=True)
    f.add_argument("--joints", required=True, help="j1,...,j6")
    f.add_argument("--format", choices=("text", "json"), default="text")
    f.add_argument("--raw", action="store_true", help="do not rescale the Study parameters")
    f.set_defaults(func=cmd_fk)

    c = sub.add_parser("check", help="report which linear families are usable")
    c.add_argument("--chain", required=True)
    c.set_defaults(func=cmd_check)
    return p


def _glue_values(argv):
    """Let ``--pose -1,2,...`` through argparse, which would read it as an option."""
    out, it = [], iter(argv)
    for a in it:
        if a in ("--pose", "--joints"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_glue_values(argv))
    try:
        return args.func(args)
    except DegeneracyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (IKError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
