"""Command-line front end: compile / verify / ladder / decompose.

Exit codes: 0 success, 2 error target not met (word still emitted),
3 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys

from .decompose import decompose
from .pipeline import (EXIT_INVALID, EXIT_OK, EXIT_TARGET_MISSED, ProblemFile,
                       ladder_csv, compile_problem, preset_problem, run_ladder,
                       verify_word)
from .reference import phase_grid
from .shears import ShearWord


def _load_problem(args) -> ProblemFile:
    if args.preset:
        problem = preset_problem(args.preset)
    elif args.problem:
        problem = ProblemFile.load(args.problem)
    else:
        raise ValueError("give a problem file or --preset")
    if getattr(args, "cap_length", None):
        problem.max_word_length = args.cap_length
    return problem


def _grid_for(args, dim):
    if getattr(args, "grid", None):
        return phase_grid(dim, args.grid)
    return None  # module default


def cmd_compile(args) -> int:
    problem = _load_problem(args)
    word, report = compile_problem(problem, grid=_grid_for(args, problem.dim),
                                   tol=args.tol)
    report.word_path = args.output
    word.save(args.output, metrics=report.to_dict())
    if args.report:
        report.save(args.report)
    status = "ok" if report.target_met else "target not met"
    print(f"compile: {status}; error={report.measured_error:.3e} "
          f"target={report.target_eps:.1e} length={report.word_length} "
          f"cap_hit={report.cap_hit}")
    return EXIT_OK if report.target_met else EXIT_TARGET_MISSED


def cmd_verify(args) -> int:
    word = ShearWord.load(args.word)
    problem = _load_problem(args)
    report = verify_word(word, problem, grid=_grid_for(args, problem.dim),
                         tol=args.tol, seed=args.seed)
    if args.report:
        report.save(args.report)
    print(f"verify: error={report.measured_error:.3e} "
          f"target={report.target_eps:.1e} "
          f"symplecticity={report.symplecticity_residual:.3e} "
          f"roundtrip={report.inverse_roundtrip_error:.3e}")
    return EXIT_OK if report.target_met else EXIT_TARGET_MISSED


def cmd_ladder(args) -> int:
    problem = _load_problem(args)
    steps = [int(s) for s in args.steps.split(",")]
    rows, fit = run_ladder(problem, args.scheme, steps,
                           grid=_grid_for(args, problem.dim), tol=args.tol,
                           flow_time=args.flow_time)
    text = ladder_csv(rows, fit)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    print(text, end="")
    return EXIT_OK


def cmd_decompose(args) -> int:
    problem = _load_problem(args)
    if not problem.is_autonomous:
        raise ValueError("decompose needs an autonomous Hamiltonian")
    dec = decompose(problem.autonomous)
    residual = dec.reconstruct().coeff_distance(problem.autonomous)
    out = dec.to_dict()
    out["reconstruction_residual"] = residual
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(out, fh, indent=2)
    print(f"decompose: {len(dec.terms)} bracket terms, "
          f"v0 modes={len(dec.v0.coeffs)}, residual={residual:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="shearflow",
        description="Compile torus Hamiltonian flows into shear-map words.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_output=False):
        p.add_argument("problem", nargs="?", help="problem JSON file")
        p.add_argument("--preset", help="use a built-in problem")
        p.add_argument("--grid", type=int,
                       help="uniform grid points per axis (default: module grid)")
        p.add_argument("--tol", type=float, default=1e-11,
                       help="reference integrator tolerance")
        if needs_output:
            p.add_argument("-o", "--output", required=True)
        else:
            p.add_argument("-o", "--output")

    p = sub.add_parser("compile", help="compile the time-1 flow to a word")
    common(p, needs_output=True)
    p.add_argument("--report", help="write a JSON compile report")
    p.add_argument("--cap-length", type=int, help="override word-length cap")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", help="re-measure a word against a problem")
    p.add_argument("word", help="word JSON file")
    common(p)
    p.add_argument("--report", help="write a JSON verify report")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the symplecticity point sample")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ladder", help="isolated-scheme convergence sweep")
    common(p)
    p.add_argument("--scheme", required=True,
                   choices=["trotter", "commutator", "slicing", "end_to_end"])
    p.add_argument("--steps", required=True,
                   help="comma-separated step counts, e.g. 8,16,32,64")
    p.add_argument("--flow-time", type=float,
                   help="override the scheme's default ladder flow time")
    p.set_defaults(func=cmd_ladder)

    p = sub.add_parser("decompose", help="bracket-decompose a Hamiltonian")
    common(p)
    p.set_defaults(func=cmd_decompose)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
