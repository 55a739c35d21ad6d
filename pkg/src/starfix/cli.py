"""Command-line front end.

Four subcommands: star (inspect an index operation), check (run the
hypothesis battery from a config), solve (checks plus iteration), and
enumerate (exact answer sets on a finite space). Human-readable summaries
go to stdout; the machine-readable JSON report is written to --report.
Reports are deterministic: fixed default seed, sorted keys, and timings
are omitted under --no-timings so identical invocations produce
byte-identical files.

Exit codes are a stable contract: 0 ok, 2 hypothesis failure, 3 no
convergence, 64 usage, 65 parse, 66 missing file, 69 enumeration bound
exceeded, 70 missing g-inverse oracle.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace

from ._backend import BACKEND
from ._util import to_jsonable
from .config import load_problem_config
from .dsl import ParseError
from .errors import ConfigError, EnumerationBoundError, MissingInverseError
from .hypotheses import FAILS, check_argumentwise_monotone, implied_variants
from .index_algebra import format_star, is_permuted, preset, read_star_file
from .solver import (
    lemma3_crosscheck,
    solve_with_checks,
    verify_solution,
)
from .spaces import FiniteSpace

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_NO_CONVERGENCE = 3
EXIT_USAGE = 64
EXIT_PARSE = 65
EXIT_MISSING_FILE = 66
EXIT_BOUND = 69
EXIT_NO_INVERSE = 70

SCHEMA_VERSION = 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage, which collides with the hypothesis
    # failure code; route usage problems to 64 instead
    def error(self, message):
        raise _UsageError(message)


def _add_common(sub):
    sub.add_argument("--report", metavar="PATH", help="write the JSON report here")
    sub.add_argument(
        "--no-timings", action="store_true", help="omit wall-clock timings from the report"
    )


def _add_sampling(sub):
    sub.add_argument("--seed", type=int, help="override the sampling seed")
    sub.add_argument("--samples", type=int, help="override the sample count")
    sub.add_argument("--jobs", type=int, default=1, help="worker threads for sampled checks")


def build_parser() -> _Parser:
    parser = _Parser(prog="starfix", description="n-tupled coincidence point toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_star = sub.add_parser("star", help="print an index operation and its permuted verdict")
    p_star.add_argument("--preset", help="preset id, e.g. coupled2 or forward_cyclic")
    p_star.add_argument("--n", type=int, help="size for family presets")
    p_star.add_argument("--file", help="star matrix file")
    _add_common(p_star)
    p_star.set_defaults(func=cmd_star)

    p_check = sub.add_parser("check", help="run all declared hypothesis checks")
    p_check.add_argument("config", help="problem config file")
    _add_sampling(p_check)
    _add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_solve = sub.add_parser("solve", help="run checks, then iterate to a coincidence point")
    p_solve.add_argument("config", help="problem config file")
    p_solve.add_argument("--tol", type=float, help="override the residual tolerance")
    p_solve.add_argument("--max-iter", type=int, help="override the iteration cap")
    p_solve.add_argument("--force", action="store_true", help="iterate even if a check fails")
    _add_sampling(p_solve)
    _add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_enum = sub.add_parser("enumerate", help="exact answer sets on a finite space")
    p_enum.add_argument("config", help="problem config file (finite space)")
    p_enum.add_argument("--bound", type=int, help="override the enumeration bound")
    _add_common(p_enum)
    p_enum.set_defaults(func=cmd_enumerate)
    return parser


def _emit(report: dict, args, timings: dict) -> None:
    report = dict(report)
    report["schema_version"] = SCHEMA_VERSION
    report["backend"] = BACKEND
    if not args.no_timings:
        report["timings"] = timings
    if args.report:
        text = json.dumps(to_jsonable(report), indent=2, sort_keys=True) + "\n"
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)


def _apply_sampler_overrides(sampler, args):
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.samples is not None:
        updates["samples"] = args.samples
    if args.jobs and args.jobs != 1:
        updates["jobs"] = args.jobs
    return replace(sampler, **updates) if updates else sampler


def cmd_star(args) -> int:
    t0 = time.perf_counter()
    if bool(args.preset) == bool(args.file):
        raise _UsageError("give exactly one of --preset or --file")
    if args.preset:
        try:
            star = preset(args.preset, args.n)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
        source = f"preset:{args.preset}"
    else:
        star = read_star_file(args.file)  # ValueError -> exit 65 in main
        source = args.file
    print(format_star(star), end="")
    permuted = is_permuted(star)
    print(f"permuted: {str(permuted).lower()}")
    _emit(
        {
            "command": "star",
            "source": source,
            "n": star.n,
            "matrix": star.entries,
            "permuted": permuted,
        },
        args,
        {"total_s": time.perf_counter() - t0},
    )
    return EXIT_OK


def _run_battery(cfg, sampler):
    """Shared between check and solve: the full declared-hypothesis sweep."""
    from .solver import standard_checks

    problem = cfg.problem
    reports = standard_checks(problem, sampler)
    if isinstance(problem.space, FiniteSpace):
        reports.append(
            check_argumentwise_monotone(
                problem.f_table, problem.g_table, problem.space, problem.n, sampler.bound
            )
        )
    return reports


def cmd_check(args) -> int:
    t0 = time.perf_counter()
    cfg = load_problem_config(args.config)
    sampler = _apply_sampler_overrides(cfg.sampler, args)
    problem = cfg.problem
    reports = _run_battery(cfg, sampler)

    implied = []
    if problem.variant is not None:
        phi_increasing = bool(problem.phi.is_increasing) if problem.phi else False
        implied = [
            v.describe()
            for v in sorted(
                implied_variants(
                    problem.variant, is_permuted(problem.star), phi_increasing, problem.n
                ),
                key=lambda v: (v.id, v.alpha or 0.0, v.weights or ()),
            )
        ]
    flags = {name: vars(flag) for name, flag in problem.flags().items()}

    for rep in reports:
        print(f"{rep.hypothesis}: {rep.verdict}")
    failed = [r for r in reports if r.verdict == FAILS]
    for rep in failed:
        print(f"  witness[{rep.hypothesis}]: {json.dumps(to_jsonable(rep.witness), sort_keys=True)}")

    _emit(
        {
            "command": "check",
            "config": cfg.echo,
            "hypotheses": [r.to_json() for r in reports],
            "implied_variants": implied,
            "flags": flags,
        },
        args,
        {"total_s": time.perf_counter() - t0},
    )
    return EXIT_HYPOTHESIS if failed else EXIT_OK


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    cfg = load_problem_config(args.config)
    sampler = _apply_sampler_overrides(cfg.sampler, args)
    solve_cfg = cfg.solve
    updates = {}
    if args.tol is not None:
        updates["tol"] = args.tol
    if args.max_iter is not None:
        updates["max_iter"] = args.max_iter
    if updates:
        solve_cfg = replace(solve_cfg, **updates)

    report = solve_with_checks(cfg.problem, solve_cfg, sampler, force=args.force)
    verified = None
    if report.converged:
        ok, residual = verify_solution(cfg.problem, report.U, solve_cfg.tol)
        verified = {"passed": ok, "residual": residual}

    print(f"status: {report.status}")
    if report.U is not None and report.status not in ("hypothesis_failure",):
        print(f"point: {json.dumps(to_jsonable(report.U))}")
        print(f"residual: {report.residual:.3e}  iterations: {report.iterations}")
    for rep in report.hypothesis_reports:
        print(f"{rep.hypothesis}: {rep.verdict}")

    _emit(
        {
            "command": "solve",
            "config": cfg.echo,
            "solve": report.to_json(),
            "verify": verified,
        },
        args,
        {"total_s": time.perf_counter() - t0},
    )
    if report.status == "converged":
        return EXIT_OK
    if report.status == "hypothesis_failure":
        return EXIT_HYPOTHESIS
    if report.status == "g_inverse_missing":
        return EXIT_NO_INVERSE
    return EXIT_NO_CONVERGENCE


def cmd_enumerate(args) -> int:
    t0 = time.perf_counter()
    cfg = load_problem_config(args.config)
    problem = cfg.problem
    if not isinstance(problem.space, FiniteSpace):
        raise _UsageError("enumerate needs a finite-space config")
    bound = args.bound if args.bound is not None else cfg.sampler.bound
    result = lemma3_crosscheck(
        problem.space, problem.f_table, problem.g_table, problem.star, bound
    )

    print(f"coincidence points: {json.dumps(to_jsonable(result['coincidence']))}")
    print(f"common fixed points: {json.dumps(to_jsonable(result['common_fixed']))}")
    print(f"cross-check agree: {str(bool(result['agree'])).lower()}")

    _emit(
        {
            "command": "enumerate",
            "config": cfg.echo,
            "coincidence": result["coincidence"],
            "coincidence_induced": result["coincidence_induced"],
            "common_fixed": result["common_fixed"],
            "common_fixed_induced": result["common_fixed_induced"],
            "crosscheck_agree": result["agree"],
        },
        args,
        {"total_s": time.perf_counter() - t0},
    )
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except EnumerationBoundError as exc:
        print(f"bound exceeded: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except MissingInverseError as exc:
        print(f"missing oracle: {exc}", file=sys.stderr)
        return EXIT_NO_INVERSE
    except (ConfigError, ParseError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
