#!/usr/bin/env python3

"""
Check felt metric spaces, iterate self-maps and stress the fixed point
theorem from the command line.

Exit status: 0 success, 1 a check or the certification failed, 2 usage or
input error.
"""

import argparse
import json
import logging
import sys

from feltfp import __version__, config, load_config
from feltfp.axioms import (check_felt_metric, check_zero_completeness_finite,
                           check_zero_continuity_everywhere)
from feltfp.builtin import BUILTIN_PREFIX, MAP_NAMES, SPACE_NAMES, make_map, make_space
from feltfp.contraction import (check_condition2_finite, check_condition2_sampled,
                                check_condition3_finite, check_condition3_sampled,
                                check_equivalence_2_3, nonexpansive_on_positive)
from feltfp.core import ConfigurationError, DomainError, FeltError, Tolerances
from feltfp.junit import render_junit
from feltfp.oracle import EnumerationConfig, fuzz_equivalence, stress_theorem
from feltfp.solver import solve
from feltfp.spacefile import load_space_file

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _builtin_name(spec, names, what):
    name = spec[len(BUILTIN_PREFIX):] if spec.startswith(BUILTIN_PREFIX) else spec
    name = name.partition(":")[0]
    if name not in names:
        raise argparse.ArgumentTypeError("unknown builtin {} {!r}, choose from {}".format(
            what, name, ", ".join(names)))
    return spec


def space_source(spec):
    """argparse type: a space file path or ``builtin:<name>``."""
    if spec.startswith(BUILTIN_PREFIX):
        return _builtin_name(spec, SPACE_NAMES, "space")
    return spec


def map_source(spec):
    """argparse type: a builtin map expression, the prefix is optional."""
    return _builtin_name(spec, MAP_NAMES, "map")


def float_list(text):
    try:
        return [float(tok) for tok in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated numbers, got {!r}".format(text))


def build_parser():
    tolerances = argparse.ArgumentParser(add_help=False)
    tolerances.add_argument("--tol-zero", type=float, default=None,
                            help="distances below this count as 0 [config TOL_ZERO]")
    tolerances.add_argument("--tol-fixed", type=float, default=None,
                            help="bound on p(x, fx) for certification [config TOL_FIXED]")
    tolerances.add_argument("--max-iter", type=int, default=None,
                            help="iteration budget [config MAX_ITER]")
    tolerances.add_argument("--window", type=int, default=None,
                            help="consecutive sub-tol-zero steps needed to vanish [config WINDOW]")
    tolerances.add_argument("--samples", type=int, default=None, dest="sample_count",
                            help="random samples of the sampled checks [config SAMPLE_COUNT]")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed [env FELTFP_SEED, config SEED]")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    common.add_argument("-v", "--verbose", action="count", default=0,
                        help="log progress to stderr (twice for debug output)")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--space", required=True, type=space_source,
                        help="space file (JSON) or builtin:{}".format("|".join(SPACE_NAMES)))
    source.add_argument("--map", type=map_source, default=None,
                        help="builtin map {} [default: the map of the space file]".format(
                            "|".join(MAP_NAMES)))

    oracle = argparse.ArgumentParser(add_help=False)
    oracle.add_argument("--n", type=int, required=True, help="points per space")
    oracle.add_argument("--alphabet", default=None,
                        help="comma separated distance values [config ALPHABET]")
    oracle.add_argument("--no-diagonal", action="store_true",
                        help="only zero self-distances")
    oracle.add_argument("--trials", type=int, default=None, help="random cases [config TRIALS]")
    oracle.add_argument("--workers", type=int, default=None,
                        help="worker processes [config WORKERS]")
    oracle.add_argument("--timing", action="store_true", help="include the wall time in JSON output")

    argp = argparse.ArgumentParser("feltfp", description=__doc__.strip().splitlines()[0])
    argp.add_argument("--version", action="version", version="%(prog)s " + __version__)
    commands = argp.add_subparsers(dest="command", metavar="{check,iterate,stress,fuzz}")
    commands.required = True

    check = commands.add_parser("check", parents=[source, tolerances, common],
                                help="check the axioms and the contraction conditions")
    check.add_argument("--epsilons", type=float_list, default=None,
                       help="epsilons tested for felt continuity [config FELT_EPSILONS]")
    check.add_argument("--alphas", type=float_list, default=None,
                       help="extra alpha levels for the sampled contraction checks")
    check.add_argument("--junit-xml", default=None, metavar="PATH",
                       help="also write the reports as JUnit XML")
    check.set_defaults(run=cmd_check)

    iterate = commands.add_parser("iterate", parents=[source, tolerances, common],
                                  help="locate a fixed point by Picard iteration")
    iterate.add_argument("--x0", required=True,
                         help="start point: label or index, or comma separated coordinates")
    iterate.set_defaults(run=cmd_iterate)

    stress = commands.add_parser("stress", parents=[oracle, tolerances, common],
                                 help="check the theorem on every small finite space")
    stress.set_defaults(run=cmd_stress)

    fuzz = commands.add_parser("fuzz", parents=[oracle, common],
                               help="compare conditions (2) and (3) on random finite spaces")
    fuzz.set_defaults(run=cmd_fuzz)
    return argp


def tolerances_from_args(cfg, args):
    return Tolerances.from_config(cfg,
                                  tol_zero=getattr(args, "tol_zero", None),
                                  tol_fixed=getattr(args, "tol_fixed", None),
                                  max_iter=getattr(args, "max_iter", None),
                                  window=getattr(args, "window", None),
                                  sample_count=getattr(args, "sample_count", None),
                                  seed=args.seed)


def load_problem(args):
    """
    Resolve --space and --map.

    Returns:
        tuple: (FeltSpace, SelfMap or None)
    """
    if args.space.startswith(BUILTIN_PREFIX):
        space, selfmap = make_space(args.space), None
    else:
        space, selfmap = load_space_file(args.space)
    if args.map is not None:
        selfmap = make_map(args.map, space)
    return space, selfmap


def parse_point(space, token):
    if space.is_finite:
        return space.index_of(token)
    try:
        coordinates = [float(v) for v in token.split(",")]
    except ValueError:
        raise DomainError("cannot parse start point {!r}".format(token))
    return space.validate_point(coordinates)


def _print_json(doc):
    print(json.dumps(doc, indent=2))


def run_checks(space, selfmap, tol, epsilons=None, alphas=None):
    """
    Run every check that applies to the space and map.

    Returns:
        list of CheckReport:
    """
    reports = check_felt_metric(space, epsilons, tol)
    if space.is_finite and reports[0].passed:
        reports.append(check_zero_completeness_finite(space, tol))
    if selfmap is None:
        return reports

    reports.append(check_zero_continuity_everywhere(space, selfmap, tol))
    if space.is_finite:
        reports += [
            check_condition2_finite(space, selfmap),
            check_condition3_finite(space, selfmap),
            check_equivalence_2_3(space, selfmap),
        ]
    else:
        reports += [
            check_condition2_sampled(space, selfmap, alphas=alphas, tol=tol),
            check_condition3_sampled(space, selfmap, alphas=alphas, tol=tol),
        ]
    reports.append(nonexpansive_on_positive(space, selfmap, tol))
    return reports


def cmd_check(cfg, args):
    space, selfmap = load_problem(args)
    tol = tolerances_from_args(cfg, args)
    reports = run_checks(space, selfmap, tol, args.epsilons, args.alphas)
    failed = [r for r in reports if not r.passed]

    suite_name = space.name if selfmap is None else "{} {}".format(space.name, selfmap.name)
    if args.junit_xml is not None:
        with open(args.junit_xml, "wb") as f:
            f.write(render_junit(reports, suite_name))
        logger.info("wrote %d reports to %s", len(reports), args.junit_xml)

    if args.json:
        _print_json({
            "space": space.name,
            "map": selfmap.name if selfmap is not None else None,
            "reports": [r.to_dict() for r in reports],
        })
    else:
        for report in reports:
            print(report)
        print("{}: {} checks, {} failed".format(suite_name, len(reports), len(failed)))
    return EXIT_FAILED if failed else EXIT_OK


def cmd_iterate(cfg, args):
    space, selfmap = load_problem(args)
    if selfmap is None:
        raise ConfigurationError("{} has no map, pass --map".format(space.name))
    tol = tolerances_from_args(cfg, args)
    x0 = parse_point(space, args.x0)
    result = solve(space, selfmap, x0, tol)

    if args.json:
        _print_json(result.to_dict(space))
    else:
        trace = result.trace
        tail = result.eq4_tail()
        print("orbit: {} steps, stopped: {}".format(len(trace), trace.stopped_reason))
        print("x*: {}".format(space.format_point(result.x_star)))
        print("p(x*,fx*) = {!r}, p(x*,x*) = {!r}".format(result.residual_fix, result.self_dist))
        if tail:
            print("tail residual: {} values, max {!r}".format(len(tail), max(tail)))
        if result.theorem_violation_candidate:
            print("theorem violation candidate: beta = {!r}".format(result.beta))
        print("{}: {}".format("CERTIFIED" if result.certified else "NOT CERTIFIED", result.reason))
    return EXIT_OK if result.certified else EXIT_FAILED


def enumeration_config(cfg, args):
    return EnumerationConfig(
        n=args.n,
        alphabet=args.alphabet if args.alphabet is not None else cfg["ALPHABET"],
        include_nonzero_diagonal=not args.no_diagonal,
        seed=args.seed if args.seed is not None else cfg["SEED"],
        trials=args.trials if args.trials is not None else cfg["TRIALS"],
        workers=args.workers if args.workers is not None else cfg["WORKERS"])


def _report_summary(summary, args, title):
    if args.json:
        _print_json(summary.to_dict(include_timing=args.timing))
    else:
        print("{}: {} cases, {} meet the condition, {}/{} runs certified, {} counterexamples ({:.2f}s)".format(
            title, summary.cases_total, summary.cases_condition_met, summary.cases_certified,
            summary.cases_hypothesis_met, len(summary.counterexamples), summary.wall_time))
        for counterexample in summary.counterexamples:
            print("counterexample: " + json.dumps(counterexample))
    return EXIT_OK if summary.passed else EXIT_FAILED


def cmd_stress(cfg, args):
    summary = stress_theorem(enumeration_config(cfg, args), tolerances_from_args(cfg, args))
    return _report_summary(summary, args, "stress")


def cmd_fuzz(cfg, args):
    summary = fuzz_equivalence(enumeration_config(cfg, args))
    return _report_summary(summary, args, "fuzz")


def configure_logging(level, verbose):
    if verbose >= 2:
        level = logging.DEBUG
    elif verbose == 1:
        level = logging.INFO
    root = logging.getLogger()
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
    root.setLevel(level)


def main(argv=None):
    # the library reads the shared config, so environment overrides go there
    config.update(load_config())
    cfg = config
    argp = build_parser()
    try:
        args = argp.parse_args(argv)
    except SystemExit as e:
        return e.code
    configure_logging(cfg["LOG_LEVEL"], args.verbose)
    try:
        return args.run(cfg, args)
    except FeltError as e:
        print("feltfp: error: {}".format(e), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
