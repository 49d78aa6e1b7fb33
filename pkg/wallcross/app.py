import argparse
import sys

from wallcross import config
from wallcross.constants import EXIT_INTERNAL, EXIT_INVALID_INPUT, OUTPUT_FORMATS
from wallcross.errors import InputError, InternalError
from wallcross.flows.case_flow import run_case
from wallcross.flows.scenario_flow import run_scenario
from wallcross.flows.self_check_flow import run_self_check
from wallcross.logging import logger, set_log_level
from wallcross.utils import describe_error


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wallcross',
        description='K-theoretic spherical pair of a C* wall crossing and its IC saturation criterion',
    )
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument('--scenario', metavar='PATH', help='JSON list of cases {name, weights, window_base}')
    mode.add_argument('--weights', metavar='CSV', help='single case, e.g. --weights=1,1,-2')
    mode.add_argument('--self-check', action='store_true', help='run the randomised invariant suites')
    parser.add_argument('--base', metavar='INT', default=None,
                        help=f'window base k0 for --weights (default {config.DEFAULT_WINDOW_BASE})')
    parser.add_argument('--format', choices=OUTPUT_FORMATS, default=None,
                        help=f'report format (default {config.DEFAULT_OUTPUT_FORMAT})')
    parser.add_argument('--trials', type=int, default=None,
                        help=f'random weight vectors for the self-check (default {config.SELF_CHECK_TRIALS})')
    parser.add_argument('--seed', type=int, default=None,
                        help=f'self-check seed (default {config.SELF_CHECK_SEED})')
    parser.add_argument('--workers', type=int, default=None,
                        help=f'threads for scenario evaluation (default {config.WORKERS})')
    parser.add_argument('--verbose', action='store_true', help='log progress to stderr')
    return parser


def _dispatch(args, parser: argparse.ArgumentParser) -> int:
    output_format = args.format or config.DEFAULT_OUTPUT_FORMAT
    if output_format not in OUTPUT_FORMATS:
        logger.warning(f"[APP] Unknown output format {output_format!r} from environment, using text")
        output_format = OUTPUT_FORMATS[0]
    if args.scenario:
        workers = max(1, args.workers) if args.workers is not None else None
        return run_scenario(args.scenario, output_format, workers)
    if args.weights is not None:
        return run_case(args.weights, args.base, output_format)
    if args.self_check or args.trials is not None or args.seed is not None:
        trials = args.trials if args.trials is not None else config.SELF_CHECK_TRIALS
        seed = args.seed if args.seed is not None else config.SELF_CHECK_SEED
        return run_self_check(trials, seed)
    parser.print_usage(sys.stderr)
    return EXIT_INVALID_INPUT


def main(argv: list[str] | None = None) -> int:
    """Run the CLI and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INVALID_INPUT
    if args.verbose:
        set_log_level('DEBUG')
    try:
        return _dispatch(args, parser)
    except InputError as e:
        print(describe_error(e), file=sys.stderr)
        return EXIT_INVALID_INPUT
    except InternalError as e:
        logger.error(f"[APP] Internal check failed: {e}", exc_info=True)
        print(describe_error(e), file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as e:
        print(describe_error(e), file=sys.stderr)
        return EXIT_INTERNAL
