"""Command-line argument parsing for copyless-check."""

import argparse
import sys
from typing import NoReturn, Optional

USAGE_EXIT_CODE = 3


class CopylessArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with code 3."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT_CODE, f"{self.prog}: error: {message}\n")


def _common_options(top_level: bool) -> argparse.ArgumentParser:
    # below a command the options only override what was given before it
    flag: object = False if top_level else argparse.SUPPRESS
    path: object = None if top_level else argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--json",
        action="store_true",
        default=flag,
        help="Print structured JSON records instead of human output",
    )
    common.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        default=flag,
        help="Show debug output, including every reduction step",
    )
    common.add_argument(
        "--config",
        default=path,
        help="Path to a YAML config file",
    )
    return common


def _type_operands(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-e",
        "--expr",
        action="store_true",
        help="Read operands as type expressions instead of definition names",
    )
    parser.add_argument(
        "--defs",
        default=None,
        help="Source file whose type definitions are in scope",
    )


def parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Args:
        argv: Arguments to parse. Defaults to ``sys.argv[1:]``.

    Returns:
        Parsed arguments namespace.
    """
    common = _common_options(top_level=False)
    parser = CopylessArgumentParser(
        prog="copyless-check",
        parents=[_common_options(top_level=True)],
        description=(
            "Type check and simulate processes that communicate by copyless "
            "message passing"
        ),
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")
    subparsers.required = True

    # check
    check_parser = subparsers.add_parser(
        "check",
        parents=[common],
        help="Type check the main process of a source file",
    )
    check_parser.add_argument("file", help="Path to a .proc file")

    # run
    run_parser = subparsers.add_parser(
        "run",
        parents=[common],
        help="Run the main process under a seeded random scheduler",
    )
    run_parser.add_argument("file", help="Path to a .proc file")
    run_parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Scheduler seed. Defaults to config setting.",
    )
    run_parser.add_argument(
        "--max-steps",
        type=int,
        default=None,
        help="Step bound. Defaults to config setting.",
    )
    run_parser.add_argument(
        "--trace",
        default=None,
        help="Write the trace as JSON lines to this path",
    )
    run_parser.add_argument(
        "--unsafe",
        action="store_true",
        help="Run without type checking first",
    )
    run_parser.add_argument(
        "--check-heap",
        action="store_true",
        help="Type the heap after every step",
    )

    # explore
    explore_parser = subparsers.add_parser(
        "explore",
        parents=[common],
        help="Explore every schedule of the main process up to a depth",
    )
    explore_parser.add_argument("file", help="Path to a .proc file")
    explore_parser.add_argument(
        "--depth",
        type=int,
        default=None,
        help="Number of steps to explore. Defaults to config setting.",
    )
    explore_parser.add_argument(
        "--max-configurations",
        type=int,
        default=None,
        help="Stop after this many distinct configurations",
    )
    explore_parser.add_argument(
        "--unsafe",
        action="store_true",
        help="Explore without type checking first",
    )

    # subtype
    subtype_parser = subparsers.add_parser(
        "subtype",
        parents=[common],
        help="Decide whether one endpoint type is a subtype of another",
    )
    subtype_parser.add_argument("left", help="Candidate subtype")
    subtype_parser.add_argument("right", help="Candidate supertype")
    _type_operands(subtype_parser)
    subtype_parser.add_argument(
        "--oracle",
        action="store_true",
        help="Use the bounded fixpoint oracle instead of the algorithm",
    )

    # weight
    weight_parser = subparsers.add_parser(
        "weight",
        parents=[common],
        help="Compute the weight of an endpoint type",
    )
    weight_parser.add_argument("type", help="Endpoint type")
    _type_operands(weight_parser)
    weight_parser.add_argument(
        "--ctx",
        default="",
        help="Comma-separated type variables of weight zero (e.g. a,b)",
    )
    weight_parser.add_argument(
        "--oracle",
        action="store_true",
        help="Use the bounded fixpoint oracle instead of the algorithm",
    )

    # dual
    dual_parser = subparsers.add_parser(
        "dual",
        parents=[common],
        help="Print the dual of an endpoint type",
    )
    dual_parser.add_argument("type", help="Endpoint type")
    _type_operands(dual_parser)

    # batch
    batch_parser = subparsers.add_parser(
        "batch",
        parents=[common],
        help="Check fixtures against the expectations in their headers",
    )
    batch_parser.add_argument(
        "path",
        help="Directory of .proc files, or a .txt/.json list of them",
    )

    return parser.parse_args(argv)
