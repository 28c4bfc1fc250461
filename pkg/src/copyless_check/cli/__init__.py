"""CLI package for copyless-check."""

from copyless_check.cli.args import parse_args
from copyless_check.cli.batch import (
    BatchItem,
    BatchResult,
    FixtureExpectation,
    parse_batch_file,
    parse_expectations,
    run_batch,
    run_fixture,
)
from copyless_check.cli.report import SCHEMA, Outcome, Report
from copyless_check.cli.workflows import (
    check_program,
    load_program,
    main,
    run_check,
    run_dual,
    run_explore,
    run_run,
    run_subtype,
    run_weight,
)

__all__ = [
    "BatchItem",
    "BatchResult",
    "FixtureExpectation",
    "Outcome",
    "Report",
    "SCHEMA",
    "check_program",
    "load_program",
    "main",
    "parse_args",
    "parse_batch_file",
    "parse_expectations",
    "run_batch",
    "run_check",
    "run_dual",
    "run_explore",
    "run_fixture",
    "run_run",
    "run_subtype",
    "run_weight",
]
