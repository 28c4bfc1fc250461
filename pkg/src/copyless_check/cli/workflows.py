"""Command implementations and the main entry point for copyless-check."""

import argparse
import json
import sys
from pathlib import Path
from typing import Callable, Optional, Union

from copyless_check.checker.environment import TypeEnv
from copyless_check.checker.rules import CheckResult, typecheck
from copyless_check.cli.report import Outcome, Report
from copyless_check.config.settings import Settings, get_settings, reload_settings
from copyless_check.core.duality import DualityError, dual
from copyless_check.core.process import Process, free_names
from copyless_check.core.subtyping import (
    subtype_derivation,
    subtype_oracle,
    subtype_qualified,
)
from copyless_check.core.types import EndpointType, Type, TypeSyntaxError
from copyless_check.core.weights import weight, weight_oracle
from copyless_check.frontend.lexer import ParseError
from copyless_check.frontend.parser import SourceProgram, parse, parse_type
from copyless_check.frontend.render import render_type
from copyless_check.runtime.engine import Configuration, TraceEvent
from copyless_check.runtime.scheduler import explore, run
from copyless_check.runtime.tracking import HeapTracker
from copyless_check.utils.logger import Logger, get_logger

Handler = Callable[[Logger, argparse.Namespace, Settings], Report]

# Commands whose human output is the bare result line.
VALUE_COMMANDS = frozenset({"subtype", "weight", "dual"})


def load_program(path: Path) -> SourceProgram:
    """Read and parse a source file.

    Raises:
        ParseError: If the file cannot be read or parsed.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror or e}")
    return parse(text)


def main_process(program: SourceProgram) -> Process:
    if program.main is None:
        raise ParseError("the source declares no main process")
    return program.main


def check_program(program: SourceProgram) -> CheckResult:
    """Type check ``main`` with the program's assumptions as the initial Γ."""
    gamma = TypeEnv(program.assumptions)
    return typecheck({}, frozenset(), gamma, main_process(program))


def closed_program(program: SourceProgram) -> Process:
    """The main process of a program that can run from the empty heap.

    Raises:
        ParseError: If the program has assumptions or free names.
    """
    process = main_process(program)
    if program.assumptions:
        raise ParseError("a program with assumptions cannot be run")
    names = sorted(str(n) for n in free_names(process))
    if names:
        raise ParseError(f"main has free names {', '.join(names)}")
    return process


def _rejection(logger: Logger, command: str, result: CheckResult) -> Report:
    error = result.error
    assert error is not None
    logger.error(error.render())
    return Report(
        command,
        Outcome.TYPE_ERROR,
        {"error": error.to_record(), "warnings": list(result.warnings)},
        error.render(),
    )


def run_check(logger: Logger, args: argparse.Namespace, settings: Settings) -> Report:
    """Type check a source file."""
    program = load_program(Path(args.file))
    logger.header(f"Checking {args.file}")
    result = check_program(program)
    for warning in result.warnings:
        logger.warning(warning)
    if not result.accepted:
        return _rejection(logger, "check", result)
    logger.success("accepted")
    return Report(
        "check",
        Outcome.ACCEPTED,
        {"warnings": list(result.warnings)},
        "accepted",
    )


def write_trace(path: Path, trace: list[TraceEvent]) -> None:
    """Write one JSON record per step."""
    with open(path, "w", encoding="utf-8") as f:
        for event in trace:
            f.write(json.dumps(event.to_record(), sort_keys=True) + "\n")


def run_run(logger: Logger, args: argparse.Namespace, settings: Settings) -> Report:
    """Run the main process under a seeded scheduler."""
    program = load_program(Path(args.file))
    process = closed_program(program)
    if not args.unsafe:
        checked = check_program(program)
        if not checked.accepted:
            return _rejection(logger, "run", checked)
    seed = args.seed if args.seed is not None else settings.simulation.seed
    max_steps = (
        args.max_steps if args.max_steps is not None else settings.simulation.max_steps
    )

    logger.header(f"Running {args.file}")
    logger.info(f"Seed: {seed}, step bound: {max_steps}")
    tracker = HeapTracker() if args.check_heap else None
    with logger.status("Reducing..."):
        result = run(Configuration.initial(process), seed, max_steps, tracker)

    if logger.verbose:
        for event in result.trace:
            domain = ", ".join(event.heap_domain)
            logger.step(
                f"{event.step}. {event.rule.value}: {event.redex}  heap {{{domain}}}"
            )
    if args.trace:
        write_trace(Path(args.trace), result.trace)
        logger.info(f"Trace written to {args.trace}")

    verdict = result.verdict
    summary = f"{verdict.render()} after {result.steps} steps"
    payload = {
        "seed": seed,
        "steps": result.steps,
        "choices": result.choices,
        "quiescent": result.quiescent,
        "heapDomain": sorted(result.final.heap.domain),
        "verdict": verdict.to_record(),
    }
    outcome = Outcome.MONITOR_VIOLATION if verdict.is_violation else Outcome.ACCEPTED

    if tracker is not None:
        failure = tracker.first_failure
        if failure is None:
            payload["heapCheck"] = {"ok": True}
            logger.success(f"heap typed after each of {result.steps} steps")
        else:
            step, heap_verdict = failure
            payload["heapCheck"] = {
                "ok": False,
                "step": step,
                "condition": heap_verdict.condition,
                "witnesses": list(heap_verdict.witnesses),
                "message": heap_verdict.message,
            }
            logger.warning(f"step {step}: {heap_verdict.render()}")
            outcome = Outcome.MONITOR_VIOLATION

    if verdict.is_violation:
        logger.error(summary)
    else:
        logger.success(summary)
    return Report("run", outcome, payload, summary)


def run_explore(
    logger: Logger, args: argparse.Namespace, settings: Settings
) -> Report:
    """Explore every schedule of the main process up to a depth."""
    program = load_program(Path(args.file))
    process = closed_program(program)
    if not args.unsafe:
        checked = check_program(program)
        if not checked.accepted:
            return _rejection(logger, "explore", checked)
    depth = args.depth if args.depth is not None else settings.explore.depth
    budget = (
        args.max_configurations
        if args.max_configurations is not None
        else settings.explore.max_configurations
    )

    logger.header(f"Exploring {args.file}")
    with logger.status(f"Exploring to depth {depth}..."):
        summary = explore(Configuration.initial(process), depth, budget)

    payload = {
        "depth": depth,
        "configurations": summary.configurations,
        "transitions": summary.transitions,
        "depthReached": summary.depth_reached,
        "quiescent": summary.quiescent,
        "truncated": summary.truncated,
        "violations": [
            {"choices": list(path), **verdict.to_record()}
            for path, verdict in summary.violations
        ],
    }
    text = (
        f"{summary.configurations} configurations, "
        f"{len(summary.violations)} violations"
    )
    if summary.truncated:
        logger.warning(f"stopped at {budget} configurations")
    if summary.ok:
        logger.success(text)
        return Report("explore", Outcome.ACCEPTED, payload, text)

    logger.table(
        "Violations",
        ["Choices", "Verdict"],
        [
            [" ".join(map(str, path)) or "-", verdict.render()]
            for path, verdict in summary.violations
        ],
        styles=["cyan", "red"],
    )
    logger.error(text)
    return Report("explore", Outcome.MONITOR_VIOLATION, payload, text)


def resolve_type(
    args: argparse.Namespace, operand: str
) -> Union[Type, EndpointType]:
    """Turn a command operand into a type.

    With ``-e`` the operand is a type expression; otherwise it names a type
    definition of the ``--defs`` file.

    Raises:
        ParseError: On a syntax error or an unknown definition.
    """
    program = load_program(Path(args.defs)) if args.defs else None
    if args.expr:
        if program is not None:
            return program.parse_type(operand)
        return parse_type(operand)
    if program is None:
        raise ParseError(f"{operand!r} names a definition: pass --defs FILE or use -e")
    try:
        return program.type_definition(operand)
    except KeyError:
        raise ParseError(f"no type definition named {operand}")


def _endpoint(t: Union[Type, EndpointType]) -> EndpointType:
    return t.body if isinstance(t, Type) else t


def run_subtype(
    logger: Logger, args: argparse.Namespace, settings: Settings
) -> Report:
    """Decide subtyping between two types."""
    left = resolve_type(args, args.left)
    right = resolve_type(args, args.right)
    payload: dict[str, object] = {}
    if isinstance(left, Type) and isinstance(right, Type):
        holds = subtype_qualified(left, right)
    elif isinstance(left, Type) or isinstance(right, Type):
        raise ParseError("qualify both operands or neither")
    elif args.oracle:
        holds = subtype_oracle(left, right, settings.oracle.fuel)
    else:
        derivation = subtype_derivation(left, right)
        holds = derivation.holds
        payload["visited"] = len(derivation.visited)
        logger.debug(f"visited {len(derivation.visited)} pairs")
        for pair_left, pair_right in derivation.visited:
            logger.debug(f"{render_type(pair_left)}  <=  {render_type(pair_right)}")
    payload.update(
        {
            "holds": holds,
            "left": render_type(_endpoint(left)),
            "right": render_type(_endpoint(right)),
        }
    )
    text = "true" if holds else "false"
    outcome = Outcome.ACCEPTED if holds else Outcome.TYPE_ERROR
    return Report("subtype", outcome, payload, text)


def run_weight(
    logger: Logger, args: argparse.Namespace, settings: Settings
) -> Report:
    """Compute the weight of a type."""
    term = resolve_type(args, args.type)
    delta = frozenset(v.strip() for v in args.ctx.split(",") if v.strip())
    if args.oracle:
        result = weight_oracle(delta, _endpoint(term), settings.oracle.cap)
    else:
        result = weight(delta, term)
    logger.debug(f"weight of {render_type(_endpoint(term))} under {sorted(delta)}")
    return Report(
        "weight",
        Outcome.ACCEPTED,
        {"type": render_type(_endpoint(term)), "weight": result.value},
        str(result),
    )


def run_dual(logger: Logger, args: argparse.Namespace, settings: Settings) -> Report:
    """Print the dual of a type."""
    term = _endpoint(resolve_type(args, args.type))
    try:
        text = render_type(dual(term))
    except DualityError as e:
        logger.error(str(e))
        return Report(
            "dual",
            Outcome.TYPE_ERROR,
            {"type": render_type(term), "error": str(e)},
            str(e),
        )
    payload = {"type": render_type(term), "dual": text}
    return Report("dual", Outcome.ACCEPTED, payload, text)


def emit(logger: Logger, report: Report, json_mode: bool) -> None:
    """Print the report: a JSON record, or the bare value of a value command."""
    if json_mode:
        logger.record(report.to_record())
    elif report.command in VALUE_COMMANDS and "error" not in report.payload:
        logger.result(report.summary)


def _parse_failure(command: str, error: ParseError) -> Report:
    return Report(
        command,
        Outcome.PARSE_ERROR,
        {
            "error": {
                "message": error.message,
                "line": error.line,
                "column": error.column,
            }
        },
        error.render(),
    )


def main(argv: Optional[list[str]] = None) -> None:
    """Main entry point for the copyless-check CLI."""
    from copyless_check.cli.args import parse_args
    from copyless_check.cli.batch import run_batch

    args = parse_args(argv)
    settings = reload_settings(args.config) if args.config else get_settings()
    json_mode = args.json or settings.output.json
    logger = get_logger(verbose=args.verbose, quiet=json_mode)

    handlers: dict[str, Handler] = {
        "check": run_check,
        "run": run_run,
        "explore": run_explore,
        "subtype": run_subtype,
        "weight": run_weight,
        "dual": run_dual,
        "batch": run_batch,
    }

    try:
        report = handlers[args.command](logger, args, settings)
    except ParseError as e:
        logger.error(e.render())
        report = _parse_failure(args.command, e)
    except TypeSyntaxError as e:
        logger.error(str(e))
        report = _parse_failure(args.command, ParseError(str(e)))
    except KeyboardInterrupt:
        logger.blank()
        logger.warning("Interrupted")
        sys.exit(130)

    emit(logger, report, json_mode)
    sys.exit(report.exit_code)
