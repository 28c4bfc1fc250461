"""Batch checking of fixtures against the expectations in their headers.

A fixture states what it should do in comment lines at the top::

    # expect-check: WeightInfinite
    # expect-run: Leak({b})
    # expect-steps: 2
    # expect-subtype: T_Left T_Right true

``expect-check`` is ``Accepted`` or an error kind. ``expect-run`` is a
rendered verdict or just its kind; the run is unchecked and uses the
configured seed and step bound.
"""

import argparse
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from copyless_check.cli.report import Outcome, Report
from copyless_check.cli.workflows import check_program, closed_program
from copyless_check.config.settings import Settings
from copyless_check.core.subtyping import subtype
from copyless_check.frontend.lexer import ParseError
from copyless_check.frontend.parser import parse
from copyless_check.runtime.engine import Configuration
from copyless_check.runtime.scheduler import run
from copyless_check.utils.logger import Logger

_HEADER = re.compile(r"^#\s*expect-(?P<key>[a-z]+)\s*:\s*(?P<value>.*?)\s*$")


@dataclass
class FixtureExpectation:
    """Expected outcomes declared by a fixture."""

    check: Optional[str] = None
    run: Optional[str] = None
    steps: Optional[int] = None
    subtype: list[tuple[str, str, bool]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return (
            self.check is None
            and self.run is None
            and self.steps is None
            and not self.subtype
        )


def parse_expectations(text: str) -> FixtureExpectation:
    """Collect ``# expect-*`` headers.

    Raises:
        ValueError: On an unknown key or a malformed value.
    """
    expectation = FixtureExpectation()
    for line_num, line in enumerate(text.splitlines(), 1):
        match = _HEADER.match(line.strip())
        if match is None:
            continue
        key, value = match.group("key"), match.group("value")
        if key == "check":
            expectation.check = value
        elif key == "run":
            expectation.run = value
        elif key == "steps":
            if not value.isdigit():
                raise ValueError(f"Line {line_num}: expect-steps needs a number")
            expectation.steps = int(value)
        elif key == "subtype":
            parts = value.split()
            if len(parts) != 3 or parts[2] not in ("true", "false"):
                raise ValueError(
                    f"Line {line_num}: expected 'expect-subtype: LEFT RIGHT true|false'"
                )
            expectation.subtype.append((parts[0], parts[1], parts[2] == "true"))
        else:
            raise ValueError(f"Line {line_num}: unknown expectation '{key}'")
    return expectation


@dataclass
class BatchItem:
    """Single fixture in a batch."""

    path: Path


@dataclass
class BatchResult:
    """Result of checking one fixture."""

    path: Path
    success: bool
    outcomes: list[str] = field(default_factory=list)
    error: Optional[str] = None


def parse_batch_file(path: Path) -> list[BatchItem]:
    """List the fixtures named by ``path``.

    Supports three forms:
    1. A directory: every ``*.proc`` file in it, sorted by name
    2. Text format (.txt): one fixture path per line, ``#`` comments allowed
    3. JSON format (.json): an array of paths or of ``{"file": "..."}`` objects

    Relative paths are resolved against the list file's directory.

    Raises:
        ValueError: If the path is missing or the list cannot be parsed.
    """
    if not path.exists():
        raise ValueError(f"Batch path not found: {path}")
    if path.is_dir():
        return [BatchItem(p) for p in sorted(path.glob("*.proc"))]

    content = path.read_text(encoding="utf-8").strip()
    if path.suffix.lower() == ".json":
        return _parse_json_batch(content, path.parent)
    return _parse_text_batch(content, path.parent)


def _resolve(entry: str, base_path: Path) -> Path:
    fixture = Path(entry)
    return fixture if fixture.is_absolute() else base_path / fixture


def _parse_json_batch(content: str, base_path: Path) -> list[BatchItem]:
    try:
        data = json.loads(content)
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON format: {e}")

    if not isinstance(data, list):
        raise ValueError("JSON batch file must contain an array")

    items = []
    for i, entry in enumerate(data):
        if isinstance(entry, dict):
            entry = entry.get("file", "")
        if not isinstance(entry, str) or not entry.strip():
            raise ValueError(f"Entry {i + 1} must be a path or have a 'file' field")
        items.append(BatchItem(_resolve(entry.strip(), base_path)))
    return items


def _parse_text_batch(content: str, base_path: Path) -> list[BatchItem]:
    items = []
    for line in content.split("\n"):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        items.append(BatchItem(_resolve(line, base_path)))
    return items


def _verdict_matches(expected: str, rendered: str, kind: str) -> bool:
    return expected in (rendered, kind)


def run_fixture(item: BatchItem, settings: Settings) -> BatchResult:
    """Check one fixture against its declared expectations."""
    try:
        text = item.path.read_text(encoding="utf-8")
    except OSError as e:
        return BatchResult(item.path, False, error=f"cannot read: {e.strerror or e}")
    try:
        expectation = parse_expectations(text)
        program = parse(text)
    except (ParseError, ValueError) as e:
        return BatchResult(item.path, False, error=str(e))
    if expectation.empty:
        return BatchResult(item.path, False, error="no expectations declared")

    outcomes: list[str] = []
    failures: list[str] = []
    try:
        if expectation.check is not None:
            result = check_program(program)
            actual = "Accepted" if result.error is None else result.error.kind.value
            outcomes.append(actual)
            if actual != expectation.check:
                failures.append(f"check: expected {expectation.check}, got {actual}")

        if expectation.run is not None or expectation.steps is not None:
            process = closed_program(program)
            run_result = run(
                Configuration.initial(process),
                settings.simulation.seed,
                settings.simulation.max_steps,
            )
            rendered = run_result.verdict.render()
            outcomes.append(f"{rendered} in {run_result.steps}")
            if expectation.run is not None and not _verdict_matches(
                expectation.run, rendered, run_result.verdict.kind.value
            ):
                failures.append(f"run: expected {expectation.run}, got {rendered}")
            if expectation.steps is not None and run_result.steps != expectation.steps:
                failures.append(
                    f"steps: expected {expectation.steps}, got {run_result.steps}"
                )

        for left, right, expected in expectation.subtype:
            holds = subtype(
                program.type_definition(left), program.type_definition(right)
            )
            outcomes.append(f"{left} <= {right}: {str(holds).lower()}")
            if holds != expected:
                failures.append(f"subtype {left} {right}: expected {expected}")
    except ParseError as e:
        return BatchResult(item.path, False, outcomes, e.render())
    except KeyError as e:
        return BatchResult(item.path, False, outcomes, f"unknown definition {e}")

    return BatchResult(
        item.path, not failures, outcomes, "; ".join(failures) or None
    )


def run_batch(logger: Logger, args: argparse.Namespace, settings: Settings) -> Report:
    """Run every fixture of a batch and summarize.

    Raises:
        ParseError: If the batch list cannot be read.
    """
    batch_path = Path(args.path)
    logger.header("copyless-check batch")
    logger.info(f"Batch: {batch_path}")

    try:
        items = parse_batch_file(batch_path)
    except ValueError as e:
        raise ParseError(f"Failed to parse batch file: {e}")

    if not items:
        logger.warning("No fixtures found")
        return Report("batch", Outcome.ACCEPTED, {"results": []}, "0 fixtures")

    results: list[BatchResult] = []
    with logger.progress("Checking fixtures", total=len(items)) as (
        progress,
        task_id,
    ):
        for item in items:
            results.append(run_fixture(item, settings))
            progress.update(task_id, advance=1)

    display_batch_summary(logger, results)

    failed = [r for r in results if not r.success]
    payload = {
        "results": [
            {
                "file": str(r.path),
                "success": r.success,
                "outcomes": r.outcomes,
                "error": r.error,
            }
            for r in results
        ]
    }
    summary = f"{len(results) - len(failed)}/{len(results)} fixtures as expected"
    outcome = Outcome.TYPE_ERROR if failed else Outcome.ACCEPTED
    return Report("batch", outcome, payload, summary)


def display_batch_summary(logger: Logger, results: list[BatchResult]) -> None:
    """Print a table of fixture results and the totals."""
    logger.blank()
    logger.table(
        "Fixtures",
        ["Fixture", "Outcomes", "Status"],
        [
            [r.path.name, ", ".join(r.outcomes) or "-", "ok" if r.success else "FAIL"]
            for r in results
        ],
        styles=["cyan"],
    )
    failed = [r for r in results if not r.success]
    logger.success(f"As expected: {len(results) - len(failed)}")
    if failed:
        logger.error(f"Failed: {len(failed)}")
        for r in failed:
            logger.error(f"  {r.path.name}: {r.error}")
    logger.blank()
