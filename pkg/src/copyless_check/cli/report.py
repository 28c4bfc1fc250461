"""Outcome of one command, in human and structured form."""

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

SCHEMA = "copyless-check/1"


class Outcome(str, Enum):
    ACCEPTED = "Accepted"
    TYPE_ERROR = "TypeError"
    MONITOR_VIOLATION = "MonitorViolation"
    PARSE_ERROR = "ParseError"


EXIT_CODES = {
    Outcome.ACCEPTED: 0,
    Outcome.TYPE_ERROR: 1,
    Outcome.MONITOR_VIOLATION: 2,
    Outcome.PARSE_ERROR: 3,
}


@dataclass
class Report:
    """What a command found.

    Attributes:
        command: Subcommand that produced the report.
        outcome: Classification that fixes the exit code.
        payload: Structured details (error record, verdict, trace summary).
        summary: One human-readable line.
    """

    command: str
    outcome: Outcome
    payload: dict[str, Any] = field(default_factory=dict)
    summary: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    def to_record(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "outcome": self.outcome.value,
            "exitCode": self.exit_code,
            "summary": self.summary,
            "payload": self.payload,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)
