"""Heap, reduction engine, safety monitor and schedulers.

``HeapTracker`` depends on the checker and is imported from
``copyless_check.runtime.tracking`` directly.
"""

from copyless_check.runtime.engine import Configuration, StepError, apply, enabled
from copyless_check.runtime.heap import Endpoint, Heap, HeapError, Message
from copyless_check.runtime.monitor import MonitorVerdict, VerdictKind, monitor
from copyless_check.runtime.scheduler import (
    ExploreSummary,
    RunResult,
    explore,
    replay,
    run,
)

__all__ = [
    "Configuration",
    "Endpoint",
    "ExploreSummary",
    "Heap",
    "HeapError",
    "Message",
    "MonitorVerdict",
    "RunResult",
    "StepError",
    "VerdictKind",
    "apply",
    "enabled",
    "explore",
    "monitor",
    "replay",
    "run",
]
