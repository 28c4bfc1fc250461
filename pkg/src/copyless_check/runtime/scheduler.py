"""Drivers over the reduction engine: seeded runs, replays and exploration."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from copyless_check.runtime.engine import (
    Configuration,
    StepEffect,
    StepError,
    TraceEvent,
    apply,
    enabled,
)
from copyless_check.runtime.monitor import MonitorVerdict, monitor

Observer = Callable[[Configuration, StepEffect], None]


@dataclass
class RunResult:
    """Final state of a run with its trace and the last monitor verdict."""

    final: Configuration
    trace: list[TraceEvent]
    verdict: MonitorVerdict
    quiescent: bool

    @property
    def steps(self) -> int:
        return len(self.trace)

    @property
    def choices(self) -> list[int]:
        return [event.choice for event in self.trace]


def _advance(
    config: Configuration, choice: int, index: int, observer: Optional[Observer]
) -> tuple[Configuration, TraceEvent]:
    available = enabled(config)
    if not 0 <= choice < len(available):
        raise StepError(
            f"step {index}: choice {choice} out of range for "
            f"{len(available)} enabled redexes"
        )
    redex = available[choice]
    config, effect = apply(config, redex)
    event = TraceEvent(
        index, redex.rule, redex.description, tuple(sorted(config.heap.domain)), choice
    )
    if observer is not None:
        observer(config, effect)
    return config, event


def run(
    initial: Configuration,
    seed: int,
    max_steps: int,
    observer: Optional[Observer] = None,
) -> RunResult:
    """Fire uniformly chosen redexes until a violation, quiescence or ``max_steps``.

    The outcome depends only on ``initial`` and ``seed``.
    """
    rng = random.Random(seed)
    config = initial
    trace: list[TraceEvent] = []
    verdict = monitor(config)
    while not verdict.is_violation and len(trace) < max_steps:
        available = enabled(config)
        if not available:
            break
        choice = rng.randrange(len(available))
        config, event = _advance(config, choice, len(trace) + 1, observer)
        trace.append(event)
        verdict = monitor(config)
    return RunResult(config, trace, verdict, not enabled(config))


def replay(
    initial: Configuration,
    choices: Sequence[int],
    observer: Optional[Observer] = None,
) -> RunResult:
    """Re-execute a recorded sequence of redex choices.

    Raises:
        StepError: If a choice does not index an enabled redex.
    """
    config = initial
    trace: list[TraceEvent] = []
    for choice in choices:
        config, event = _advance(config, choice, len(trace) + 1, observer)
        trace.append(event)
    return RunResult(config, trace, monitor(config), not enabled(config))


@dataclass
class ExploreSummary:
    configurations: int = 0
    transitions: int = 0
    depth_reached: int = 0
    violations: list[tuple[tuple[int, ...], MonitorVerdict]] = field(
        default_factory=list
    )
    quiescent: int = 0
    truncated: bool = False

    @property
    def ok(self) -> bool:
        return not self.violations


def explore(
    initial: Configuration, depth: int, max_configurations: int = 100_000
) -> ExploreSummary:
    """Breadth-first closure of the reduction relation up to ``depth`` steps.

    Configurations are deduplicated by exact state. Violating configurations
    are recorded with the choices leading to them and are not expanded.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    summary = ExploreSummary(configurations=1)
    seen = {initial.key()}
    verdict = monitor(initial)
    if verdict.is_violation:
        summary.violations.append(((), verdict))
        return summary
    frontier: deque[tuple[Configuration, tuple[int, ...]]] = deque(
        [(initial, ())]
    )
    for level in range(1, depth + 1):
        following: deque[tuple[Configuration, tuple[int, ...]]] = deque()
        while frontier:
            config, path = frontier.popleft()
            available = enabled(config)
            if not available:
                summary.quiescent += 1
                continue
            for choice, redex in enumerate(available):
                successor, _ = apply(config, redex)
                summary.transitions += 1
                key = successor.key()
                if key in seen:
                    continue
                if len(seen) >= max_configurations:
                    summary.truncated = True
                    return summary
                seen.add(key)
                summary.configurations = len(seen)
                summary.depth_reached = level
                verdict = monitor(successor)
                if verdict.is_violation:
                    summary.violations.append((path + (choice,), verdict))
                else:
                    following.append((successor, path + (choice,)))
        frontier = following
        if not frontier:
            break
    return summary
