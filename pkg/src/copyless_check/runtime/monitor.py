"""Checks that a configuration is well behaved.

A configuration is well behaved when every allocated location is reachable
from the running processes and only those are (no leaks, no faults), no
location is reachable from two parallel leaves (isolation), and every leaf
that cannot move is idle, closes an allocated endpoint, or waits on an
allocated endpoint with an empty queue (no communication errors).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

from copyless_check.core.process import Close, Name, NameKind, Receive, free_names
from copyless_check.runtime.engine import (
    Configuration,
    Marker,
    MarkerKind,
    Redex,
    redexes,
)
from copyless_check.runtime.heap import reachable


class VerdictKind(str, Enum):
    OK = "OK"
    STUCK_OK = "StuckOK"
    LEAK = "Leak"
    ISOLATION_VIOLATION = "IsolationViolation"
    FAULT = "Fault"
    COMM_ERROR = "CommError"


@dataclass(frozen=True)
class MonitorVerdict:
    kind: VerdictKind
    locations: tuple[str, ...] = ()
    leaves: tuple[int, ...] = ()
    tag: Optional[str] = None
    description: str = ""

    @property
    def is_violation(self) -> bool:
        return self.kind not in (VerdictKind.OK, VerdictKind.STUCK_OK)

    def render(self) -> str:
        if self.kind in (VerdictKind.LEAK, VerdictKind.ISOLATION_VIOLATION):
            return f"{self.kind.value}({{{', '.join(self.locations)}}})"
        if self.kind is VerdictKind.COMM_ERROR and self.tag:
            return f"{self.kind.value}({self.tag})"
        return self.kind.value

    def to_record(self) -> dict[str, Any]:
        return {
            "verdict": self.kind.value,
            "locations": list(self.locations),
            "leaves": list(self.leaves),
            "tag": self.tag,
            "description": self.description,
        }


OK = MonitorVerdict(VerdictKind.OK)


class _Scan:
    """Redexes of one configuration, shared by the individual checks."""

    def __init__(self, config: Configuration):
        self.config = config
        self.items = redexes(config)

    def moving(self) -> set[int]:
        return {r.leaf for r in self.items if isinstance(r, Redex)}

    def first_marker(self, kind: MarkerKind) -> Optional[Marker]:
        for m in self.items:
            if isinstance(m, Marker) and m.kind is kind:
                return m
        return None


def monitor(config: Configuration) -> MonitorVerdict:
    """Verdict for a single configuration, reporting the first violation found."""
    scan = _Scan(config)
    heap = config.heap
    for check in (_faults, _comm_errors, _stuck_leaves, _leaks, _isolation):
        verdict = check(scan)
        if verdict is not None:
            return verdict
    if scan.moving():
        return OK
    if any(isinstance(leaf, Receive) for leaf in config.leaves):
        return MonitorVerdict(
            VerdictKind.STUCK_OK,
            tuple(sorted(heap.domain)),
            description="every remaining process waits on an empty queue",
        )
    return OK


def _faults(scan: _Scan) -> Optional[MonitorVerdict]:
    marker = scan.first_marker(MarkerKind.FAULT)
    if marker is not None:
        return MonitorVerdict(
            VerdictKind.FAULT, leaves=(marker.leaf,), description=marker.description
        )
    config = scan.config
    excess = reachable(config.free_names(), config.heap) - config.heap.domain
    if excess:
        return MonitorVerdict(
            VerdictKind.FAULT,
            tuple(sorted(excess)),
            description="processes refer to unallocated endpoints",
        )
    return None


def _leaks(scan: _Scan) -> Optional[MonitorVerdict]:
    config = scan.config
    lost = config.heap.domain - reachable(config.free_names(), config.heap)
    if lost:
        return MonitorVerdict(
            VerdictKind.LEAK,
            tuple(sorted(lost)),
            description="allocated endpoints are unreachable",
        )
    return None


def _isolation(scan: _Scan) -> Optional[MonitorVerdict]:
    config = scan.config
    reach = [reachable(free_names(leaf), config.heap) for leaf in config.leaves]
    for i in range(len(reach)):
        for j in range(i + 1, len(reach)):
            common = reach[i] & reach[j]
            if common:
                return MonitorVerdict(
                    VerdictKind.ISOLATION_VIOLATION,
                    tuple(sorted(common)),
                    (i, j),
                    description="two processes reach the same endpoints",
                )
    return None


def _comm_errors(scan: _Scan) -> Optional[MonitorVerdict]:
    marker = scan.first_marker(MarkerKind.COMM_ERROR)
    if marker is None:
        return None
    return MonitorVerdict(
        VerdictKind.COMM_ERROR,
        leaves=(marker.leaf,),
        tag=marker.tag,
        description=marker.description,
    )


def _stuck_leaves(scan: _Scan) -> Optional[MonitorVerdict]:
    config = scan.config
    moving = scan.moving()
    for i, leaf in enumerate(config.leaves):
        if i in moving or _waiting(config, leaf):
            continue
        return MonitorVerdict(
            VerdictKind.COMM_ERROR,
            leaves=(i,),
            description=f"process {i} is stuck outside a receive or a close",
        )
    return None


def _waiting(config: Configuration, leaf: object) -> bool:
    """A close or receive on an allocated linear endpoint with an empty queue."""
    if isinstance(leaf, (Close, Receive)):
        subject: Name = leaf.subject
        if subject.kind is not NameKind.LINEAR or subject.ident not in config.heap:
            return False
        return not config.heap[subject.ident].queue
    return False
