"""Small-step reduction of configurations.

A configuration pairs a heap with the multiset of parallel leaves of the
running process, kept sorted so that structurally congruent processes have
one representation. ``redexes`` lists every rule instance each leaf can fire
together with markers for leaves that are already broken, and ``apply``
fires one of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Hashable, Iterable, Optional, Union

from copyless_check.core.process import (
    Choice,
    Close,
    Idle,
    Name,
    NameKind,
    OpenLinear,
    OpenUnrestricted,
    Par,
    Process,
    ProcessBinding,
    ProcVar,
    Receive,
    RecProc,
    Send,
    TypeBinding,
    ValueBinding,
    free_names,
    rename_name,
    subst_process,
)
from copyless_check.runtime.heap import Endpoint, Heap, Message


class StepError(ValueError):
    """Raised when a step is requested for a redex that is not enabled."""


class Rule(str, Enum):
    OPEN_LINEAR = "R-Open Linear Channel"
    OPEN_UNRESTRICTED = "R-Open Unrestricted Channel"
    CHOICE_LEFT = "R-Choice Left"
    CHOICE_RIGHT = "R-Choice Right"
    SEND_LINEAR = "R-Send Linear"
    SEND_UNRESTRICTED = "R-Send Unrestricted"
    RECEIVE = "R-Receive"
    REC = "R-Rec"


@dataclass(frozen=True)
class Redex:
    """Rule ``rule`` applied to the leaf at index ``leaf``."""

    leaf: int
    rule: Rule
    description: str


class MarkerKind(str, Enum):
    COMM_ERROR = "CommError"
    FAULT = "Fault"


@dataclass(frozen=True)
class Marker:
    """A leaf that can never reduce because it is already broken."""

    leaf: int
    kind: MarkerKind
    description: str
    tag: Optional[str] = None


# --- structural congruence ----------------------------------------------------


def leaves_of(process: Process) -> tuple[Process, ...]:
    """Parallel leaves of ``process`` without idle units, in canonical order."""
    found: list[Process] = []
    pending = [process]
    while pending:
        current = pending.pop()
        if isinstance(current, Par):
            pending.append(current.right)
            pending.append(current.left)
        elif not isinstance(current, Idle):
            found.append(current)
    return tuple(sorted(found, key=repr))


def compose(leaves: Iterable[Process]) -> Process:
    """Right-nested parallel composition of ``leaves``; ``0`` when empty."""
    items = list(leaves)
    if not items:
        return Idle()
    result = items[-1]
    for leaf in reversed(items[:-1]):
        result = Par(leaf, result)
    return result


def normalize(process: Process) -> Process:
    """Canonical representative of the congruence class of ``process``."""
    return compose(leaves_of(process))


@dataclass(frozen=True)
class Configuration:
    heap: Heap
    leaves: tuple[Process, ...]
    counter: int = 0

    @classmethod
    def initial(cls, process: Process) -> "Configuration":
        return cls(Heap(), leaves_of(process))

    @property
    def process(self) -> Process:
        return compose(self.leaves)

    def key(self) -> Hashable:
        """Identity of the state for deduplication; the name counter is ignored."""
        return (self.heap.key(), self.leaves)

    def free_names(self) -> frozenset[Name]:
        result: frozenset[Name] = frozenset()
        for leaf in self.leaves:
            result |= free_names(leaf)
        return result


# --- redexes ------------------------------------------------------------------


def redexes(config: Configuration) -> list[Union[Redex, Marker]]:
    """Every enabled rule instance and every broken leaf, by leaf index."""
    found: list[Union[Redex, Marker]] = []
    for i, leaf in enumerate(config.leaves):
        found.extend(_leaf_redexes(config.heap, i, leaf))
    return found


def enabled(config: Configuration) -> list[Redex]:
    return [r for r in redexes(config) if isinstance(r, Redex)]


def markers(config: Configuration) -> list[Marker]:
    return [r for r in redexes(config) if isinstance(r, Marker)]


def _fault(i: int, description: str) -> Marker:
    return Marker(i, MarkerKind.FAULT, description)


def _leaf_redexes(heap: Heap, i: int, leaf: Process) -> list[Union[Redex, Marker]]:
    if isinstance(leaf, (Idle, Close)):
        return []
    if isinstance(leaf, OpenLinear):
        return [Redex(i, Rule.OPEN_LINEAR, f"open({leaf.left},{leaf.right})")]
    if isinstance(leaf, OpenUnrestricted):
        return [Redex(i, Rule.OPEN_UNRESTRICTED, f"open({leaf.name})")]
    if isinstance(leaf, Choice):
        return [
            Redex(i, Rule.CHOICE_LEFT, "choice.L"),
            Redex(i, Rule.CHOICE_RIGHT, "choice.R"),
        ]
    if isinstance(leaf, RecProc):
        return [Redex(i, Rule.REC, f"rec {leaf.var}")]
    if isinstance(leaf, ProcVar):
        return [_fault(i, f"unbound process variable {leaf.name}")]
    if isinstance(leaf, Send):
        return _send_redexes(heap, i, leaf)
    if isinstance(leaf, Receive):
        return _receive_redexes(heap, i, leaf)
    raise TypeError(f"not a process leaf: {leaf!r}")


def _send_redexes(heap: Heap, i: int, leaf: Send) -> list[Union[Redex, Marker]]:
    subject = leaf.subject
    description = f"{subject}!{leaf.tag}"
    unbound = [n for n in (subject, *leaf.args) if n.kind is NameKind.VARIABLE]
    if unbound:
        return [_fault(i, f"{description} uses unbound variable {unbound[0]}")]
    if subject.ident not in heap:
        return [_fault(i, f"{description} uses unallocated endpoint {subject}")]
    cell = heap[subject.ident]
    if subject.kind is NameKind.SHARED:
        if cell.peer != subject.ident:
            return []
        return [Redex(i, Rule.SEND_UNRESTRICTED, description)]
    if cell.peer == subject.ident:
        return []
    if cell.peer not in heap:
        return [_fault(i, f"{description} targets unallocated peer {cell.peer}")]
    return [Redex(i, Rule.SEND_LINEAR, description)]


def _receive_redexes(heap: Heap, i: int, leaf: Receive) -> list[Union[Redex, Marker]]:
    subject = leaf.subject
    if subject.kind is NameKind.VARIABLE:
        return [_fault(i, f"receive on unbound variable {subject}")]
    if subject.kind is NameKind.SHARED:
        return []
    if subject.ident not in heap:
        return [_fault(i, f"receive on unallocated endpoint {subject}")]
    queue = heap[subject.ident].queue
    if not queue:
        return []
    head = queue[0]
    branch = leaf.branch(head.tag)
    if branch is None:
        return [
            Marker(
                i,
                MarkerKind.COMM_ERROR,
                f"{subject} received unexpected message {head.tag}",
                head.tag,
            )
        ]
    if len(branch.typarams) != len(head.tyargs) or len(branch.params) != len(
        head.args
    ):
        return [
            Marker(
                i,
                MarkerKind.COMM_ERROR,
                f"{subject} received {head.tag} with the wrong number of arguments",
                head.tag,
            )
        ]
    return [Redex(i, Rule.RECEIVE, f"{subject}?{head.tag}")]


# --- steps --------------------------------------------------------------------


@dataclass(frozen=True)
class StepEffect:
    """What a step did, for observers that follow the heap."""

    redex: Redex
    leaf: Process
    allocated: tuple[str, ...] = ()
    message: Optional[Message] = None
    target: Optional[str] = None


def step(config: Configuration, redex: Redex) -> Configuration:
    return apply(config, redex)[0]


def apply(config: Configuration, redex: Redex) -> tuple[Configuration, StepEffect]:
    """Fire ``redex`` and return the successor with a description of the step.

    Raises:
        StepError: If ``redex`` is not enabled in ``config``.
    """
    if redex not in enabled(config):
        raise StepError(f"{redex.description} is not enabled")
    leaf = config.leaves[redex.leaf]
    others = config.leaves[: redex.leaf] + config.leaves[redex.leaf + 1 :]
    heap, counter = config.heap, config.counter
    effect = StepEffect(redex, leaf)

    if isinstance(leaf, OpenLinear):
        taken = _taken(heap, config.leaves)
        left, counter = _fresh(leaf.left, taken | {leaf.right}, counter)
        right, counter = _fresh(leaf.right, taken | {left, leaf.left}, counter)
        heap = heap.with_cell(left, Endpoint(right)).with_cell(right, Endpoint(left))
        body = rename_name(leaf.body, Name.linear(leaf.left), Name.linear(left))
        body = rename_name(body, Name.linear(leaf.right), Name.linear(right))
        effect = StepEffect(redex, leaf, allocated=(left, right))
    elif isinstance(leaf, OpenUnrestricted):
        taken = _taken(heap, config.leaves)
        loc, counter = _fresh(leaf.name, taken, counter)
        heap = heap.with_cell(loc, Endpoint(loc))
        body = rename_name(leaf.body, Name.linear(leaf.name), Name.linear(loc))
        body = rename_name(body, Name.shared(leaf.name), Name.shared(loc))
        effect = StepEffect(redex, leaf, allocated=(loc,))
    elif isinstance(leaf, Choice):
        body = leaf.left if redex.rule is Rule.CHOICE_LEFT else leaf.right
    elif isinstance(leaf, RecProc):
        body = subst_process(leaf.body, ProcessBinding(leaf.var, leaf))
    elif isinstance(leaf, Send):
        message = Message(leaf.tag, leaf.tyargs, leaf.args)
        loc = leaf.subject.ident
        target = loc if redex.rule is Rule.SEND_UNRESTRICTED else heap[loc].peer
        heap = heap.with_cell(target, heap[target].enqueue(message))
        body = leaf.body
        effect = StepEffect(redex, leaf, message=message, target=target)
    elif isinstance(leaf, Receive):
        loc = leaf.subject.ident
        message, cell = heap[loc].dequeue()
        heap = heap.with_cell(loc, cell)
        branch = leaf.branch(message.tag)
        assert branch is not None
        body = branch.body
        for alpha, image in zip(branch.typarams, message.tyargs):
            body = subst_process(body, TypeBinding(alpha, image))
        for x, value in zip(branch.variables, message.args):
            body = subst_process(body, ValueBinding(Name.variable(x), value))
        effect = StepEffect(redex, leaf, message=message, target=loc)
    else:
        raise StepError(f"{redex.description} is not enabled")

    leaves = tuple(sorted(others + leaves_of(body), key=repr))
    return Configuration(heap, leaves, counter), effect


def _taken(heap: Heap, leaves: Iterable[Process]) -> set[str]:
    taken = set(heap.domain)
    for leaf in leaves:
        taken.update(n.ident for n in free_names(leaf))
    return taken


def _fresh(hint: str, taken: set[str], counter: int) -> tuple[str, int]:
    if hint not in taken:
        return hint, counter
    while True:
        counter += 1
        candidate = f"{hint}_{counter}"
        if candidate not in taken:
            return candidate, counter


# --- traces -------------------------------------------------------------------


@dataclass(frozen=True)
class TraceEvent:
    """One executed step; ``choice`` indexes the enabled redexes at that point."""

    step: int
    rule: Rule
    redex: str
    heap_domain: tuple[str, ...]
    choice: int

    def to_record(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "rule": self.rule.value,
            "redex": self.redex,
            "heapDomain": list(self.heap_domain),
            "choice": self.choice,
        }
