"""Heaps of endpoints and reachability through queued messages."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional

from copyless_check.core.process import Name, NameKind
from copyless_check.core.types import EndpointType


class HeapError(ValueError):
    """Raised when heaps with overlapping domains are composed."""


@dataclass(frozen=True)
class Message:
    tag: str
    tyargs: tuple[EndpointType, ...] = ()
    args: tuple[Name, ...] = ()


@dataclass(frozen=True)
class Endpoint:
    """A heap cell: the peer location and the FIFO queue of pending messages."""

    peer: str
    queue: tuple[Message, ...] = ()

    def enqueue(self, message: Message) -> "Endpoint":
        return Endpoint(self.peer, self.queue + (message,))

    def dequeue(self) -> tuple[Message, "Endpoint"]:
        if not self.queue:
            raise HeapError("dequeue from an empty queue")
        return self.queue[0], Endpoint(self.peer, self.queue[1:])


class Heap(Mapping[str, Endpoint]):
    """Immutable map from locations to endpoints."""

    def __init__(self, cells: Optional[Mapping[str, Endpoint]] = None):
        self._cells: dict[str, Endpoint] = dict(cells or {})

    def __getitem__(self, loc: str) -> Endpoint:
        return self._cells[loc]

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._cells))

    def __len__(self) -> int:
        return len(self._cells)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Heap):
            return self._cells == other._cells
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Heap({dict(sorted(self._cells.items()))!r})"

    def key(self) -> tuple[tuple[str, Endpoint], ...]:
        return tuple(sorted(self._cells.items()))

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(self._cells)

    def compose(self, other: "Heap") -> "Heap":
        overlap = self.domain & other.domain
        if overlap:
            raise HeapError(f"heap domains overlap on {sorted(overlap)}")
        return Heap({**self._cells, **other._cells})

    def with_cell(self, loc: str, endpoint: Endpoint) -> "Heap":
        cells = dict(self._cells)
        cells[loc] = endpoint
        return Heap(cells)

    def is_self_loop(self, loc: str) -> bool:
        return loc in self._cells and self._cells[loc].peer == loc


def reachable(roots: Iterable[Name], heap: Heap) -> frozenset[str]:
    """Locations reachable from the linear roots through queued arguments.

    Unrestricted pointers reach nothing and variables are ignored.
    """
    found = {n.ident for n in roots if n.kind is NameKind.LINEAR}
    pending = list(found)
    while pending:
        loc = pending.pop()
        if loc not in heap:
            continue
        for message in heap[loc].queue:
            for arg in message.args:
                if arg.kind is NameKind.LINEAR and arg.ident not in found:
                    found.add(arg.ident)
                    pending.append(arg.ident)
    return frozenset(found)
