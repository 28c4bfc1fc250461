"""Well-typedness of heaps against a pair of type environments.

``check_heap(gamma0, gamma, heap)`` validates the five heap conditions in
order and reports the first one that fails:

1. peers point at each other and at most one of their queues is non-empty;
2. the type of an endpoint with an empty queue is dual to the tail of its
   peer's type after the peer's queue is consumed;
3. the same for self-looped unrestricted endpoints, using ``*a``'s type;
4. the heap domain is the set of linear locations typed by the
   environments, all reachable from the names owned by processes;
5. no location is reachable from two distinct owned names.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from copyless_check.checker.environment import TypeEnv
from copyless_check.checker.errors import ErrorKind, ProcessTypeError
from copyless_check.core.duality import is_dual_pair
from copyless_check.core.process import Name, NameKind
from copyless_check.core.subtyping import subtype_qualified
from copyless_check.core.types import (
    EndpointType,
    ExternalChoice,
    Type,
    expose,
    subst_many,
    subst_qualified,
)
from copyless_check.core.weights import weight
from copyless_check.runtime.heap import Heap, Message, reachable


@dataclass(frozen=True)
class MessageSpec:
    """A queued message seen at the type level."""

    tag: str
    tyargs: tuple[EndpointType, ...] = ()
    argtypes: tuple[Type, ...] = ()


def tail(term: EndpointType, specs: Sequence[MessageSpec]) -> EndpointType:
    """Residual type of a receiver after consuming ``specs`` in order.

    Raises:
        ProcessTypeError: NoSuchTag when the type is not an external choice
            offering the tag, ArgSubtypeFail on an arity or argument mismatch.
    """
    for spec in specs:
        exposed = expose(term)
        if not isinstance(exposed, ExternalChoice):
            raise ProcessTypeError(
                ErrorKind.NO_SUCH_TAG,
                f"cannot consume {spec.tag}: the type does not receive",
            )
        branch = exposed.branch(spec.tag)
        if branch is None:
            raise ProcessTypeError(
                ErrorKind.NO_SUCH_TAG, f"the type offers no branch {spec.tag}"
            )
        if len(branch.typarams) != len(spec.tyargs) or len(branch.argtypes) != len(
            spec.argtypes
        ):
            raise ProcessTypeError(
                ErrorKind.ARG_SUBTYPE_FAIL, f"arity mismatch on message {spec.tag}"
            )
        mapping = dict(zip(branch.typarams, spec.tyargs))
        for i, (given, expected) in enumerate(zip(spec.argtypes, branch.argtypes)):
            if not subtype_qualified(given, subst_qualified(expected, mapping)):
                raise ProcessTypeError(
                    ErrorKind.ARG_SUBTYPE_FAIL,
                    f"argument {i} of {spec.tag} is not a subtype of the "
                    "declared argument type",
                )
        term = subst_many(branch.continuation, mapping)
    return term


@dataclass(frozen=True)
class HeapVerdict:
    """Result of ``check_heap``; ``condition`` is 0 when the heap is typed."""

    ok: bool
    condition: int = 0
    witnesses: tuple[str, ...] = field(default_factory=tuple)
    message: str = ""

    def render(self) -> str:
        if self.ok:
            return "heap OK"
        where = ", ".join(self.witnesses)
        return f"heap condition {self.condition} fails at {{{where}}}: {self.message}"


HEAP_OK = HeapVerdict(True)


def check_heap(gamma0: TypeEnv, gamma: TypeEnv, heap: Heap) -> HeapVerdict:
    """Validate ``heap`` against the unowned ``gamma0`` and owned ``gamma``.

    Raises:
        ValueError: If ``gamma0`` holds an unrestricted binding or shares a
            name with ``gamma``.
    """
    if any(not t.is_linear for t in gamma0.values()):
        raise ValueError("the environment of unowned locations must be linear")
    shared = set(gamma0) & set(gamma)
    if shared:
        raise ValueError(f"environments overlap on {sorted(map(str, shared))}")
    return _HeapCheck(gamma0, gamma, heap).verdict()


class _HeapCheck:
    def __init__(self, gamma0: TypeEnv, gamma: TypeEnv, heap: Heap):
        self.gamma0 = gamma0
        self.gamma = gamma
        self.heap = heap

    def lookup(self, name: Name) -> Optional[Type]:
        if name in self.gamma:
            return self.gamma[name]
        return self.gamma0.get(name)

    def verdict(self) -> HeapVerdict:
        for condition in (
            self.peers,
            self.linear_duality,
            self.unrestricted_duality,
            self.domain,
            self.isolation,
        ):
            result = condition()
            if not result.ok:
                return result
        return HEAP_OK

    def peers(self) -> HeapVerdict:
        for loc, cell in self.heap.items():
            if cell.peer == loc:
                continue
            other = self.heap.get(cell.peer)
            if other is None or other.peer != loc:
                return HeapVerdict(
                    False, 1, (loc, cell.peer), f"{loc} and its peer are not paired"
                )
            if cell.queue and other.queue:
                return HeapVerdict(
                    False, 1, (loc, cell.peer), "both peer queues are non-empty"
                )
        return HEAP_OK

    def specs(self, queue: Sequence[Message]) -> Optional[list[MessageSpec]]:
        result = []
        for message in queue:
            argtypes = []
            for arg in message.args:
                t = self.lookup(arg)
                if t is None:
                    return None
                argtypes.append(t)
            result.append(MessageSpec(message.tag, message.tyargs, tuple(argtypes)))
        return result

    def finite(self, specs: Sequence[MessageSpec]) -> bool:
        for spec in specs:
            for t in spec.tyargs:
                if weight(frozenset(), t).is_infinite:
                    return False
            for q in spec.argtypes:
                if weight(frozenset(), q).is_infinite:
                    return False
        return True

    def matches(self, writer: Type, reader: Type, queue: Sequence[Message]) -> str:
        """Empty string when the queue is consistent with both types."""
        specs = self.specs(queue)
        if specs is None:
            return ""
        if not self.finite(specs):
            return "a queued message has an infinite-weight payload"
        try:
            rest = tail(reader.body, specs)
        except ProcessTypeError as e:
            return e.message
        if not is_dual_pair(writer.body, rest):
            return "types are not dual modulo the queued messages"
        return ""

    def linear_duality(self) -> HeapVerdict:
        for loc, cell in self.heap.items():
            if cell.peer == loc or cell.queue:
                continue
            writer = self.lookup(Name.linear(loc))
            reader = self.lookup(Name.linear(cell.peer))
            if writer is None or reader is None:
                continue
            problem = self.matches(writer, reader, self.heap[cell.peer].queue)
            if problem:
                return HeapVerdict(False, 2, (loc, cell.peer), problem)
        return HEAP_OK

    def unrestricted_duality(self) -> HeapVerdict:
        for loc, cell in self.heap.items():
            if cell.peer != loc:
                continue
            writer = self.lookup(Name.shared(loc))
            reader = self.lookup(Name.linear(loc))
            if writer is None or reader is None:
                continue
            problem = self.matches(writer, reader, cell.queue)
            if problem:
                return HeapVerdict(False, 3, (loc,), problem)
        return HEAP_OK

    def domain(self) -> HeapVerdict:
        typed = {
            n.ident
            for n in (*self.gamma0, *self.gamma.linear_names)
            if n.kind is NameKind.LINEAR
        }
        reach = reachable(self.gamma, self.heap)
        cells = self.heap.domain
        if cells == typed == reach:
            return HEAP_OK
        odd = (cells ^ typed) | (cells ^ reach)
        return HeapVerdict(
            False,
            4,
            tuple(sorted(odd)),
            "the heap, its typed locations and its reachable part differ",
        )

    def isolation(self) -> HeapVerdict:
        owned = sorted(self.gamma)
        reach = {n: reachable([n], self.heap) for n in owned}
        for i, u in enumerate(owned):
            for v in owned[i + 1 :]:
                common = reach[u] & reach[v]
                if common:
                    return HeapVerdict(
                        False,
                        5,
                        tuple(sorted(common)),
                        f"reachable from both {u} and {v}",
                    )
        return HEAP_OK
