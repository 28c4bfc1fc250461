"""Weights of endpoint types.

The weight bounds the length of pointer chains that can hang off an endpoint
through its queue. Only endpoints with finite weight may be sent, and only
finite-weight types may instantiate type variables.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import AbstractSet, Hashable, Optional, Union

from copyless_check.core.types import (
    ChoiceType,
    End,
    EndpointType,
    ExternalChoice,
    InternalChoice,
    Rec,
    Type,
    Var,
    canonical_key,
    expose,
    freshen,
    iter_subterms,
)


@functools.total_ordering
@dataclass(frozen=True)
class Weight:
    """A natural number or infinity; ``value`` is None for infinity."""

    value: Optional[int]

    @classmethod
    def finite(cls, n: int) -> "Weight":
        if n < 0:
            raise ValueError("weights are natural numbers")
        return cls(n)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __lt__(self, other: "Weight") -> bool:
        if self.value is None:
            return False
        return other.value is None or self.value < other.value

    def plus(self, n: int) -> "Weight":
        if self.value is None:
            return self
        return Weight(self.value + n)

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


ZERO = Weight(0)
INFINITE = Weight(None)


def weight(delta0: AbstractSet[str], term: Union[Type, EndpointType]) -> Weight:
    """Weight of ``term`` where the variables in ``delta0`` weigh nothing."""
    body = term.body if isinstance(term, Type) else term
    return _weight(frozenset(delta0), frozenset(), freshen(body))


def _weight(
    delta0: frozenset[str], delta: frozenset[str], term: EndpointType
) -> Weight:
    if isinstance(term, (End, InternalChoice)):
        return ZERO
    if isinstance(term, Var):
        return ZERO if term.name in delta0 or term.name in delta else INFINITE
    if isinstance(term, Rec):
        return _weight(delta0, delta | {term.var}, term.body)
    assert isinstance(term, ExternalChoice)
    result = ZERO
    for b in term.branches:
        payload = max(
            (_weight(delta0, frozenset(), t.body) for t in b.argtypes), default=ZERO
        )
        after = _weight(delta0, delta - set(b.typarams), b.continuation)
        result = max(result, payload.plus(1), after)
        if result.is_infinite:
            break
    return result


def prefix_count(term: EndpointType) -> int:
    """Number of message prefixes (branches) in the term."""
    return sum(
        len(t.branches) for t in iter_subterms(term) if isinstance(t, ChoiceType)
    )


def weight_oracle(
    delta: AbstractSet[str], term: EndpointType, cap: Optional[int] = None
) -> Weight:
    """Least ``n <= cap`` bounding ``term`` coinductively, else infinity."""
    if cap is None:
        cap = prefix_count(term) + 2
    if cap < 1:
        raise ValueError("cap must be at least 1")
    term = freshen(term)
    ctx = frozenset(delta)
    for n in range(cap + 1):
        if _bounded(ctx, term, n, set()):
            return Weight.finite(n)
    return INFINITE


def _bounded(
    delta: frozenset[str],
    term: EndpointType,
    n: int,
    assumed: set[tuple[Hashable, int]],
) -> bool:
    key = (canonical_key(term), n)
    if key in assumed:
        return True
    assumed.add(key)
    term = expose(term)
    if isinstance(term, (End, InternalChoice)):
        return True
    if isinstance(term, Var):
        return term.name in delta
    assert isinstance(term, ExternalChoice)
    if n == 0:
        return False
    return all(
        all(_bounded(delta, t.body, n - 1, assumed) for t in b.argtypes)
        and _bounded(delta, b.continuation, n, assumed)
        for b in term.branches
    )
