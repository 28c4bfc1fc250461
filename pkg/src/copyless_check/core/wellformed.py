"""Well-formedness of endpoint types and qualified types."""

from typing import AbstractSet

from copyless_check.core.types import (
    ChoiceType,
    End,
    EndpointType,
    InternalChoice,
    Qualifier,
    Rec,
    Type,
    Var,
)


class ContextOverlapError(ValueError):
    """Raised when the outer and inner variable contexts intersect."""


def check_wf(
    outer: AbstractSet[str], inner: AbstractSet[str], term: EndpointType
) -> bool:
    """Decide ``outer; inner |- term``.

    Outer variables may occur anywhere; inner variables (type parameters of an
    enclosing prefix) may occur only within message arguments.

    Raises:
        ContextOverlapError: If ``outer`` and ``inner`` intersect.
    """
    outer, inner = frozenset(outer), frozenset(inner)
    if outer & inner:
        raise ContextOverlapError(
            f"overlapping type variable contexts: {sorted(outer & inner)}"
        )
    return _wf(outer, inner, term)


def _wf(outer: frozenset[str], inner: frozenset[str], term: EndpointType) -> bool:
    if isinstance(term, End):
        return True
    if isinstance(term, Var):
        return term.name in outer and term.name not in inner
    if isinstance(term, Rec):
        return _wf(outer | {term.var}, inner - {term.var}, term.body)
    assert isinstance(term, ChoiceType)
    for b in term.branches:
        params = frozenset(b.typarams)
        for arg in b.argtypes:
            if not _qualified(outer | inner | params, arg):
                return False
        if not _wf(outer - params, inner | params, b.continuation):
            return False
    return True


def _qualified(delta: frozenset[str], t: Type) -> bool:
    if not _wf(delta, frozenset(), t.body):
        return False
    return t.qualifier is Qualifier.LIN or is_un_form(t.body)


def check_qualified(delta: AbstractSet[str], t: Type) -> bool:
    """Well-formedness of a qualified type; ``un`` types must be invariant."""
    return _qualified(frozenset(delta), t)


def is_un_form(term: EndpointType) -> bool:
    """True for ``rec a.!{m_i<..>(t_i).a}``: send-only and unchanging."""
    if not isinstance(term, Rec) or not isinstance(term.body, InternalChoice):
        return False
    return all(
        b.continuation == Var(term.var) and term.var not in b.typarams
        for b in term.body.branches
    )
