"""The dual operator and the coinductive duality relation."""

from typing import AbstractSet

from copyless_check.core.subtyping import FreshVarMap, equivalent, make_independent
from copyless_check.core.types import (
    Branch,
    ChoiceType,
    End,
    EndpointType,
    ExternalChoice,
    InternalChoice,
    Rec,
    Var,
    alpha_equal,
    canonical_key,
    expose,
    subst_inner,
    subst_many,
)


class DualityError(ValueError):
    """Raised when the dual of a type is undefined."""


def dual(term: EndpointType) -> EndpointType:
    """Swap sends and receives, leaving message arguments untouched.

    Recursion variables that occur inside arguments are replaced by the whole
    recursive type before dualizing, so arguments keep their meaning.

    Raises:
        DualityError: If a type variable occurs free at top level.
    """
    return _dual(term, frozenset())


def _dual(term: EndpointType, bound: AbstractSet[str]) -> EndpointType:
    if isinstance(term, End):
        return term
    if isinstance(term, Var):
        if term.name not in bound:
            raise DualityError(f"dual undefined: free type variable {term.name}")
        return term
    if isinstance(term, Rec):
        body = subst_inner(term.body, term, term.var)
        return Rec(term.var, _dual(body, set(bound) | {term.var}))
    flipped = ExternalChoice if isinstance(term, InternalChoice) else InternalChoice
    return flipped(
        tuple(
            Branch(
                b.tag,
                b.typarams,
                b.argtypes,
                _dual(b.continuation, set(bound) - set(b.typarams)),
            )
            for b in term.branches
        )
    )


def is_dual_pair(left: EndpointType, right: EndpointType) -> bool:
    """Decide ``left`` and ``right`` are dual, unfolding recursion on demand."""
    left, right = make_independent(left, right)
    return _DualityCheck().related(left, right)


class _DualityCheck:
    def __init__(self) -> None:
        self.assumed: set[tuple[object, object]] = set()
        self.fresh = FreshVarMap()

    def related(self, left: EndpointType, right: EndpointType) -> bool:
        key = (canonical_key(left), canonical_key(right))
        if key in self.assumed:
            return True
        self.assumed.add(key)
        left, right = expose(left), expose(right)
        if isinstance(left, End) or isinstance(right, End):
            return isinstance(left, End) and isinstance(right, End)
        # a type variable at top level has no dual
        if isinstance(left, Var) or isinstance(right, Var):
            return False
        assert isinstance(left, ChoiceType) and isinstance(right, ChoiceType)
        if isinstance(left, InternalChoice) == isinstance(right, InternalChoice):
            return False
        if left.tags != right.tags:
            return False
        for lb in left.branches:
            rb = right.branch(lb.tag)
            assert rb is not None
            if not self._branches(lb, rb):
                return False
        return True

    def _branches(self, lb: Branch, rb: Branch) -> bool:
        if len(lb.typarams) != len(rb.typarams) or len(lb.argtypes) != len(
            rb.argtypes
        ):
            return False
        shared = [self.fresh(a, b) for a, b in zip(lb.typarams, rb.typarams)]
        lmap = {a: Var(g) for a, g in zip(lb.typarams, shared)}
        rmap = {b: Var(g) for b, g in zip(rb.typarams, shared)}
        for ls, rs in zip(lb.argtypes, rb.argtypes):
            if ls.qualifier is not rs.qualifier:
                return False
            lbody, rbody = subst_many(ls.body, lmap), subst_many(rs.body, rmap)
            if not (alpha_equal(lbody, rbody) or equivalent(lbody, rbody)):
                return False
        return self.related(
            subst_many(lb.continuation, lmap), subst_many(rb.continuation, rmap)
        )
