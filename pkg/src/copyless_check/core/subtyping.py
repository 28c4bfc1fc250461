"""Subtyping of endpoint types.

Two deciders live here. ``subtype`` is the memoized algorithm: it keeps the set
of pairs assumed related, applies the axiom first, then unfolds recursion on
the left, then on the right, and only then compares prefixes. Type parameters
of matched prefixes are identified through a ``FreshVarMap``.
``subtype_oracle`` approximates the greatest fixpoint directly by bounded
unfolding and is used to cross-check the algorithm on small instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Optional

from copyless_check.core.types import (
    Branch,
    ChoiceType,
    End,
    EndpointType,
    ExternalChoice,
    InternalChoice,
    Rec,
    Type,
    Var,
    bound_type_vars,
    canonical_key,
    expose,
    free_type_vars,
    fresh_name,
    freshen,
    lin,
    subst_many,
    un,
    unfold,
)


class FreshVarMap:
    """Assigns one fresh type variable to each unordered pair of variables."""

    def __init__(self) -> None:
        self._pairs: dict[frozenset[str], str] = {}

    def __call__(self, alpha: str, beta: str) -> str:
        key = frozenset({alpha, beta})
        if key not in self._pairs:
            self._pairs[key] = fresh_name("gamma")
        return self._pairs[key]

    def __len__(self) -> int:
        return len(self._pairs)

    def items(self) -> Iterator[tuple[frozenset[str], str]]:
        return iter(self._pairs.items())


def make_independent(
    left: EndpointType, right: EndpointType
) -> tuple[EndpointType, EndpointType]:
    """Rename all binders of both terms apart from each other and free names."""
    return freshen(left), freshen(right)


@dataclass
class SubtypeResult:
    """Outcome of one run of the subtyping algorithm."""

    holds: bool
    left: EndpointType
    right: EndpointType
    fresh_map: FreshVarMap
    visited: list[tuple[EndpointType, EndpointType]] = field(default_factory=list)
    memo_size: int = 0


class _SubtypeSearch:
    def __init__(self, fresh_map: FreshVarMap):
        self.fresh = fresh_map
        self.memo: set[tuple[Hashable, Hashable]] = set()
        self.visited: list[tuple[EndpointType, EndpointType]] = []

    def qualified(self, left: Type, right: Type) -> bool:
        return left.qualifier.leq(right.qualifier) and self.endpoint(
            left.body, right.body
        )

    def endpoint(self, left: EndpointType, right: EndpointType) -> bool:
        self.visited.append((left, right))
        key = (canonical_key(left), canonical_key(right))
        if key in self.memo:
            return True
        if isinstance(left, Rec):
            self.memo.add(key)
            return self.endpoint(unfold(left), right)
        if isinstance(right, Rec):
            self.memo.add(key)
            return self.endpoint(left, unfold(right))
        if isinstance(left, End) or isinstance(right, End):
            return isinstance(left, End) and isinstance(right, End)
        if isinstance(left, Var) or isinstance(right, Var):
            return left == right
        if isinstance(left, ExternalChoice) and isinstance(right, ExternalChoice):
            self.memo.add(key)
            if not left.tags <= right.tags:
                return False
            return all(
                self._branch(b, right.branch(b.tag), covariant=True)
                for b in left.branches
            )
        if isinstance(left, InternalChoice) and isinstance(right, InternalChoice):
            self.memo.add(key)
            if not right.tags <= left.tags:
                return False
            return all(
                self._branch(left.branch(b.tag), b, covariant=False)
                for b in right.branches
            )
        return False

    def _branch(
        self, lb: Optional[Branch], rb: Optional[Branch], covariant: bool
    ) -> bool:
        assert lb is not None and rb is not None
        if len(lb.typarams) != len(rb.typarams):
            return False
        if len(lb.argtypes) != len(rb.argtypes):
            return False
        shared = [self.fresh(a, b) for a, b in zip(lb.typarams, rb.typarams)]
        lmap = {a: Var(g) for a, g in zip(lb.typarams, shared)}
        rmap = {b: Var(g) for b, g in zip(rb.typarams, shared)}
        for ls, rs in zip(lb.argtypes, rb.argtypes):
            larg = Type(ls.qualifier, subst_many(ls.body, lmap))
            rarg = Type(rs.qualifier, subst_many(rs.body, rmap))
            ok = self.qualified(larg, rarg) if covariant else self.qualified(rarg, larg)
            if not ok:
                return False
        return self.endpoint(
            subst_many(lb.continuation, lmap), subst_many(rb.continuation, rmap)
        )


def subtype_derivation(left: EndpointType, right: EndpointType) -> SubtypeResult:
    """Run the algorithm and keep its trace of visited pairs."""
    left, right = make_independent(left, right)
    fresh_map = FreshVarMap()
    search = _SubtypeSearch(fresh_map)
    holds = search.endpoint(left, right)
    return SubtypeResult(
        holds, left, right, fresh_map, search.visited, len(search.memo)
    )


def subtype(left: EndpointType, right: EndpointType) -> bool:
    """Decide ``left <= right``."""
    return subtype_derivation(left, right).holds


def subtype_qualified(left: Type, right: Type) -> bool:
    """Decide ``q T <= q' S``: qualifiers by ``un <= lin``, bodies by ``subtype``."""
    return left.qualifier.leq(right.qualifier) and subtype(left.body, right.body)


def equivalent(left: EndpointType, right: EndpointType) -> bool:
    """Equality modulo folding: subtyping in both directions."""
    return subtype(left, right) and subtype(right, left)


# --- instances ------------------------------------------------------------


def type_trees(term: EndpointType) -> list[EndpointType]:
    """All subtrees of ``term``, closed under unfolding of recursion."""
    seen: dict[Hashable, EndpointType] = {}
    pending = [term]
    while pending:
        current = pending.pop()
        key = canonical_key(current)
        if key in seen:
            continue
        seen[key] = current
        if isinstance(current, Rec):
            pending.append(unfold(current))
        elif isinstance(current, ChoiceType):
            for b in current.branches:
                pending.extend(t.body for t in b.argtypes)
                pending.append(b.continuation)
    return list(seen.values())


def _instances_of(
    fresh_map: FreshVarMap, term: EndpointType, other: EndpointType
) -> set[Hashable]:
    own = bound_type_vars(term)
    partners = sorted(bound_type_vars(other))
    keys: set[Hashable] = set()
    for tree in type_trees(term):
        loose = sorted(free_type_vars(tree) & own)
        for choice in itertools.product(partners, repeat=len(loose)):
            mapping = {
                a: Var(fresh_map(a, b)) for a, b in zip(loose, choice)
            }
            keys.add(canonical_key(subst_many(tree, mapping)))
    return keys


def instances(
    fresh_map: FreshVarMap, left: EndpointType, right: EndpointType
) -> set[Hashable]:
    """Canonical keys of every endpoint type the algorithm may visit.

    Each subtree of either input has its loose prefix-bound variables
    instantiated by the fresh variables of every possible pairing with a
    binder of the other input.
    """
    return _instances_of(fresh_map, left, right) | _instances_of(
        fresh_map, right, left
    )


# --- bounded oracle -------------------------------------------------------


def default_fuel(left: EndpointType, right: EndpointType) -> int:
    return len(type_trees(left)) * len(type_trees(right)) + 2


def subtype_oracle(
    left: EndpointType, right: EndpointType, fuel: Optional[int] = None
) -> bool:
    """Approximate the largest subtyping relation up to ``fuel`` unfoldings.

    Matched type parameters on both sides are renamed to the same name,
    indexed by the remaining fuel, so names never clash along one path.
    """
    if fuel is None:
        fuel = default_fuel(left, right)
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    memo: dict[tuple[Hashable, Hashable, int], bool] = {}

    def qualified(lt: Type, rt: Type, n: int) -> bool:
        return lt.qualifier.leq(rt.qualifier) and related(lt.body, rt.body, n)

    def branch(lb: Branch, rb: Branch, n: int, covariant: bool) -> bool:
        if len(lb.typarams) != len(rb.typarams):
            return False
        if len(lb.argtypes) != len(rb.argtypes):
            return False
        names = [Var(f"%{n}_{i}") for i in range(len(lb.typarams))]
        lmap = dict(zip(lb.typarams, names))
        rmap = dict(zip(rb.typarams, names))
        for ls, rs in zip(lb.argtypes, rb.argtypes):
            la = Type(ls.qualifier, subst_many(ls.body, lmap))
            ra = Type(rs.qualifier, subst_many(rs.body, rmap))
            ok = qualified(la, ra, n - 1) if covariant else qualified(ra, la, n - 1)
            if not ok:
                return False
        return related(
            subst_many(lb.continuation, lmap), subst_many(rb.continuation, rmap), n - 1
        )

    def related(lt: EndpointType, rt: EndpointType, n: int) -> bool:
        if n == 0:
            return True
        key = (canonical_key(lt), canonical_key(rt), n)
        if key not in memo:
            memo[key] = compare(expose(lt), expose(rt), n)
        return memo[key]

    def compare(lt: EndpointType, rt: EndpointType, n: int) -> bool:
        if isinstance(lt, End) or isinstance(rt, End):
            return isinstance(lt, End) and isinstance(rt, End)
        if isinstance(lt, Var) or isinstance(rt, Var):
            return lt == rt
        if isinstance(lt, ExternalChoice) and isinstance(rt, ExternalChoice):
            return lt.tags <= rt.tags and all(
                branch(b, rt.branch(b.tag), n, True)  # type: ignore[arg-type]
                for b in lt.branches
            )
        if isinstance(lt, InternalChoice) and isinstance(rt, InternalChoice):
            return rt.tags <= lt.tags and all(
                branch(lt.branch(b.tag), b, n, False)  # type: ignore[arg-type]
                for b in rt.branches
            )
        return False

    return related(left, right, fuel)


def encode_function(argument: Type, result: Type) -> Type:
    """Unrestricted endpoint type of a function service ``argument -> result``.

    ``un rec f.!Invoke(lin ?Arg(argument).!Res(result).end).f``
    """
    call = ExternalChoice(
        (
            Branch(
                "Arg",
                argtypes=(argument,),
                continuation=InternalChoice(
                    (Branch("Res", argtypes=(result,), continuation=End()),)
                ),
            ),
        )
    )
    var = fresh_name("f")
    return un(
        Rec(
            var,
            InternalChoice(
                (Branch("Invoke", argtypes=(lin(call),), continuation=Var(var)),)
            ),
        )
    )
