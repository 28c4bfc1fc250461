"""Endpoint types, qualified types and the substitution operators over them.

Terms are immutable frozen dataclasses. Type variables are plain strings;
binders introduced by ``rec`` and by message type parameters are renamed on
demand with primed names (``alpha'12``) drawn from a process-wide counter, so
freshly generated names never collide with names written in source text.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Hashable, Iterator, Mapping, Optional, Union


class TypeSyntaxError(ValueError):
    """Raised when a type term violates a structural invariant."""


class Qualifier(str, Enum):
    """Ownership qualifier of a type."""

    LIN = "lin"
    UN = "un"

    def leq(self, other: "Qualifier") -> bool:
        """Preorder with un <= lin."""
        return self is Qualifier.UN or other is Qualifier.LIN


@dataclass(frozen=True)
class End:
    """The terminated protocol."""


@dataclass(frozen=True)
class Var:
    """A type variable occurrence."""

    name: str


@dataclass(frozen=True)
class Branch:
    """One message alternative of a choice: tag, type parameters, arguments."""

    tag: str
    typarams: tuple[str, ...] = ()
    argtypes: tuple["Type", ...] = ()
    continuation: "EndpointType" = End()

    def __post_init__(self) -> None:
        if len(set(self.typarams)) != len(self.typarams):
            raise TypeSyntaxError(
                f"duplicate type parameters in branch {self.tag}: {self.typarams}"
            )


@dataclass(frozen=True)
class ChoiceType:
    """Common shape of internal and external choices."""

    branches: tuple[Branch, ...]

    def __post_init__(self) -> None:
        if not self.branches:
            raise TypeSyntaxError("a choice needs at least one branch")
        tags = [b.tag for b in self.branches]
        if len(set(tags)) != len(tags):
            raise TypeSyntaxError(f"duplicate tags in choice: {tags}")

    @property
    def tags(self) -> frozenset[str]:
        return frozenset(b.tag for b in self.branches)

    def branch(self, tag: str) -> Optional[Branch]:
        """Return the branch carrying ``tag``, if any."""
        for b in self.branches:
            if b.tag == tag:
                return b
        return None


@dataclass(frozen=True)
class InternalChoice(ChoiceType):
    """Send side: the owner picks one of the tags."""


@dataclass(frozen=True)
class ExternalChoice(ChoiceType):
    """Receive side: the owner must handle every tag."""


@dataclass(frozen=True)
class Rec:
    """Recursive endpoint type ``rec var.body``."""

    var: str
    body: "EndpointType"

    def __post_init__(self) -> None:
        if not _guarded(self.var, self.body):
            raise TypeSyntaxError(
                f"rec {self.var} is not contractive: the binder is not guarded "
                "by a prefix"
            )


EndpointType = Union[End, Var, Rec, InternalChoice, ExternalChoice]


@dataclass(frozen=True)
class Type:
    """A qualified endpoint type."""

    qualifier: Qualifier
    body: EndpointType

    @property
    def is_linear(self) -> bool:
        return self.qualifier is Qualifier.LIN


def lin(body: EndpointType) -> Type:
    return Type(Qualifier.LIN, body)


def un(body: EndpointType) -> Type:
    return Type(Qualifier.UN, body)


def _guarded(var: str, body: EndpointType) -> bool:
    if isinstance(body, Var):
        return body.name != var
    if isinstance(body, Rec):
        return body.var == var or _guarded(var, body.body)
    return True


# --- fresh names ----------------------------------------------------------

_fresh_counter = itertools.count(1)


def fresh_name(hint: str) -> str:
    """Return a globally fresh identifier derived from ``hint``."""
    root = hint.split("'", 1)[0] or "v"
    return f"{root}'{next(_fresh_counter)}"


# --- variables ------------------------------------------------------------


@lru_cache(maxsize=65536)
def free_type_vars(term: Union[EndpointType, Type]) -> frozenset[str]:
    """Free type variables of an endpoint type or qualified type."""
    if isinstance(term, Type):
        return free_type_vars(term.body)
    if isinstance(term, End):
        return frozenset()
    if isinstance(term, Var):
        return frozenset({term.name})
    if isinstance(term, Rec):
        return free_type_vars(term.body) - {term.var}
    found: set[str] = set()
    for b in term.branches:
        inner = set().union(*(free_type_vars(t) for t in b.argtypes))
        inner |= free_type_vars(b.continuation)
        found |= inner - set(b.typarams)
    return frozenset(found)


def bound_type_vars(term: Union[EndpointType, Type]) -> frozenset[str]:
    """Every binder occurring in the term, recursion binders included."""
    if isinstance(term, Type):
        return bound_type_vars(term.body)
    if isinstance(term, (End, Var)):
        return frozenset()
    if isinstance(term, Rec):
        return bound_type_vars(term.body) | {term.var}
    found: set[str] = set()
    for b in term.branches:
        found.update(b.typarams)
        for t in b.argtypes:
            found |= bound_type_vars(t)
        found |= bound_type_vars(b.continuation)
    return frozenset(found)


def analyze_type_vars(
    term: Union[EndpointType, Type]
) -> tuple[frozenset[str], frozenset[str]]:
    """Return ``(ftv, btv)`` of a type."""
    return free_type_vars(term), bound_type_vars(term)


def iter_subterms(term: EndpointType) -> Iterator[EndpointType]:
    """Yield every endpoint subterm, argument bodies included."""
    yield term
    if isinstance(term, Rec):
        yield from iter_subterms(term.body)
    elif isinstance(term, ChoiceType):
        for b in term.branches:
            for t in b.argtypes:
                yield from iter_subterms(t.body)
            yield from iter_subterms(b.continuation)


def size(term: Union[EndpointType, Type]) -> int:
    """Number of endpoint nodes in the term."""
    if isinstance(term, Type):
        return size(term.body)
    return sum(1 for _ in iter_subterms(term))


# --- substitution ---------------------------------------------------------


def subst_many(
    term: EndpointType, mapping: Mapping[str, EndpointType], inner: bool = False
) -> EndpointType:
    """Simultaneous capture-avoiding substitution.

    With ``inner`` set only occurrences inside message arguments are
    replaced; top-level occurrences along continuations are left alone.
    """
    live = {k: v for k, v in mapping.items() if k in free_type_vars(term)}
    if not live:
        return term
    return _subst(term, live, inner)


def _subst(
    term: EndpointType, mapping: Mapping[str, EndpointType], inner: bool
) -> EndpointType:
    if isinstance(term, End):
        return term
    if isinstance(term, Var):
        if inner:
            return term
        return mapping.get(term.name, term)
    if isinstance(term, Rec):
        live = {
            k: v
            for k, v in mapping.items()
            if k != term.var and k in free_type_vars(term.body)
        }
        if not live:
            return term
        var, body = term.var, term.body
        if var in _image_vars(live):
            var = fresh_name(var)
            body = _subst(body, {term.var: Var(var)}, False)
        return Rec(var, _subst(body, live, inner))
    return type(term)(tuple(_subst_branch(b, mapping, inner) for b in term.branches))


def _subst_branch(
    branch: Branch, mapping: Mapping[str, EndpointType], inner: bool
) -> Branch:
    scope = set().union(*(free_type_vars(t) for t in branch.argtypes))
    scope |= free_type_vars(branch.continuation)
    live = {
        k: v for k, v in mapping.items() if k not in branch.typarams and k in scope
    }
    if not live:
        return branch
    typarams = list(branch.typarams)
    argtypes = branch.argtypes
    continuation = branch.continuation
    clashing = _image_vars(live)
    renaming: dict[str, EndpointType] = {}
    for i, param in enumerate(typarams):
        if param in clashing:
            typarams[i] = fresh_name(param)
            renaming[param] = Var(typarams[i])
    if renaming:
        argtypes = tuple(
            Type(t.qualifier, _subst(t.body, renaming, False)) for t in argtypes
        )
        continuation = _subst(continuation, renaming, False)
    argtypes = tuple(
        Type(t.qualifier, subst_many(t.body, live, False)) for t in argtypes
    )
    continuation = subst_many(continuation, live, inner)
    return Branch(branch.tag, tuple(typarams), argtypes, continuation)


def _image_vars(mapping: Mapping[str, EndpointType]) -> frozenset[str]:
    return frozenset().union(*(free_type_vars(v) for v in mapping.values()))


def subst_type(term: EndpointType, image: EndpointType, var: str) -> EndpointType:
    """``term[image/var]``."""
    return subst_many(term, {var: image})


def subst_inner(term: EndpointType, image: EndpointType, var: str) -> EndpointType:
    """Inner substitution: replace ``var`` only within message arguments."""
    return subst_many(term, {var: image}, inner=True)


def subst_qualified(t: Type, mapping: Mapping[str, EndpointType]) -> Type:
    return Type(t.qualifier, subst_many(t.body, mapping))


def unfold(term: EndpointType) -> EndpointType:
    """One unfolding of a recursive type.

    Raises:
        TypeSyntaxError: If ``term`` is not a ``rec``.
    """
    if not isinstance(term, Rec):
        raise TypeSyntaxError(f"cannot unfold a non-recursive type: {term!r}")
    return subst_type(term.body, term, term.var)


def expose(term: EndpointType) -> EndpointType:
    """Unfold until the head is not a ``rec``; terminates by contractivity."""
    while isinstance(term, Rec):
        term = unfold(term)
    return term


def freshen(term: EndpointType) -> EndpointType:
    """Rename every binder to a globally fresh name."""
    if isinstance(term, (End, Var)):
        return term
    if isinstance(term, Rec):
        var = fresh_name(term.var)
        return Rec(var, freshen(_subst(term.body, {term.var: Var(var)}, False)))
    branches = []
    for b in term.branches:
        typarams = tuple(fresh_name(p) for p in b.typarams)
        renaming = {p: Var(q) for p, q in zip(b.typarams, typarams)}
        argtypes = tuple(
            Type(t.qualifier, freshen(subst_many(t.body, renaming))) for t in b.argtypes
        )
        continuation = freshen(subst_many(b.continuation, renaming))
        branches.append(Branch(b.tag, typarams, argtypes, continuation))
    return type(term)(tuple(branches))


# --- alpha equivalence ----------------------------------------------------


@lru_cache(maxsize=65536)
def canonical_key(term: Union[EndpointType, Type]) -> Hashable:
    """A hashable key equal for exactly the alpha-variants of ``term``.

    Bound variables become de Bruijn indices and branches are ordered by tag,
    so the key also ignores the textual order of choice branches.
    """
    if isinstance(term, Type):
        return (term.qualifier.value, _key(term.body, ()))
    return _key(term, ())


def _key(term: EndpointType, env: tuple[str, ...]) -> Hashable:
    if isinstance(term, End):
        return ("end",)
    if isinstance(term, Var):
        for depth, name in enumerate(reversed(env)):
            if name == term.name:
                return ("bound", depth)
        return ("free", term.name)
    if isinstance(term, Rec):
        return ("rec", _key(term.body, env + (term.var,)))
    kind = "!" if isinstance(term, InternalChoice) else "?"
    branches = []
    for b in sorted(term.branches, key=lambda b: b.tag):
        scope = env + b.typarams
        args = tuple((t.qualifier.value, _key(t.body, scope)) for t in b.argtypes)
        branches.append((b.tag, len(b.typarams), args, _key(b.continuation, scope)))
    return (kind, tuple(branches))


def alpha_equal(
    left: Union[EndpointType, Type], right: Union[EndpointType, Type]
) -> bool:
    """Structural equality modulo renaming of bound variables (no unfolding)."""
    return canonical_key(left) == canonical_key(right)
