"""Type environments and their composition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Iterable, Iterator, Mapping, Optional

from copyless_check.checker.errors import ErrorKind, ProcessTypeError
from copyless_check.core.process import Name
from copyless_check.core.types import Qualifier, Type, alpha_equal


class TypeEnv(Mapping[Name, Type]):
    """Immutable finite map from names to qualified types."""

    def __init__(self, bindings: Optional[Mapping[Name, Type]] = None):
        self._bindings: dict[Name, Type] = dict(bindings or {})

    def __getitem__(self, name: Name) -> Type:
        return self._bindings[name]

    def __iter__(self) -> Iterator[Name]:
        return iter(sorted(self._bindings))

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, TypeEnv):
            return self._bindings == other._bindings
        if isinstance(other, Mapping):
            return self._bindings == dict(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}: {t!r}" for n, t in self.items())
        return f"TypeEnv({{{inner}}})"

    def restrict(self, qualifier: Qualifier) -> "TypeEnv":
        """The q-restriction of the environment."""
        return TypeEnv(
            {n: t for n, t in self._bindings.items() if t.qualifier is qualifier}
        )

    @property
    def linear_names(self) -> frozenset[Name]:
        return frozenset(n for n, t in self._bindings.items() if t.is_linear)

    def without(self, *names: Name) -> "TypeEnv":
        return TypeEnv({n: t for n, t in self._bindings.items() if n not in names})

    def updated(self, name: Name, t: Type) -> "TypeEnv":
        """Rebind ``name`` unconditionally (used for continuation types)."""
        bindings = dict(self._bindings)
        bindings[name] = t
        return TypeEnv(bindings)


@dataclass(frozen=True)
class RecSnapshot:
    """Contexts captured when a recursive process is entered."""

    delta: frozenset[str]
    env: TypeEnv


ProcVarEnv = Mapping[str, RecSnapshot]


def env_add(env: TypeEnv, name: Name, t: Type) -> TypeEnv:
    """``env + name: t``.

    Raises:
        ProcessTypeError: EnvConflict unless ``name`` is new, or is already
            bound to the same unrestricted type.
    """
    if name not in env:
        return env.updated(name, t)
    current = env[name]
    if (
        current.qualifier is Qualifier.UN
        and t.qualifier is Qualifier.UN
        and alpha_equal(current.body, t.body)
    ):
        return env
    raise ProcessTypeError(
        ErrorKind.ENV_CONFLICT, f"{name} is already bound and cannot be rebound"
    )


def env_merge(first: TypeEnv, second: TypeEnv) -> TypeEnv:
    """Pointwise ``+`` of two environments."""
    result = first
    for name, t in second.items():
        result = env_add(result, name, t)
    return result


def env_from_pairs(pairs: Iterable[tuple[Name, Type]]) -> TypeEnv:
    env = TypeEnv()
    for name, t in pairs:
        env = env_add(env, name, t)
    return env


def split_env(
    env: TypeEnv, left_names: AbstractSet[Name], right_names: AbstractSet[Name]
) -> tuple[TypeEnv, TypeEnv]:
    """Distribute linear bindings by use and copy unrestricted ones to both.

    Raises:
        ProcessTypeError: SplitFail when a linear name is used on both sides or
            on neither.
    """
    left: dict[Name, Type] = {}
    right: dict[Name, Type] = {}
    for name, t in env.items():
        if not t.is_linear:
            left[name] = t
            right[name] = t
            continue
        in_left, in_right = name in left_names, name in right_names
        if in_left and in_right:
            raise ProcessTypeError(
                ErrorKind.SPLIT_FAIL,
                f"linear {name} is used by both sides of a parallel composition",
            )
        if not (in_left or in_right):
            raise ProcessTypeError(
                ErrorKind.SPLIT_FAIL,
                f"linear {name} is used by neither side of a parallel composition",
            )
        (left if in_left else right)[name] = t
    return TypeEnv(left), TypeEnv(right)
