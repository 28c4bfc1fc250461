"""Process terms, name bookkeeping and capture-avoiding process substitution."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from copyless_check.core.types import (
    EndpointType,
    Type,
    Var,
    bound_type_vars,
    free_type_vars,
    fresh_name,
    subst_many,
    subst_qualified,
)


class NameKind(str, Enum):
    """Namespace of a name: heap locations versus program variables."""

    LINEAR = "linear"
    SHARED = "shared"
    VARIABLE = "variable"


@dataclass(frozen=True, order=True)
class Name:
    """A linear location ``a``, the unrestricted pointer ``*a`` or a variable."""

    kind: NameKind
    ident: str

    @classmethod
    def linear(cls, ident: str) -> "Name":
        return cls(NameKind.LINEAR, ident)

    @classmethod
    def shared(cls, ident: str) -> "Name":
        return cls(NameKind.SHARED, ident)

    @classmethod
    def variable(cls, ident: str) -> "Name":
        return cls(NameKind.VARIABLE, ident)

    @property
    def is_location(self) -> bool:
        return self.kind is not NameKind.VARIABLE

    def __str__(self) -> str:
        return f"*{self.ident}" if self.kind is NameKind.SHARED else self.ident


@dataclass(frozen=True)
class Idle:
    """The terminated process ``0``."""


@dataclass(frozen=True)
class Close:
    subject: Name


@dataclass(frozen=True)
class OpenLinear:
    """``open(a: T, b: S).body`` creates a pair of peer endpoints."""

    left: str
    left_type: EndpointType
    right: str
    right_type: EndpointType
    body: "Process"


@dataclass(frozen=True)
class OpenUnrestricted:
    """``open(a: T).body`` binds ``a`` and the unrestricted pointer ``*a``."""

    name: str
    type: EndpointType
    body: "Process"


@dataclass(frozen=True)
class Send:
    subject: Name
    tag: str
    tyargs: tuple[EndpointType, ...]
    args: tuple[Name, ...]
    body: "Process"


@dataclass(frozen=True)
class Param:
    var: str
    type: Type


@dataclass(frozen=True)
class ReceiveBranch:
    tag: str
    typarams: tuple[str, ...]
    params: tuple[Param, ...]
    body: "Process"

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(p.var for p in self.params)


@dataclass(frozen=True)
class Receive:
    """Receive sum: every branch waits on the same subject."""

    subject: Name
    branches: tuple[ReceiveBranch, ...]

    def __post_init__(self) -> None:
        if not self.branches:
            raise ValueError("a receive needs at least one branch")
        tags = [b.tag for b in self.branches]
        if len(set(tags)) != len(tags):
            raise ValueError(f"duplicate tags in receive: {tags}")

    def branch(self, tag: str) -> ReceiveBranch | None:
        for b in self.branches:
            if b.tag == tag:
                return b
        return None


@dataclass(frozen=True)
class Choice:
    """Internal nondeterministic choice ``P (+) Q``."""

    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class ProcVar:
    name: str


@dataclass(frozen=True)
class RecProc:
    var: str
    body: "Process"


Process = Union[
    Idle,
    Close,
    OpenLinear,
    OpenUnrestricted,
    Send,
    Receive,
    Choice,
    Par,
    ProcVar,
    RecProc,
]


@dataclass(frozen=True)
class NameAnalysis:
    """Free and bound names, type variables and process variables."""

    fn: frozenset[Name] = frozenset()
    bn: frozenset[Name] = frozenset()
    ftv: frozenset[str] = frozenset()
    btv: frozenset[str] = frozenset()
    fpv: frozenset[str] = field(default=frozenset())

    def __or__(self, other: "NameAnalysis") -> "NameAnalysis":
        return NameAnalysis(
            self.fn | other.fn,
            self.bn | other.bn,
            self.ftv | other.ftv,
            self.btv | other.btv,
            self.fpv | other.fpv,
        )


def _types_analysis(*types: EndpointType | Type) -> NameAnalysis:
    ftv: frozenset[str] = frozenset()
    btv: frozenset[str] = frozenset()
    for t in types:
        ftv |= free_type_vars(t)
        btv |= bound_type_vars(t)
    return NameAnalysis(ftv=ftv, btv=btv)


def analyze_process_names(process: Process) -> NameAnalysis:
    """Compute fn, bn, ftv, btv and the free process variables of a term."""
    if isinstance(process, Idle):
        return NameAnalysis()
    if isinstance(process, Close):
        return NameAnalysis(fn=frozenset({process.subject}))
    if isinstance(process, OpenLinear):
        body = analyze_process_names(process.body)
        bound = frozenset({Name.linear(process.left), Name.linear(process.right)})
        types = _types_analysis(process.left_type, process.right_type)
        return NameAnalysis(
            body.fn - bound, body.bn | bound, body.ftv, body.btv, body.fpv
        ) | types
    if isinstance(process, OpenUnrestricted):
        body = analyze_process_names(process.body)
        bound = frozenset({Name.linear(process.name), Name.shared(process.name)})
        return NameAnalysis(
            body.fn - bound, body.bn | bound, body.ftv, body.btv, body.fpv
        ) | _types_analysis(process.type)
    if isinstance(process, Send):
        body = analyze_process_names(process.body)
        used = frozenset({process.subject, *process.args})
        return body | NameAnalysis(fn=used) | _types_analysis(*process.tyargs)
    if isinstance(process, Receive):
        result = NameAnalysis(fn=frozenset({process.subject}))
        for b in process.branches:
            body = analyze_process_names(b.body)
            params = frozenset(Name.variable(v) for v in b.variables)
            types = _types_analysis(*(p.type for p in b.params))
            inner = body | types
            result = result | NameAnalysis(
                fn=body.fn - params,
                bn=body.bn | params,
                ftv=inner.ftv - set(b.typarams),
                btv=inner.btv | set(b.typarams),
                fpv=body.fpv,
            )
        return result
    if isinstance(process, (Choice, Par)):
        return analyze_process_names(process.left) | analyze_process_names(
            process.right
        )
    if isinstance(process, ProcVar):
        return NameAnalysis(fpv=frozenset({process.name}))
    if isinstance(process, RecProc):
        body = analyze_process_names(process.body)
        return NameAnalysis(
            body.fn, body.bn, body.ftv, body.btv, body.fpv - {process.var}
        )
    raise TypeError(f"not a process: {process!r}")


def free_names(process: Process) -> frozenset[Name]:
    return analyze_process_names(process).fn


# --- substitution ---------------------------------------------------------


@dataclass(frozen=True)
class ValueBinding:
    """Replace free occurrences of the name ``target`` by ``value``."""

    target: Name
    value: Name


@dataclass(frozen=True)
class TypeBinding:
    """Replace the free type variable ``var`` by ``image``."""

    var: str
    image: EndpointType


@dataclass(frozen=True)
class ProcessBinding:
    """Replace the free process variable ``var`` by ``process``."""

    var: str
    process: Process


Binding = Union[ValueBinding, TypeBinding, ProcessBinding]


def subst_process(process: Process, binding: Binding) -> Process:
    """Capture-avoiding substitution of a value, a type or a process."""
    return _Substitution(binding).apply(process)


def rename_name(process: Process, old: Name, new: Name) -> Process:
    return subst_process(process, ValueBinding(old, new))


class _Substitution:
    def __init__(self, binding: Binding):
        self.binding = binding
        if isinstance(binding, ValueBinding):
            self.names = frozenset({binding.value})
            self.tyvars: frozenset[str] = frozenset()
            self.procvars: frozenset[str] = frozenset()
        elif isinstance(binding, TypeBinding):
            self.names = frozenset()
            self.tyvars = free_type_vars(binding.image)
            self.procvars = frozenset()
        else:
            payload = analyze_process_names(binding.process)
            self.names = payload.fn
            self.tyvars = payload.ftv
            self.procvars = payload.fpv

    def name(self, n: Name) -> Name:
        b = self.binding
        if isinstance(b, ValueBinding) and n == b.target:
            return b.value
        return n

    def etype(self, t: EndpointType) -> EndpointType:
        b = self.binding
        if isinstance(b, TypeBinding):
            return subst_many(t, {b.var: b.image})
        return t

    def qtype(self, t: Type) -> Type:
        b = self.binding
        if isinstance(b, TypeBinding):
            return subst_qualified(t, {b.var: b.image})
        return t

    def shadows_name(self, bound: frozenset[Name]) -> bool:
        b = self.binding
        return isinstance(b, ValueBinding) and b.target in bound

    def apply(self, p: Process) -> Process:
        if isinstance(p, Idle):
            return p
        if isinstance(p, Close):
            return Close(self.name(p.subject))
        if isinstance(p, OpenLinear):
            return self._open_linear(p)
        if isinstance(p, OpenUnrestricted):
            return self._open_unrestricted(p)
        if isinstance(p, Send):
            return Send(
                self.name(p.subject),
                p.tag,
                tuple(self.etype(t) for t in p.tyargs),
                tuple(self.name(a) for a in p.args),
                self.apply(p.body),
            )
        if isinstance(p, Receive):
            return Receive(
                self.name(p.subject), tuple(self._branch(b) for b in p.branches)
            )
        if isinstance(p, Choice):
            return Choice(self.apply(p.left), self.apply(p.right))
        if isinstance(p, Par):
            return Par(self.apply(p.left), self.apply(p.right))
        if isinstance(p, ProcVar):
            b = self.binding
            if isinstance(b, ProcessBinding) and b.var == p.name:
                return b.process
            return p
        if isinstance(p, RecProc):
            b = self.binding
            if isinstance(b, ProcessBinding) and b.var == p.var:
                return p
            var, body = p.var, p.body
            if var in self.procvars:
                var = fresh_name(var)
                body = subst_process(body, ProcessBinding(p.var, ProcVar(var)))
            return RecProc(var, self.apply(body))
        raise TypeError(f"not a process: {p!r}")

    def _fresh_location(self, ident: str, body: Process) -> tuple[str, Process]:
        taken = {n.ident for n in self.names}
        if ident not in taken:
            return ident, body
        new = fresh_name(ident)
        body = rename_name(body, Name.linear(ident), Name.linear(new))
        body = rename_name(body, Name.shared(ident), Name.shared(new))
        return new, body

    def _open_linear(self, p: OpenLinear) -> Process:
        left_type, right_type = self.etype(p.left_type), self.etype(p.right_type)
        bound = frozenset({Name.linear(p.left), Name.linear(p.right)})
        if self.shadows_name(bound):
            return OpenLinear(p.left, left_type, p.right, right_type, p.body)
        left, body = self._fresh_location(p.left, p.body)
        right, body = self._fresh_location(p.right, body)
        return OpenLinear(left, left_type, right, right_type, self.apply(body))

    def _open_unrestricted(self, p: OpenUnrestricted) -> Process:
        ty = self.etype(p.type)
        bound = frozenset({Name.linear(p.name), Name.shared(p.name)})
        if self.shadows_name(bound):
            return OpenUnrestricted(p.name, ty, p.body)
        name, body = self._fresh_location(p.name, p.body)
        return OpenUnrestricted(name, ty, self.apply(body))

    def _branch(self, branch: ReceiveBranch) -> ReceiveBranch:
        b = self.binding
        typarams = list(branch.typarams)
        params = list(branch.params)
        body = branch.body
        if isinstance(b, TypeBinding) and b.var in typarams:
            return branch
        bound = frozenset(Name.variable(v) for v in branch.variables)
        if self.shadows_name(bound):
            return branch
        for i, alpha in enumerate(typarams):
            if alpha in self.tyvars:
                typarams[i] = fresh_name(alpha)
                rename = {alpha: Var(typarams[i])}
                params = [
                    Param(q.var, subst_qualified(q.type, rename)) for q in params
                ]
                body = subst_process(body, TypeBinding(alpha, Var(typarams[i])))
        clashing = {n.ident for n in self.names if n.kind is NameKind.VARIABLE}
        for i, q in enumerate(params):
            if q.var in clashing:
                new = fresh_name(q.var)
                params[i] = Param(new, q.type)
                body = rename_name(body, Name.variable(q.var), Name.variable(new))
        return ReceiveBranch(
            branch.tag,
            tuple(typarams),
            tuple(Param(q.var, self.qtype(q.type)) for q in params),
            self.apply(body),
        )
