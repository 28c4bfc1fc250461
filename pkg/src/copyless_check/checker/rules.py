"""Algorithmic typing of processes.

The checker is syntax directed: every process constructor has exactly one
rule and subtyping is only consulted where a rule compares an argument type
against a declared one. Errors carry the path of the offending subterm, with
segments such as ``open(a,b)``, ``a!m``, ``a?m``, ``par.L`` or ``rec X``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import AbstractSet, Optional

from copyless_check.checker.environment import (
    ProcVarEnv,
    RecSnapshot,
    TypeEnv,
    env_add,
    split_env,
)
from copyless_check.checker.errors import ErrorKind, ProcessTypeError
from copyless_check.core.duality import DualityError, dual, is_dual_pair
from copyless_check.core.process import (
    Choice,
    Close,
    Idle,
    Name,
    OpenLinear,
    OpenUnrestricted,
    Par,
    Param,
    Process,
    ProcVar,
    Receive,
    ReceiveBranch,
    RecProc,
    Send,
    TypeBinding,
    analyze_process_names,
    rename_name,
    subst_process,
)
from copyless_check.core.subtyping import equivalent, subtype_qualified
from copyless_check.core.types import (
    End,
    ExternalChoice,
    InternalChoice,
    Type,
    Var,
    expose,
    fresh_name,
    lin,
    subst_many,
    subst_qualified,
    un,
)
from copyless_check.core.weights import weight
from copyless_check.core.wellformed import check_qualified, check_wf
from copyless_check.frontend.render import render_type

Path = tuple[str, ...]


@dataclass
class CheckResult:
    """Outcome of ``typecheck``."""

    accepted: bool
    error: Optional[ProcessTypeError] = None
    warnings: list[str] = field(default_factory=list)


def typecheck(
    sigma: ProcVarEnv,
    delta: AbstractSet[str],
    gamma: TypeEnv,
    process: Process,
) -> CheckResult:
    """Decide ``sigma; delta; gamma |- process``."""
    checker = ProcessChecker()
    try:
        checker.check(sigma, frozenset(delta), gamma, process)
    except ProcessTypeError as e:
        return CheckResult(False, e, checker.warnings)
    return CheckResult(True, None, checker.warnings)


def required_names(process: Process, sigma: ProcVarEnv) -> frozenset[Name]:
    """Free names of ``process`` plus the linear names its process variables expect."""
    analysis = analyze_process_names(process)
    names = set(analysis.fn)
    for var in analysis.fpv:
        if var in sigma:
            names |= sigma[var].env.linear_names
    return frozenset(names)


def _fail(kind: ErrorKind, message: str, path: Path) -> ProcessTypeError:
    return ProcessTypeError(kind, message, path)


class ProcessChecker:
    """Walks a process term, threading the three contexts of the judgment."""

    def __init__(self) -> None:
        self.warnings: list[str] = []

    def check(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        process: Process,
    ) -> None:
        root: Path = ("main",)
        for name, t in gamma.items():
            if not check_qualified(delta, t):
                raise _fail(
                    ErrorKind.NOT_WELL_FORMED,
                    f"the type of {name} is not well formed",
                    root,
                )
        self._check(sigma, delta, gamma, process, root)

    def _check(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: Process,
        path: Path,
    ) -> None:
        try:
            self._dispatch(sigma, delta, gamma, p, path)
        except ProcessTypeError as e:
            raise e.at(path) from None

    def _dispatch(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: Process,
        path: Path,
    ) -> None:
        if isinstance(p, Idle):
            self._require_unrestricted(gamma, path)
        elif isinstance(p, Close):
            self._close(gamma, p, path)
        elif isinstance(p, OpenLinear):
            self._open_linear(sigma, delta, gamma, p, path)
        elif isinstance(p, OpenUnrestricted):
            self._open_unrestricted(sigma, delta, gamma, p, path)
        elif isinstance(p, Send):
            self._send(sigma, delta, gamma, p, path)
        elif isinstance(p, Receive):
            self._receive(sigma, delta, gamma, p, path)
        elif isinstance(p, Choice):
            self._check(sigma, delta, gamma, p.left, path + ("choice.L",))
            self._check(sigma, delta, gamma, p.right, path + ("choice.R",))
        elif isinstance(p, Par):
            self._par(sigma, delta, gamma, p, path)
        elif isinstance(p, RecProc):
            self._rec(sigma, delta, gamma, p, path)
        elif isinstance(p, ProcVar):
            self._var(sigma, delta, gamma, p, path)
        else:
            raise TypeError(f"not a process: {p!r}")

    # --- terminal processes ------------------------------------------------

    def _require_unrestricted(self, gamma: TypeEnv, path: Path) -> None:
        left = sorted(str(n) for n in gamma.linear_names)
        if left:
            raise _fail(
                ErrorKind.LINEAR_UNUSED,
                f"linear names left unused: {', '.join(left)}",
                path,
            )

    def _lookup(self, gamma: TypeEnv, name: Name, path: Path) -> Type:
        if name not in gamma:
            raise _fail(ErrorKind.UNKNOWN_NAME, f"{name} is not in scope", path)
        return gamma[name]

    def _close(self, gamma: TypeEnv, p: Close, path: Path) -> None:
        path = path + (f"close({p.subject})",)
        t = self._lookup(gamma, p.subject, path)
        if not t.is_linear:
            raise _fail(
                ErrorKind.QUALIFIER_MISMATCH,
                f"only linear endpoints can be closed, {p.subject} is un",
                path,
            )
        if not isinstance(expose(t.body), End):
            raise _fail(
                ErrorKind.LINEAR_UNUSED,
                f"{p.subject} is closed before its protocol ends: "
                f"{render_type(t.body)}",
                path,
            )
        self._require_unrestricted(gamma.without(p.subject), path)

    # --- channel creation ---------------------------------------------------

    def _open_linear(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: OpenLinear,
        path: Path,
    ) -> None:
        path = path + (f"open({p.left},{p.right})",)
        left, body = _fresh_location(p.left, p.body, gamma)
        right, body = _fresh_location(p.right, body, gamma)
        for t in (p.left_type, p.right_type):
            if not check_wf(delta, frozenset(), t):
                raise _fail(
                    ErrorKind.NOT_WELL_FORMED,
                    f"{render_type(t)} is not well formed",
                    path,
                )
        if not is_dual_pair(p.left_type, p.right_type):
            raise _fail(
                ErrorKind.DUAL_MISMATCH,
                f"{render_type(p.left_type)} and {render_type(p.right_type)} "
                "are not dual",
                path,
            )
        inner = env_add(gamma, Name.linear(left), lin(p.left_type))
        inner = env_add(inner, Name.linear(right), lin(p.right_type))
        self._check(sigma, delta, inner, body, path)

    def _open_unrestricted(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: OpenUnrestricted,
        path: Path,
    ) -> None:
        path = path + (f"open({p.name})",)
        name, body = _fresh_location(p.name, p.body, gamma)
        if not check_wf(delta, frozenset(), p.type):
            raise _fail(
                ErrorKind.NOT_WELL_FORMED,
                f"{render_type(p.type)} is not well formed",
                path,
            )
        try:
            writer = dual(p.type)
        except DualityError as e:
            raise _fail(ErrorKind.NOT_WELL_FORMED, str(e), path) from None
        if not check_qualified(delta, un(writer)):
            raise _fail(
                ErrorKind.QUALIFIER_MISMATCH,
                f"the dual {render_type(writer)} cannot be unrestricted: it must "
                "be a recursive send-only choice",
                path,
            )
        inner = env_add(gamma, Name.linear(name), lin(p.type))
        inner = env_add(inner, Name.shared(name), un(writer))
        self._check(sigma, delta, inner, body, path)

    # --- communication ------------------------------------------------------

    def _send(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: Send,
        path: Path,
    ) -> None:
        path = path + (f"{p.subject}!{p.tag}",)
        t = self._lookup(gamma, p.subject, path)
        exposed = expose(t.body)
        if not isinstance(exposed, InternalChoice):
            raise _fail(
                ErrorKind.NO_SUCH_TAG,
                f"{p.subject} cannot send: {render_type(t.body)}",
                path,
            )
        branch = exposed.branch(p.tag)
        if branch is None:
            raise _fail(
                ErrorKind.NO_SUCH_TAG,
                f"{p.subject} offers no message {p.tag}",
                path,
            )
        if len(branch.typarams) != len(p.tyargs) or len(branch.argtypes) != len(
            p.args
        ):
            raise _fail(
                ErrorKind.ARG_SUBTYPE_FAIL,
                f"{p.tag} expects {len(branch.typarams)} type and "
                f"{len(branch.argtypes)} value arguments",
                path,
            )
        for s in p.tyargs:
            if not check_wf(delta, frozenset(), s):
                raise _fail(
                    ErrorKind.NOT_WELL_FORMED,
                    f"type argument {render_type(s)} is not well formed",
                    path,
                )
            if weight(delta, s).is_infinite:
                raise _fail(
                    ErrorKind.WEIGHT_INFINITE,
                    f"type argument {render_type(s)} has infinite weight",
                    path,
                )
        mapping = dict(zip(branch.typarams, p.tyargs))
        consumed: set[Name] = set()
        for arg, declared in zip(p.args, branch.argtypes):
            actual = self._lookup(gamma, arg, path)
            if not subtype_qualified(actual, subst_qualified(declared, mapping)):
                raise _fail(
                    ErrorKind.ARG_SUBTYPE_FAIL,
                    f"{arg} does not fit argument type "
                    f"{render_type(subst_many(declared.body, mapping))}",
                    path,
                )
            if weight(delta, actual).is_infinite:
                raise _fail(
                    ErrorKind.WEIGHT_INFINITE,
                    f"{arg} has an infinite-weight type and cannot be sent",
                    path,
                )
            if actual.is_linear:
                if arg == p.subject or arg in consumed:
                    raise _fail(
                        ErrorKind.ENV_CONFLICT,
                        f"linear {arg} is used twice by one send",
                        path,
                    )
                consumed.add(arg)
        continuation = subst_many(branch.continuation, mapping)
        rest = gamma.without(*consumed)
        if t.is_linear:
            rest = rest.updated(p.subject, lin(continuation))
        elif not equivalent(continuation, t.body):
            raise _fail(
                ErrorKind.QUALIFIER_MISMATCH,
                f"unrestricted {p.subject} must keep its type after sending",
                path,
            )
        self._check(sigma, delta, rest, p.body, path)

    def _receive(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: Receive,
        path: Path,
    ) -> None:
        t = self._lookup(gamma, p.subject, path + (f"{p.subject}?",))
        if not t.is_linear:
            raise _fail(
                ErrorKind.QUALIFIER_MISMATCH,
                f"cannot receive on unrestricted {p.subject}",
                path + (f"{p.subject}?",),
            )
        exposed = expose(t.body)
        if not isinstance(exposed, ExternalChoice):
            raise _fail(
                ErrorKind.NO_SUCH_TAG,
                f"{p.subject} cannot receive: {render_type(t.body)}",
                path + (f"{p.subject}?",),
            )
        for tb in exposed.branches:
            if p.branch(tb.tag) is None:
                raise _fail(
                    ErrorKind.NO_SUCH_TAG,
                    f"no receive branch handles message {tb.tag} on {p.subject}",
                    path + (f"{p.subject}?",),
                )
        for extra in sorted({b.tag for b in p.branches} - exposed.tags):
            self.warnings.append(
                f"{'/'.join(path)}: branch {extra} on {p.subject} is never "
                "selected by its type"
            )
        for tb in exposed.branches:
            pb = p.branch(tb.tag)
            assert pb is not None
            here = path + (f"{p.subject}?{tb.tag}",)
            if len(pb.typarams) != len(tb.typarams) or len(pb.params) != len(
                tb.argtypes
            ):
                raise _fail(
                    ErrorKind.ARG_SUBTYPE_FAIL,
                    f"{tb.tag} carries {len(tb.typarams)} type and "
                    f"{len(tb.argtypes)} value arguments",
                    here,
                )
            pb = _fresh_branch(pb, delta, gamma)
            binders = {a: Var(b) for a, b in zip(tb.typarams, pb.typarams)}
            inner_delta = delta | set(pb.typarams)
            inner = gamma.updated(
                p.subject, lin(subst_many(tb.continuation, binders))
            )
            for param, declared in zip(pb.params, tb.argtypes):
                if not check_qualified(inner_delta, param.type):
                    raise _fail(
                        ErrorKind.NOT_WELL_FORMED,
                        f"the type of parameter {param.var} is not well formed",
                        here,
                    )
                received = subst_qualified(declared, binders)
                if not subtype_qualified(received, param.type):
                    raise _fail(
                        ErrorKind.ARG_SUBTYPE_FAIL,
                        f"parameter {param.var} is not a supertype of the "
                        "received argument",
                        here,
                    )
                try:
                    inner = env_add(inner, Name.variable(param.var), param.type)
                except ProcessTypeError as e:
                    raise e.at(here) from None
            self._check(sigma, inner_delta, inner, pb.body, here)

    # --- structure ----------------------------------------------------------

    def _par(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: Par,
        path: Path,
    ) -> None:
        left, right = split_env(
            gamma, required_names(p.left, sigma), required_names(p.right, sigma)
        )
        self._check(sigma, delta, left, p.left, path + ("par.L",))
        self._check(sigma, delta, right, p.right, path + ("par.R",))

    def _rec(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: RecProc,
        path: Path,
    ) -> None:
        path = path + (f"rec {p.var}",)
        outer = {x: s for x, s in sigma.items() if x != p.var}
        unused = gamma.linear_names - analyze_process_names(p.body).fn
        if unused:
            raise _fail(
                ErrorKind.LINEAR_UNUSED,
                "linear names not used by the recursive body: "
                + ", ".join(sorted(map(str, unused))),
                path,
            )
        inner = {**outer, p.var: RecSnapshot(delta, gamma)}
        self._check(inner, delta, gamma, p.body, path)

    def _var(
        self,
        sigma: ProcVarEnv,
        delta: frozenset[str],
        gamma: TypeEnv,
        p: ProcVar,
        path: Path,
    ) -> None:
        path = path + (p.name,)
        if p.name not in sigma:
            raise _fail(
                ErrorKind.UNKNOWN_NAME, f"process variable {p.name} is unbound", path
            )
        snapshot = sigma[p.name]
        if not snapshot.delta <= delta:
            raise _fail(
                ErrorKind.REC_VAR_MISMATCH,
                "type variables of the recursion are out of scope: "
                + ", ".join(sorted(snapshot.delta - delta)),
                path,
            )
        for name, expected in snapshot.env.items():
            actual = gamma.get(name)
            if (
                actual is None
                or actual.qualifier is not expected.qualifier
                or not equivalent(actual.body, expected.body)
            ):
                raise _fail(
                    ErrorKind.REC_VAR_MISMATCH,
                    f"{name} does not have the type it had when {p.name} was "
                    "entered",
                    path,
                )
        extra = sorted(str(n) for n in gamma.linear_names if n not in snapshot.env)
        if extra:
            raise _fail(
                ErrorKind.REC_VAR_MISMATCH,
                f"{p.name} does not expect linear {', '.join(extra)}",
                path,
            )


def _fresh_location(
    ident: str, body: Process, gamma: TypeEnv
) -> tuple[str, Process]:
    """Rename a channel binder that would shadow a name already in ``gamma``."""
    if Name.linear(ident) not in gamma and Name.shared(ident) not in gamma:
        return ident, body
    new = fresh_name(ident)
    body = rename_name(body, Name.linear(ident), Name.linear(new))
    body = rename_name(body, Name.shared(ident), Name.shared(new))
    return new, body


def _fresh_branch(
    branch: ReceiveBranch, delta: frozenset[str], gamma: TypeEnv
) -> ReceiveBranch:
    """Rename binders of a receive branch that clash with the contexts."""
    typarams = list(branch.typarams)
    params = list(branch.params)
    body = branch.body
    for i, alpha in enumerate(typarams):
        if alpha in delta:
            typarams[i] = fresh_name(alpha)
            rename = {alpha: Var(typarams[i])}
            params = [Param(q.var, subst_qualified(q.type, rename)) for q in params]
            body = subst_process(body, TypeBinding(alpha, Var(typarams[i])))
    for i, q in enumerate(params):
        if Name.variable(q.var) in gamma:
            new = fresh_name(q.var)
            params[i] = Param(new, q.type)
            body = rename_name(body, Name.variable(q.var), Name.variable(new))
    return ReceiveBranch(branch.tag, tuple(typarams), tuple(params), body)
