"""Pretty-printing of types and processes in the concrete syntax.

The output always reparses to the same term: qualifiers are explicit,
argument lists are always parenthesized and parallel compositions and
choices are wrapped in parentheses.
"""

from typing import Union

from copyless_check.core.process import (
    Choice,
    Close,
    Idle,
    Name,
    OpenLinear,
    OpenUnrestricted,
    Par,
    Process,
    ProcVar,
    Receive,
    ReceiveBranch,
    RecProc,
    Send,
)
from copyless_check.core.types import (
    Branch,
    ChoiceType,
    End,
    EndpointType,
    InternalChoice,
    Rec,
    Type,
    Var,
)

Renderable = Union[EndpointType, Type, Process, Name]


def render(term: Renderable) -> str:
    """Concrete syntax of a type, a qualified type, a process or a name."""
    if isinstance(term, Name):
        return str(term)
    if isinstance(term, Type):
        return render_qualified(term)
    if isinstance(term, (End, Var, Rec, ChoiceType)):
        return render_type(term)
    return render_process(term)


def render_qualified(t: Type) -> str:
    return f"{t.qualifier.value} {render_type(t.body)}"


def render_type(term: EndpointType) -> str:
    if isinstance(term, End):
        return "end"
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Rec):
        return f"rec {term.var}.{render_type(term.body)}"
    symbol = "!" if isinstance(term, InternalChoice) else "?"
    if len(term.branches) == 1:
        return symbol + _branch(term.branches[0])
    return symbol + "{" + ", ".join(_branch(b) for b in term.branches) + "}"


def _branch(b: Branch) -> str:
    params = f"<{', '.join(b.typarams)}>" if b.typarams else ""
    args = ", ".join(render_qualified(t) for t in b.argtypes)
    return f"{b.tag}{params}({args}).{render_type(b.continuation)}"


def render_process(p: Process) -> str:
    if isinstance(p, Idle):
        return "0"
    if isinstance(p, Close):
        return f"close({p.subject})"
    if isinstance(p, OpenLinear):
        return (
            f"open({p.left}: {render_type(p.left_type)}, "
            f"{p.right}: {render_type(p.right_type)}).{render_process(p.body)}"
        )
    if isinstance(p, OpenUnrestricted):
        return f"open({p.name}: {render_type(p.type)}).{render_process(p.body)}"
    if isinstance(p, Send):
        tyargs = (
            "<" + ", ".join(render_type(t) for t in p.tyargs) + ">" if p.tyargs else ""
        )
        args = ", ".join(str(a) for a in p.args)
        return f"{p.subject}!{p.tag}{tyargs}({args}).{render_process(p.body)}"
    if isinstance(p, Receive):
        branches = ", ".join(_receive_branch(b) for b in p.branches)
        return f"{p.subject}?{{{branches}}}"
    if isinstance(p, Choice):
        return f"({render_process(p.left)} (+) {render_process(p.right)})"
    if isinstance(p, Par):
        return f"({render_process(p.left)} | {render_process(p.right)})"
    if isinstance(p, ProcVar):
        return p.name
    if isinstance(p, RecProc):
        return f"rec {p.var}.{render_process(p.body)}"
    raise TypeError(f"cannot render {p!r}")


def _receive_branch(b: ReceiveBranch) -> str:
    params = f"<{', '.join(b.typarams)}>" if b.typarams else ""
    args = ", ".join(f"{q.var}: {render_qualified(q.type)}" for q in b.params)
    return f"{b.tag}{params}({args}).{render_process(b.body)}"
