"""Parser for ``.proc`` sources.

A source is either a bare process or a sequence of declarations, each ended
by ``;``::

    type Name<a, b> = etype;
    proc Name = process;
    assume name : type;
    main = process;

Type definitions are expanded where they are used. Process definitions are
re-read at every use in the scope of the use site; a definition that refers
back to itself, directly or through other definitions, is folded into a
``rec`` process.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, TypeVar, Union

from copyless_check.core.duality import DualityError, dual
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
)
from copyless_check.core.types import (
    Branch,
    End,
    EndpointType,
    ExternalChoice,
    InternalChoice,
    Qualifier,
    Rec,
    Type,
    TypeSyntaxError,
    Var,
    subst_many,
)
from copyless_check.frontend.lexer import EOF, ParseError, Token, tokenize

DECLARATIONS = ("type", "proc", "assume", "main")

T = TypeVar("T")


@dataclass(frozen=True)
class _Scope:
    variables: frozenset[str] = frozenset()
    tyvars: frozenset[str] = frozenset()
    procvars: frozenset[str] = frozenset()

    def with_variables(self, names: tuple[str, ...]) -> "_Scope":
        return _Scope(self.variables | set(names), self.tyvars, self.procvars)

    def with_locations(self, names: tuple[str, ...]) -> "_Scope":
        return _Scope(self.variables - set(names), self.tyvars, self.procvars)

    def with_tyvars(self, names: tuple[str, ...]) -> "_Scope":
        return _Scope(self.variables, self.tyvars | set(names), self.procvars)

    def with_procvar(self, name: str) -> "_Scope":
        return _Scope(self.variables, self.tyvars, self.procvars | {name})


@dataclass
class _Definition:
    name: str
    params: tuple[str, ...]
    tokens: list[Token]
    at: Token


@dataclass
class _Context:
    """Definitions of one source, shared by every sub-parser."""

    types: dict[str, _Definition] = field(default_factory=dict)
    processes: dict[str, _Definition] = field(default_factory=dict)
    expanded_types: dict[str, EndpointType] = field(default_factory=dict)
    type_stack: list[str] = field(default_factory=list)
    process_stack: list[str] = field(default_factory=list)
    recursive: set[str] = field(default_factory=set)

    def expand_type(
        self, name: str, args: list[EndpointType], at: Token
    ) -> EndpointType:
        definition = self.types[name]
        if len(args) != len(definition.params):
            raise _error(
                f"type {name} expects {len(definition.params)} arguments, "
                f"got {len(args)}",
                at,
            )
        if name in self.type_stack:
            raise _error(f"type {name} is defined in terms of itself; use rec", at)
        if name not in self.expanded_types:
            self.type_stack.append(name)
            try:
                parser = _Parser(definition.tokens, self)
                body = parser.complete(
                    lambda: parser.etype(_Scope(tyvars=frozenset(definition.params)))
                )
            finally:
                self.type_stack.pop()
            self.expanded_types[name] = body
        return subst_many(
            self.expanded_types[name], dict(zip(definition.params, args))
        )

    def expand_process(self, name: str, scope: _Scope) -> Process:
        if name in self.process_stack:
            self.recursive.add(name)
            return ProcVar(name)
        definition = self.processes[name]
        self.process_stack.append(name)
        try:
            parser = _Parser(definition.tokens, self)
            body = parser.complete(lambda: parser.process(scope))
        finally:
            self.process_stack.pop()
        if name in self.recursive:
            self.recursive.discard(name)
            return RecProc(name, body)
        return body


@dataclass
class SourceProgram:
    """A parsed source: its main process, assumptions and definitions."""

    main: Optional[Process]
    assumptions: dict[Name, Type] = field(default_factory=dict)
    types: tuple[str, ...] = ()
    processes: tuple[str, ...] = ()
    _context: _Context = field(default_factory=_Context, repr=False)

    def type_definition(self, name: str, *args: EndpointType) -> EndpointType:
        """Expansion of the type definition ``name`` applied to ``args``."""
        if name not in self._context.types:
            raise KeyError(name)
        definition = self._context.types[name]
        return self._context.expand_type(name, list(args), definition.at)

    def process_definition(self, name: str) -> Process:
        if name not in self._context.processes:
            raise KeyError(name)
        return self._context.expand_process(name, _Scope())

    def parse_type(self, text: str) -> Union[Type, EndpointType]:
        """Parse a type that may refer to this program's type definitions."""
        return _parse_type(text, self._context)


def _error(message: str, at: Token) -> ParseError:
    return ParseError(message, at.line, at.column)


def parse(text: str) -> SourceProgram:
    """Parse a whole source file.

    Raises:
        ParseError: On syntax errors, duplicate or unknown definitions.
    """
    tokens = tokenize(text)
    first = tokens[0]
    if not (first.kind == "keyword" and first.text in DECLARATIONS):
        if first.kind == EOF:
            raise _error("empty source", first)
        body = tokens
        if len(tokens) >= 2 and tokens[-2].is_symbol(";"):
            body = tokens[:-2] + tokens[-1:]
        parser = _Parser(body, _Context())
        return SourceProgram(parser.complete(lambda: parser.process(_Scope())))
    return _Declarations(tokens).program()


def parse_process(text: str) -> Process:
    """Parse a single process term with no definitions in scope."""
    parser = _Parser(tokenize(text), _Context())
    return parser.complete(lambda: parser.process(_Scope()))


def parse_type(text: str) -> Union[Type, EndpointType]:
    """Parse ``lin T`` / ``un T`` into a ``Type`` and a bare ``T`` into its body."""
    return _parse_type(text, _Context())


def _parse_type(text: str, context: _Context) -> Union[Type, EndpointType]:
    tokens = tokenize(text)
    parser = _Parser(tokens, context)
    if tokens[0].is_keyword("lin") or tokens[0].is_keyword("un"):
        return parser.complete(lambda: parser.qtype(_Scope()))
    return parser.complete(lambda: parser.etype(_Scope()))


class _Declarations:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.context = _Context()
        self.assumptions: dict[Name, Type] = {}
        self.pending_assumptions: list[tuple[Name, list[Token], Token]] = []
        self.main: Optional[list[Token]] = None

    def program(self) -> SourceProgram:
        for chunk in self._chunks():
            self._declaration(chunk)
        for name, tokens, _ in self.pending_assumptions:
            parser = _Parser(tokens, self.context)
            self.assumptions[name] = parser.complete(lambda: parser.qtype(_Scope()))
        for name in self.context.types:
            definition = self.context.types[name]
            self.context.expand_type(
                name, [Var(p) for p in definition.params], definition.at
            )
        main: Optional[Process] = None
        if self.main is not None:
            parser = _Parser(self.main, self.context)
            main = parser.complete(lambda: parser.process(_Scope()))
        for name in self.context.processes:
            self.context.expand_process(name, _Scope())
        return SourceProgram(
            main,
            self.assumptions,
            tuple(self.context.types),
            tuple(self.context.processes),
            self.context,
        )

    def _chunks(self) -> list[list[Token]]:
        chunks: list[list[Token]] = []
        current: list[Token] = []
        for token in self.tokens:
            if token.kind == EOF or token.is_symbol(";"):
                if current:
                    chunks.append(current + [Token(EOF, "", token.line, token.column)])
                current = []
            else:
                current.append(token)
        return chunks

    def _declaration(self, chunk: list[Token]) -> None:
        head = chunk[0]
        if head.is_keyword("main"):
            self._expect(chunk, 1, "=")
            if self.main is not None:
                raise _error("main is defined twice", head)
            self.main = chunk[2:]
        elif head.is_keyword("type"):
            name = self._ident(chunk, 1)
            params: list[str] = []
            i = 2
            if chunk[i].is_symbol("<"):
                i += 1
                while True:
                    params.append(self._ident(chunk, i))
                    i += 1
                    if chunk[i].is_symbol(">"):
                        i += 1
                        break
                    self._expect(chunk, i, ",")
                    i += 1
            self._expect(chunk, i, "=")
            if name in self.context.types:
                raise _error(f"type {name} is defined twice", chunk[1])
            if len(set(params)) != len(params):
                raise _error(f"type {name} repeats a parameter", chunk[1])
            self.context.types[name] = _Definition(
                name, tuple(params), chunk[i + 1 :], chunk[1]
            )
        elif head.is_keyword("proc"):
            name = self._ident(chunk, 1)
            self._expect(chunk, 2, "=")
            if name in self.context.processes:
                raise _error(f"process {name} is defined twice", chunk[1])
            self.context.processes[name] = _Definition(name, (), chunk[3:], chunk[1])
        elif head.is_keyword("assume"):
            shared = chunk[1].is_symbol("*")
            ident = self._ident(chunk, 2 if shared else 1)
            colon = 3 if shared else 2
            self._expect(chunk, colon, ":")
            name = Name.shared(ident) if shared else Name.linear(ident)
            if name in self.assumptions or any(
                n == name for n, _, _ in self.pending_assumptions
            ):
                raise _error(f"{name} is assumed twice", head)
            self.pending_assumptions.append((name, chunk[colon + 1 :], head))
        else:
            raise _error(f"expected a declaration, found {head.text!r}", head)

    @staticmethod
    def _ident(chunk: list[Token], i: int) -> str:
        if chunk[i].kind != "ident":
            raise _error(f"expected a name, found {chunk[i].text!r}", chunk[i])
        return chunk[i].text

    @staticmethod
    def _expect(chunk: list[Token], i: int, symbol: str) -> None:
        if not chunk[i].is_symbol(symbol):
            raise _error(f"expected {symbol!r}, found {chunk[i].text!r}", chunk[i])


class _Parser:
    """Recursive-descent parser over one token list."""

    def __init__(self, tokens: list[Token], context: _Context):
        self.tokens = tokens
        self.pos = 0
        self.context = context

    # --- token helpers ------------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.peek()
        self.pos += 1
        return token

    def accept(self, symbol: str) -> bool:
        if self.peek().is_symbol(symbol):
            self.pos += 1
            return True
        return False

    def expect(self, symbol: str) -> Token:
        token = self.peek()
        if not token.is_symbol(symbol):
            raise _error(f"expected {symbol!r}, found {_show(token)}", token)
        return self.advance()

    def ident(self, what: str = "a name") -> Token:
        token = self.peek()
        if token.kind != "ident":
            raise _error(f"expected {what}, found {_show(token)}", token)
        return self.advance()

    def complete(self, rule: Callable[[], T]) -> T:
        result = rule()
        token = self.peek()
        if token.kind != EOF:
            raise _error(f"unexpected {_show(token)}", token)
        return result

    def separated(self, item: Callable[[], T], close: str) -> list[T]:
        """Items separated by commas up to the closing symbol (consumed)."""
        items: list[T] = []
        if self.accept(close):
            return items
        while True:
            items.append(item())
            if self.accept(close):
                return items
            self.expect(",")

    # --- types --------------------------------------------------------------

    def qtype(self, scope: _Scope) -> Type:
        qualifier = Qualifier.LIN
        if self.peek().is_keyword("lin"):
            self.advance()
        elif self.peek().is_keyword("un"):
            self.advance()
            qualifier = Qualifier.UN
        return Type(qualifier, self.etype(scope))

    def etype(self, scope: _Scope) -> EndpointType:
        token = self.peek()
        try:
            return self._etype(scope, token)
        except TypeSyntaxError as e:
            raise _error(str(e), token) from None

    def _etype(self, scope: _Scope, token: Token) -> EndpointType:
        if token.is_keyword("end"):
            self.advance()
            return End()
        if token.is_keyword("rec"):
            self.advance()
            var = self.ident("a type variable").text
            self.expect(".")
            return Rec(var, self.etype(scope.with_tyvars((var,))))
        if token.is_keyword("dual"):
            self.advance()
            body = self.etype(scope)
            try:
                return dual(body)
            except DualityError as e:
                raise _error(str(e), token) from None
        if token.is_symbol("("):
            self.advance()
            body = self.etype(scope)
            self.expect(")")
            return body
        if token.is_symbol("!") or token.is_symbol("?"):
            self.advance()
            kind = InternalChoice if token.text == "!" else ExternalChoice
            if self.accept("{"):
                branches = self.separated(lambda: self.branch(scope), "}")
            else:
                branches = [self.branch(scope)]
            return kind(tuple(branches))
        if token.kind == "ident":
            self.advance()
            name = token.text
            applied = self.peek().is_symbol("<")
            if name in scope.tyvars and not applied:
                return Var(name)
            if name in self.context.types:
                args: list[EndpointType] = []
                if self.accept("<"):
                    args = self.separated(lambda: self.etype(scope), ">")
                return self.context.expand_type(name, args, token)
            if applied:
                raise _error(f"unknown type {name}", token)
            return Var(name)
        raise _error(f"expected a type, found {_show(token)}", token)

    def branch(self, scope: _Scope) -> Branch:
        tag = self.ident("a message tag").text
        typarams: tuple[str, ...] = ()
        if self.accept("<"):
            typarams = tuple(
                self.separated(lambda: self.ident("a type variable").text, ">")
            )
        inner = scope.with_tyvars(typarams)
        args: list[Type] = []
        if self.accept("("):
            args = self.separated(lambda: self.qtype(inner), ")")
        self.expect(".")
        return Branch(tag, typarams, tuple(args), self.etype(inner))

    # --- processes ----------------------------------------------------------

    def process(self, scope: _Scope) -> Process:
        result = self.choice(scope)
        while self.accept("|"):
            result = Par(result, self.choice(scope))
        return result

    def choice(self, scope: _Scope) -> Process:
        result = self.unary(scope)
        while self.accept("(+)"):
            result = Choice(result, self.unary(scope))
        return result

    def unary(self, scope: _Scope) -> Process:
        token = self.peek()
        if token.is_symbol("0"):
            self.advance()
            return Idle()
        if token.is_keyword("close"):
            self.advance()
            self.expect("(")
            subject = self.name(scope)
            self.expect(")")
            return Close(subject)
        if token.is_keyword("open"):
            return self.open(scope)
        if token.is_keyword("rec"):
            self.advance()
            var = self.ident("a process variable").text
            self.expect(".")
            return RecProc(var, self.unary(scope.with_procvar(var)))
        if token.is_symbol("("):
            self.advance()
            body = self.process(scope)
            self.expect(")")
            return body
        if token.kind == "ident" and not (
            self.peek(1).is_symbol("!") or self.peek(1).is_symbol("?")
        ):
            self.advance()
            return self.process_reference(token, scope)
        if token.kind == "ident" or token.is_symbol("*"):
            subject = self.name(scope)
            if self.accept("!"):
                return self.send(subject, scope)
            if self.accept("?"):
                return self.receive(subject, scope)
            raise _error(f"expected '!' or '?' after {subject}", self.peek())
        raise _error(f"expected a process, found {_show(token)}", token)

    def process_reference(self, token: Token, scope: _Scope) -> Process:
        name = token.text
        if name in scope.procvars:
            return ProcVar(name)
        if name in self.context.processes:
            return self.context.expand_process(name, scope)
        raise _error(f"unknown process {name}", token)

    def name(self, scope: _Scope) -> Name:
        if self.accept("*"):
            token = self.ident()
            if token.text in scope.variables:
                raise _error(f"{token.text} is a variable and has no '*' form", token)
            return Name.shared(token.text)
        token = self.ident()
        if token.text in scope.variables:
            return Name.variable(token.text)
        return Name.linear(token.text)

    def open(self, scope: _Scope) -> Process:
        self.advance()
        self.expect("(")
        left = self.ident().text
        self.expect(":")
        left_type = self.etype(scope)
        if self.accept(","):
            right = self.ident().text
            self.expect(":")
            right_type = self.etype(scope)
            self.expect(")")
            self.expect(".")
            body = self.unary(scope.with_locations((left, right)))
            return OpenLinear(left, left_type, right, right_type, body)
        self.expect(")")
        self.expect(".")
        body = self.unary(scope.with_locations((left,)))
        return OpenUnrestricted(left, left_type, body)

    def send(self, subject: Name, scope: _Scope) -> Process:
        tag = self.ident("a message tag").text
        tyargs: list[EndpointType] = []
        if self.accept("<"):
            tyargs = self.separated(lambda: self.etype(scope), ">")
        args: list[Name] = []
        if self.accept("("):
            args = self.separated(lambda: self.name(scope), ")")
        self.expect(".")
        return Send(subject, tag, tuple(tyargs), tuple(args), self.unary(scope))

    def receive(self, subject: Name, scope: _Scope) -> Process:
        at = self.peek()
        if self.accept("{"):
            branches = self.separated(
                lambda: self.receive_branch(scope, self.process), "}"
            )
        else:
            branches = [self.receive_branch(scope, self.unary)]
        try:
            return Receive(subject, tuple(branches))
        except ValueError as e:
            raise _error(str(e), at) from None

    def receive_branch(
        self, scope: _Scope, body: Callable[[_Scope], Process]
    ) -> ReceiveBranch:
        tag = self.ident("a message tag").text
        typarams: tuple[str, ...] = ()
        if self.accept("<"):
            typarams = tuple(
                self.separated(lambda: self.ident("a type variable").text, ">")
            )
        inner = scope.with_tyvars(typarams)
        params: list[Param] = []
        if self.accept("("):
            params = self.separated(lambda: self.param(inner), ")")
        self.expect(".")
        variables = tuple(p.var for p in params)
        if len(set(variables)) != len(variables):
            raise _error(f"branch {tag} binds a variable twice", self.peek())
        return ReceiveBranch(
            tag, typarams, tuple(params), body(inner.with_variables(variables))
        )

    def param(self, scope: _Scope) -> Param:
        var = self.ident("a variable").text
        self.expect(":")
        return Param(var, self.qtype(scope))


def _show(token: Token) -> str:
    return "end of input" if token.kind == EOF else repr(token.text)
