"""Abstract syntax for the timed Creol subset.

Statement lists are stored as tuples; a method body is a ``Seq``.  Sugar
nodes (``SyncCall``, ``AwaitCall``) only exist between parsing and
desugaring.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Loc:
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOLOC = Loc()


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class TypeRef:
    """A type name with optional arguments. Tuple types use name ``Tuple``."""

    name: str
    args: tuple[TypeRef, ...] = ()


# ---------------------------------------------------------------- expressions


@dataclass(frozen=True)
class Lit:
    value: object  # int | bool | str
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Nil:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Null:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Now:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class This:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class ListLit:
    items: tuple[Expr, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class SetLit:
    items: tuple[Expr, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class TupleLit:
    items: tuple[Expr, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "~", "-", "#"
    operand: Expr
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: Expr
    right: Expr
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Call:
    """Built-in function application such as ``head(l)`` or ``insert(m, k, v)``."""

    func: str
    args: tuple[Expr, ...]
    loc: Loc = field(default=NOLOC, compare=False)


Expr = Union[Lit, Nil, Null, Now, This, Var, ListLit, SetLit, TupleLit, Unary, Binary, Call]


# ---------------------------------------------------------------- guards


@dataclass(frozen=True)
class BoolGuard:
    expr: Expr


@dataclass(frozen=True)
class TagGuard:
    tag: str
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class AndGuard:
    left: Guard
    right: Guard


@dataclass(frozen=True)
class OrGuard:
    left: Guard
    right: Guard


Guard = Union[BoolGuard, TagGuard, AndGuard, OrGuard]


# ---------------------------------------------------------------- statements


@dataclass(frozen=True)
class Seq:
    stmts: tuple[Stmt, ...]


@dataclass(frozen=True)
class Choice:
    left: Seq
    right: Seq
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Assign:
    targets: tuple[str, ...]
    exprs: tuple[Expr, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class New:
    target: str
    cls: str
    args: tuple[Expr, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: Seq
    orelse: Seq
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: Seq
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Await:
    guard: Guard
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class AsyncCall:
    """``t!o.m(e)``. ``tag`` is None for anonymous calls, ``callee`` None for local calls."""

    tag: Optional[str]
    callee: Optional[Expr]
    method: str
    args: tuple[Expr, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Reply:
    tag: str
    outs: tuple[str, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class Skip:
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class SyncCall:
    """Sugar: ``o.m(e; x)``."""

    callee: Optional[Expr]
    method: str
    args: tuple[Expr, ...]
    outs: tuple[str, ...]
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class AwaitCall:
    """Sugar: ``await o.m(e; x)``."""

    callee: Optional[Expr]
    method: str
    args: tuple[Expr, ...]
    outs: tuple[str, ...]
    loc: Loc = field(default=NOLOC, compare=False)


Stmt = Union[Seq, Choice, Assign, New, If, While, Await, AsyncCall, Reply, Skip, SyncCall, AwaitCall]

SUGAR_NODES = (SyncCall, AwaitCall)


# ---------------------------------------------------------------- declarations


@dataclass(frozen=True)
class Param:
    name: str
    type: TypeRef
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class VarDecl:
    name: str
    type: TypeRef
    init: Optional[Expr] = None
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class MethodSig:
    name: str
    ins: tuple[Param, ...] = ()
    outs: tuple[Param, ...] = ()
    cointerface: str = "Any"
    loc: Loc = field(default=NOLOC, compare=False)


@dataclass(frozen=True)
class MethodDecl:
    sig: MethodSig
    locals: tuple[VarDecl, ...]
    body: Seq

    @property
    def name(self) -> str:
        return self.sig.name


@dataclass(frozen=True)
class InterfaceDecl:
    name: str
    sigs: tuple[MethodSig, ...]
    loc: Loc = field(default=NOLOC, compare=False)

    def sig(self, name: str) -> Optional[MethodSig]:
        for s in self.sigs:
            if s.name == name:
                return s
        return None


@dataclass(frozen=True)
class ClassDecl:
    name: str
    params: tuple[Param, ...]
    implements: tuple[str, ...]
    attrs: tuple[VarDecl, ...]
    methods: tuple[MethodDecl, ...]
    loc: Loc = field(default=NOLOC, compare=False)

    def method(self, name: str) -> Optional[MethodDecl]:
        for m in self.methods:
            if m.name == name:
                return m
        return None


@dataclass(frozen=True)
class Program:
    interfaces: tuple[InterfaceDecl, ...]
    classes: tuple[ClassDecl, ...]
    main: str = "Main"

    def cls(self, name: str) -> Optional[ClassDecl]:
        for c in self.classes:
            if c.name == name:
                return c
        return None

    def interface(self, name: str) -> Optional[InterfaceDecl]:
        for i in self.interfaces:
            if i.name == name:
                return i
        return None


def seq(*stmts: Stmt) -> Seq:
    """Build a flat ``Seq``, splicing nested sequences."""
    out: list[Stmt] = []
    for s in stmts:
        if isinstance(s, Seq):
            out.extend(s.stmts)
        else:
            out.append(s)
    return Seq(tuple(out))


def walk_stmts(s: Stmt):
    """Yield ``s`` and every statement nested inside it."""
    yield s
    if isinstance(s, Seq):
        for x in s.stmts:
            yield from walk_stmts(x)
    elif isinstance(s, Choice):
        yield from walk_stmts(s.left)
        yield from walk_stmts(s.right)
    elif isinstance(s, If):
        yield from walk_stmts(s.then)
        yield from walk_stmts(s.orelse)
    elif isinstance(s, While):
        yield from walk_stmts(s.body)


def to_data(node) -> object:
    """Plain JSON-ready form of an AST node (``node`` key names the kind)."""
    if isinstance(node, Loc):
        return [node.line, node.col]
    if dataclasses.is_dataclass(node):
        out: dict = {"node": type(node).__name__}
        for f in dataclasses.fields(node):
            out[f.name] = to_data(getattr(node, f.name))
        return out
    if isinstance(node, (tuple, list)):
        return [to_data(x) for x in node]
    return node
