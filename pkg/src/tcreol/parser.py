"""Recursive-descent parser for the timed Creol subset."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import ast as A
from .evaluation import BUILTINS
from .lexer import ParseError, Token, tokenize


@dataclass(frozen=True)
class SourceModel:
    text: str
    origin: str = "<inline>"

    @classmethod
    def from_path(cls, path: str | Path) -> SourceModel:
        p = Path(path)
        return cls(p.read_text(encoding="utf-8"), str(p))


# tokens that end a statement list
_STMT_END = frozenset(["end", "else", "[]", "op", "with", ")", "<eof>"])

_COMPARE = ("=", "/=", "<", ">", "<=", ">=", "in")
_LISTOPS = ("|-|", "|-", "-|")


class Parser:
    def __init__(self, text: str, origin: str = "<inline>"):
        self.origin = origin
        self.toks = tokenize(text, origin)
        self.pos = 0

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "sym", "eof") and t.text in texts

    def error(self, msg: str, expected: tuple[str, ...] = ()) -> ParseError:
        return ParseError(msg, self.tok.loc, expected, self.origin)

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"unexpected {self.tok.text!r}", (repr(text),))
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def ident(self) -> str:
        if self.tok.kind != "ident":
            raise self.error(f"unexpected {self.tok.text!r}", ("identifier",))
        return self.advance().text

    # -- declarations

    def program(self, main: str = "Main") -> A.Program:
        interfaces, classes = [], []
        while not self.at("<eof>"):
            if self.at("interface"):
                interfaces.append(self.interface())
            elif self.at("class"):
                classes.append(self.class_decl())
            else:
                raise self.error(f"unexpected {self.tok.text!r}", ("'interface'", "'class'"))
        return A.Program(tuple(interfaces), tuple(classes), main)

    def interface(self) -> A.InterfaceDecl:
        loc = self.expect("interface").loc
        name = self.ident()
        if self.at("inherits"):
            raise self.error("interface inheritance is not supported")
        self.expect("begin")
        sigs = []
        co = "Any"
        while not self.at("end"):
            if self.accept("with"):
                co = self.ident()
            elif self.at("op"):
                sigs.append(self.signature(co))
            else:
                raise self.error(f"unexpected {self.tok.text!r}", ("'with'", "'op'", "'end'"))
        self.expect("end")
        return A.InterfaceDecl(name, tuple(sigs), loc)

    def params(self) -> tuple[A.Param, ...]:
        out = [self.param()]
        while self.accept(","):
            out.append(self.param())
        return tuple(out)

    def param(self) -> A.Param:
        loc = self.tok.loc
        name = self.ident()
        self.expect(":")
        return A.Param(name, self.type_ref(), loc)

    def type_ref(self) -> A.TypeRef:
        if self.at("["):
            self.advance()
            args = self.type_list("]")
            self.expect("]")
            return A.TypeRef("Tuple", args)
        name = self.ident()
        if self.accept("[]"):
            return A.TypeRef(name)
        if self.accept("["):
            args = self.type_list("]")
            self.expect("]")
            return A.TypeRef(name, args)
        return A.TypeRef(name)

    def type_list(self, close: str) -> tuple[A.TypeRef, ...]:
        if self.at(close):
            return ()
        out = [self.type_ref()]
        while self.accept(","):
            out.append(self.type_ref())
        return tuple(out)

    def signature(self, co: str) -> A.MethodSig:
        loc = self.expect("op").loc
        name = self.ident()
        ins: tuple[A.Param, ...] = ()
        outs: tuple[A.Param, ...] = ()
        if self.accept("("):
            if self.accept("in"):
                ins = self.params()
            if self.accept("out"):
                outs = self.params()
            self.expect(")")
        return A.MethodSig(name, ins, outs, co, loc)

    def var_decl(self) -> list[A.VarDecl]:
        self.expect("var")
        out = []
        while True:
            loc = self.tok.loc
            name = self.ident()
            self.expect(":")
            ty = self.type_ref()
            init = self.expr() if self.accept(":=") else None
            out.append(A.VarDecl(name, ty, init, loc))
            if not self.accept(","):
                return out

    def class_decl(self) -> A.ClassDecl:
        loc = self.expect("class").loc
        name = self.ident()
        params: tuple[A.Param, ...] = ()
        if self.accept("("):
            if not self.at(")"):
                params = self.params()
            self.expect(")")
        if self.at("inherits"):
            raise self.error("class inheritance is not supported")
        implements: list[str] = []
        if self.accept("implements"):
            implements.append(self.ident())
            while self.accept(","):
                implements.append(self.ident())
        if self.at("inherits"):
            raise self.error("class inheritance is not supported")
        self.expect("begin")
        attrs: list[A.VarDecl] = []
        while self.at("var"):
            attrs.extend(self.var_decl())
            self.accept(";")
        methods = []
        co = "Any"
        while not self.at("end"):
            if self.accept("with"):
                co = self.ident()
            elif self.at("op"):
                methods.append(self.method(co))
            else:
                raise self.error(f"unexpected {self.tok.text!r}", ("'var'", "'with'", "'op'", "'end'"))
        self.expect("end")
        return A.ClassDecl(name, params, tuple(implements), tuple(attrs), tuple(methods), loc)

    def method(self, co: str) -> A.MethodDecl:
        sig = self.signature(co)
        self.expect("==")
        local: list[A.VarDecl] = []
        while self.at("var"):
            local.extend(self.var_decl())
            if not self.accept(";"):
                break
        body = self.stmt_list()
        return A.MethodDecl(sig, tuple(local), body)

    # -- statements

    def stmt_list(self) -> A.Seq:
        """Statements up to a list terminator; ``[]`` binds looser than ``;``."""
        left = self.seq()
        if self.at("[]"):
            loc = self.advance().loc
            right = self.stmt_list()
            return A.Seq((A.Choice(left, right, loc),))
        return left

    def seq(self) -> A.Seq:
        stmts: list[A.Stmt] = []
        if self.at(*_STMT_END):
            return A.Seq(())
        stmts.append(self.stmt())
        while self.accept(";"):
            if self.at(*_STMT_END):
                break
            stmts.append(self.stmt())
        return A.Seq(tuple(stmts))

    def stmt(self) -> A.Stmt:
        t = self.tok
        loc = t.loc
        if self.accept("skip"):
            return A.Skip(loc)
        if self.accept("await"):
            call = self.maybe_call_target()
            if call is not None:
                callee, method = call
                args, outs = self.call_args(sync=True)
                return A.AwaitCall(callee, method, args, outs, loc)
            return A.Await(self.guard(), loc)
        if self.accept("if"):
            cond = self.expr()
            self.expect("then")
            then = self.stmt_list()
            orelse = A.Seq(())
            if self.accept("else"):
                orelse = self.stmt_list()
            self.expect("end")
            return A.If(cond, then, orelse, loc)
        if self.accept("while"):
            cond = self.expr()
            self.expect("do")
            body = self.stmt_list()
            self.expect("end")
            return A.While(cond, body, loc)
        if self.at("!"):
            return self.async_call(None, loc)
        if self.at("this") and self.peek().is_("."):
            self.advance()
            self.advance()
            method = self.ident()
            args, outs = self.call_args(sync=True)
            return A.SyncCall(A.This(loc), method, args, outs, loc)
        if t.kind == "ident":
            nxt = self.peek()
            if nxt.is_(":=") or nxt.is_(","):
                return self.assignment()
            if nxt.is_("!"):
                tag = self.advance().text
                return self.async_call(tag, loc)
            if nxt.is_("?"):
                tag = self.advance().text
                self.advance()
                outs: tuple[str, ...] = ()
                if self.accept("("):
                    outs = self.ident_list(")")
                    self.expect(")")
                return A.Reply(tag, outs, loc)
            if nxt.is_("."):
                callee = A.Var(self.advance().text, loc)
                self.advance()
                method = self.ident()
                args, outs = self.call_args(sync=True)
                return A.SyncCall(callee, method, args, outs, loc)
            if nxt.is_("("):
                method = self.advance().text
                args, outs = self.call_args(sync=True)
                return A.SyncCall(None, method, args, outs, loc)
            self.advance()
            raise self.error(f"unexpected {self.tok.text!r}", ("':='", "'!'", "'?'", "'.'", "'('"))
        raise self.error(
            f"unexpected {t.text!r}",
            ("statement", "'skip'", "'await'", "'if'", "'while'", "'!'", "identifier"),
        )

    def maybe_call_target(self) -> Optional[tuple[Optional[A.Expr], str]]:
        """After ``await``: detect ``o.m(`` or ``m(`` (a method, not a builtin)."""
        t, n1, n2 = self.tok, self.peek(1), self.peek(2)
        if t.kind == "ident" or t.is_("this") or t.is_("caller"):
            if n1.is_(".") and n2.kind == "ident" and self.peek(3).is_("("):
                callee = A.This(t.loc) if t.is_("this") else A.Var(t.text, t.loc)
                self.pos += 3
                return callee, n2.text
        if t.kind == "ident" and n1.is_("(") and t.text not in BUILTINS:
            self.pos += 1
            return None, t.text
        return None

    def async_call(self, tag: Optional[str], loc: A.Loc) -> A.AsyncCall:
        self.expect("!")
        callee: Optional[A.Expr] = None
        if self.peek().is_("."):
            ct = self.advance()
            if ct.is_("this"):
                callee = A.This(ct.loc)
            elif ct.kind == "ident":
                callee = A.Var(ct.text, ct.loc)
            else:
                raise ParseError(f"unexpected {ct.text!r}", ct.loc, ("identifier",), self.origin)
            self.expect(".")
        method = self.ident()
        args, _ = self.call_args(sync=False)
        return A.AsyncCall(tag, callee, method, args, loc)

    def call_args(self, sync: bool) -> tuple[tuple[A.Expr, ...], tuple[str, ...]]:
        self.expect("(")
        args: list[A.Expr] = []
        outs: tuple[str, ...] = ()
        if not self.at(";", ")"):
            args.append(self.expr())
            while self.accept(","):
                args.append(self.expr())
        if sync and self.accept(";"):
            outs = self.ident_list(")")
        self.expect(")")
        return tuple(args), outs

    def ident_list(self, close: str) -> tuple[str, ...]:
        if self.at(close):
            return ()
        out = [self.ident()]
        while self.accept(","):
            out.append(self.ident())
        return tuple(out)

    def assignment(self) -> A.Stmt:
        loc = self.tok.loc
        targets = [self.ident()]
        while self.accept(","):
            targets.append(self.ident())
        self.expect(":=")
        if self.at("new"):
            self.advance()
            if len(targets) != 1:
                raise self.error("'new' assigns exactly one variable")
            cls = self.ident()
            args: tuple[A.Expr, ...] = ()
            if self.accept("("):
                if not self.at(")"):
                    args = self.expr_list()
                self.expect(")")
            return A.New(targets[0], cls, args, loc)
        exprs = self.expr_list()
        if len(exprs) != len(targets):
            raise ParseError(
                f"{len(targets)} targets but {len(exprs)} expressions", loc, (), self.origin
            )
        return A.Assign(tuple(targets), exprs, loc)

    def expr_list(self) -> tuple[A.Expr, ...]:
        out = [self.expr()]
        while self.accept(","):
            out.append(self.expr())
        return tuple(out)

    # -- guards

    def guard(self) -> A.Guard:
        g = self.guard_and()
        while self.accept("||"):
            g = A.OrGuard(g, self.guard_and())
        return g

    def guard_and(self) -> A.Guard:
        g = self.guard_atom()
        while self.accept("&&"):
            g = A.AndGuard(g, self.guard_atom())
        return g

    def guard_atom(self) -> A.Guard:
        t = self.tok
        if t.kind == "ident" and self.peek().is_("?"):
            self.pos += 2
            return A.TagGuard(t.text, t.loc)
        return A.BoolGuard(self.compare())

    # -- expressions

    def expr(self) -> A.Expr:
        e = self.conj()
        while self.at("||"):
            loc = self.advance().loc
            e = A.Binary("||", e, self.conj(), loc)
        return e

    def conj(self) -> A.Expr:
        e = self.compare()
        while self.at("&&"):
            loc = self.advance().loc
            e = A.Binary("&&", e, self.compare(), loc)
        return e

    def compare(self) -> A.Expr:
        e = self.listop()
        if self.at(*_COMPARE):
            t = self.advance()
            e = A.Binary(t.text, e, self.listop(), t.loc)
        return e

    def listop(self) -> A.Expr:
        e = self.additive()
        while self.at(*_LISTOPS):
            t = self.advance()
            e = A.Binary(t.text, e, self.additive(), t.loc)
        return e

    def additive(self) -> A.Expr:
        e = self.term()
        while self.at("+", "-"):
            t = self.advance()
            e = A.Binary(t.text, e, self.term(), t.loc)
        return e

    def term(self) -> A.Expr:
        e = self.unary()
        while self.at("*", "/", "%"):
            t = self.advance()
            e = A.Binary(t.text, e, self.unary(), t.loc)
        return e

    def unary(self) -> A.Expr:
        if self.at("~", "-", "#"):
            t = self.advance()
            return A.Unary(t.text, self.unary(), t.loc)
        return self.primary()

    def primary(self) -> A.Expr:
        t = self.tok
        loc = t.loc
        if t.kind == "int":
            self.advance()
            return A.Lit(int(t.text), loc)
        if t.kind == "string":
            self.advance()
            return A.Lit(t.text, loc)
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                self.advance()
                args: tuple[A.Expr, ...] = ()
                if not self.at(")"):
                    args = self.expr_list()
                self.expect(")")
                return A.Call(t.text, args, loc)
            return A.Var(t.text, loc)
        if t.kind == "kw":
            simple = {
                "true": lambda: A.Lit(True, loc),
                "false": lambda: A.Lit(False, loc),
                "nil": lambda: A.Nil(loc),
                "null": lambda: A.Null(loc),
                "now": lambda: A.Now(loc),
                "this": lambda: A.This(loc),
            }.get(t.text)
            if simple is not None:
                self.advance()
                return simple()
        if self.accept("("):
            first = self.expr()
            if self.accept(","):
                items = [first] + list(self.expr_list())
                self.expect(")")
                return A.TupleLit(tuple(items), loc)
            self.expect(")")
            return first
        if self.accept("[]"):
            return A.ListLit((), loc)
        if self.accept("["):
            items = self.expr_list()
            self.expect("]")
            return A.ListLit(items, loc)
        if self.accept("{"):
            items: tuple[A.Expr, ...] = ()
            if not self.at("}"):
                items = self.expr_list()
            self.expect("}")
            return A.SetLit(items, loc)
        raise self.error(
            f"unexpected {t.text!r}",
            ("expression", "literal", "identifier", "'('", "'['", "'now'"),
        )


def parse(source: SourceModel | str, main: str = "Main") -> A.Program:
    """Parse model text into a (sugared) ``Program``."""
    if isinstance(source, str):
        source = SourceModel(source)
    return Parser(source.text, source.origin).program(main)


def parse_stmt(text: str) -> A.Seq:
    """Parse a standalone statement list (handy in tests and the REPL-less CLI)."""
    p = Parser(text)
    s = p.stmt_list()
    if not p.at("<eof>"):
        raise p.error(f"unexpected {p.tok.text!r}", ("<eof>",))
    return s


def parse_expr(text: str) -> A.Expr:
    p = Parser(text)
    e = p.expr()
    if not p.at("<eof>"):
        raise p.error(f"unexpected {p.tok.text!r}", ("<eof>",))
    return e


def parse_guard(text: str) -> A.Guard:
    p = Parser(text)
    g = p.guard()
    if not p.at("<eof>"):
        raise p.error(f"unexpected {p.tok.text!r}", ("<eof>",))
    return g
