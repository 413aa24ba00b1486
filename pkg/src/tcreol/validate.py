"""Name- and arity-level static checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from . import ast as A
from .desugar import TAG_PREFIX
from .evaluation import BUILTINS

RESERVED = frozenset(["this", "caller", "now"])
BUILTIN_TYPES = frozenset(["Any", "Int", "Bool", "String", "Time", "List", "Set", "Map", "Tag", "Tuple"])


@dataclass(frozen=True)
class Diagnostic:
    loc: A.Loc
    category: str
    message: str

    def __str__(self) -> str:
        return f"{self.loc}: {self.category}: {self.message}"


class ValidationError(Exception):
    def __init__(self, diagnostics: list[Diagnostic], origin: str = "<inline>"):
        self.diagnostics = diagnostics
        self.origin = origin
        super().__init__("\n".join(f"{origin}:{d}" for d in diagnostics))


def validate(program: A.Program, origin: str = "<inline>") -> A.Program:
    diags = check(program)
    if diags:
        raise ValidationError(diags, origin)
    return program


def _dups(items: Iterable, what: str, out: list[Diagnostic], seen: Optional[dict] = None) -> dict:
    seen = {} if seen is None else seen
    for name, loc in items:
        if name in seen:
            out.append(Diagnostic(loc, "duplicate declaration", f"{what} '{name}' declared twice"))
        else:
            seen[name] = loc
    return seen


def check(program: A.Program) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    _dups(((i.name, i.loc) for i in program.interfaces), "interface", diags)
    _dups(((c.name, c.loc) for c in program.classes), "class", diags)
    for i in program.interfaces:
        _dups(((s.name, s.loc) for s in i.sigs), "method", diags)
    for c in program.classes:
        _ClassChecker(program, c, diags).run()
    main = program.cls(program.main)
    if main is None:
        diags.append(Diagnostic(A.NOLOC, "main", f"main class '{program.main}' is not declared"))
    elif main.params:
        diags.append(Diagnostic(main.loc, "main", f"main class '{program.main}' must not take parameters"))
    return diags


class _ClassChecker:
    def __init__(self, program: A.Program, cls: A.ClassDecl, diags: list[Diagnostic]):
        self.p = program
        self.c = cls
        self.diags = diags

    def err(self, loc: A.Loc, cat: str, msg: str) -> None:
        self.diags.append(Diagnostic(loc, cat, msg))

    def run(self) -> None:
        c = self.c
        for name in c.implements:
            if self.p.interface(name) is None:
                self.err(c.loc, "unknown interface", f"class '{c.name}' implements undeclared interface '{name}'")
        _dups(((m.name, m.sig.loc) for m in c.methods), "method", self.diags)
        seen = _dups(((x.name, x.loc) for x in c.params), "class parameter", self.diags)
        _dups(((d.name, d.loc) for d in c.attrs), "attribute", self.diags, seen)
        for d in list(c.params) + list(c.attrs):
            if d.name in RESERVED:
                self.err(d.loc, "duplicate declaration", f"'{d.name}' is a reserved name")
        self.field_types = {x.name: x.type for x in c.params}
        self.field_types.update({d.name: d.type for d in c.attrs})
        self.readonly_fields = {x.name for x in c.params}
        scope = set(self.field_types)
        for d in c.attrs:
            if d.init is not None:
                self.expr(d.init, scope | {"this"})
        for m in c.methods:
            self.method(m)

    def method(self, m: A.MethodDecl) -> None:
        seen = _dups(((p.name, p.loc) for p in m.sig.ins), "parameter", self.diags)
        seen = _dups(((p.name, p.loc) for p in m.sig.outs), "parameter", self.diags, seen)
        _dups(((d.name, d.loc) for d in m.locals), "local variable", self.diags, seen)
        self.types = dict(self.field_types)
        for p in list(m.sig.ins) + list(m.sig.outs):
            self.types[p.name] = p.type
        for d in m.locals:
            self.types[d.name] = d.type
        self.readonly = set(self.readonly_fields) | {p.name for p in m.sig.ins} | RESERVED
        for name in self.readonly_fields | {p.name for p in m.sig.ins}:
            if name in {d.name for d in m.locals} | {p.name for p in m.sig.outs}:
                self.readonly.discard(name)
        self.scope = set(self.types) | RESERVED
        for d in m.locals:
            if d.init is not None:
                self.expr(d.init, self.scope)
        self.stmt(m.body)

    # -- statements

    def var(self, name: str, loc: A.Loc) -> None:
        if name not in self.scope and not name.startswith(TAG_PREFIX):
            self.err(loc, "undeclared variable", f"'{name}' is not declared")

    def target(self, name: str, loc: A.Loc) -> None:
        self.var(name, loc)
        if name in self.readonly:
            self.err(loc, "read-only", f"cannot assign to read-only '{name}'")

    def stmt(self, s: A.Stmt) -> None:
        if isinstance(s, A.Seq):
            for x in s.stmts:
                self.stmt(x)
        elif isinstance(s, A.Choice):
            self.stmt(s.left)
            self.stmt(s.right)
        elif isinstance(s, A.Assign):
            for e in s.exprs:
                self.expr(e, self.scope)
            for t in s.targets:
                self.target(t, s.loc)
        elif isinstance(s, A.New):
            for e in s.args:
                self.expr(e, self.scope)
            self.target(s.target, s.loc)
            cls = self.p.cls(s.cls)
            if cls is None:
                self.err(s.loc, "unknown class", f"class '{s.cls}' is not declared")
            elif len(cls.params) != len(s.args):
                self.err(s.loc, "arity mismatch", f"'{s.cls}' takes {len(cls.params)} arguments, {len(s.args)} given")
        elif isinstance(s, A.If):
            self.expr(s.cond, self.scope)
            self.stmt(s.then)
            self.stmt(s.orelse)
        elif isinstance(s, A.While):
            self.expr(s.cond, self.scope)
            self.stmt(s.body)
        elif isinstance(s, A.Await):
            self.guard(s.guard)
        elif isinstance(s, A.AsyncCall):
            if s.tag is not None:
                self.target(s.tag, s.loc)
            self.call(s.callee, s.method, s.args, None, s.loc)
        elif isinstance(s, (A.SyncCall, A.AwaitCall)):
            for o in s.outs:
                self.target(o, s.loc)
            self.call(s.callee, s.method, s.args, s.outs, s.loc)
        elif isinstance(s, A.Reply):
            self.var(s.tag, s.loc)
            for o in s.outs:
                self.target(o, s.loc)

    def guard(self, g: A.Guard) -> None:
        if isinstance(g, A.TagGuard):
            self.var(g.tag, g.loc)
        elif isinstance(g, A.BoolGuard):
            self.expr(g.expr, self.scope)
        else:
            self.guard(g.left)
            self.guard(g.right)

    def _static_type(self, callee: Optional[A.Expr]) -> Optional[str]:
        if callee is None or isinstance(callee, A.This):
            return self.c.name
        if isinstance(callee, A.Var):
            t = self.types.get(callee.name)
            return t.name if t is not None else None
        return None

    def call(self, callee, method: str, args, outs, loc: A.Loc) -> None:
        if callee is not None:
            self.expr(callee, self.scope)
        for e in args:
            self.expr(e, self.scope)
        tname = self._static_type(callee)
        candidates: list[A.MethodSig] = []
        if tname is not None and self.p.cls(tname) is not None:
            m = self.p.cls(tname).method(method)
            candidates = [m.sig] if m else []
            where = f"class '{tname}'"
        elif tname is not None and self.p.interface(tname) is not None:
            sig = self.p.interface(tname).sig(method)
            candidates = [sig] if sig else []
            where = f"interface '{tname}'"
        else:
            for c in self.p.classes:
                m = c.method(method)
                if m is not None:
                    candidates.append(m.sig)
            where = "any class"
        if not candidates:
            self.err(loc, "unknown method", f"method '{method}' not found in {where}")
            return
        ok = [
            s for s in candidates
            if len(s.ins) == len(args) and (outs is None or len(s.outs) == len(outs))
        ]
        if not ok:
            s = candidates[0]
            given = f"{len(args)} in" + ("" if outs is None else f", {len(outs)} out")
            self.err(
                loc, "arity mismatch",
                f"'{method}' takes {len(s.ins)} in, {len(s.outs)} out parameters; {given} given",
            )

    # -- expressions

    def expr(self, e: A.Expr, scope: set[str]) -> None:
        if isinstance(e, A.Var):
            if e.name not in scope and not e.name.startswith(TAG_PREFIX):
                self.err(e.loc, "undeclared variable", f"'{e.name}' is not declared")
        elif isinstance(e, A.Call):
            arity = BUILTINS.get(e.func)
            if arity is None:
                self.err(e.loc, "unknown function", f"'{e.func}' is not a built-in function")
            elif len(e.args) not in arity[0]:
                self.err(e.loc, "arity mismatch", f"'{e.func}' takes {'/'.join(map(str, arity[0]))} arguments")
            for a in e.args:
                self.expr(a, scope)
        elif isinstance(e, A.Unary):
            self.expr(e.operand, scope)
        elif isinstance(e, A.Binary):
            self.expr(e.left, scope)
            self.expr(e.right, scope)
        elif isinstance(e, (A.ListLit, A.SetLit, A.TupleLit)):
            for a in e.items:
                self.expr(a, scope)
