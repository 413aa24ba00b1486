"""Pretty-printer producing re-parseable model text."""

from __future__ import annotations

from . import ast as A

# binding strength; higher binds tighter
_PREC = {
    "||": 1, "&&": 2,
    "=": 3, "/=": 3, "<": 3, ">": 3, "<=": 3, ">=": 3, "in": 3,
    "|-|": 4, "|-": 4, "-|": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}
_NONASSOC = 3


def type_str(t: A.TypeRef) -> str:
    if t.name == "Tuple":
        return "[" + ", ".join(type_str(a) for a in t.args) + "]"
    if t.args:
        return t.name + "[" + ", ".join(type_str(a) for a in t.args) + "]"
    if t.name == "Tag":
        return "Tag[ ]"
    return t.name


def expr_str(e: A.Expr, ctx: int = 0) -> str:
    if isinstance(e, A.Lit):
        v = e.value
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, int):
            return str(v)
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(e, A.Var):
        return e.name
    if isinstance(e, A.Nil):
        return "nil"
    if isinstance(e, A.Null):
        return "null"
    if isinstance(e, A.Now):
        return "now"
    if isinstance(e, A.This):
        return "this"
    if isinstance(e, A.ListLit):
        return "[" + ", ".join(expr_str(x) for x in e.items) + "]" if e.items else "[]"
    if isinstance(e, A.SetLit):
        return "{" + ", ".join(expr_str(x) for x in e.items) + "}"
    if isinstance(e, A.TupleLit):
        return "(" + ", ".join(expr_str(x) for x in e.items) + ")"
    if isinstance(e, A.Call):
        return e.func + "(" + ", ".join(expr_str(x) for x in e.args) + ")"
    if isinstance(e, A.Unary):
        inner = expr_str(e.operand, 7)
        return e.op + inner
    if isinstance(e, A.Binary):
        p = _PREC[e.op]
        left = expr_str(e.left, p + 1 if p == _NONASSOC else p)
        right = expr_str(e.right, p + 1)
        s = f"{left} {e.op} {right}"
        return f"({s})" if p < ctx else s
    raise TypeError(f"not an expression: {e!r}")


def guard_str(g: A.Guard, ctx: int = 0) -> str:
    if isinstance(g, A.TagGuard):
        return g.tag + "?"
    if isinstance(g, A.BoolGuard):
        # guard atoms sit at comparison level
        return expr_str(g.expr, _NONASSOC)
    if isinstance(g, A.AndGuard):
        s = f"{guard_str(g.left, 2)} && {guard_str(g.right, 3)}"
        return f"({s})" if ctx > 2 else s
    if isinstance(g, A.OrGuard):
        s = f"{guard_str(g.left, 1)} || {guard_str(g.right, 2)}"
        if ctx > 1:
            raise ValueError("nested disjunction inside a conjunction cannot be printed")
        return s
    raise TypeError(f"not a guard: {g!r}")


def _callee(c) -> str:
    return "" if c is None else expr_str(c) + "."


def stmt_lines(s: A.Stmt, ind: int) -> list[str]:
    pad = "  " * ind
    if isinstance(s, A.Seq):
        return seq_lines(s, ind)
    if isinstance(s, A.Choice):
        out = seq_lines(s.left, ind)
        out.append(pad + "[]")
        out.extend(seq_lines(s.right, ind))
        return out
    if isinstance(s, A.Assign):
        return [pad + ", ".join(s.targets) + " := " + ", ".join(expr_str(e) for e in s.exprs)]
    if isinstance(s, A.New):
        args = "(" + ", ".join(expr_str(e) for e in s.args) + ")"
        return [pad + f"{s.target} := new {s.cls}{args}"]
    if isinstance(s, A.If):
        out = [pad + f"if {expr_str(s.cond)} then"]
        out.extend(seq_lines(s.then, ind + 1))
        if s.orelse.stmts:
            out.append(pad + "else")
            out.extend(seq_lines(s.orelse, ind + 1))
        out.append(pad + "end")
        return out
    if isinstance(s, A.While):
        out = [pad + f"while {expr_str(s.cond)} do"]
        out.extend(seq_lines(s.body, ind + 1))
        out.append(pad + "end")
        return out
    if isinstance(s, A.Await):
        return [pad + "await " + guard_str(s.guard)]
    if isinstance(s, A.AsyncCall):
        tag = s.tag or ""
        args = ", ".join(expr_str(e) for e in s.args)
        return [pad + f"{tag}!{_callee(s.callee)}{s.method}({args})"]
    if isinstance(s, A.Reply):
        outs = "(" + ", ".join(s.outs) + ")" if s.outs else ""
        return [pad + f"{s.tag}?{outs}"]
    if isinstance(s, A.Skip):
        return [pad + "skip"]
    if isinstance(s, (A.SyncCall, A.AwaitCall)):
        kw = "await " if isinstance(s, A.AwaitCall) else ""
        args = ", ".join(expr_str(e) for e in s.args)
        return [pad + f"{kw}{_callee(s.callee)}{s.method}({args}; {', '.join(s.outs)})".replace("; )", ";)")]
    raise TypeError(f"not a statement: {s!r}")


def seq_lines(s: A.Seq, ind: int) -> list[str]:
    out: list[str] = []
    items = s.stmts
    for i, st in enumerate(items):
        lines = stmt_lines(st, ind)
        if i < len(items) - 1:
            lines[-1] += ";"
        out.extend(lines)
    return out


def _decl(d: A.VarDecl) -> str:
    s = f"var {d.name}: {type_str(d.type)}"
    if d.init is not None:
        s += " := " + expr_str(d.init)
    return s


def _sig(sig: A.MethodSig) -> str:
    parts = []
    if sig.ins:
        parts.append("in " + ", ".join(f"{p.name}: {type_str(p.type)}" for p in sig.ins))
    if sig.outs:
        parts.append("out " + ", ".join(f"{p.name}: {type_str(p.type)}" for p in sig.outs))
    return f"op {sig.name}" + (f"({' '.join(parts)})" if parts else "")


def _grouped(items, key):
    """Group consecutive items by co-interface, emitting a ``with`` line on change."""
    co = "Any"
    for it in items:
        k = key(it)
        yield (k if k != co else None), it
        co = k


def program_str(p: A.Program) -> str:
    out: list[str] = []
    for i in p.interfaces:
        out.append(f"interface {i.name}")
        out.append("begin")
        for co, sig in _grouped(i.sigs, lambda s: s.cointerface):
            if co:
                out.append(f"  with {co}")
            out.append("    " + _sig(sig))
        out.append("end")
        out.append("")
    for c in p.classes:
        head = f"class {c.name}"
        if c.params:
            head += "(" + ", ".join(f"{x.name}: {type_str(x.type)}" for x in c.params) + ")"
        else:
            head += "()"
        if c.implements:
            head += " implements " + ", ".join(c.implements)
        out.append(head)
        out.append("begin")
        for d in c.attrs:
            out.append("  " + _decl(d) + ";")
        for co, m in _grouped(c.methods, lambda m: m.sig.cointerface):
            if co:
                out.append(f"  with {co}")
            out.append("  " + _sig(m.sig) + " ==")
            for d in m.locals:
                out.append("    " + _decl(d) + ";")
            out.extend(seq_lines(m.body, 2))
            out.append("")
        out.append("end")
        out.append("")
    return "\n".join(out)
