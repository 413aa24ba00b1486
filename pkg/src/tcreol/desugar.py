"""Rewrite call sugar into core statements.

* ``o.m(e; x)``        -> ``$tN!o.m(e); $tN?(x)``
* ``await o.m(e; x)``  -> ``$tN!o.m(e); await $tN?; $tN?(x)``
* ``t!m(e)``           -> ``t!this.m(e)``

Generated tags start with ``$``, which the lexer rejects, so they cannot
collide with user names.
"""

from __future__ import annotations

import itertools
from dataclasses import replace

from . import ast as A

TAG_PREFIX = "$t"


def desugar(program: A.Program) -> A.Program:
    counter = itertools.count()
    classes = []
    for c in program.classes:
        methods = tuple(
            replace(m, body=_seq(m.body, counter)) for m in c.methods
        )
        classes.append(replace(c, methods=methods))
    return replace(program, classes=tuple(classes))


def _callee(c):
    return A.This() if c is None else c


def _seq(s: A.Seq, counter) -> A.Seq:
    out: list[A.Stmt] = []
    for st in s.stmts:
        out.extend(_stmt(st, counter))
    return A.Seq(tuple(out))


def _stmt(s: A.Stmt, counter) -> list[A.Stmt]:
    if isinstance(s, A.SyncCall):
        tag = f"{TAG_PREFIX}{next(counter)}"
        return [
            A.AsyncCall(tag, _callee(s.callee), s.method, s.args, s.loc),
            A.Reply(tag, s.outs, s.loc),
        ]
    if isinstance(s, A.AwaitCall):
        tag = f"{TAG_PREFIX}{next(counter)}"
        return [
            A.AsyncCall(tag, _callee(s.callee), s.method, s.args, s.loc),
            A.Await(A.TagGuard(tag, s.loc), s.loc),
            A.Reply(tag, s.outs, s.loc),
        ]
    if isinstance(s, A.AsyncCall):
        if s.callee is None:
            return [replace(s, callee=A.This(s.loc))]
        return [s]
    if isinstance(s, A.Choice):
        return [replace(s, left=_seq(s.left, counter), right=_seq(s.right, counter))]
    if isinstance(s, A.If):
        return [replace(s, then=_seq(s.then, counter), orelse=_seq(s.orelse, counter))]
    if isinstance(s, A.While):
        return [replace(s, body=_seq(s.body, counter))]
    if isinstance(s, A.Seq):
        return list(_seq(s, counter).stmts)
    return [s]


def has_sugar(program: A.Program) -> bool:
    for c in program.classes:
        for m in c.methods:
            for s in A.walk_stmts(m.body):
                if isinstance(s, A.SUGAR_NODES):
                    return True
                if isinstance(s, A.AsyncCall) and s.callee is None:
                    return True
    return False
