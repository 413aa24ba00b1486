"""Expression and guard evaluation against the global clock."""

from __future__ import annotations

from typing import Callable, Mapping, Optional

from . import ast as A
from .values import (
    EMPTY_LIST,
    FALSE,
    NULL,
    TRUE,
    BoolV,
    Env,
    FutRef,
    IntV,
    ListV,
    MapV,
    ObjRef,
    SetV,
    StrV,
    TimeV,
    TupleV,
    Value,
)


class EvalError(Exception):
    """A runtime fault raised while evaluating an expression."""

    def __init__(self, msg: str, loc: A.Loc = A.NOLOC):
        super().__init__(msg)
        self.msg = msg
        self.loc = loc


def _int(v: Value, e: A.Expr) -> int:
    if type(v) is not IntV:
        raise EvalError(f"expected Int, got {v}", e.loc)
    return v.v


def _bool(v: Value, e: A.Expr) -> bool:
    if type(v) is not BoolV:
        raise EvalError(f"expected Bool, got {v}", e.loc)
    return v.v


def _arith(op: str, a: Value, b: Value, e: A.Binary) -> Value:
    ta, tb = type(a), type(b)
    if ta is IntV and tb is IntV:
        x, y = a.v, b.v
        if op == "+":
            return IntV(x + y)
        if op == "-":
            return IntV(x - y)
        if op == "*":
            return IntV(x * y)
        if y == 0:
            raise EvalError("division by zero", e.loc)
        q = abs(x) // abs(y)
        if (x < 0) != (y < 0):
            q = -q
        return IntV(q) if op == "/" else IntV(x - q * y)
    if op == "+":
        if ta is TimeV and tb is IntV:
            return TimeV(max(0, a.t + b.v))
        if ta is IntV and tb is TimeV:
            return TimeV(max(0, a.v + b.t))
        if ta is StrV and tb is StrV:
            return StrV(a.v + b.v)
    if op == "-":
        if ta is TimeV and tb is IntV:
            return TimeV(max(0, a.t - b.v))
        if ta is TimeV and tb is TimeV:
            return IntV(a.t - b.t)
    raise EvalError(f"operator {op} undefined for {a} and {b}", e.loc)


def _compare(op: str, a: Value, b: Value, e: A.Binary) -> Value:
    ta = type(a)
    if ta is not type(b) or ta not in (IntV, TimeV, StrV):
        raise EvalError(f"cannot compare {a} and {b}", e.loc)
    x = a.t if ta is TimeV else a.v
    y = b.t if ta is TimeV else b.v
    if op == "<":
        r = x < y
    elif op == ">":
        r = x > y
    elif op == "<=":
        r = x <= y
    else:
        r = x >= y
    return TRUE if r else FALSE


def _member(a: Value, b: Value, e: A.Binary) -> Value:
    if isinstance(b, (ListV, TupleV)):
        return TRUE if a in b.items else FALSE
    if isinstance(b, SetV):
        return TRUE if a in b.items else FALSE
    if isinstance(b, MapV):
        return TRUE if b.get(a) is not None else FALSE
    raise EvalError(f"'in' needs a collection, got {b}", e.loc)


def _binary(e: A.Binary, env: Env, clock: int) -> Value:
    op = e.op
    a = evaluate(e.left, env, clock)
    b = evaluate(e.right, env, clock)
    if op in ("+", "-", "*", "/", "%"):
        return _arith(op, a, b, e)
    if op in ("<", ">", "<=", ">="):
        return _compare(op, a, b, e)
    if op == "=":
        return TRUE if a == b else FALSE
    if op == "/=":
        return FALSE if a == b else TRUE
    if op == "&&":
        return TRUE if _bool(a, e.left) and _bool(b, e.right) else FALSE
    if op == "||":
        return TRUE if _bool(a, e.left) or _bool(b, e.right) else FALSE
    if op == "in":
        return _member(a, b, e)
    if op == "|-":
        if isinstance(a, ListV):
            return ListV(a.items + (b,))
        raise EvalError(f"'|-' needs a list on the left, got {a}", e.loc)
    if op == "-|":
        if isinstance(b, ListV):
            return ListV((a,) + b.items)
        raise EvalError(f"'-|' needs a list on the right, got {b}", e.loc)
    if op == "|-|":
        if isinstance(a, ListV) and isinstance(b, ListV):
            return ListV(a.items + b.items)
        if isinstance(a, SetV) and isinstance(b, SetV):
            return SetV(a.items | b.items)
        raise EvalError(f"'|-|' needs two lists or two sets, got {a} and {b}", e.loc)
    raise EvalError(f"unknown operator {op}", e.loc)


def _length(v: Value, e: A.Expr) -> int:
    if isinstance(v, (ListV, TupleV, SetV)):
        return len(v.items)
    if isinstance(v, MapV):
        return len(v.pairs)
    if isinstance(v, StrV):
        return len(v.v)
    raise EvalError(f"'#' needs a collection, got {v}", e.loc)


def _nonempty_list(v: Value, e: A.Call) -> ListV:
    if not isinstance(v, ListV):
        raise EvalError(f"{e.func} needs a list, got {v}", e.loc)
    if not v.items:
        raise EvalError(f"{e.func} of empty list", e.loc)
    return v


def _fn_head(e, a):
    return _nonempty_list(a[0], e).items[0]


def _fn_tail(e, a):
    return ListV(_nonempty_list(a[0], e).items[1:])


def _fn_isempty(e, a):
    return TRUE if _length(a[0], e) == 0 else FALSE


def _fn_length(e, a):
    return IntV(_length(a[0], e))


def _fn_empty(e, a):
    return MapV(())


def _fn_emptyset(e, a):
    return SetV(frozenset())


def _fn_insert(e, a):
    if len(a) == 3 and isinstance(a[0], MapV):
        return a[0].insert(a[1], a[2])
    if len(a) == 2 and isinstance(a[0], SetV):
        return SetV(a[0].items | {a[1]})
    raise EvalError("insert expects (map, key, value) or (set, element)", e.loc)


def _fn_get(e, a):
    m = a[0]
    if not isinstance(m, MapV):
        raise EvalError(f"get needs a map, got {m}", e.loc)
    v = m.get(a[1])
    if v is None:
        raise EvalError(f"map lookup miss for key {a[1]}", e.loc)
    return v


def _fn_remove(e, a):
    if isinstance(a[0], MapV):
        return a[0].remove(a[1])
    if isinstance(a[0], SetV):
        return SetV(a[0].items - {a[1]})
    if isinstance(a[0], ListV):
        return ListV(tuple(x for x in a[0].items if x != a[1]))
    raise EvalError("remove needs a map, set or list", e.loc)


def _fn_keys(e, a):
    if not isinstance(a[0], MapV):
        raise EvalError("keys needs a map", e.loc)
    return SetV(frozenset(a[0].keys()))


def _fn_nth(e, a):
    c, i = a[0], a[1]
    if not isinstance(c, (ListV, TupleV)) or not isinstance(i, IntV):
        raise EvalError("nth expects (list or tuple, Int)", e.loc)
    if not 0 <= i.v < len(c.items):
        raise EvalError(f"index {i.v} out of range", e.loc)
    return c.items[i.v]


def _fn_fst(e, a):
    return _fn_nth(e, (a[0], IntV(0)))


def _fn_snd(e, a):
    return _fn_nth(e, (a[0], IntV(1)))


# name -> (allowed arities, implementation)
BUILTINS: dict[str, tuple[tuple[int, ...], Callable]] = {
    "head": ((1,), _fn_head),
    "tail": ((1,), _fn_tail),
    "isempty": ((1,), _fn_isempty),
    "length": ((1,), _fn_length),
    "empty": ((0,), _fn_empty),
    "emptyset": ((0,), _fn_emptyset),
    "insert": ((2, 3), _fn_insert),
    "get": ((2,), _fn_get),
    "remove": ((2,), _fn_remove),
    "keys": ((1,), _fn_keys),
    "nth": ((2,), _fn_nth),
    "fst": ((1,), _fn_fst),
    "snd": ((1,), _fn_snd),
}


def evaluate(e: A.Expr, env: Env, clock: int) -> Value:
    """Evaluate ``e``; only ``now`` depends on ``clock``."""
    t = type(e)
    if t is A.Var:
        v = env.lookup(e.name)
        if v is None:
            raise EvalError(f"unbound name {e.name}", e.loc)
        return v
    if t is A.Lit:
        v = e.value
        if type(v) is bool:
            return TRUE if v else FALSE
        if type(v) is int:
            return IntV(v)
        return StrV(v)
    if t is A.Binary:
        return _binary(e, env, clock)
    if t is A.Now:
        return TimeV(clock)
    if t is A.Unary:
        v = evaluate(e.operand, env, clock)
        if e.op == "~":
            return FALSE if _bool(v, e.operand) else TRUE
        if e.op == "-":
            return IntV(-_int(v, e.operand))
        return IntV(_length(v, e.operand))
    if t is A.Call:
        arities, fn = BUILTINS.get(e.func, ((), None))
        if fn is None:
            raise EvalError(f"unknown function {e.func}", e.loc)
        if len(e.args) not in arities:
            raise EvalError(f"{e.func} takes {arities} arguments", e.loc)
        return fn(e, tuple(evaluate(a, env, clock) for a in e.args))
    if t is A.TupleLit:
        return TupleV(tuple(evaluate(a, env, clock) for a in e.items))
    if t is A.ListLit:
        return ListV(tuple(evaluate(a, env, clock) for a in e.items))
    if t is A.SetLit:
        return SetV(frozenset(evaluate(a, env, clock) for a in e.items))
    if t is A.Nil:
        return EMPTY_LIST
    if t is A.Null:
        return NULL
    if t is A.This:
        v = env.lookup("this")
        if v is None:
            raise EvalError("'this' is unbound", e.loc)
        return v
    raise EvalError(f"cannot evaluate {e!r}")


def eval_guard(g: A.Guard, env: Env, futures: Mapping[int, object], clock: int) -> bool:
    """Evaluate a guard; total on well-typed input.

    ``futures`` maps future ids to something with a ``completed`` attribute
    (or directly to a bool).  An unbound or non-future tag is false.
    """
    t = type(g)
    if t is A.BoolGuard:
        try:
            v = evaluate(g.expr, env, clock)
        except EvalError:
            return False
        return type(v) is BoolV and v.v
    if t is A.TagGuard:
        ref = env.lookup(g.tag)
        if type(ref) is not FutRef:
            return False
        fut = futures.get(ref.id)
        if fut is None:
            return False
        return fut if type(fut) is bool else fut.completed
    if t is A.AndGuard:
        a = eval_guard(g.left, env, futures, clock)
        b = eval_guard(g.right, env, futures, clock)
        return a and b
    a = eval_guard(g.left, env, futures, clock)
    b = eval_guard(g.right, env, futures, clock)
    return a or b


def guard_fault(g: A.Guard, env: Env, clock: int) -> Optional[EvalError]:
    """Return the fault a boolean guard would raise, if any (used for diagnostics)."""
    if isinstance(g, A.BoolGuard):
        try:
            evaluate(g.expr, env, clock)
        except EvalError as exc:
            return exc
        return None
    if isinstance(g, (A.AndGuard, A.OrGuard)):
        return guard_fault(g.left, env, clock) or guard_fault(g.right, env, clock)
    return None


def object_id(v: Value) -> Optional[int]:
    return v.id if type(v) is ObjRef else None
