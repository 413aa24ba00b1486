"""Small-step transition rules over configurations.

``applicable`` lists every rule instance that can fire; ``apply`` fires one
and returns a new configuration.  Rule names:

    assign new if while skip choice await suspend async-call
    message-receive activate reply local-call return tick

A reply on a local call whose activation sits in the caller's own queue
fires ``local-call``: the callee runs nested on top of the caller frame
and the object stays held until it returns.  A blocked active process is
only suspended (``suspend``) when some queued process of the same object
is enabled; otherwise it keeps the processor and simply waits, so a tick
never competes with any other transition.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional

from . import ast as A
from .evaluation import EvalError, eval_guard, evaluate
from .runtime import (
    RESULT,
    Clock,
    ConcObject,
    Configuration,
    Future,
    Invoc,
    Process,
    RuntimeFault,
    bind_locals,
    boot_processes,
    can_advance,
    enabled,
    initial_attrs,
    releasable,
    seq_enabled,
)
from .values import BoolV, Env, FutRef, ObjRef, Value, future_refs

TICK = "tick"


@dataclass(frozen=True, slots=True)
class Transition:
    rule: str
    subject: Optional[int]  # object id; None for the clock
    detail: int = 0
    info: str = ""

    def sort_key(self) -> tuple:
        return (self.rule, -1 if self.subject is None else self.subject, self.detail)

    def to_record(self) -> dict:
        return {
            "rule": self.rule,
            "subject": "clock" if self.subject is None else self.subject,
            "detail": self.detail,
            "info": self.info,
        }


# ---------------------------------------------------------------- enumeration


def _active_transitions(o: ConcObject, futures: Mapping[int, Future], clock: int, out: list) -> None:
    p = o.active
    if not p.body:
        out.append(Transition("return", o.id, 0, p.method))
        return
    head = p.body[0]
    t = type(head)
    if t is A.Assign:
        out.append(Transition("assign", o.id, 0, p.method))
    elif t is A.AsyncCall:
        out.append(Transition("async-call", o.id, 0, p.method))
    elif t is A.If:
        out.append(Transition("if", o.id, 0, p.method))
    elif t is A.While:
        out.append(Transition("while", o.id, 0, p.method))
    elif t is A.New:
        out.append(Transition("new", o.id, 0, p.method))
    elif t is A.Skip:
        out.append(Transition("skip", o.id, 0, p.method))
    elif t is A.Seq:
        out.append(Transition("skip", o.id, 0, p.method))
    else:
        env = Env(o.attrs, p.locals)
        if t is A.Await:
            if eval_guard(head.guard, env, futures, clock):
                out.append(Transition("await", o.id, 0, p.method))
                return
        elif t is A.Choice:
            n = len(out)
            if seq_enabled(head.left, env, futures, clock):
                out.append(Transition("choice", o.id, 0, p.method))
            if seq_enabled(head.right, env, futures, clock):
                out.append(Transition("choice", o.id, 1, p.method))
            if len(out) > n:
                return
        elif t is A.Reply:
            ref = env.lookup(head.tag)
            if type(ref) is FutRef:
                f = futures.get(ref.id)
                if f is not None and f.completed:
                    out.append(Transition("reply", o.id, 0, p.method))
                    return
                for i, q in enumerate(o.queue):
                    if q.parent is None and q.locals.get(RESULT) == ref:
                        out.append(Transition("local-call", o.id, i, q.method))
                        return
            return  # a blocked reply holds the object
        # blocked await or choice: release only if someone else can use the processor
        if releasable(p):
            for q in o.queue:
                if enabled(q, o.attrs, futures, clock):
                    out.append(Transition("suspend", o.id, 0, p.method))
                    break


def applicable(config: Configuration) -> list[Transition]:
    """Every applicable transition, sorted by (rule, subject, detail)."""
    out: list[Transition] = []
    futures, clock = config.futures, config.clock.time
    for oid in sorted(config.objects):
        o = config.objects[oid]
        if o.active is not None:
            _active_transitions(o, futures, clock, out)
        else:
            for i, q in enumerate(o.queue):
                if enabled(q, o.attrs, futures, clock):
                    out.append(Transition("activate", oid, i, q.method))
    for i, m in enumerate(config.messages):
        out.append(Transition("message-receive", m.callee, i, m.method))
    if config.clock.time < config.clock.limit and can_advance(config):
        out.append(Transition(TICK, None, 0, ""))
    out.sort(key=Transition.sort_key)
    return out


def statement_transitions(config: Configuration) -> list[Transition]:
    return [t for t in applicable(config) if t.rule != TICK]


# ---------------------------------------------------------------- helpers


def _fault(msg: str, oid: int, loc: A.Loc = A.NOLOC) -> RuntimeFault:
    return RuntimeFault(msg, oid, loc)


def _eval(e: A.Expr, o: ConcObject, p: Process, clock: int) -> Value:
    try:
        return evaluate(e, Env(o.attrs, p.locals), clock)
    except EvalError as exc:
        raise _fault(exc.msg, o.id, exc.loc) from None


_READONLY_CACHE: dict[tuple[int, str, str], frozenset] = {}


def _readonly(program: A.Program, cls: str, method: str) -> frozenset:
    key = (id(program), cls, method)
    r = _READONLY_CACHE.get(key)
    if r is None:
        c = program.cls(cls)
        names = {"this", "caller", "now", RESULT}
        if c is not None:
            names |= {x.name for x in c.params}
            m = c.method(method)
            if m is not None:
                names |= {x.name for x in m.sig.ins}
                names -= {d.name for d in m.locals}
        r = frozenset(names)
        _READONLY_CACHE[key] = r
    return r


def _write(o: ConcObject, p: Process, names, values, program: A.Program, loc: A.Loc,
           check_readonly: bool = True) -> tuple[dict, dict]:
    """Assign ``values`` to ``names``; returns new (attrs, locals)."""
    attrs, locs = o.attrs, p.locals
    new_attrs: Optional[dict] = None
    new_locs: Optional[dict] = None
    ro = _readonly(program, o.cls, p.method) if check_readonly else frozenset()
    for name, v in zip(names, values):
        if name in ro:
            raise _fault(f"assignment to read-only name '{name}'", o.id, loc)
        if name in locs or name.startswith("$"):
            if new_locs is None:
                new_locs = dict(locs)
            new_locs[name] = v
        elif name in attrs:
            if new_attrs is None:
                new_attrs = dict(attrs)
            new_attrs[name] = v
        else:
            raise _fault(f"assignment to undeclared name '{name}'", o.id, loc)
    return (attrs if new_attrs is None else new_attrs), (locs if new_locs is None else new_locs)


def _objects_with(config: Configuration, *objs: ConcObject) -> dict:
    d = dict(config.objects)
    for o in objs:
        d[o.id] = o
    return d


def _continue(config: Configuration, o: ConcObject, p: Process, body: tuple,
              attrs=None, locs=None, **extra) -> Configuration:
    """Replace the active process of ``o`` with an updated frame."""
    np = Process(p.method, p.locals if locs is None else locs, body, p.parent, p.boot)
    no = ConcObject(o.id, o.cls, o.attrs if attrs is None else attrs, np, o.queue)
    return replace(config, objects=_objects_with(config, no), **extra)


def _flatten(stmts: tuple) -> tuple:
    if any(type(s) is A.Seq for s in stmts):
        out: list = []
        for s in stmts:
            if type(s) is A.Seq:
                out.extend(_flatten(s.stmts))
            else:
                out.append(s)
        return tuple(out)
    return stmts


# ---------------------------------------------------------------- step rules


def step_basic(config: Configuration, t: Transition) -> Configuration:
    """assign / if / while / skip / choice."""
    o = config.objects[t.subject]
    p = o.active
    head, rest = p.body[0], p.body[1:]
    clock = config.clock.time
    if t.rule == "assign":
        values = [_eval(e, o, p, clock) for e in head.exprs]
        attrs, locs = _write(o, p, head.targets, values, config.program, head.loc)
        return _continue(config, o, p, rest, attrs, locs)
    if t.rule == "if":
        c = _eval(head.cond, o, p, clock)
        if type(c) is not BoolV:
            raise _fault(f"condition is not Boolean: {c}", o.id, head.loc)
        branch = head.then if c.v else head.orelse
        return _continue(config, o, p, _flatten(branch.stmts) + rest)
    if t.rule == "while":
        unrolled = A.If(head.cond, A.Seq(head.body.stmts + (head,)), A.Seq(()), head.loc)
        return _continue(config, o, p, (unrolled,) + rest)
    if t.rule == "skip":
        if type(head) is A.Seq:
            return _continue(config, o, p, _flatten(head.stmts) + rest)
        return _continue(config, o, p, rest)
    if t.rule == "choice":
        branch = head.left if t.detail == 0 else head.right
        env = Env(o.attrs, p.locals)
        if not seq_enabled(branch, env, config.futures, clock):
            raise ValueError("choice branch is not enabled")
        return _continue(config, o, p, _flatten(branch.stmts) + rest)
    raise ValueError(f"not a basic rule: {t.rule}")


def step_await(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    p = o.active
    return _continue(config, o, p, p.body[1:])


def step_suspend(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    no = ConcObject(o.id, o.cls, o.attrs, None, o.queue + (o.active,))
    return replace(config, objects=_objects_with(config, no))


def step_activate(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    if o.active is not None:
        raise ValueError("activate on a busy object")
    q = o.queue
    no = ConcObject(o.id, o.cls, o.attrs, q[t.detail], q[: t.detail] + q[t.detail + 1:])
    return replace(config, objects=_objects_with(config, no))


def step_async_call(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    p = o.active
    head = p.body[0]
    clock = config.clock.time
    callee = _eval(head.callee, o, p, clock) if head.callee is not None else ObjRef(o.id)
    if type(callee) is not ObjRef:
        raise _fault(f"call of '{head.method}' on {callee}", o.id, head.loc)
    args = tuple(_eval(e, o, p, clock) for e in head.args)
    fid = config.next_future
    futures = dict(config.futures)
    futures[fid] = Future(fid)
    attrs, locs = o.attrs, p.locals
    if head.tag is not None:
        attrs, locs = _write(o, p, (head.tag,), (FutRef(fid),), config.program, head.loc, check_readonly=False)
    msg = Invoc(callee.id, head.method, args, o.id, fid)
    return _continue(
        config, o, p, p.body[1:], attrs, locs,
        futures=futures, messages=config.messages + (msg,), next_future=fid + 1,
    )


def _bump_refs(futures: dict, values) -> None:
    for v in values:
        for r in future_refs(v):
            f = futures.get(r.id)
            if f is not None:
                futures[r.id] = replace(f, refcount=f.refcount + 1)


def step_message_receive(config: Configuration, t: Transition) -> Configuration:
    m = config.messages[t.detail]
    o = config.objects.get(m.callee)
    if o is None:
        raise _fault(f"invocation of '{m.method}' on unknown object {m.callee}", m.caller)
    cls = config.program.cls(o.cls)
    method = cls.method(m.method) if cls is not None else None
    if method is None:
        raise _fault(f"class '{o.cls}' has no method '{m.method}'", o.id)
    if len(method.sig.ins) != len(m.args):
        raise _fault(f"'{m.method}' expects {len(method.sig.ins)} arguments, got {len(m.args)}", o.id)
    locs = bind_locals(method, m.args, o.attrs, m.caller, m.future, config.clock.time, o.id)
    extra = {}
    if m.callee != m.caller and any(True for v in m.args for _ in future_refs(v)):
        futures = dict(config.futures)
        _bump_refs(futures, m.args)
        extra["futures"] = futures
    proc = Process(m.method, locs, method.body.stmts)
    no = ConcObject(o.id, o.cls, o.attrs, o.active, o.queue + (proc,))
    msgs = config.messages[: t.detail] + config.messages[t.detail + 1:]
    return replace(config, objects=_objects_with(config, no), messages=msgs, **extra)


def step_reply(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    p = o.active
    head = p.body[0]
    ref = Env(o.attrs, p.locals).lookup(head.tag)
    f = config.futures[ref.id]
    if head.outs and len(head.outs) != len(f.value):
        raise _fault(
            f"reply expects {len(head.outs)} values, future holds {len(f.value)}", o.id, head.loc
        )
    if not head.outs:
        return _continue(config, o, p, p.body[1:])
    attrs, locs = _write(o, p, head.outs, f.value, config.program, head.loc)
    extra = {}
    if any(True for v in f.value for _ in future_refs(v)):
        futures = dict(config.futures)
        _bump_refs(futures, f.value)
        extra["futures"] = futures
    return _continue(config, o, p, p.body[1:], attrs, locs, **extra)


def step_local_call(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    q = o.queue[t.detail]
    callee = Process(q.method, q.locals, q.body, o.active, q.boot)
    no = ConcObject(o.id, o.cls, o.attrs, callee, o.queue[: t.detail] + o.queue[t.detail + 1:])
    return replace(config, objects=_objects_with(config, no))


def step_return(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    p = o.active
    cls = config.program.cls(o.cls)
    method = cls.method(p.method)
    outs = tuple(p.locals[x.name] for x in method.sig.outs)
    fid = p.result
    futures = dict(config.futures)
    futures[fid] = Future(fid, True, futures[fid].refcount, outs)
    messages = config.messages
    next_future = config.next_future
    if p.boot and cls.method("run") is not None:
        rf = next_future
        futures[rf] = Future(rf)
        messages = messages + (Invoc(o.id, "run", (), o.id, rf),)
        next_future += 1
    no = ConcObject(o.id, o.cls, o.attrs, p.parent, o.queue)
    return replace(
        config, objects=_objects_with(config, no), futures=futures,
        messages=messages, next_future=next_future,
    )


def step_new(config: Configuration, t: Transition) -> Configuration:
    o = config.objects[t.subject]
    p = o.active
    head = p.body[0]
    clock = config.clock.time
    cls = config.program.cls(head.cls)
    if cls is None:
        raise _fault(f"unknown class '{head.cls}'", o.id, head.loc)
    args = tuple(_eval(e, o, p, clock) for e in head.args)
    if len(args) != len(cls.params):
        raise _fault(f"'{head.cls}' expects {len(cls.params)} arguments", o.id, head.loc)
    nid = config.next_object
    attrs = initial_attrs(cls, nid, args, clock)
    active, queue, new_futs, nf = boot_processes(cls, attrs, nid, o.id, config.next_future, clock)
    futures = config.futures
    if new_futs:
        futures = dict(futures)
        futures.update(new_futs)
    child = ConcObject(nid, cls.name, attrs, active, queue)
    a, locs = _write(o, p, (head.target,), (ObjRef(nid),), config.program, head.loc)
    np = Process(p.method, locs, p.body[1:], p.parent, p.boot)
    parent = ConcObject(o.id, o.cls, a, np, o.queue)
    return replace(
        config, objects=_objects_with(config, parent, child), futures=futures,
        next_object=nid + 1, next_future=nf,
    )


def step_tick(config: Configuration, t: Transition) -> Configuration:
    c = config.clock
    if c.time >= c.limit or not can_advance(config):
        raise ValueError("tick is not applicable")
    return replace(config, clock=Clock(c.time + 1, c.limit))


RULES = {
    "assign": step_basic,
    "if": step_basic,
    "while": step_basic,
    "skip": step_basic,
    "choice": step_basic,
    "await": step_await,
    "suspend": step_suspend,
    "activate": step_activate,
    "async-call": step_async_call,
    "message-receive": step_message_receive,
    "reply": step_reply,
    "local-call": step_local_call,
    "return": step_return,
    "new": step_new,
    TICK: step_tick,
}


def apply(config: Configuration, t: Transition) -> Configuration:
    """Fire ``t`` (which must come from ``applicable(config)``)."""
    return RULES[t.rule](config, t)
