"""Configurations: objects, processes, futures, in-flight invocations, clock.

Every record here is treated as immutable.  The semantics builds a new
``Configuration`` per transition, sharing whatever did not change, so a
configuration is a self-contained value that can be kept, compared and
hashed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Optional

from . import ast as A
from .evaluation import EvalError, eval_guard, evaluate
from .values import Env, FutRef, ObjRef, Value, default_for

RESULT = ".result"
CALLER = "caller"


class RuntimeFault(Exception):
    """Unrecoverable error in a run; halts the run."""

    def __init__(self, msg: str, obj: Optional[int] = None, loc: A.Loc = A.NOLOC):
        self.msg = msg
        self.obj = obj
        self.loc = loc
        where = f"object {obj}" if obj is not None else "configuration"
        super().__init__(f"{where} at {loc}: {msg}")


@dataclass(frozen=True, slots=True)
class Clock:
    time: int
    limit: int

    def __post_init__(self) -> None:
        if not 0 <= self.time <= self.limit:
            raise ValueError(f"clock time {self.time} outside [0, {self.limit}]")


@dataclass(frozen=True, slots=True)
class Future:
    id: int
    completed: bool = False
    refcount: int = 1
    value: tuple = ()


@dataclass(frozen=True, slots=True)
class Process:
    """A method activation.

    ``parent`` is the caller frame of a local synchronous call that is
    running nested on top of it; the caller sits at its reply statement.
    """

    method: str
    locals: Mapping[str, Value]
    body: tuple
    parent: Optional[Process] = None
    boot: bool = False  # the object's init activation; triggers run on return

    @property
    def result(self) -> Optional[int]:
        r = self.locals.get(RESULT)
        return r.id if isinstance(r, FutRef) else None

    def depth(self) -> int:
        return 1 if self.parent is None else 1 + self.parent.depth()


@dataclass(frozen=True, slots=True)
class ConcObject:
    id: int
    cls: str
    attrs: Mapping[str, Value]
    active: Optional[Process] = None
    queue: tuple = ()

    @property
    def idle(self) -> bool:
        return self.active is None


@dataclass(frozen=True, slots=True)
class Invoc:
    callee: int
    method: str
    args: tuple
    caller: int
    future: int


@dataclass(frozen=True)
class Configuration:
    objects: Mapping[int, ConcObject]
    futures: Mapping[int, Future]
    messages: tuple
    clock: Clock
    next_object: int
    next_future: int
    program: A.Program = field(compare=False, repr=False, default=None)

    @property
    def time(self) -> int:
        return self.clock.time

    def obj(self, oid: int) -> ConcObject:
        return self.objects[oid]

    def objects_of(self, cls: str) -> list[ConcObject]:
        return [o for o in self.objects.values() if o.cls == cls]

    # -- canonical forms

    def key(self) -> tuple:
        """Structural key; equal keys iff equal snapshots."""
        return (
            tuple(sorted((o.id, o.cls, _attrs_key(o.attrs), _proc_key(o.active), tuple(_proc_key(p) for p in o.queue))
                         for o in self.objects.values())),
            tuple(sorted((f.id, f.completed, f.refcount, f.value) for f in self.futures.values())),
            self.messages,
            self.clock.time,
            self.clock.limit,
            self.next_object,
            self.next_future,
        )

    def snapshot(self) -> str:
        return snapshot(self)

    def state_hash(self) -> str:
        return hashlib.sha256(self.snapshot().encode()).hexdigest()[:16]


def _attrs_key(attrs: Mapping[str, Value]) -> tuple:
    return tuple(sorted(attrs.items()))


def _proc_key(p: Optional[Process]):
    if p is None:
        return None
    return (p.method, tuple(sorted(p.locals.items())), p.body, p.boot, _proc_key(p.parent))


# ---------------------------------------------------------------- serialization


def _stmt_text(s: A.Stmt) -> str:
    from .printer import stmt_lines

    return " ".join(line.strip() for line in stmt_lines(s, 0))


def _proc_text(p: Optional[Process]) -> str:
    if p is None:
        return "idle"
    binds = ", ".join(f"{k} |-> {v}" for k, v in sorted(p.locals.items()))
    body = "; ".join(_stmt_text(s) for s in p.body)
    s = f"{{ {p.method} | {binds} | {body} }}"
    if p.boot:
        s += " boot"
    if p.parent is not None:
        s += " <- " + _proc_text(p.parent)
    return s


def snapshot(config: Configuration) -> str:
    """Line-oriented, stable-order text rendering of a configuration."""
    lines = [f"clock time: {config.clock.time} limit: {config.clock.limit}"]
    lines.append(f"counters object: {config.next_object} future: {config.next_future}")
    for oid in sorted(config.objects):
        o = config.objects[oid]
        attrs = ", ".join(f"{k} |-> {v}" for k, v in sorted(o.attrs.items()))
        lines.append(f"object {oid} : {o.cls} | Att: {attrs}")
        lines.append(f"  Pr: {_proc_text(o.active)}")
        for p in o.queue:
            lines.append(f"  PrQ: {_proc_text(p)}")
    for fid in sorted(config.futures):
        f = config.futures[fid]
        val = ", ".join(map(str, f.value))
        lines.append(f"future {fid} | Completed: {str(f.completed).lower()}, Ref: {f.refcount}, Value: [{val}]")
    for m in config.messages:
        args = ", ".join(map(str, m.args))
        lines.append(f"invoc ob{m.callee}.{m.method}([{args}]) from ob{m.caller} fut{m.future}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- construction


def initial_attrs(cls: A.ClassDecl, oid: int, args: tuple, clock: int) -> dict[str, Value]:
    """Bind class parameters, then evaluate attribute initializers in order."""
    attrs: dict[str, Value] = {"this": ObjRef(oid)}
    for p, v in zip(cls.params, args):
        attrs[p.name] = v
    for d in cls.attrs:
        attrs[d.name] = default_for(d.type.name)
    for d in cls.attrs:
        if d.init is not None:
            try:
                attrs[d.name] = evaluate(d.init, Env(attrs), clock)
            except EvalError as exc:
                raise RuntimeFault(exc.msg, oid, exc.loc) from None
    return attrs


def bind_locals(
    method: A.MethodDecl, args: tuple, attrs: Mapping[str, Value],
    caller: int, future: int, clock: int, oid: int,
) -> dict[str, Value]:
    """Process-local bindings for a fresh activation of ``method``."""
    loc: dict[str, Value] = {CALLER: ObjRef(caller), RESULT: FutRef(future)}
    for p, v in zip(method.sig.ins, args):
        loc[p.name] = v
    for p in method.sig.outs:
        loc[p.name] = default_for(p.type.name)
    for d in method.locals:
        loc[d.name] = default_for(d.type.name)
    for d in method.locals:
        if d.init is not None:
            try:
                loc[d.name] = evaluate(d.init, Env(attrs, loc), clock)
            except EvalError as exc:
                raise RuntimeFault(exc.msg, oid, exc.loc) from None
    return loc


def boot_processes(
    cls: A.ClassDecl, attrs: Mapping[str, Value], oid: int, creator: int,
    next_future: int, clock: int,
) -> tuple[Optional[Process], tuple, dict[int, Future], int]:
    """Initial activity of a new object: init active, or run queued when there is no init.

    Returns (active, queue, new futures, next future id).
    """
    futures: dict[int, Future] = {}
    init = cls.method("init")
    if init is not None:
        fid = next_future
        futures[fid] = Future(fid)
        p = Process("init", bind_locals(init, (), attrs, creator, fid, clock, oid), init.body.stmts, boot=True)
        return p, (), futures, next_future + 1
    run = cls.method("run")
    if run is not None:
        fid = next_future
        futures[fid] = Future(fid)
        p = Process("run", bind_locals(run, (), attrs, oid, fid, clock, oid), run.body.stmts)
        return None, (p,), futures, next_future + 1
    return None, (), futures, next_future


def init_configuration(program: A.Program, limit: int) -> Configuration:
    """One instance of the main class at clock (0, limit)."""
    if limit < 0:
        raise ValueError("limit must be a natural number")
    cls = program.cls(program.main)
    if cls is None:
        raise RuntimeFault(f"main class '{program.main}' is not declared")
    if cls.params:
        raise RuntimeFault(f"main class '{program.main}' must not take parameters")
    attrs = initial_attrs(cls, 0, (), 0)
    active, queue, futures, nf = boot_processes(cls, attrs, 0, 0, 0, 0)
    obj = ConcObject(0, cls.name, attrs, active, queue)
    return Configuration({0: obj}, futures, (), Clock(0, limit), 1, nf, program)


# ---------------------------------------------------------------- predicates


def _reply_local(p: Process, env: Env, futures: Mapping[int, Future], queue: tuple) -> bool:
    """A reply on an incomplete future whose activation waits in this object's queue."""
    head = p.body[0]
    ref = env.lookup(head.tag)
    if type(ref) is not FutRef:
        return False
    for q in queue:
        if q.parent is None and q.locals.get(RESULT) == ref:
            return True
    return False


def stmt_enabled(s: A.Stmt, env: Env, futures: Mapping[int, Future], clock: int) -> bool:
    """Enabledness of a statement by its first atomic statement (no lookahead)."""
    t = type(s)
    if t is A.Await:
        return eval_guard(s.guard, env, futures, clock)
    if t is A.Reply:
        ref = env.lookup(s.tag)
        if type(ref) is not FutRef:
            return False
        f = futures.get(ref.id)
        return f is not None and f.completed
    if t is A.Choice:
        return seq_enabled(s.left, env, futures, clock) or seq_enabled(s.right, env, futures, clock)
    if t is A.Seq:
        return seq_enabled(s, env, futures, clock)
    return True


def seq_enabled(s: A.Seq, env: Env, futures: Mapping[int, Future], clock: int) -> bool:
    if not s.stmts:
        return True
    return stmt_enabled(s.stmts[0], env, futures, clock)


def enabled(
    process: Process, attrs: Mapping[str, Value], futures: Mapping[int, Future], clock: int,
    queue: tuple = (),
) -> bool:
    """Can ``process`` take a step now?  Looks at its first statement only.

    ``queue`` is the owning object's process queue; a reply on a local call
    whose activation is queued there is enabled (the callee runs nested).
    """
    if not process.body:
        return True
    env = Env(attrs, process.locals)
    head = process.body[0]
    if stmt_enabled(head, env, futures, clock):
        return True
    if type(head) is A.Reply and queue:
        return _reply_local(process, env, futures, queue)
    return False


def releasable(p: Process) -> bool:
    """A blocked frame that may give up the processor (await or choice at top level)."""
    return p.parent is None and bool(p.body) and type(p.body[0]) in (A.Await, A.Choice)


def object_can_advance(o: ConcObject, futures: Mapping[int, Future], clock: int) -> bool:
    """No process of ``o`` can make progress at this clock value."""
    if o.active is not None:
        if enabled(o.active, o.attrs, futures, clock, o.queue):
            return False
        if not releasable(o.active):
            return True
    return not any(enabled(p, o.attrs, futures, clock) for p in o.queue)


def can_advance(config: Configuration) -> bool:
    """False iff an invocation is in flight, some active process is enabled, or
    some enabled queued process could get the processor (its object is idle
    or its active process is blocked at a release point)."""
    if config.messages:
        return False
    futures, clock = config.futures, config.clock.time
    for o in config.objects.values():
        if not object_can_advance(o, futures, clock):
            return False
    return True


def dangling_refs(config: Configuration) -> list[str]:
    """Object or future references that do not resolve; empty in every reachable configuration."""
    from .values import future_refs, object_refs

    bad: list[str] = []

    def scan(where: str, v: Value) -> None:
        for r in future_refs(v):
            if r.id not in config.futures:
                bad.append(f"{where}: {r}")
        for r in object_refs(v):
            if r.id not in config.objects:
                bad.append(f"{where}: {r}")

    def scan_proc(where: str, p: Optional[Process]) -> None:
        while p is not None:
            for k, v in p.locals.items():
                scan(f"{where}.{k}", v)
            p = p.parent

    for o in config.objects.values():
        for k, v in o.attrs.items():
            scan(f"ob{o.id}.{k}", v)
        scan_proc(f"ob{o.id}.Pr", o.active)
        for p in o.queue:
            scan_proc(f"ob{o.id}.PrQ", p)
    for f in config.futures.values():
        for v in f.value:
            scan(f"fut{f.id}", v)
    for m in config.messages:
        if m.future not in config.futures:
            bad.append(f"invoc future fut{m.future}")
        for v in m.args:
            scan(f"invoc {m.method}", v)
    return bad
