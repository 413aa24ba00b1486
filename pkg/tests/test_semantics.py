from __future__ import annotations

import dataclasses
import random

import pytest

from conftest import bundled_config, config_of
from tcreol import bundled_models
from tcreol.desugar import desugar
from tcreol.parser import parse, parse_stmt
from tcreol.runtime import Clock, Future, Invoc, Process, RuntimeFault
from tcreol.runtime import init_configuration
from tcreol.scheduler import Policy, run
from tcreol.semantics import TICK, Transition, applicable, apply
from tcreol.values import BoolV, FutRef, IntV, MapV, ObjRef, TimeV, TupleV

SENSOR = bundled_models()["star-resend"].read_text()


def rules(c):
    return [t.rule for t in applicable(c)]


def step(c, rule, subject=0, detail=0):
    for t in applicable(c):
        if t.rule == rule and t.subject == subject and t.detail == detail:
            return apply(c, t)
    raise AssertionError(f"{rule} not applicable: {applicable(c)}")


def activate_run(src, limit=10):
    c = config_of(src, limit)
    return step(c, "activate")


def with_active(c, body_src, oid=0, **locs):
    """Replace the active process of ``oid`` by a synthetic one."""
    o = c.objects[oid]
    locs = {"caller": ObjRef(oid), ".result": FutRef(99), **locs}
    p = Process("m", locs, parse_stmt(body_src).stmts)
    futures = {**c.futures, 99: Future(99)}
    return dataclasses.replace(c, objects={**c.objects, oid: dataclasses.replace(o, active=p)},
                               futures=futures, next_future=max(c.next_future, 100))


# -- applicable

def test_quiescent_only_tick():
    c = dataclasses.replace(config_of("class Main begin end"), clock=Clock(5, 10))
    assert rules(c) == [TICK]


def test_terminal_at_limit():
    c = dataclasses.replace(config_of("class Main begin end", 10), clock=Clock(10, 10))
    assert applicable(c) == []


def test_choice_offers_both_branches():
    c = activate_run("class Main begin var x: Int; op run == x := 1 [] x := 2 end")
    ts = applicable(c)
    assert [(t.rule, t.detail) for t in ts] == [("choice", 0), ("choice", 1)]
    assert apply(apply(c, ts[1]), applicable(apply(c, ts[1]))[0]).objects[0].attrs["x"] == IntV(2)


def test_transition_order_is_total():
    ts = [Transition("tick", None), Transition("activate", 2, 1), Transition("activate", 1, 0),
          Transition("activate", 1, 3)]
    assert [t.sort_key() for t in sorted(ts, key=Transition.sort_key)] == [
        ("activate", 1, 0), ("activate", 1, 3), ("activate", 2, 1), ("tick", -1, 0)]


# -- async call and message receive

NET = """
class Net()
begin
  op broadcast(in data: [Int, Int]) == skip
end
class Main
begin
  var network: Net;
  var l: Tag[ ];
  op init == network := new Net()
  op run == l!network.broadcast((1, 0)); !network.broadcast((2, 0)); l!this.sense()
  op sense == skip
end
"""


def _net_run():
    c = config_of(NET)
    c = step(c, "new")
    c = step(c, "return")  # init done -> run invocation
    c = step(c, "message-receive")
    return step(c, "activate")


def test_async_call_creates_future_and_invoc():
    c = _net_run()
    n = c.next_future
    c2 = step(c, "async-call")
    assert c2.futures[n] == Future(n, False, 1, ())
    assert c2.objects[0].attrs["l"] == FutRef(n)
    (m,) = c2.messages
    assert m == Invoc(1, "broadcast", (TupleV((IntV(1), IntV(0))),), 0, n)


def test_anonymous_and_local_calls():
    c = step(step(_net_run(), "async-call"), "async-call")
    assert len(c.messages) == 2 and c.messages[1].method == "broadcast"
    c = step(c, "async-call")
    assert c.messages[2].callee == 0 and c.messages[2].method == "sense"


def test_call_on_null_faults():
    c = activate_run("class Main begin var o: Main; op run == !o.run() end")
    (t,) = applicable(c)
    with pytest.raises(RuntimeFault, match="null"):
        apply(c, t)


def test_message_receive_binds_parameters():
    c = step(_net_run(), "async-call")
    c = step(c, "message-receive", subject=1)
    (p,) = c.objects[1].queue
    assert p.locals["data"] == TupleV((IntV(1), IntV(0)))
    assert p.locals["caller"] == ObjRef(0)
    assert isinstance(p.locals[".result"], FutRef)


def test_local_initializer_bound_at_receive_time():
    src = """
class Main
begin
  op run == !this.m()
  op m == var t: Time := now; skip
end"""
    c = activate_run(src)
    c = step(c, "async-call")
    c = dataclasses.replace(c, clock=Clock(5, 10))
    c = step(c, "message-receive")
    assert c.objects[0].queue[0].locals["t"] == TimeV(5)


def test_zero_argument_method_bindings():
    src = "class Main begin op run == !this.start() op start == skip end"
    c = step(step(activate_run(src), "async-call"), "message-receive")
    assert set(c.objects[0].queue[0].locals) == {"caller", ".result"}


def test_unknown_method_faults():
    c = config_of("class Main begin end")
    c = dataclasses.replace(c, messages=(Invoc(0, "frob", (), 0, 0),), futures={0: Future(0)})
    with pytest.raises(RuntimeFault, match="frob"):
        apply(c, applicable(c)[0])


# -- await, suspend, activate

def test_await_consumed():
    c = config_of("class Main begin var t: Time; op run == await now > t; skip end")
    c = dataclasses.replace(c, clock=Clock(4, 10), objects={
        0: dataclasses.replace(c.objects[0], attrs={**c.objects[0].attrs, "t": TimeV(3)})})
    c = step(step(c, "activate"), "await")
    assert len(c.objects[0].active.body) == 1
    c2 = step(activate_run("class Main begin op run == await true end"), "await")
    assert c2.objects[0].active.body == ()


def test_suspend_when_something_else_can_run():
    src = """
class Main
begin
  var sending: Bool := true;
  op run == !this.other(); await sending = false; skip
  op other == sending := false
end"""
    c = step(step(activate_run(src), "async-call"), "message-receive")
    assert rules(c) == ["suspend"]
    c = step(c, "suspend")
    o = c.objects[0]
    assert o.active is None and [p.method for p in o.queue] == ["other", "run"]
    assert type(o.queue[1].body[0]).__name__ == "Await"


def test_time_blocked_await_suspends_then_reenabled_after_tick():
    src = """
class Main
begin
  op run == var t: Time := now; !this.other(); await now > t; skip
  op other == skip
end"""
    c = step(step(activate_run(src), "async-call"), "message-receive")
    c = step(c, "suspend")
    c = step(c, "activate", detail=0)
    c = step(c, "skip")
    c = step(c, "return")
    assert rules(c) == [TICK]
    c = step(c, TICK, subject=None)
    assert rules(c) == ["activate"]


def test_blocked_choice_blocks_process():
    c = config_of("class Main begin end")
    c = with_active(c, "await false; skip [] await 1 > 2; skip")
    assert rules(c) == [TICK]
    c = with_active(c, "await false; skip [] await 1 < 2; skip")
    assert [(t.rule, t.detail) for t in applicable(c)] == [("choice", 1)]


def _queued(c, procs):
    o = dataclasses.replace(c.objects[0], active=None, queue=tuple(procs))
    return dataclasses.replace(c, objects={0: o})


def test_activate_picks_only_enabled():
    c = config_of("class Main begin end")
    blocked = Process("p1", {}, parse_stmt("await false").stmts)
    ready = Process("p2", {}, parse_stmt("skip").stmts)
    c = _queued(c, [blocked, ready])
    assert [(t.rule, t.detail) for t in applicable(c)] == [("activate", 1)]
    c2 = apply(c, applicable(c)[0])
    assert c2.objects[0].active.method == "p2" and c2.objects[0].queue == (blocked,)


def test_two_enabled_queued_give_two_activations():
    c = _queued(config_of("class Main begin end"),
                [Process("a", {}, ()), Process("b", {}, ())])
    assert [(t.rule, t.detail) for t in applicable(c)] == [("activate", 0), ("activate", 1)]


def test_all_blocked_no_activation():
    c = _queued(config_of("class Main begin end"), [Process("a", {}, parse_stmt("await false").stmts)])
    assert rules(c) == [TICK]


# -- reply and return

PING = bundled_models()["ping"].read_text()


def test_reply_with_value_and_return():
    c = bundled_config("ping", 3)
    r = run(c, Policy.fifo())
    rules_seen = [rec.rule for rec in r.trace]
    assert "reply" in rules_seen
    assert r.final.objects[0].attrs["got"] == IntV(2)


def test_empty_reply_is_join():
    src = """
class Main
begin
  op run == var l: Tag[ ]; l!this.m(); await l?; l?
  op m == skip
end"""
    r = run(config_of(src, 0), Policy.fifo())
    assert r.ok and r.final.objects[0].active is None


def test_reply_on_incomplete_future_not_applicable():
    c = activate_run(PING.replace("sent := sent + 1;\n", ""))
    c = step(step(c, "new"), "async-call")
    assert "reply" not in rules(c)


def test_reply_arity_mismatch_faults():
    src = """
class Main
begin
  var a: Int; var b: Int;
  op run == var l: Tag[ ]; l!this.m(); await l?; l?(a, b)
  op m(out x: Int) == x := 1
end"""
    prog = desugar(parse(src))  # validation would not catch a tagged reply
    with pytest.raises(RuntimeFault, match="expects 2 values"):
        r = run(init_configuration(prog, 1), Policy.fifo())
        if r.fault:
            raise r.fault


def test_return_completes_future_with_outs():
    src = """
class Main
begin
  var got: Int;
  op run == var l: Tag[ ]; l!this.m(); await l?; l?(got)
  op m(out r: Int) == r := 5
end"""
    r = run(config_of(src, 0), Policy.fifo())
    assert r.final.objects[0].attrs["got"] == IntV(5)
    assert any(f.completed and f.value == (IntV(5),) for f in r.final.futures.values())


def test_init_return_emits_run():
    c = config_of("class Main begin op init == skip op run == skip end")
    c = step(step(c, "skip"), "return")
    (m,) = c.messages
    assert (m.callee, m.method, m.caller) == (0, "run", 0)


def test_local_call_runs_nested():
    src = """
class Main
begin
  var x: Int;
  op run == this.m(;); x := x + 10
  op m == x := 1
end"""
    c = activate_run(src)
    c = step(step(c, "async-call"), "message-receive")
    assert rules(c) == ["local-call"]
    c = step(c, "local-call")
    p = c.objects[0].active
    assert p.method == "m" and p.parent.method == "run" and c.objects[0].queue == ()
    r = run(c, Policy.fifo())
    assert r.final.objects[0].attrs["x"] == IntV(11)


# -- new

def test_new_network_and_sensor():
    src = SENSOR
    c = bundled_config("star-resend", 200)
    c = step(c, "activate")
    c = step(c, "new")
    nw = c.objects[1]
    assert nw.cls == "BroadcastNetwork" and nw.attrs["nodesConns"] == MapV(())
    assert nw.active.method == "init"
    c = step(c, "new")  # sink
    c = step(c, "new")  # n1
    n1 = c.objects[3]
    assert n1.attrs["id"] == IntV(1) and n1.attrs["network"] == ObjRef(1)
    assert n1.attrs["noSensings"] == IntV(3) and n1.attrs["seqNo"] == IntV(0)
    assert "SensorNode" in src


def test_nested_creation_distinct_ids():
    src = """
class Inner() begin end
class Outer() begin var i: Inner; op init == i := new Inner() end
class Main begin var a: Outer; var b: Outer; op run == a := new Outer(); b := new Outer() end
"""
    r = run(config_of(src, 0), Policy.seeded(1))
    assert sorted(r.final.objects) == [0, 1, 2, 3, 4]
    assert r.final.objects[1].attrs["i"] != r.final.objects[2].attrs["i"]


# -- basic statements

def test_assign_attribute():
    c = activate_run("class Main begin var sending: Bool; op run == sending := true end")
    c = step(c, "assign")
    assert c.objects[0].attrs["sending"] == BoolV(True)


def test_while_exit_on_empty():
    src = "class Main begin var recs: List[Int]; op run == while ~isempty(recs) do recs := tail(recs) end end"
    c = step(activate_run(src), "while")
    assert rules(c) == ["if"]
    c = step(c, "if")
    assert c.objects[0].active.body in ((), (parse_stmt("skip").stmts[0],))


def test_sensor_run_choice_both_enabled():
    src = """
class Main
begin
  var seqNo: Int := 0; var sendqueue: List[Int] := [1];
  op sense == skip
  op sendOrForward == skip
  op run ==
    await seqNo < 3; sense(;)
    []
    await #(sendqueue) > 0; sendOrForward(;)
end"""
    c = activate_run(src)
    assert [(t.rule, t.detail) for t in applicable(c)] == [("choice", 0), ("choice", 1)]


def test_read_only_fault_at_runtime():
    src = "class Main begin op run == !this.m(1) op m(in a: Int) == a := 2 end"
    prog = desugar(parse(src))
    r = run(init_configuration(prog, 0), Policy.fifo())
    assert r.status == "faulted" and "read-only" in str(r.fault)


# -- tick

def test_tick_increments():
    c = dataclasses.replace(config_of("class Main begin end"), clock=Clock(5, 10))
    c2 = step(c, TICK, subject=None)
    assert c2.clock == Clock(6, 10)
    assert dataclasses.replace(c2, clock=c.clock) == c


def test_tick_blocked_by_message():
    c = config_of("class Main begin op init == skip op run == skip end")
    c = step(step(c, "skip"), "return")
    assert c.messages and TICK not in rules(c)


# -- interference freedom

ALLOCATING = {"new", "async-call", TICK}


def _rebase(t, old, new):
    if t.rule == "message-receive":
        return dataclasses.replace(t, detail=new.messages.index(old.messages[t.detail]))
    return t


def test_interference_freedom():
    rng = random.Random(11)
    checked = 0
    for name in sorted(bundled_models()):
        samples = []

        def grab(c, ts, t):
            if len(ts) > 1 and rng.random() < 0.2:
                samples.append((c, ts))

        run(bundled_config(name, 30), Policy.seeded(rng.randrange(1000)), 20000, on_step=grab)
        for c, ts in samples[:40]:
            cands = [t for t in ts if t.rule not in ALLOCATING]
            pairs = [(a, b) for a in cands for b in cands if a.subject != b.subject]
            for a, b in rng.sample(pairs, min(3, len(pairs))):
                ca = apply(c, a)
                cb = apply(c, b)
                b2, a2 = _rebase(b, c, ca), _rebase(a, c, cb)
                assert b2 in applicable(ca) and a2 in applicable(cb)
                assert apply(ca, b2).key() == apply(cb, a2).key()
                checked += 1
    assert checked > 100
