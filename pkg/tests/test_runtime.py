from __future__ import annotations

import dataclasses
import random

import pytest

from conftest import bundled_config, config_of
from tcreol import bundled_models
from tcreol.parser import parse_stmt
from tcreol.runtime import (Clock, ConcObject, Configuration, Future, Process, RuntimeFault,
                            can_advance, dangling_refs, enabled, init_configuration, releasable)
from tcreol.scheduler import Policy, run
from tcreol.semantics import applicable, statement_transitions
from tcreol.values import FutRef, IntV, ListV, TimeV


def proc(src: str, **locs) -> Process:
    return Process("m", locs, parse_stmt(src).stmts)


def single(p: Process, attrs=None, queue=(), time=0, limit=10, futures=None, messages=()) -> Configuration:
    o = ConcObject(0, "Main", attrs or {}, p, queue)
    return Configuration({0: o}, futures or {}, messages, Clock(time, limit), 1, 0)


# -- init-configuration

def test_sensor_model_init():
    c = bundled_config("star-resend", 200)
    assert list(c.objects) == [0] and c.objects[0].cls == "Main"
    assert (c.clock.time, c.clock.limit) == (0, 200)


def test_run_enqueued_without_init():
    c = config_of("class Main begin op run == skip end")
    o = c.objects[0]
    assert o.active is None and [p.method for p in o.queue] == ["run"]


def test_init_active_when_declared():
    c = config_of("class Main begin op init == skip op run == skip end")
    assert c.objects[0].active.method == "init" and c.objects[0].queue == ()


def test_limit_zero_never_ticks():
    c = config_of("class Main begin end", limit=0)
    assert applicable(c) == []


def test_clock_invariant():
    with pytest.raises(ValueError):
        Clock(3, 2)


def test_main_faults():
    prog = dataclasses.replace(config_of("class Main begin end").program, main="Nope")
    with pytest.raises(RuntimeFault):
        init_configuration(prog, 1)


# -- enabled

def test_enabled_time_guard_false():
    assert not enabled(proc("await now > t; skip", t=TimeV(4)), {}, {}, 4)


def test_enabled_reply_on_complete_future():
    assert enabled(proc("l?(x); skip", l=FutRef(3)), {}, {3: Future(3, True)}, 0)
    assert not enabled(proc("l?(x)", l=FutRef(3)), {}, {3: Future(3)}, 0)


def test_enabled_choice_both_blocked():
    p = proc("await #(sendqueue) > 0; skip [] await seqNo < 3; skip")
    attrs = {"sendqueue": ListV(()), "seqNo": IntV(3)}
    assert not enabled(p, attrs, {}, 0)
    assert enabled(p, {**attrs, "seqNo": IntV(2)}, {}, 0)


def test_enabled_local_reply_needs_queue():
    callee = Process("m2", {".result": FutRef(5)}, ())
    p = proc("l?", l=FutRef(5))
    assert not enabled(p, {}, {5: Future(5)}, 0)
    assert enabled(p, {}, {5: Future(5)}, 0, (callee,))


# -- can-advance

def test_message_blocks_advance():
    from tcreol.runtime import Invoc

    c = single(proc("await false"), messages=(Invoc(0, "m", (), 0, 0),), futures={0: Future(0)})
    assert not can_advance(c)


def test_all_idle_can_advance():
    c = Configuration({0: ConcObject(0, "Main", {})}, {}, (), Clock(0, 5), 1, 0)
    assert can_advance(c)
    assert [t.rule for t in applicable(c)] == ["tick"]


def test_blocked_active_can_advance():
    c = single(proc("await now >= 7"), time=5)
    assert can_advance(c)


def test_releasable_blocked_with_enabled_queue_cannot_advance():
    c = single(proc("await now >= 7"), queue=(proc("skip"),), time=5)
    assert not can_advance(c)
    assert [t.rule for t in applicable(c)] == ["suspend"]


def test_reply_blocked_object_ignores_queue():
    p = proc("l?", l=FutRef(1))
    c = single(p, queue=(proc("skip"),), futures={1: Future(1)})
    assert not releasable(p)
    assert can_advance(c)


# -- brute-force cross-check over sampled configurations

def _reference_can_advance(config: Configuration) -> bool:
    """The clock-advance condition transcribed directly.

    A busy object blocks the clock iff its active process is enabled;
    a process blocked at a top-level release point counts as suspended,
    so the object is then treated as idle.  Idle objects block the clock
    iff some queued process is enabled.
    """
    if config.messages:
        return False
    for o in config.objects.values():
        p = o.active
        if p is not None:
            if enabled(p, o.attrs, config.futures, config.clock.time, o.queue):
                return False
            if not releasable(p):
                continue
        for q in o.queue:
            if enabled(q, o.attrs, config.futures, config.clock.time):
                return False
    return True


def _sample_configurations(n: int, seed: int = 7) -> list[Configuration]:
    rng = random.Random(seed)
    names = sorted(bundled_models())
    out: list[Configuration] = []
    while len(out) < n:
        name = rng.choice(names)
        limit = rng.randint(3, 40)
        picks: list[Configuration] = []

        def grab(c, ts, t):
            if rng.random() < 0.05:
                picks.append(c)

        run(bundled_config(name, limit), Policy.seeded(rng.randrange(1 << 30)), 5000, on_step=grab)
        for c in picks:
            # shift the clock to exercise time guards at other instants
            t = rng.randint(0, c.clock.limit)
            out.append(dataclasses.replace(c, clock=Clock(t, c.clock.limit)))
    return out[:n]


def test_can_advance_cross_check():
    configs = _sample_configurations(1000)
    assert len(configs) == 1000
    outcomes = set()
    for c in configs:
        ca = can_advance(c)
        assert ca == _reference_can_advance(c)
        # quiescence <=> no statement-level transition at all
        assert ca == (not statement_transitions(c))
        outcomes.add(ca)
    assert outcomes == {True, False}


def test_no_dangling_refs_and_result_arity():
    for name in ("ping", "timeout-5", "tick-object", "star-resend"):
        called: dict[int, tuple[str, str]] = {}

        def check(c, ts, t):
            assert dangling_refs(c) == []
            for m in c.messages:
                called[m.future] = (c.objects[m.callee].cls, m.method)

        r = run(bundled_config(name, 30), Policy.seeded(3), on_step=check)
        assert r.ok
        prog = r.final.program
        for fid, (cls, method) in called.items():
            f = r.final.futures[fid]
            if f.completed:
                assert len(f.value) == len(prog.cls(cls).method(method).sig.outs)
            else:
                assert f.value == ()
    fin = run(bundled_config("ping", 3), Policy.fifo()).final
    assert fin.futures[1].value == (IntV(2),)
