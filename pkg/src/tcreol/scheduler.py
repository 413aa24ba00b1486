"""Transition selection policies and single runs."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .runtime import CALLER, Configuration, RuntimeFault
from .semantics import TICK, Transition, applicable, apply
from .values import ObjRef

SEEDED = "seeded-random"
FIFO = "fifo-deterministic"
SCRIPT = "interactive-script"
PRIORITY = "seeded-priority"


@dataclass(frozen=True)
class Policy:
    """How ``run`` picks among applicable transitions.

    ``script`` holds one index per *branching* step (more than one
    applicable transition); steps with a single candidate consume nothing,
    and an exhausted script falls back to the first candidate.
    """

    kind: str = SEEDED
    seed: int = 0
    script: tuple[int, ...] = ()

    @classmethod
    def seeded(cls, seed: int) -> Policy:
        return cls(SEEDED, seed)

    @classmethod
    def fifo(cls) -> Policy:
        return cls(FIFO)

    @classmethod
    def interactive(cls, choices: Sequence[int]) -> Policy:
        return cls(SCRIPT, 0, tuple(choices))

    @classmethod
    def priority(cls, seed: int) -> Policy:
        return cls(PRIORITY, seed)

    def chooser(self) -> Callable[[Configuration, list[Transition]], int]:
        if self.kind == SEEDED:
            rng = random.Random(self.seed)
            return lambda config, ts: rng.randrange(len(ts))
        if self.kind == FIFO:
            return lambda config, ts: 0
        if self.kind == SCRIPT:
            it = iter(self.script)

            def pick(config, ts):
                i = next(it, 0)
                if not 0 <= i < len(ts):
                    raise ValueError(f"script index {i} out of range for {len(ts)} candidates")
                return i

            return pick
        if self.kind == PRIORITY:
            return _PriorityChooser(self.seed)
        raise ValueError(f"unknown policy kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind in (SEEDED, PRIORITY):
            return f"{self.kind}(seed={self.seed})"
        if self.kind == SCRIPT:
            return f"{self.kind}({len(self.script)} choices)"
        return self.kind


class _PriorityChooser:
    """Randomized priority scheduling.

    Each object draws a random priority and a preferred choice branch from
    the seed.  The transition of the highest-priority subject wins; among a
    single object's activations the one whose caller has the highest
    priority wins.  A small random share of steps is picked uniformly so
    that priorities are not absolute.
    """

    def __init__(self, seed: int, noise: float = 0.05):
        self.rng = random.Random(seed)
        self.noise = noise
        self.prio: dict[int, float] = {}
        self.branch: dict[int, int] = {}

    def _p(self, oid: Optional[int]) -> float:
        if oid is None:
            return -1.0
        p = self.prio.get(oid)
        if p is None:
            p = self.prio[oid] = self.rng.random()
            self.branch[oid] = self.rng.randrange(2)
        return p

    def __call__(self, config: Configuration, ts: list[Transition]) -> int:
        if self.rng.random() < self.noise:
            return self.rng.randrange(len(ts))
        best, best_key = 0, None
        for i, t in enumerate(ts):
            key = [self._p(t.subject), 0.0, 0]
            if t.rule in ("activate", "local-call"):
                q = config.objects[t.subject].queue[t.detail]
                c = q.locals.get(CALLER)
                key[1] = self._p(c.id) if isinstance(c, ObjRef) else 0.0
            elif t.rule == "choice":
                key[2] = 1 if t.detail == self.branch.get(t.subject, 0) else 0
            k = tuple(key)
            if best_key is None or k > best_key:
                best, best_key = i, k
        return best


@dataclass(frozen=True)
class TraceRecord:
    step: int
    time: int
    rule: str
    subject: object
    detail: int
    info: str

    def to_json(self) -> str:
        return json.dumps(
            {"step": self.step, "time": self.time, "rule": self.rule,
             "subject": self.subject, "detail": self.detail, "info": self.info},
            separators=(",", ":"),
        )


@dataclass
class RunResult:
    final: Configuration
    trace: list[TraceRecord]
    choices: list[int]  # indices taken at branching steps
    status: str  # "terminated" | "faulted" | "truncated"
    fault: Optional[RuntimeFault] = None
    steps: int = 0
    terminal: Optional[str] = None  # "limit" | "deadlock" when terminated

    @property
    def ok(self) -> bool:
        return self.status == "terminated"

    def trace_text(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.trace)


def terminal_kind(config: Configuration) -> str:
    return "limit" if config.clock.time == config.clock.limit else "deadlock"


def run(
    config: Configuration,
    policy: Policy = Policy(),
    max_steps: int = 1_000_000,
    on_step: Optional[Callable[[Configuration, list[Transition], Transition], None]] = None,
) -> RunResult:
    """Fire transitions chosen by ``policy`` until none applies or ``max_steps`` is hit."""
    choose = policy.chooser()
    trace: list[TraceRecord] = []
    choices: list[int] = []
    step = 0
    while True:
        ts = applicable(config)
        if not ts:
            return RunResult(config, trace, choices, "terminated", None, step, terminal_kind(config))
        if step >= max_steps:
            return RunResult(config, trace, choices, "truncated", None, step)
        if len(ts) == 1:
            t = ts[0]
        else:
            i = choose(config, ts)
            choices.append(i)
            t = ts[i]
        if on_step is not None:
            on_step(config, ts, t)
        rec = TraceRecord(step, config.clock.time, t.rule,
                          "clock" if t.subject is None else t.subject, t.detail, t.info)
        try:
            config = apply(config, t)
        except RuntimeFault as exc:
            trace.append(rec)
            trace.append(TraceRecord(step + 1, config.clock.time, "fault",
                                     exc.obj if exc.obj is not None else "clock", 0, exc.msg))
            return RunResult(config, trace, choices, "faulted", exc, step + 1)
        trace.append(rec)
        step += 1


def ticks(trace: Sequence[TraceRecord]) -> int:
    return sum(1 for r in trace if r.rule == TICK)
