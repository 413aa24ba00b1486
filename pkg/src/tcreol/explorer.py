"""Bounded exhaustive exploration and witness search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .runtime import Configuration, RuntimeFault
from .scheduler import Policy, RunResult, run
from .semantics import applicable, apply

DEFAULT_DEPTH = 100_000
DEFAULT_STATE_LIMIT = 1_000_000


def default_metrics(config: Configuration) -> Any:
    """Sink metrics for sensor models; otherwise clock plus all attributes."""
    from .sensornet import find_sink, metrics

    if find_sink(config) is not None:
        return metrics(config)
    parts = [f"clock={config.clock.time}"]
    for oid in sorted(config.objects):
        o = config.objects[oid]
        for k, v in sorted(o.attrs.items()):
            if k != "this":
                parts.append(f"{o.cls}#{oid}.{k}={v}")
    return "; ".join(parts)


@dataclass
class Witness:
    """A schedule reaching a terminal state that satisfied a query."""

    script: tuple[int, ...]  # choice indices at branching steps
    metrics: Any
    steps: int
    source: str  # policy description or "exploration"

    def replay(self, config: Configuration, max_steps: int = 10_000_000) -> RunResult:
        return run(config, Policy.interactive(self.script), max_steps)


@dataclass
class ExplorationResult:
    terminals: dict[str, Any] = field(default_factory=dict)  # state hash -> metrics
    states_visited: int = 0
    truncated: bool = False
    faults: int = 0
    witnesses: dict[str, Witness] = field(default_factory=dict)

    def summary(self) -> str:
        lines = [
            f"terminal states: {len(self.terminals)}",
            f"states visited: {self.states_visited}",
            f"truncated: {str(self.truncated).lower()}",
        ]
        if self.faults:
            lines.append(f"faulted branches: {self.faults}")
        for h in sorted(self.terminals):
            lines.append(f"  {h}  {self.terminals[h]}")
        return "\n".join(lines) + "\n"


class _Stop(Exception):
    pass


def explore(
    config: Configuration,
    depth: int = DEFAULT_DEPTH,
    state_limit: int = DEFAULT_STATE_LIMIT,
    metrics_fn: Callable[[Configuration], Any] = default_metrics,
    on_terminal: Optional[Callable[[Configuration, Any, tuple[int, ...]], bool]] = None,
) -> ExplorationResult:
    """Depth-first search over every applicable transition.

    States are pruned by snapshot hash; a state reached again at a smaller
    depth is re-expanded so that depth cut-offs never hide reachable states.
    ``on_terminal`` may return True to stop the search early.
    """
    if depth <= 0 or state_limit <= 0:
        raise ValueError("depth and state limit must be positive")
    res = ExplorationResult()
    seen: dict[str, int] = {}

    def visit(c: Configuration, d: int) -> Optional[list]:
        h = c.state_hash()
        prev = seen.get(h)
        if prev is not None and prev <= d:
            return None
        if prev is None:
            if len(seen) >= state_limit:
                res.truncated = True
                return None
            res.states_visited += 1
        seen[h] = d
        ts = applicable(c)
        if not ts:
            m = metrics_fn(c)
            res.terminals[h] = m
            return [h, m]
        if d >= depth:
            res.truncated = True
            return None
        return [c, ts, 0, d]

    # stack frames: [config, transitions, next index, depth]
    stack: list[list] = []

    def push(c: Configuration, d: int) -> None:
        r = visit(c, d)
        if r is None:
            return
        if len(r) == 2:
            if on_terminal is not None and on_terminal(c, r[1], _script(stack)):
                raise _Stop
            return
        stack.append(r)

    try:
        push(config, 0)
        while stack:
            frame = stack[-1]
            c, ts, i, d = frame
            if i >= len(ts):
                stack.pop()
                continue
            frame[2] = i + 1
            try:
                nxt = apply(c, ts[i])
            except RuntimeFault:
                res.faults += 1
                continue
            push(nxt, d + 1)
    except _Stop:
        pass
    return res


def _script(stack: list[list]) -> tuple[int, ...]:
    # the index taken in each frame is next index - 1
    return tuple(f[2] - 1 for f in stack if len(f[1]) > 1)


def check_achievable(
    config: Configuration,
    predicate: Callable[[Any], bool],
    depth: int = DEFAULT_DEPTH,
    state_limit: int = DEFAULT_STATE_LIMIT,
    samples: int = 200,
    metrics_fn: Callable[[Configuration], Any] = default_metrics,
    max_steps: int = 1_000_000,
) -> Optional[Witness]:
    """Find a schedule whose terminal metrics satisfy ``predicate``.

    Seeded random and seeded priority runs are tried first since they
    reach deep terminals cheaply; a bounded exhaustive search follows.
    """
    for seed in range(samples):
        policy = Policy.seeded(seed) if seed % 2 == 0 else Policy.priority(seed // 2)
        r = run(config, policy, max_steps)
        if r.status != "terminated":
            continue
        m = metrics_fn(r.final)
        if predicate(m):
            return Witness(tuple(r.choices), m, r.steps, policy.describe())
    found: list[Witness] = []

    def hit(c: Configuration, m: Any, script: tuple[int, ...]) -> bool:
        if predicate(m):
            found.append(Witness(script, m, -1, "exploration"))
            return True
        return False

    explore(config, depth, state_limit, metrics_fn, on_terminal=hit)
    if not found:
        return None
    w = found[0]
    w.steps = w.replay(config, max_steps).steps
    return w
