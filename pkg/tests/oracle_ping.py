"""Hand-built enumerator for the bundled ping model.

Written from the rule descriptions, not from the interpreter: the model is
abstracted to (Main phase, Pong phase, clock) and every rule instance that
can fire is listed by hand.

Main:  queued -> new -> call -> mid -> join -> ret -> done
       (activate, new, async-call, assign `sent`, reply, return)
Pong:  absent -> empty (created by Main's new)
       msg (invocation in flight, created by Main's async-call)
       -> queued (message-receive) -> assign (activate)
       -> ret (assign `m`) -> done (return completes the future)

Main's reply needs Pong done.  The clock ticks only when nothing else can
happen: no message in flight, no enabled active process, no idle object
with an enabled queued process.
"""

from __future__ import annotations

MAIN = ("queued", "new", "call", "mid", "join", "ret", "done")
PONG_STEPS = {"msg": "queued", "queued": "assign", "assign": "ret", "ret": "done"}


def successors(state, limit):
    main, pong, clock = state
    out = []
    if main == "queued":
        out.append(("new", pong, clock))
    elif main == "new":
        out.append(("call", "empty", clock))
    elif main == "call":
        out.append(("mid", "msg", clock))
    elif main == "mid":
        out.append(("join", pong, clock))
    elif main == "join" and pong == "done":
        out.append(("ret", pong, clock))
    elif main == "ret":
        out.append(("done", pong, clock))
    if pong in PONG_STEPS:
        out.append((main, PONG_STEPS[pong], clock))
    if not out and clock < limit:
        # quiescent: Main is done or blocked on an unanswerable join,
        # Pong idle with nothing queued
        out.append((main, pong, clock + 1))
    return out


def enumerate_states(limit: int):
    """Return (reachable states, terminal states)."""
    init = ("queued", "absent", 0)
    seen = {init}
    todo = [init]
    terminals = set()
    while todo:
        s = todo.pop()
        nxt = successors(s, limit)
        if not nxt:
            terminals.add(s)
        for n in nxt:
            if n not in seen:
                seen.add(n)
                todo.append(n)
    return seen, terminals


# frozen before the interpreter was run on the model:
# 3 prefix states + 2x5 interleavings of `sent := ...` with Pong's four
# steps + reply + return + `limit` ticks
def expected_visited(limit: int) -> int:
    return 3 + 10 + 1 + 1 + limit
