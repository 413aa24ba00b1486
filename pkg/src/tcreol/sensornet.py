"""Flooding sensor network: model sources, topologies and sink metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .parser import SourceModel
from .runtime import Configuration, RuntimeFault
from .values import IntV, TimeV

VARIANTS = ("no-interference", "resend", "drop")
TOPOLOGIES = ("linear", "mixed", "star")
SENSORS = ("n1", "n2", "n3", "n4")
SENSINGS = 3
LIMIT = 200

# the only line in which the three network behaviours differ
_COLLISION_LINE = {
    "no-interference": None,
    "resend": "await now > lastTransmission;",
    "drop": "if lastTransmission = now then recs := nil end;",
}

# published timing results: (received, last receive time or None)
TABLE1 = {
    ("no-interference", "linear"): (12, 14),
    ("no-interference", "mixed"): (12, 14),
    ("no-interference", "star"): (12, 2),
    ("resend", "linear"): (12, 60),
    ("resend", "mixed"): (12, 38),
    ("resend", "star"): (12, 12),
    ("drop", "linear"): (0, None),
    ("drop", "mixed"): (2, 4),
    ("drop", "star"): (2, 2),
}


@dataclass(frozen=True)
class Topology:
    """Radio links; ``links[n]`` lists the nodes that hear a broadcast by ``n``."""

    name: str
    links: dict

    def edges(self) -> set[tuple[str, str]]:
        return {(a, b) for a, bs in self.links.items() for b in bs}


def topology(name: str) -> Topology:
    """Linear, mixed and star topologies with bidirectional radio links.

    Radio links are symmetric: a node that hears another can also be heard
    by it.  Mixed has n1 and n2 next to the sink, with n3 and n4 relaying
    through n1.  The sink never broadcasts and is registered with no links.
    """
    if name == "star":
        links = {"sink": (), "n1": ("sink",), "n2": ("sink",), "n3": ("sink",), "n4": ("sink",)}
    elif name == "linear":
        links = {"sink": (), "n1": ("sink", "n2"), "n2": ("n1", "n3"),
                 "n3": ("n2", "n4"), "n4": ("n3",)}
    elif name == "mixed":
        links = {"sink": (), "n1": ("sink", "n3", "n4"), "n2": ("sink",),
                 "n3": ("n1",), "n4": ("n1",)}
    else:
        raise ValueError(f"unknown topology {name!r} (expected one of {', '.join(TOPOLOGIES)})")
    return Topology(name, links)


_INTERFACES = """\
interface Node
begin
  with Network
    // receive data from the network; data is (originator id, sequence no)
    op receive(in data: [Int, Int])
end

interface Network
begin
  with Any
    // register node as able to send to the nodes in connections
    op register(in node: Node, connections: List[Node])
  with Node
    op broadcast(in data: [Int, Int])
end
"""

_SENSOR = """\
class SensorNode(id: Int, network: Network, noSensings: Int)
implements Node
begin
  var received: List[[Int, Int]] := nil;
  var sendqueue: List[[Int, Int]] := nil;
  var seqNo: Int := 0;
  var sending: Bool := false;
  var start: Bool := false;

  // forward (or send) a single message from the queue
  op sendOrForward ==
    var t: Time := now;
    var l: Tag[ ];
    await sending = false;
    sending := true;
    l!network.broadcast(head(sendqueue));
    sendqueue := tail(sendqueue);
    await l?;
    await now > t;
    sending := false

  op store(in data: [Int, Int]) ==
    sendqueue := sendqueue |- data

  // produce a sensing and store it locally
  op sense ==
    store((id, seqNo););
    seqNo := seqNo + 1

  op run ==
    await start = true;
    while true do
      await seqNo < noSensings; sense(;)
      []
      await #(sendqueue) > 0; sendOrForward(;)
    end

  with Any
    op start ==
      start := true

  with Network
    op receive(in data: [Int, Int]) ==
      await start = true;
      if ~(data in received) then
        received := received |- data;
        store(data;)
      end
end
"""

_SINK = """\
class SinkNode(network: Network)
implements Node
begin
  var noStored: Int := 0;
  var received: List[[Int, Int]] := nil;
  var lastReceived: Time;

  op init ==
    lastReceived := now

  op store(in data: [Int, Int]) ==
    noStored := noStored + 1

  with Network
    op receive(in data: [Int, Int]) ==
      if (lastReceived < now) then lastReceived := now end;
      if ~(data in received) then
        received := received |- data;
        store(data;)
      end
end
"""

_NETWORK_HEAD = """\
class BroadcastNetwork()
implements Network
begin
  var nodesConns: Map[Node, List[Node]] := empty();
  var lastTransmission: Time;

  op init ==
    lastTransmission := now

  with Any
    op register(in node: Node, connections: List[Node]) ==
      nodesConns := insert(nodesConns, node, connections)

  with Node
    op broadcast(in data: [Int, Int]) ==
      var rec: Node;
      var recs: List[Node] := nil;

      if caller in nodesConns then
        recs := get(nodesConns, caller)
      end;

"""

_NETWORK_TAIL = """\
      lastTransmission := now;

      while ~isempty(recs) do
        rec := head(recs);
        recs := tail(recs);
        if rec /= caller then
          !rec.receive(data)
        end
      end
end
"""


def network_source(variant: str) -> str:
    if variant not in _COLLISION_LINE:
        raise ValueError(f"unknown variant {variant!r} (expected one of {', '.join(VARIANTS)})")
    line = _COLLISION_LINE[variant]
    middle = "" if line is None else f"      {line}\n"
    return _NETWORK_HEAD + middle + _NETWORK_TAIL


def main_source(topo: Topology) -> str:
    lines = [
        "class Main",
        "begin",
        "  var nw: Network;",
        "  var sink: Node;",
    ]
    lines += [f"  var {n}: SensorNode;" for n in SENSORS]
    lines += [
        "",
        "  op run ==",
        "    nw := new BroadcastNetwork();",
        "    sink := new SinkNode(nw);",
    ]
    lines += [f"    {n} := new SensorNode({i}, nw, {SENSINGS});" for i, n in enumerate(SENSORS, 1)]
    for node in ("sink",) + SENSORS:
        conns = topo.links[node]
        lst = f"[{', '.join(conns)}]" if conns else "nil"
        lines.append(f"    nw.register({node}, {lst};);")
    lines += [f"    !{n}.start();" for n in SENSORS]
    lines[-1] = lines[-1].rstrip(";")
    lines.append("end")
    return "\n".join(lines) + "\n"


def model_name(variant: str, topo: str) -> str:
    return f"{topo}-{variant}"


def build_model(variant: str, topo: str | Topology) -> SourceModel:
    """Complete model source for one (collision behaviour, topology) pair."""
    t = topo if isinstance(topo, Topology) else topology(topo)
    header = f"// flooding sensor network: {variant} collision behaviour, {t.name} topology\n\n"
    text = "\n".join([header + _INTERFACES, _SENSOR, _SINK, network_source(variant), main_source(t)])
    return SourceModel(text, f"<{model_name(variant, t.name)}>")


@dataclass(frozen=True)
class SinkMetrics:
    received: int
    last: Optional[int]  # None when nothing reached the sink

    def matches(self, target: tuple[int, Optional[int]], tolerance: int = 0) -> bool:
        k, t = target
        if self.received != k:
            return False
        if t is None or self.last is None:
            return t is None and self.last is None
        return abs(self.last - t) <= tolerance

    def __str__(self) -> str:
        return f"received={self.received},last={'none' if self.last is None else self.last}"


def find_sink(config: Configuration) -> Optional[int]:
    for oid, o in config.objects.items():
        if o.cls == "SinkNode":
            return oid
    return None


def metrics(config: Configuration) -> SinkMetrics:
    oid = find_sink(config)
    if oid is None:
        raise RuntimeFault("no SinkNode object in configuration")
    attrs = config.objects[oid].attrs
    stored = attrs.get("noStored")
    last = attrs.get("lastReceived")
    received = stored.v if isinstance(stored, IntV) else 0
    if received == 0:
        return SinkMetrics(0, None)
    return SinkMetrics(received, last.t if isinstance(last, TimeV) else None)


def parse_query(text: str) -> tuple[Optional[int], Optional[int], bool]:
    """``"received=K,last=T"`` -> (K or None, T or None, whether last was given).

    ``last=none`` asks for runs in which nothing reached the sink.
    """
    received: Optional[int] = None
    last: Optional[int] = None
    has_last = False
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, val = part.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not val:
            raise ValueError(f"malformed query term {part!r}")
        if key == "received":
            received = int(val)
        elif key == "last":
            has_last = True
            last = None if val in ("none", "--") else int(val)
        else:
            raise ValueError(f"unknown query key {key!r} (expected received or last)")
    if received is None and not has_last:
        raise ValueError("empty query")
    return received, last, has_last


def query_predicate(text: str, tolerance: int = 0):
    received, last, has_last = parse_query(text)

    def pred(m: SinkMetrics) -> bool:
        if received is not None and m.received != received:
            return False
        if has_last:
            if last is None or m.last is None:
                return last is None and m.last is None
            return abs(m.last - last) <= tolerance
        return True

    return pred


# ---------------------------------------------------------------- Table 1


def tolerance_for(topo: str) -> int:
    """Mixed-topology timestamps are accepted within 4 ticks (reconstructed links)."""
    return 4 if topo == "mixed" else 0


@dataclass
class Table1Row:
    variant: str
    topology: str
    target: tuple[int, Optional[int]]
    tolerance: int
    witness: Optional[SinkMetrics]
    witness_source: str = ""
    witness_script: tuple[int, ...] = ()
    distribution: Optional[dict[str, int]] = None

    @property
    def achievable(self) -> bool:
        return self.witness is not None

    def to_data(self) -> dict:
        k, t = self.target
        return {
            "variant": self.variant,
            "topology": self.topology,
            "target": {"received": k, "last": t},
            "tolerance": self.tolerance,
            "achievable": self.achievable,
            "achieved": None if self.witness is None
            else {"received": self.witness.received, "last": self.witness.last},
            "witness_source": self.witness_source,
            "witness_script": list(self.witness_script),
            "distribution": self.distribution,
        }


def load(variant: str, topo: str):
    from . import load_model

    return load_model(build_model(variant, topo))


def distribution(program, seeds: int, limit: int = LIMIT) -> dict[str, int]:
    from collections import Counter

    from .runtime import init_configuration
    from .scheduler import Policy, run

    counts: Counter = Counter()
    for seed in range(seeds):
        r = run(init_configuration(program, limit), Policy.seeded(seed))
        counts[str(metrics(r.final)) if r.ok else r.status] += 1
    return dict(sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])))


def build_table1(
    seeds: int = 100,
    variants: tuple[str, ...] = VARIANTS,
    topologies: tuple[str, ...] = TOPOLOGIES,
    limit: int = LIMIT,
    samples: int = 200,
    state_limit: int = 20_000,
) -> list[Table1Row]:
    """Search each cell for a schedule matching the published target value.

    ``seeds`` > 0 additionally records the seeded-random outcome
    distribution of the cell.
    """
    from .explorer import check_achievable
    from .runtime import init_configuration

    rows = []
    for v in variants:
        for t in topologies:
            target = TABLE1[(v, t)]
            tol = tolerance_for(t)
            program = load(v, t)
            config = init_configuration(program, limit)
            w = check_achievable(
                config, lambda m, target=target, tol=tol: m.matches(target, tol),
                samples=samples, state_limit=state_limit, metrics_fn=metrics,
            )
            row = Table1Row(v, t, target, tol, None if w is None else w.metrics)
            if w is not None:
                row.witness_source, row.witness_script = w.source, w.script
            if seeds > 0:
                row.distribution = distribution(program, seeds, limit)
            rows.append(row)
    return rows


def _fmt(k: int, t: Optional[int]) -> str:
    return f"{k} / {'--' if t is None else t}"


def format_table1(rows: list[Table1Row]) -> str:
    head = ("variant", "topology", "target", "achieved", "tol", "achievable", "found by")
    body = [
        (
            r.variant, r.topology, _fmt(*r.target),
            "-" if r.witness is None else _fmt(r.witness.received, r.witness.last),
            f"+-{r.tolerance}" if r.tolerance else "exact",
            "yes" if r.achievable else "no",
            r.witness_source or "-",
        )
        for r in rows
    ]
    widths = [max(len(str(x[i])) for x in [head] + body) for i in range(len(head))]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(line, widths)).rstrip() for line in [head] + body]
    lines.insert(1, "  ".join("-" * w for w in widths))
    for r in rows:
        if r.distribution is not None:
            total = sum(r.distribution.values())
            lines.append(f"{r.variant}/{r.topology} over {total} seeds:")
            for outcome, n in r.distribution.items():
                lines.append(f"  {n:4d}  {outcome}")
    return "\n".join(lines) + "\n"
