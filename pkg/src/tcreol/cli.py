"""Command-line front end: run, explore, bench-table1, parse, models."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import ast as A
from . import bundled_models, load_model
from .desugar import desugar
from .evaluation import EvalError
from .explorer import DEFAULT_DEPTH, DEFAULT_STATE_LIMIT, check_achievable, explore
from .lexer import ParseError
from .parser import SourceModel, parse
from .printer import program_str
from .runtime import RuntimeFault, init_configuration
from .scheduler import Policy, run
from .sensornet import (LIMIT, TOPOLOGIES, VARIANTS, build_table1, find_sink, format_table1,
                        metrics, query_predicate)
from .validate import ValidationError, validate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAULT = 2
EXIT_TRUNCATED = 3
EXIT_NOT_FOUND = 4

DEFAULT_LIMIT = 1000
DEFAULT_MAX_STEPS = 1_000_000


class _InputError(Exception):
    pass


def _source(name: str) -> SourceModel:
    p = Path(name)
    if p.is_file():
        return SourceModel.from_path(p)
    bundled = bundled_models()
    if name in bundled:
        return SourceModel.from_path(bundled[name])
    raise _InputError(f"{name}: no such file or bundled model")


def _load(name: str) -> tuple[SourceModel, A.Program]:
    src = _source(name)
    try:
        return src, load_model(src)
    except (ParseError, ValidationError) as exc:
        raise _InputError(str(exc)) from exc


def _policy(args) -> Policy:
    if args.policy == "fifo":
        return Policy.fifo()
    if args.policy == "priority":
        return Policy.priority(args.seed)
    return Policy.seeded(args.seed)


def _report(pairs: list[tuple[str, object]]) -> None:
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        print(f"{k + ':':<{width + 1}} {v}")


def cmd_run(args) -> int:
    src, program = _load(args.model)
    policy = _policy(args)
    pairs: list[tuple[str, object]] = [
        ("model", src.origin), ("policy", policy.describe()), ("seed", args.seed),
        ("limit", args.limit), ("max-steps", args.max_steps),
    ]
    try:
        config = init_configuration(program, args.limit)
    except (RuntimeFault, EvalError) as exc:
        pairs += [("status", "faulted"), ("fault", exc), ("exit", EXIT_FAULT)]
        _report(pairs)
        print(f"{src.origin}: runtime fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    result = run(config, policy, args.max_steps)
    if args.trace:
        Path(args.trace).write_text(result.trace_text(), encoding="utf-8")
    code = {"terminated": EXIT_OK, "faulted": EXIT_FAULT, "truncated": EXIT_TRUNCATED}[result.status]
    status = result.status + (f" ({result.terminal})" if result.terminal else "")
    pairs += [("status", status), ("final clock", result.final.clock.time), ("steps", result.steps)]
    if result.fault is not None:
        pairs.append(("fault", result.fault))
        print(f"{src.origin}: runtime fault: {result.fault}", file=sys.stderr)
    if find_sink(result.final) is not None:
        pairs.append(("sink", metrics(result.final)))
    pairs += [("trace", args.trace or "-"), ("exit", code)]
    _report(pairs)
    return code


def cmd_explore(args) -> int:
    src, program = _load(args.model)
    pred = None
    if args.query is not None:
        try:
            pred = query_predicate(args.query, args.tolerance)
        except ValueError as exc:
            raise _InputError(f"malformed query: {exc}") from exc
    config = init_configuration(program, args.limit)
    print(f"model: {src.origin}")
    print(f"limit: {args.limit}  depth: {args.depth}  states: {args.states}")
    if pred is None:
        res = explore(config, args.depth, args.states)
        sys.stdout.write(res.summary())
        return EXIT_OK
    if find_sink(config) is None and not any(c.name == "SinkNode" for c in program.classes):
        raise _InputError("--query needs a model with a SinkNode")
    w = check_achievable(config, pred, args.depth, args.states, samples=args.samples,
                         metrics_fn=metrics, max_steps=args.max_steps)
    print(f"query: {args.query}")
    if w is None:
        print("witness: not found within bounds")
        return EXIT_NOT_FOUND
    out = Path(args.witness or f"{Path(src.origin).stem.strip('<>')}.witness.jsonl")
    replay = w.replay(config, args.max_steps)
    out.write_text(replay.trace_text(), encoding="utf-8")
    print(f"witness: found by {w.source}, {w.steps} steps, {w.metrics}")
    print(f"witness script: {len(w.script)} choices")
    print(f"witness trace: {out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = build_table1(seeds=args.seeds, variants=tuple(args.variants),
                        topologies=tuple(args.topologies), limit=args.limit)
    sys.stdout.write(format_table1(rows))
    if args.json:
        Path(args.json).write_text(json.dumps([r.to_data() for r in rows], indent=2) + "\n",
                                   encoding="utf-8")
    return EXIT_OK


def cmd_parse(args) -> int:
    src = _source(args.model)
    try:
        program = parse(src)
        validate(program, src.origin)
    except (ParseError, ValidationError) as exc:
        raise _InputError(str(exc)) from exc
    if args.desugar:
        program = desugar(program)
    if args.dump_ast:
        print(json.dumps(A.to_data(program), indent=1))
    elif args.desugar:
        print(program_str(program), end="")
    else:
        print(f"{src.origin}: ok ({len(program.interfaces)} interfaces, {len(program.classes)} classes)")
    return EXIT_OK


def cmd_models(args) -> int:
    for name, path in bundled_models().items():
        print(f"{name:<24} {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tcreol", description="Timed Creol interpreter and explorer.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a model under one schedule")
    p.add_argument("model", help="model file or bundled model name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help="clock limit (default %(default)s)")
    p.add_argument("--policy", choices=("seeded", "fifo", "priority"), default="seeded")
    p.add_argument("--trace", metavar="PATH", help="write the JSON-lines trace here")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("explore", help="bounded exhaustive exploration / witness search")
    p.add_argument("model")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--states", type=int, default=DEFAULT_STATE_LIMIT)
    p.add_argument("--query", help='sink metrics to reach, e.g. "received=2,last=2" or "last=none"')
    p.add_argument("--tolerance", type=int, default=0, help="accepted distance on last (default 0)")
    p.add_argument("--samples", type=int, default=200, help="random runs tried before exhaustive search")
    p.add_argument("--witness", metavar="PATH", help="where to write the witness trace")
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("bench-table1", help="reproduce the sensor network timing table")
    p.add_argument("--variants", nargs="+", choices=VARIANTS, default=list(VARIANTS))
    p.add_argument("--topologies", nargs="+", choices=TOPOLOGIES, default=list(TOPOLOGIES))
    p.add_argument("--seeds", type=int, default=0, help="also show outcome distributions over N seeds")
    p.add_argument("--limit", type=int, default=LIMIT)
    p.add_argument("--json", metavar="PATH", help="write the rows as JSON")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("parse", help="parse and validate a model")
    p.add_argument("model")
    p.add_argument("--dump-ast", action="store_true", help="print the AST as JSON")
    p.add_argument("--desugar", action="store_true", help="desugar; prints the desugared source unless --dump-ast")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("models", help="list bundled models")
    p.set_defaults(func=cmd_models)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"tcreol: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
