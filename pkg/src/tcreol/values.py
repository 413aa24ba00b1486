"""Runtime values.

All values are immutable and hashable so configurations can be copied by
sharing and hashed for state-space deduplication.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union


@dataclass(frozen=True, slots=True)
class IntV:
    v: int

    def __str__(self) -> str:
        return str(self.v)


@dataclass(frozen=True, slots=True)
class BoolV:
    v: bool

    def __str__(self) -> str:
        return "true" if self.v else "false"


@dataclass(frozen=True, slots=True)
class StrV:
    v: str

    def __str__(self) -> str:
        return '"' + self.v.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True, slots=True)
class ListV:
    items: tuple

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.items)) + "]"


@dataclass(frozen=True, slots=True)
class SetV:
    items: frozenset

    def __str__(self) -> str:
        return "{" + ", ".join(sorted(map(str, self.items))) + "}"


@dataclass(frozen=True, slots=True)
class MapV:
    """Finite map; ``pairs`` is kept in insertion order with unique keys."""

    pairs: tuple

    def get(self, key: Value) -> Optional[Value]:
        for k, v in self.pairs:
            if k == key:
                return v
        return None

    def insert(self, key: Value, value: Value) -> MapV:
        rest = tuple((k, v) for k, v in self.pairs if k != key)
        return MapV(rest + ((key, value),))

    def remove(self, key: Value) -> MapV:
        return MapV(tuple((k, v) for k, v in self.pairs if k != key))

    def keys(self) -> tuple:
        return tuple(k for k, _ in self.pairs)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k} |-> {v}" for k, v in self.pairs) + "}"


@dataclass(frozen=True, slots=True)
class TupleV:
    items: tuple

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.items)) + ")"


@dataclass(frozen=True, slots=True)
class ObjRef:
    id: int

    def __str__(self) -> str:
        return f"ob{self.id}"


@dataclass(frozen=True, slots=True)
class FutRef:
    id: int

    def __str__(self) -> str:
        return f"fut{self.id}"


@dataclass(frozen=True, slots=True)
class TimeV:
    t: int

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("time values are non-negative")

    def __str__(self) -> str:
        return f"time({self.t})"


@dataclass(frozen=True, slots=True)
class NullV:
    def __str__(self) -> str:
        return "null"


Value = Union[IntV, BoolV, StrV, ListV, SetV, MapV, TupleV, ObjRef, FutRef, TimeV, NullV]

NULL = NullV()
TRUE = BoolV(True)
FALSE = BoolV(False)
EMPTY_LIST = ListV(())


def default_for(type_name: str) -> Value:
    """Value of an attribute or local declared without an initializer."""
    return _DEFAULTS.get(type_name, NULL)


_DEFAULTS: dict[str, Value] = {
    "Int": IntV(0),
    "Bool": FALSE,
    "String": StrV(""),
    "Time": TimeV(0),
    "List": EMPTY_LIST,
    "Set": SetV(frozenset()),
    "Map": MapV(()),
}


def future_refs(v: Value):
    """Yield every FutRef contained (deeply) in ``v``."""
    if isinstance(v, FutRef):
        yield v
    elif isinstance(v, (ListV, TupleV)):
        for x in v.items:
            yield from future_refs(x)
    elif isinstance(v, SetV):
        for x in v.items:
            yield from future_refs(x)
    elif isinstance(v, MapV):
        for k, x in v.pairs:
            yield from future_refs(k)
            yield from future_refs(x)


def object_refs(v: Value):
    if isinstance(v, ObjRef):
        yield v
    elif isinstance(v, (ListV, TupleV)):
        for x in v.items:
            yield from object_refs(x)
    elif isinstance(v, SetV):
        for x in v.items:
            yield from object_refs(x)
    elif isinstance(v, MapV):
        for k, x in v.pairs:
            yield from object_refs(k)
            yield from object_refs(x)


class Env:
    """Two-layer binding environment: process locals over object attributes.

    Lookups resolve locals first.  The layers are plain mappings and are
    never mutated by evaluation.
    """

    __slots__ = ("attrs", "locals")

    def __init__(self, attrs: Mapping[str, Value], locals: Optional[Mapping[str, Value]] = None):
        self.attrs = attrs
        self.locals = locals if locals is not None else {}

    def lookup(self, name: str) -> Optional[Value]:
        v = self.locals.get(name)
        if v is None:
            v = self.attrs.get(name)
        return v

    def __contains__(self, name: str) -> bool:
        return name in self.locals or name in self.attrs

    def layer_of(self, name: str) -> Optional[str]:
        if name in self.locals:
            return "locals"
        if name in self.attrs:
            return "attrs"
        return None
