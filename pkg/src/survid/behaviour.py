"""Traces, behaviour maps and the property language evaluated over them.

A trace is a finite observed prefix of a stream ``Time -> Action``: position
``k`` of :attr:`Trace.events` is the record at time ``k``.  Records are
read-only mappings from field names to scalars (text, int, float, or a
``(lat, lon)`` pair).

Property expressions come in two scopes.  *Event-level* expressions (the
field atoms and their boolean combinations) are judged against one record.
*Trace-level* expressions are judged against a whole trace; a field atom used
at trace level holds when some event satisfies it.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, Tuple, Union

from .errors import AtomScopeError, IndexOutOfRange, InvalidRate, InvalidSystem, UnknownEntity

Scalar = Union[str, int, float, Tuple[float, float]]
ActionRecord = Mapping[str, Scalar]

_MASK64 = (1 << 64) - 1


def _freeze(record: Mapping[str, Scalar]) -> ActionRecord:
    for name in record:
        if not isinstance(name, str) or not name:
            raise InvalidSystem("record field names must be non-empty text")
    return MappingProxyType(dict(record))


@dataclass(frozen=True)
class Trace:
    events: tuple[ActionRecord, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "events", tuple(_freeze(r) for r in self.events))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[ActionRecord]:
        return iter(self.events)

    def __getitem__(self, t: int) -> ActionRecord:
        return self.events[t]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return [dict(r) for r in self.events] == [dict(r) for r in other.events]

    def __hash__(self) -> int:
        return hash(tuple(tuple(sorted(r.items())) for r in self.events))

    def __repr__(self) -> str:
        return f"Trace({[dict(r) for r in self.events]!r})"


@dataclass(frozen=True)
class TweetRecord:
    text: str
    tweet_id: str
    contributor: str
    time: int
    location: tuple[float, float]
    retweet: int = 0
    favourite: int = 0

    def __post_init__(self) -> None:
        if len(self.text) > 140:
            raise InvalidSystem(f"tweet {self.tweet_id} is longer than 140 characters")
        if self.time < 0 or self.retweet < 0 or self.favourite < 0:
            raise InvalidSystem(f"tweet {self.tweet_id} has a negative count or time")

    def as_record(self) -> ActionRecord:
        return _freeze(
            {
                "kind": "tweet",
                "text": self.text,
                "tweet_id": self.tweet_id,
                "contributor": self.contributor,
                "time": self.time,
                "location": tuple(self.location),
                "retweet": self.retweet,
                "favourite": self.favourite,
            }
        )


def tweet_stream(tweets: Iterable[TweetRecord]) -> Trace:
    """Stream of tweets in the given order; tweet ids must be unique."""
    tweets = list(tweets)
    seen: set[str] = set()
    for tw in tweets:
        if tw.tweet_id in seen:
            raise InvalidSystem(f"duplicate tweet id {tw.tweet_id}")
        seen.add(tw.tweet_id)
    return Trace(tuple(tw.as_record() for tw in tweets))


class BehaviourMap(Mapping[str, Trace]):
    """Assigns one and only one trace to each entity."""

    def __init__(self, assignments: Iterable[tuple[str, Trace]] | Mapping[str, Trace] = ()):
        if isinstance(assignments, Mapping):
            assignments = assignments.items()
        data: dict[str, Trace] = {}
        for e, tr in assignments:
            if e in data:
                raise InvalidSystem(f"entity {e} is assigned more than one behaviour")
            if not isinstance(tr, Trace):
                tr = Trace(tuple(tr))
            data[e] = tr
        self._data = data

    def __getitem__(self, e: str) -> Trace:
        try:
            return self._data[e]
        except KeyError:
            raise UnknownEntity(f"no behaviour recorded for {e}") from None

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __repr__(self) -> str:
        return f"BehaviourMap({self._data!r})"


# --------------------------------------------------------------------------
# property expressions

COMPARATORS: dict[str, Callable[[float, float], bool]] = {
    "<": operator.lt,
    "<=": operator.le,
    "=": operator.eq,
    ">=": operator.ge,
    ">": operator.gt,
}
OP_ALIASES = {"≤": "<=", "≥": ">=", "==": "="}


def _norm_op(op: str) -> str:
    op = OP_ALIASES.get(op, op)
    if op not in COMPARATORS:
        raise ValueError(f"unknown comparison operator {op!r}")
    return op


def _is_number(x: object) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


class PropertyExpr:
    """Base class of the property AST."""

    event_level = True

    def children(self) -> tuple["PropertyExpr", ...]:
        return ()


@dataclass(frozen=True)
class FieldEquals(PropertyExpr):
    name: str
    value: Scalar

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("field name must be non-empty")


@dataclass(frozen=True)
class FieldContains(PropertyExpr):
    name: str
    keyword: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("field name must be non-empty")


@dataclass(frozen=True)
class FieldCompare(PropertyExpr):
    name: str
    op: str
    number: float

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("field name must be non-empty")
        object.__setattr__(self, "op", _norm_op(self.op))
        if not _is_number(self.number):
            raise ValueError("field_compare needs a numeric bound")


def _require_event_level(expr: PropertyExpr, where: str) -> None:
    if not expr.event_level:
        raise AtomScopeError(f"{where} takes a per-event expression")


@dataclass(frozen=True)
class EventCount(PropertyExpr):
    expr: PropertyExpr
    op: str
    n: int
    event_level = False

    def __post_init__(self) -> None:
        _require_event_level(self.expr, "event_count")
        object.__setattr__(self, "op", _norm_op(self.op))

    def children(self):
        return (self.expr,)


@dataclass(frozen=True)
class Duration(PropertyExpr):
    """Span from the first ``start`` match to the last ``end`` match."""

    start: PropertyExpr
    end: PropertyExpr
    op: str
    n: int
    event_level = False

    def __post_init__(self) -> None:
        _require_event_level(self.start, "duration")
        _require_event_level(self.end, "duration")
        object.__setattr__(self, "op", _norm_op(self.op))

    def children(self):
        return (self.start, self.end)


@dataclass(frozen=True)
class OccursAt(PropertyExpr):
    t: int
    expr: PropertyExpr
    event_level = False

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("time points are non-negative")
        _require_event_level(self.expr, "occurs_at")

    def children(self):
        return (self.expr,)


class _Combinator(PropertyExpr):
    @property
    def event_level(self) -> bool:  # type: ignore[override]
        return all(c.event_level for c in self.children())


@dataclass(frozen=True)
class And(_Combinator):
    args: tuple[PropertyExpr, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))

    def children(self):
        return self.args


@dataclass(frozen=True)
class Or(_Combinator):
    args: tuple[PropertyExpr, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))

    def children(self):
        return self.args


@dataclass(frozen=True)
class Not(_Combinator):
    arg: PropertyExpr

    def children(self):
        return (self.arg,)


ALWAYS = And(())
NEVER = Or(())


def field_equals(name: str, value: Scalar) -> FieldEquals:
    return FieldEquals(name, value)


def field_contains(name: str, keyword: str) -> FieldContains:
    return FieldContains(name, keyword)


def field_compare(name: str, op: str, number: float) -> FieldCompare:
    return FieldCompare(name, op, number)


def event_count(expr: PropertyExpr, op: str, n: int) -> EventCount:
    return EventCount(expr, op, n)


def duration(start: PropertyExpr, end: PropertyExpr, op: str, n: int) -> Duration:
    return Duration(start, end, op, n)


def occurs_at(t: int, expr: PropertyExpr) -> OccursAt:
    return OccursAt(t, expr)


def all_of(*args: PropertyExpr) -> And:
    return And(args)


def any_of(*args: PropertyExpr) -> Or:
    return Or(args)


def negate(arg: PropertyExpr) -> Not:
    return Not(arg)


def _scalar_eq(a: Scalar, b: Scalar) -> bool:
    if _is_number(a) and _is_number(b):
        return a == b
    if isinstance(a, tuple) and isinstance(b, tuple):
        return a == b
    return type(a) is type(b) and a == b


def matches_event(p: PropertyExpr, record: ActionRecord) -> bool:
    """Judge an event-level expression against a single record."""
    if isinstance(p, FieldEquals):
        return p.name in record and _scalar_eq(record[p.name], p.value)
    if isinstance(p, FieldContains):
        v = record.get(p.name)
        return isinstance(v, str) and p.keyword in v
    if isinstance(p, FieldCompare):
        v = record.get(p.name)
        return _is_number(v) and COMPARATORS[p.op](v, p.number)
    if isinstance(p, And):
        return all(matches_event(a, record) for a in p.args)
    if isinstance(p, Or):
        return any(matches_event(a, record) for a in p.args)
    if isinstance(p, Not):
        return not matches_event(p.arg, record)
    raise AtomScopeError(f"{type(p).__name__} is a trace-level atom")


def eval_property(p: PropertyExpr, tr: Trace) -> bool:
    """Decide whether trace ``tr`` lies in the property ``p``."""
    if isinstance(p, (FieldEquals, FieldContains, FieldCompare)):
        return any(matches_event(p, r) for r in tr.events)
    if isinstance(p, And):
        return all(eval_property(a, tr) for a in p.args)
    if isinstance(p, Or):
        return any(eval_property(a, tr) for a in p.args)
    if isinstance(p, Not):
        return not eval_property(p.arg, tr)
    if isinstance(p, EventCount):
        count = sum(1 for r in tr.events if matches_event(p.expr, r))
        return COMPARATORS[p.op](count, p.n)
    if isinstance(p, Duration):
        starts = [t for t, r in enumerate(tr.events) if matches_event(p.start, r)]
        ends = [t for t, r in enumerate(tr.events) if matches_event(p.end, r)]
        if not starts or not ends or ends[-1] < starts[0]:
            return False
        return COMPARATORS[p.op](ends[-1] - starts[0], p.n)
    if isinstance(p, OccursAt):
        return p.t < len(tr) and matches_event(p.expr, tr.events[p.t])
    raise TypeError(f"not a property expression: {p!r}")


def prop_entities(bm: BehaviourMap, p: PropertyExpr) -> frozenset[str]:
    return frozenset(e for e, tr in bm.items() if eval_property(p, tr))


# --------------------------------------------------------------------------
# stream operations


def append_event(tr: Trace, record: Mapping[str, Scalar]) -> Trace:
    return Trace(tr.events + (record,))


def delete_event(tr: Trace, index: int) -> Trace:
    if not 0 <= index < len(tr):
        raise IndexOutOfRange(f"index {index} outside trace of length {len(tr)}")
    return Trace(tr.events[:index] + tr.events[index + 1 :])


def filter_stream(tr: Trace, p: PropertyExpr) -> Trace:
    """Keep the events satisfying the per-event criterion ``p``, in order."""
    if not p.event_level:
        raise AtomScopeError("filter criteria must be per-event expressions")
    return Trace(tuple(r for r in tr.events if matches_event(p, r)))


def mix64(seed: int, k: int) -> int:
    """splitmix64 finalizer applied to a (seed, index) combination."""
    z = (seed * 0x9E3779B97F4A7C15 + (k + 1) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def keep_index(k: int, rate: float, seed: int) -> bool:
    return mix64(seed, k) < rate * 2.0**64


def sample_stream(tr: Trace, rate: float, seed: int) -> Trace:
    """Deterministic per-index sample of a stream.

    Event ``k`` survives iff ``mix64(seed, k) / 2**64 < rate``.  For a fixed
    seed the kept set only grows with ``rate``, and ``rate == 1`` keeps all.
    """
    if not 0 < rate <= 1:
        raise InvalidRate(f"sampling rate must lie in (0, 1], got {rate}")
    bound = rate * 2.0**64
    return Trace(tuple(r for k, r in enumerate(tr.events) if mix64(seed, k) < bound))
