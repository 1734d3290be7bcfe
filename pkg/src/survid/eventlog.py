"""Tab-separated event logs.

Each line is ``timestamp<TAB>entity<TAB>payload`` where the payload is a
``;``-separated list of ``field=value`` pairs.  Timestamps are integers or
ISO-8601 date-times; only their order is kept, so an entity's events are
re-indexed to time points ``0 .. n-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterable

from .behaviour import BehaviourMap, Scalar, Trace
from .errors import EventLogError

_INT = re.compile(r"-?[0-9]+")
_FLOAT = re.compile(r"-?[0-9]+\.[0-9]+([eE][+-]?[0-9]+)?|-?[0-9]+[eE][+-]?[0-9]+")


@dataclass(frozen=True)
class EventLine:
    lineno: int
    timestamp: int | datetime
    entity: str
    record: dict[str, Scalar]
    raw: str


def parse_value(text: str) -> Scalar:
    if _INT.fullmatch(text):
        return int(text)
    if _FLOAT.fullmatch(text):
        return float(text)
    lat, sep, lon = text.partition(",")
    if sep and all(_INT.fullmatch(x) or _FLOAT.fullmatch(x) for x in (lat.strip(), lon.strip())):
        return (float(lat), float(lon))
    return text


def parse_timestamp(text: str) -> int | datetime:
    if _INT.fullmatch(text):
        return int(text)
    iso = text[:-1] + "+00:00" if text.endswith("Z") else text
    try:
        return datetime.fromisoformat(iso)
    except ValueError:
        raise ValueError(f"bad timestamp {text!r}") from None


def parse_payload(text: str) -> dict[str, Scalar]:
    record: dict[str, Scalar] = {}
    if not text.strip():
        return record
    for part in text.split(";"):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ValueError(f"payload item {part!r} is not field=value")
        if name in record:
            raise ValueError(f"duplicate field {name!r}")
        record[name] = parse_value(value.strip())
    return record


def read_lines(path: str | Path) -> list[EventLine]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise EventLogError(f"cannot read event log: {exc.strerror}", path=path) from None
    out: list[EventLine] = []
    kind = None
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise EventLogError(f"expected 3 tab-separated columns, got {len(cols)}", n, path)
        stamp, entity, payload = cols
        try:
            ts = parse_timestamp(stamp.strip())
            record = parse_payload(payload)
        except ValueError as exc:
            raise EventLogError(str(exc), n, path) from None
        this_kind = (type(ts), getattr(ts, "tzinfo", None) is not None)
        if kind is None:
            kind = this_kind
        elif kind != this_kind:
            raise EventLogError("timestamp encoding differs from earlier lines", n, path)
        entity = entity.strip()
        if not entity:
            raise EventLogError("empty entity key", n, path)
        out.append(EventLine(n, ts, entity, record, line))
    return out


def read_event_log(path: str | Path, entities: Iterable[str] | None = None) -> BehaviourMap:
    """Group a log into one trace per entity.

    With ``entities`` given, every listed entity gets a trace (possibly empty)
    and keys outside the list are an error.
    """
    known = None if entities is None else list(entities)
    allowed = None if known is None else set(known)
    per_entity: dict[str, list[EventLine]] = {e: [] for e in (known or ())}
    for ev in read_lines(path):
        if allowed is not None and ev.entity not in allowed:
            raise EventLogError(f"unknown entity key {ev.entity!r}", ev.lineno, path)
        events = per_entity.setdefault(ev.entity, [])
        if events and ev.timestamp < events[-1].timestamp:
            raise EventLogError(f"timestamp goes backwards for {ev.entity}", ev.lineno, path)
        events.append(ev)
    return BehaviourMap(
        (e, Trace(tuple(ev.record for ev in evs))) for e, evs in sorted(per_entity.items())
    )
