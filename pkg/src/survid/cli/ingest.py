"""Event-log ingestion against a parsed specification."""

from __future__ import annotations

from pathlib import Path

from ..behaviour import BehaviourMap
from ..eventlog import read_event_log
from ..specdsl import SpecDocument, all_entities


def ingest_events(path: str | Path, doc: SpecDocument) -> BehaviourMap:
    """Read a log whose entity keys must all be declared in ``doc``.

    Each declared entity gets a trace, re-indexed to time points ``0..n-1``
    in timestamp order (file order among equal timestamps).
    """
    return read_event_log(path, all_entities(doc))
