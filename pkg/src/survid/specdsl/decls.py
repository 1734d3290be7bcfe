"""Syntax tree of a parsed specification.

Positions (``line``/``column``) never take part in equality, so a document
and the re-parse of its pretty-printed form compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from ..behaviour import PropertyExpr, Scalar

Pos = dict  # key -> (line, column)


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class SpecError(Exception):
    """Raised by :func:`parse` when the source has errors."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


# generic value nodes, kept for keys the parser does not know


@dataclass(frozen=True)
class Atom:
    kind: str  # WORD | NUMBER | STRING | OP
    text: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Geo:
    lat: float
    lon: float
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Record:
    fields: tuple[tuple[str, Union[Atom, Geo]], ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Node", ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Pair:
    left: "Node"
    right: "Node"
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


Node = Union[Atom, Geo, Record, Call, Pair]


@dataclass(frozen=True)
class Entry:
    key: str
    arg: Optional[str]
    value: tuple[Node, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


# declarations


@dataclass(frozen=True)
class Decl:
    name: str
    # entries with unknown keys, kept so that printing loses nothing
    extras: tuple[Entry, ...] = field(default=(), kw_only=True)
    positions: Pos = field(default_factory=dict, compare=False, repr=False, kw_only=True)

    kind = "decl"

    def pos(self, key: str | None = None) -> tuple[int, int]:
        if key is not None and key in self.positions:
            return self.positions[key]
        return self.positions.get("", (1, 1))


@dataclass(frozen=True)
class EntityDecl(Decl):
    members: tuple[str, ...] = ()
    kind = "entity"


@dataclass(frozen=True)
class IdSysDecl(Decl):
    entities: str = ""
    format: str = "free"
    identifiers: tuple[str, ...] = ()
    pairs: tuple[tuple[str, str], ...] = ()
    pairs_file: Optional[str] = None
    kind = "idsys"


@dataclass(frozen=True)
class BehaviourDecl(Decl):
    entities: str = ""
    traces: tuple[tuple[str, tuple[tuple[tuple[str, Scalar], ...], ...]], ...] = ()
    log: Optional[str] = None
    kind = "behaviour"


@dataclass(frozen=True)
class PropertyDecl(Decl):
    expr: Optional[PropertyExpr] = None
    kind = "property"


@dataclass(frozen=True)
class SurveillanceDecl(Decl):
    idsys: str = ""
    property: str = ""
    behaviour: Optional[str] = None
    entity: str = ""
    observable: str = ""
    attributes: str = ""
    identity: str = ""
    kind = "surveillance"


@dataclass(frozen=True)
class CategorizationDecl(Decl):
    idsys: str = ""
    blocks: tuple[tuple[str, tuple[str, ...]], ...] = ()
    kind = "categorization"


@dataclass(frozen=True)
class PolicyDecl(Decl):
    fields: tuple[str, ...] = ()
    formats: tuple[tuple[str, str], ...] = ()
    supports: tuple[tuple[str, str], ...] = ()
    template: tuple[str, ...] = ()
    counter: bool = False
    anchor: bool = False
    augment: bool = False
    kind = "policy"


@dataclass(frozen=True)
class ReductionDecl(Decl):
    source: str = ""
    target: str = ""
    mapping: tuple[tuple[str, str], ...] = ()
    map_file: Optional[str] = None
    kind = "reduction"


DECL_TYPES = {
    c.kind: c
    for c in (
        EntityDecl,
        IdSysDecl,
        BehaviourDecl,
        PropertyDecl,
        SurveillanceDecl,
        CategorizationDecl,
        PolicyDecl,
        ReductionDecl,
    )
}


@dataclass(frozen=True)
class SpecDocument:
    declarations: tuple[Decl, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = field(default=(), compare=False, repr=False)

    def __iter__(self) -> Iterator[Decl]:
        return iter(self.declarations)

    def __len__(self) -> int:
        return len(self.declarations)

    def get(self, name: str, kind: str | None = None) -> Decl:
        for d in self.declarations:
            if d.name == name and (kind is None or d.kind == kind):
                return d
        what = f"{kind} " if kind else ""
        raise KeyError(f"no {what}declaration named {name!r}")

    def of_kind(self, kind: str) -> list[Decl]:
        return [d for d in self.declarations if d.kind == kind]
