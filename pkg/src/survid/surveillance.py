"""Surveillance systems: observe behaviour, test a property, report identifiers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from .behaviour import BehaviourMap, PropertyExpr, eval_property
from .errors import InvalidSystem, UnknownEntity
from .identity import EntityKey, IdentifierDatum, IdSystem


@dataclass(frozen=True)
class Summary:
    """The four descriptive rows of a surveillance system."""

    entity: str
    observable: str
    attributes: str
    identity: str

    ROWS = (
        ("Entity", "entity"),
        ("Observable Behaviour", "observable"),
        ("Attributes", "attributes"),
        ("Identity", "identity"),
    )


@dataclass(frozen=True)
class SurvSystem:
    entities: frozenset[EntityKey]
    idsys: IdSystem
    behaviour: BehaviourMap
    prop: PropertyExpr
    name: str = ""
    summary: Summary | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entities", frozenset(self.entities))
        if self.idsys.entities != self.entities:
            raise InvalidSystem(
                f"identifier system {self.idsys.name} is not over the surveilled entities"
            )
        missing = sorted(self.entities - set(self.behaviour))
        if missing:
            raise InvalidSystem("no behaviour for entities: " + ", ".join(missing))
        extra = sorted(set(self.behaviour) - self.entities)
        if extra:
            raise InvalidSystem("behaviour for undeclared entities: " + ", ".join(extra))


class _Sentinel:
    __slots__ = ("_label",)

    def __init__(self, label: str):
        self._label = label

    def __repr__(self) -> str:
        return self._label

    def __reduce__(self):
        return self._label


ANON = _Sentinel("ANON")
UNIDENTIFIED = _Sentinel("UNIDENTIFIED")


@dataclass(frozen=True)
class Identified:
    identifier: IdentifierDatum


SurvOutcome = Union[Identified, _Sentinel]


@dataclass(frozen=True)
class SurvReport:
    flagged: tuple[IdentifierDatum, ...]
    unidentified_count: int
    anon_count: int

    def render(self) -> str:
        lines = [i.value for i in self.flagged]
        lines.append(f"unidentified: {self.unidentified_count}")
        lines.append(f"anonymous: {self.anon_count}")
        return "\n".join(lines) + "\n"


def surv(sys: SurvSystem, e: EntityKey) -> SurvOutcome:
    """Observe entity ``e``.

    Entities whose behaviour misses the property stay anonymous.  A flagged
    entity is reported by its least identifier, or as unidentified when the
    identifier system has no name for it.
    """
    if e not in sys.entities:
        raise UnknownEntity(f"{e} is not under surveillance")
    if not eval_property(sys.prop, sys.behaviour[e]):
        return ANON
    names = sys.idsys.ids(e)
    if not names:
        return UNIDENTIFIED
    return Identified(min(names))


def run_surveillance(sys: SurvSystem, order: Iterable[EntityKey] | None = None) -> SurvReport:
    flagged: set[IdentifierDatum] = set()
    anon = unidentified = 0
    for e in sys.entities if order is None else order:
        out = surv(sys, e)
        if out is ANON:
            anon += 1
        elif out is UNIDENTIFIED:
            unidentified += 1
        else:
            flagged.add(out.identifier)
    return SurvReport(tuple(sorted(flagged)), unidentified, anon)


def describe_specification(sys: SurvSystem) -> str:
    if not sys.name:
        raise InvalidSystem("surveillance system has no name")
    if sys.summary is None:
        raise InvalidSystem(f"surveillance system {sys.name} has no summary")
    rows = []
    for label, attr in Summary.ROWS:
        text = getattr(sys.summary, attr)
        if not text:
            raise InvalidSystem(f"{sys.name}: empty {label!r} row")
        rows.append(f"{label}: {text}")
    return "\n".join(rows) + "\n"
