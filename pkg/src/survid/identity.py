"""Finite identifier systems over entities.

An :class:`IdSystem` is a named relation between identifier data and entity
keys.  Entity keys are plain strings: they are ground-truth handles that only
test oracles and fixtures ever see.  Everything downstream (surveillance,
sorting, reductions) works on top of the projections defined here.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Union

from .errors import (
    InvalidSystem,
    NotFunctional,
    UnknownEntity,
    UnknownFormat,
    UnknownIdentifier,
)

EntityKey = str

FORMATS: dict[str, re.Pattern[str] | None] = {
    # area code, age identifier, three-letter sequence
    "reg_mark": re.compile(r"[A-Z]{2}[0-9]{2}[A-Z]{3}"),
    "ni_number": re.compile(r"[A-Z]{2}[0-9]{6}[A-Z]"),
    "nhs_number": re.compile(r"[A-Za-z0-9]{10}"),
    "passport_number": re.compile(r"[0-9]{9}"),
    "driving_licence": re.compile(r"[A-Za-z0-9]{18}"),
    "free": None,
}

SUFFIX_SEP = "#"


def validate_format(tag: str, value: str) -> bool:
    """Return True if ``value`` has the shape required by format ``tag``.

    ``free`` accepts any non-empty text.  Matching is exact: no case folding,
    no whitespace stripping.
    """
    try:
        pattern = FORMATS[tag]
    except KeyError:
        raise UnknownFormat(f"unknown identifier format {tag!r}") from None
    if not isinstance(value, str) or not value:
        return False
    if pattern is None:
        return True
    return pattern.fullmatch(value) is not None


@dataclass(frozen=True, order=True)
class IdentifierDatum:
    """A piece of identifying data.

    Equality, hashing and ordering use ``value`` only; the format tag records
    which validator the value was checked against.
    """

    value: str
    format_tag: str = field(default="free", compare=False)

    def __post_init__(self) -> None:
        if not isinstance(self.value, str) or not self.value:
            raise InvalidSystem("identifier value must be non-empty text")
        if not validate_format(self.format_tag, self.value):
            raise InvalidSystem(
                f"identifier {self.value!r} does not match format {self.format_tag!r}"
            )

    def __str__(self) -> str:
        return self.value


IdLike = Union[IdentifierDatum, str]


def as_datum(i: IdLike) -> IdentifierDatum:
    return i if isinstance(i, IdentifierDatum) else IdentifierDatum(i)


@dataclass(frozen=True)
class IdSystem:
    """A finite assignment relation ``pairs ⊆ identifiers × entities``."""

    name: str
    identifiers: frozenset[IdentifierDatum]
    entities: frozenset[EntityKey]
    pairs: frozenset[tuple[IdentifierDatum, EntityKey]]
    _ent: dict = field(init=False, repr=False, compare=False, hash=False)
    _ids: dict = field(init=False, repr=False, compare=False, hash=False)
    _by_value: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        idents = frozenset(self.identifiers)
        ents = frozenset(self.entities)
        pairs = frozenset(self.pairs)
        object.__setattr__(self, "identifiers", idents)
        object.__setattr__(self, "entities", ents)
        object.__setattr__(self, "pairs", pairs)
        for e in ents:
            if not isinstance(e, str) or not e:
                raise InvalidSystem("entity keys must be non-empty text")
        ent: dict[IdentifierDatum, set[EntityKey]] = {i: set() for i in idents}
        ids: dict[EntityKey, set[IdentifierDatum]] = {e: set() for e in ents}
        for i, e in pairs:
            if i not in ent:
                raise InvalidSystem(f"pair uses undeclared identifier {i.value!r}")
            if e not in ids:
                raise InvalidSystem(f"pair uses undeclared entity {e!r}")
            ent[i].add(e)
            ids[e].add(i)
        object.__setattr__(self, "_ent", {k: frozenset(v) for k, v in ent.items()})
        object.__setattr__(self, "_ids", {k: frozenset(v) for k, v in ids.items()})
        object.__setattr__(self, "_by_value", {i.value: i for i in idents})

    @classmethod
    def from_pairs(
        cls,
        name: str,
        pairs: Iterable[tuple[IdLike, EntityKey]],
        *,
        identifiers: Iterable[IdLike] = (),
        entities: Iterable[EntityKey] = (),
        format_tag: str = "free",
    ) -> "IdSystem":
        """Build a system from ``(identifier, entity)`` pairs.

        Extra isolated identifiers and entities may be given explicitly; the
        ones mentioned in ``pairs`` are always included.
        """

        def mk(i: IdLike) -> IdentifierDatum:
            return i if isinstance(i, IdentifierDatum) else IdentifierDatum(i, format_tag)

        pairs = [(mk(i), e) for i, e in pairs]
        idents = {mk(i) for i in identifiers} | {i for i, _ in pairs}
        ents = set(entities) | {e for _, e in pairs}
        return cls(name, frozenset(idents), frozenset(ents), frozenset(pairs))

    def ent(self, i: IdLike) -> frozenset[EntityKey]:
        """The entities named by identifier ``i``."""
        try:
            return self._ent[as_datum(i)]
        except KeyError:
            raise UnknownIdentifier(f"{i} is not an identifier of {self.name}") from None

    def ids(self, e: EntityKey) -> frozenset[IdentifierDatum]:
        """All identifiers naming entity ``e``."""
        try:
            return self._ids[e]
        except KeyError:
            raise UnknownEntity(f"{e} is not an entity of {self.name}") from None

    def lookup(self, value: str) -> IdentifierDatum:
        """Return the stored datum (with its format tag) for a raw value."""
        try:
            return self._by_value[value]
        except KeyError:
            raise UnknownIdentifier(f"{value} is not an identifier of {self.name}") from None

    def id_map(self) -> dict[IdentifierDatum, EntityKey]:
        """The single-valued map ``id`` of a functional, total system."""
        require_functional(self)
        return {i: next(iter(es)) for i, es in self._ent.items()}


def ent(sys: IdSystem, i: IdLike) -> frozenset[EntityKey]:
    return sys.ent(i)


def ids(sys: IdSystem, e: EntityKey) -> frozenset[IdentifierDatum]:
    return sys.ids(e)


@dataclass(frozen=True)
class RelationShape:
    tag: str
    identifier_functional: bool
    entity_functional: bool
    identifier_total: bool
    entity_total: bool


_TAGS = {
    (True, True): "one_one",
    (True, False): "many_one",
    (False, True): "one_many",
    (False, False): "many_many",
}


def classify_shape(sys: IdSystem) -> RelationShape:
    """Classify the association between identifiers and entities.

    The tag is read off the two functionality flags: an identifier naming
    several entities makes the relation "one-many", an entity with several
    identifiers makes it "many-one".  Totality is reported separately.
    """
    i_fun = all(len(sys.ent(i)) <= 1 for i in sys.identifiers)
    e_fun = all(len(sys.ids(e)) <= 1 for e in sys.entities)
    i_tot = bool(sys.identifiers) and all(sys.ent(i) for i in sys.identifiers)
    e_tot = bool(sys.entities) and all(sys.ids(e) for e in sys.entities)
    return RelationShape(_TAGS[i_fun, e_fun], i_fun, e_fun, i_tot, e_tot)


def is_functional(sys: IdSystem) -> bool:
    """True when every identifier names exactly one entity."""
    return all(len(sys.ent(i)) == 1 for i in sys.identifiers)


def require_functional(sys: IdSystem) -> None:
    for i in sys.identifiers:
        n = len(sys.ent(i))
        if n != 1:
            raise NotFunctional(
                f"{sys.name}: identifier {i.value!r} names {n} entities, expected exactly 1"
            )


def id_equivalent(sys: IdSystem, i1: IdLike, i2: IdLike) -> bool:
    require_functional(sys)
    return sys.ent(i1) == sys.ent(i2)


def equivalence_classes(sys: IdSystem) -> list[frozenset[IdentifierDatum]]:
    """Quotient of the identifiers by id-equivalence, sorted by least member."""
    require_functional(sys)
    by_entity: dict[frozenset, set[IdentifierDatum]] = defaultdict(set)
    for i in sys.identifiers:
        by_entity[sys.ent(i)].add(i)
    return sorted((frozenset(b) for b in by_entity.values()), key=min)


def check_uniqueness(sys: IdSystem) -> bool:
    """True iff the induced map ``id`` is injective."""
    require_functional(sys)
    return all(len(sys.ids(e)) <= 1 for e in sys.entities)


def enumerate_disambiguate(sys: IdSystem) -> IdSystem:
    """Suffix identifiers with ``#k`` so that each names a single entity.

    An identifier naming entities ``e1 < ... < em`` becomes ``i#1 ... i#m``
    with ``i#k`` assigned to ``ek``.  Identifiers naming nothing are kept as
    they are.
    """
    idents: set[IdentifierDatum] = set()
    pairs: set[tuple[IdentifierDatum, EntityKey]] = set()
    for i in sys.identifiers:
        named = sorted(sys.ent(i))
        if not named:
            idents.add(i)
            continue
        for k, e in enumerate(named, start=1):
            d = IdentifierDatum(f"{i.value}{SUFFIX_SEP}{k}")
            idents.add(d)
            pairs.add((d, e))
    if len(idents) != sum(max(len(sys.ent(i)), 1) for i in sys.identifiers):
        raise InvalidSystem("suffixed identifiers collide with existing values")
    return IdSystem(sys.name, frozenset(idents), sys.entities, frozenset(pairs))


def canonicalize(sys: IdSystem) -> IdSystem:
    """Keep, per entity, only its lexicographically least identifier.

    The system must be identifier-functional.  Identifiers that name no
    entity are dropped, since no entity is left to keep them for.
    """
    if not classify_shape(sys).identifier_functional:
        raise NotFunctional(f"{sys.name}: some identifier names several entities")
    keep = {min(sys.ids(e)): e for e in sys.entities if sys.ids(e)}
    return IdSystem(
        sys.name,
        frozenset(keep),
        sys.entities,
        frozenset(keep.items()),
    )


def is_personal_identity_system(sys: IdSystem) -> bool:
    """Functional, total on identifiers, and injective."""
    if not is_functional(sys):
        return False
    return check_uniqueness(sys)
