"""Reductions between identifier systems over one set of entities.

A reduction ``red`` from system 1 to system 2 sends each identifier of the
first system to an identifier of the second that names the same entity:
``id1(i) == id2(red(i))`` for every ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import EntityMismatch, IncompatibleReductions, PartialMap
from .identity import EntityKey, IdentifierDatum, IdLike, IdSystem, as_datum, require_functional


@dataclass(frozen=True)
class ReductionMap:
    from_system: str
    to_system: str
    mapping: Mapping[IdentifierDatum, IdentifierDatum] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "mapping", {as_datum(k): as_datum(v) for k, v in dict(self.mapping).items()}
        )

    def __call__(self, i: IdLike) -> IdentifierDatum:
        try:
            return self.mapping[as_datum(i)]
        except KeyError:
            raise PartialMap(f"{i} has no image under {self.from_system} -> {self.to_system}") from None

    def items(self) -> list[tuple[IdentifierDatum, IdentifierDatum]]:
        return sorted(self.mapping.items())

    def render(self) -> str:
        return "".join(f"{a.value}\t{b.value}\n" for a, b in self.items())


@dataclass(frozen=True)
class Counterexample:
    identifier: IdentifierDatum
    image: IdentifierDatum
    source_entity: EntityKey
    target_entity: EntityKey

    def __str__(self) -> str:
        return (
            f"{self.identifier.value} names {self.source_entity} but "
            f"{self.image.value} names {self.target_entity}"
        )


@dataclass(frozen=True)
class Verification:
    holds: bool
    counterexamples: tuple[Counterexample, ...] = ()

    def __bool__(self) -> bool:
        return self.holds


def _require_compatible(sys1: IdSystem, sys2: IdSystem) -> None:
    require_functional(sys1)
    require_functional(sys2)
    if sys1.entities != sys2.entities:
        raise EntityMismatch(f"{sys1.name} and {sys2.name} are over different entity sets")


def verify_reduction(sys1: IdSystem, sys2: IdSystem, red: ReductionMap) -> Verification:
    """Check ``id1(i) == id2(red(i))`` at every identifier of ``sys1``.

    The map must be total on ``sys1`` and land in ``sys2``; otherwise
    :class:`PartialMap` is raised.  A failed check carries every witness.
    """
    _require_compatible(sys1, sys2)
    missing = sorted(i.value for i in sys1.identifiers if i not in red.mapping)
    if missing:
        raise PartialMap("no image for: " + ", ".join(missing))
    extra = sorted(i.value for i in red.mapping if i not in sys1.identifiers)
    if extra:
        raise PartialMap(f"identifiers not in {sys1.name}: " + ", ".join(extra))
    outside = sorted(j.value for j in red.mapping.values() if j not in sys2.identifiers)
    if outside:
        raise PartialMap(f"images not in {sys2.name}: " + ", ".join(outside))
    id1, id2 = sys1.id_map(), sys2.id_map()
    bad = [
        Counterexample(i, j, id1[i], id2[j])
        for i, j in sorted(red.mapping.items())
        if id1[i] != id2[j]
    ]
    return Verification(not bad, tuple(bad))


def find_reduction(sys1: IdSystem, sys2: IdSystem) -> ReductionMap | None:
    """Search for a reduction, choosing the least admissible image each time."""
    _require_compatible(sys1, sys2)
    id2 = sys2.id_map()
    least: dict[EntityKey, IdentifierDatum] = {}
    for j in sorted(sys2.identifiers):
        least.setdefault(id2[j], j)
    mapping = {}
    for i, e in sys1.id_map().items():
        if e not in least:
            return None
        mapping[i] = least[e]
    return ReductionMap(sys1.name, sys2.name, mapping)


def identity_reduction(sys: IdSystem) -> ReductionMap:
    return ReductionMap(sys.name, sys.name, {i: i for i in sys.identifiers})


def compose_reductions(r1: ReductionMap, r2: ReductionMap) -> ReductionMap:
    """The reduction ``i -> r2(r1(i))``."""
    if r1.to_system != r2.from_system:
        raise IncompatibleReductions(
            f"cannot compose {r1.from_system}->{r1.to_system} with {r2.from_system}->{r2.to_system}"
        )
    return ReductionMap(r1.from_system, r2.to_system, {i: r2(j) for i, j in r1.mapping.items()})
