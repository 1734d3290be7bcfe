"""Categorizations of entities and identifiers (social sorting)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

from .behaviour import BehaviourMap, PropertyExpr, eval_property
from .errors import AmbiguousSort, CarrierMismatch, NotACategorization, UncoveredEntity
from .identity import IdSystem

RESIDUAL = "residual"


@dataclass(frozen=True)
class Categorization:
    """A named family of subsets whose union is the whole carrier.

    Blocks may overlap; :func:`is_partition` checks for disjointness.
    """

    carrier: frozenset
    blocks: tuple[tuple[str, frozenset], ...]

    def __post_init__(self) -> None:
        carrier = frozenset(self.carrier)
        blocks = tuple((name, frozenset(members)) for name, members in self.blocks)
        object.__setattr__(self, "carrier", carrier)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise NotACategorization("a categorization needs at least one block")
        names = [n for n, _ in blocks]
        if len(set(names)) != len(names):
            raise NotACategorization("block names must be unique")
        union: set = set()
        for name, members in blocks:
            stray = members - carrier
            if stray:
                raise NotACategorization(
                    f"block {name} has elements outside the carrier: {sorted(map(str, stray))}"
                )
            union |= members
        uncovered = carrier - union
        if uncovered:
            raise NotACategorization(
                "blocks do not cover: " + ", ".join(sorted(map(str, uncovered)))
            )

    @classmethod
    def from_mapping(cls, carrier: Iterable[Hashable], blocks: Mapping[str, Iterable]) -> "Categorization":
        return cls(frozenset(carrier), tuple((k, frozenset(v)) for k, v in blocks.items()))

    def block(self, name: str) -> frozenset:
        for n, members in self.blocks:
            if n == name:
                return members
        raise KeyError(name)

    def names(self) -> list[str]:
        return [n for n, _ in self.blocks]


def is_partition(c: Categorization) -> bool:
    seen: set = set()
    for _, members in c.blocks:
        if seen & members:
            return False
        seen |= members
    return True


def _check_carrier(c: Categorization, sys: IdSystem) -> None:
    if c.carrier != sys.identifiers:
        raise CarrierMismatch(
            f"categorization is not over the identifiers of {sys.name}"
        )


def co_names(sys: IdSystem, i) -> frozenset:
    """Identifiers sharing at least one entity with ``i`` (``i`` included if named)."""
    return frozenset(j for e in sys.ent(i) for j in sys.ids(e))


def respects_entities(c: Categorization, sys: IdSystem) -> bool:
    """True iff every block is closed under naming the same entity."""
    _check_carrier(c, sys)
    return all(co_names(sys, i) <= members for _, members in c.blocks for i in members)


def lift_to_entities(c: Categorization, sys: IdSystem) -> Categorization:
    """Turn a respectful identifier categorization into one of entities."""
    if not respects_entities(c, sys):
        raise AmbiguousSort(
            "identifiers of one entity fall in different blocks; no entity sorting exists"
        )
    unnamed = sorted(e for e in sys.entities if not sys.ids(e))
    if unnamed:
        raise UncoveredEntity("entities without identifiers: " + ", ".join(unnamed))
    blocks = tuple(
        (name, frozenset(e for i in members for e in sys.ent(i))) for name, members in c.blocks
    )
    return Categorization(sys.entities, blocks)


def sort_by_properties(
    bm: BehaviourMap,
    sys: IdSystem,
    props: Iterable[tuple[str, PropertyExpr]] | Mapping[str, PropertyExpr],
) -> Categorization:
    """One block of identifiers per property, plus a residual block.

    Block ``p`` holds the identifiers of entities whose trace satisfies ``p``;
    the residual block collects identifiers that no property picked up.
    """
    if isinstance(props, Mapping):
        props = props.items()
    props = list(props)
    if not props:
        raise ValueError("at least one property is required")
    if any(name == RESIDUAL for name, _ in props):
        raise ValueError(f"{RESIDUAL!r} is reserved for the residual block")
    blocks = []
    for name, p in props:
        hits = {e for e in sys.entities if eval_property(p, bm[e])}
        blocks.append((name, frozenset(i for e in hits for i in sys.ids(e))))
    covered = frozenset().union(*(m for _, m in blocks))
    blocks.append((RESIDUAL, sys.identifiers - covered))
    return Categorization(sys.identifiers, tuple(blocks))
