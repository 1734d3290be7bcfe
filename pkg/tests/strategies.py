"""Hypothesis strategies and random generators for small finite models."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from survid.identity import IdSystem


def ident_names(n: int) -> list[str]:
    return [f"i{k}" for k in range(n)]


def entity_names(n: int) -> list[str]:
    return [f"e{k}" for k in range(n)]


@st.composite
def systems(draw, max_ids: int = 6, max_ents: int = 6, min_ids: int = 0, min_ents: int = 0):
    """A random relation between up to ``max_ids`` identifiers and ``max_ents`` entities."""
    idents = ident_names(draw(st.integers(min_ids, max_ids)))
    ents = entity_names(draw(st.integers(min_ents, max_ents)))
    cells = [(i, e) for i in idents for e in ents]
    pairs = draw(st.lists(st.sampled_from(cells), unique=True)) if cells else []
    return IdSystem.from_pairs("r", pairs, identifiers=idents, entities=ents)


@st.composite
def functional_systems(draw, max_ids: int = 6, max_ents: int = 6, min_ents: int = 1):
    """Every identifier names exactly one entity."""
    ents = entity_names(draw(st.integers(min_ents, max_ents)))
    n = draw(st.integers(0, max_ids))
    pairs = [(f"i{k}", draw(st.sampled_from(ents))) for k in range(n)]
    return IdSystem.from_pairs("f", pairs, entities=ents)


def random_pairs(rng: random.Random, max_ids: int, max_ents: int):
    """A random relation as plain data: (identifiers, entities, pairs)."""
    idents = ident_names(rng.randint(0, max_ids))
    ents = entity_names(rng.randint(0, max_ents))
    density = rng.random()
    pairs = [(i, e) for i in idents for e in ents if rng.random() < density]
    return idents, ents, pairs


def random_system(rng: random.Random, max_ids: int = 8, max_ents: int = 8) -> IdSystem:
    idents, ents, pairs = random_pairs(rng, max_ids, max_ents)
    return IdSystem.from_pairs("r", pairs, identifiers=idents, entities=ents)
