import itertools

import pytest
from hypothesis import given, strategies as st

from survid.errors import EntityMismatch, IncompatibleReductions, NotFunctional, PartialMap
from survid.identity import IdSystem
from survid.reduction import (
    ReductionMap,
    compose_reductions,
    find_reduction,
    identity_reduction,
    verify_reduction,
)
from survid.specdsl import build_idsystem, build_reduction, find_reduction_decl, parse


def all_maps(sys1, sys2):
    """Every total map from the identifiers of ``sys1`` to those of ``sys2``."""
    src, dst = sorted(sys1.identifiers), sorted(sys2.identifiers)
    for images in itertools.product(dst, repeat=len(src)):
        yield ReductionMap(sys1.name, sys2.name, dict(zip(src, images)))


def equation_holds(sys1, sys2, red):
    return all(sys1.ent(i) == sys2.ent(red(i)) for i in sys1.identifiers)


@st.composite
def total_functional(draw, ents, prefix, max_ids=5):
    n = draw(st.integers(0, max_ids))
    pairs = [(f"{prefix}{k}", draw(st.sampled_from(ents))) for k in range(n)]
    return IdSystem.from_pairs(prefix, pairs, entities=ents)


@st.composite
def system_pairs(draw, max_ids=5, max_ents=5):
    ents = [f"e{k}" for k in range(draw(st.integers(1, max_ents)))]
    return draw(total_functional(ents, "a", max_ids)), draw(total_functional(ents, "b", max_ids))


@pytest.fixture
def dvla(data):
    doc = parse(data("dvla.svs").read_text())
    return doc, {n: build_idsystem(doc, n) for n in ("reg", "add", "points")}


def test_dvla_lookup_verifies(dvla):
    doc, s = dvla
    red = build_reduction(doc, find_reduction_decl(doc, "reg", "add"))
    assert verify_reduction(s["reg"], s["add"], red)


def test_identity_verifies(dvla):
    _, s = dvla
    assert verify_reduction(s["reg"], s["reg"], identity_reduction(s["reg"]))


def test_misrouted_mark_is_reported(dvla):
    doc, s = dvla
    red = build_reduction(doc, find_reduction_decl(doc, "reg", "add"))
    bad = dict(red.mapping)
    keys = sorted(bad)
    bad[keys[0]], bad[keys[1]] = bad[keys[1]], bad[keys[0]]
    verdict = verify_reduction(s["reg"], s["add"], ReductionMap("reg", "add", bad))
    assert not verdict
    assert {c.identifier for c in verdict.counterexamples} == {keys[0], keys[1]}


def test_search_finds_declared_map(dvla):
    doc, s = dvla
    declared = build_reduction(doc, find_reduction_decl(doc, "reg", "add"))
    assert find_reduction(s["reg"], s["add"]).mapping == declared.mapping


def test_missing_keeper_means_no_reduction():
    reg = IdSystem.from_pairs("reg", [("m1", "k1"), ("m2", "k2")])
    add = IdSystem.from_pairs("add", [("a1", "k1")], entities=["k2"])
    assert find_reduction(reg, add) is None


def test_empty_source_gives_empty_map():
    empty = IdSystem.from_pairs("e", [], entities=["k"])
    other = IdSystem.from_pairs("o", [("x", "k")])
    red = find_reduction(empty, other)
    assert red.mapping == {} and verify_reduction(empty, other, red)


def test_composition_chain(dvla):
    doc, s = dvla
    r1 = build_reduction(doc, find_reduction_decl(doc, "reg", "add"))
    r2 = build_reduction(doc, find_reduction_decl(doc, "add", "points"))
    assert verify_reduction(s["reg"], s["points"], compose_reductions(r1, r2))


def test_compose_with_identity(dvla):
    doc, s = dvla
    r1 = build_reduction(doc, find_reduction_decl(doc, "reg", "add"))
    assert compose_reductions(r1, identity_reduction(s["add"])).mapping == r1.mapping
    assert compose_reductions(identity_reduction(s["reg"]), r1).mapping == r1.mapping


def test_incompatible_composition(dvla):
    doc, _ = dvla
    r1 = build_reduction(doc, find_reduction_decl(doc, "reg", "add"))
    with pytest.raises(IncompatibleReductions):
        compose_reductions(r1, r1)


def test_two_car_keeper_is_not_functional_on_the_other_side():
    keepers = IdSystem.from_pairs("add", [("addr", "k1"), ("addr", "k2")])
    marks = IdSystem.from_pairs("reg", [("m1", "k1"), ("m2", "k2")])
    with pytest.raises(NotFunctional):
        find_reduction(marks, keepers)


def test_entity_sets_must_agree():
    a = IdSystem.from_pairs("a", [("x", "k1")])
    b = IdSystem.from_pairs("b", [("y", "k2")])
    with pytest.raises(EntityMismatch):
        verify_reduction(a, b, ReductionMap("a", "b", {"x": "y"}))


def test_partial_map():
    a = IdSystem.from_pairs("a", [("x", "k"), ("z", "k")])
    b = IdSystem.from_pairs("b", [("y", "k")])
    with pytest.raises(PartialMap):
        verify_reduction(a, b, ReductionMap("a", "b", {"x": "y"}))
    with pytest.raises(PartialMap):
        verify_reduction(a, b, ReductionMap("a", "b", {"x": "y", "z": "nope"}))


@given(system_pairs(max_ids=4, max_ents=4))
def test_search_agrees_with_enumeration(pair):
    sys1, sys2 = pair
    verified = [m for m in all_maps(sys1, sys2) if equation_holds(sys1, sys2, m)]
    found = find_reduction(sys1, sys2)
    assert (found is None) == (not verified)
    if found is not None:
        assert verify_reduction(sys1, sys2, found)
        assert found.mapping in [m.mapping for m in verified]


@given(system_pairs())
def test_verify_is_sound(pair):
    sys1, sys2 = pair
    for m in itertools.islice(all_maps(sys1, sys2), 50):
        assert bool(verify_reduction(sys1, sys2, m)) == equation_holds(sys1, sys2, m)


@given(st.integers(1, 4).flatmap(
    lambda n: st.tuples(*(total_functional([f"e{k}" for k in range(n)], p) for p in "abc"))))
def test_composition_preserves_verification(triple):
    a, b, c = triple
    r1, r2 = find_reduction(a, b), find_reduction(b, c)
    if r1 is None or r2 is None:
        return
    assert verify_reduction(a, c, compose_reductions(r1, r2))
