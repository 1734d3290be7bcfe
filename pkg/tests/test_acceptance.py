"""Acceptance suite: one test group per criterion.

Run ``pytest tests/test_acceptance.py`` (or execute this file) to get one
PASS/FAIL line per criterion in the terminal summary.
"""

import io
import itertools
import random
import time
from contextlib import redirect_stdout

import pytest

from survid.behaviour import (
    BehaviourMap,
    Trace,
    all_of,
    any_of,
    duration,
    eval_property,
    event_count,
    field_compare,
    field_equals,
    negate,
    occurs_at,
    sample_stream,
)
from survid.cli import main
from survid.data import SPECS
from survid.errors import AmbiguousSort, CyclicProvenance
from survid.identity import (
    IdentifierDatum,
    IdSystem,
    canonicalize,
    classify_shape,
    enumerate_disambiguate,
    validate_format,
)
from survid.provenance import IdentifierRecord, Registry, build_identity_tree, check, generate, provenance_depth
from survid.reduction import ReductionMap, find_reduction, verify_reduction
from survid.sorting import Categorization, is_partition, lift_to_entities, respects_entities
from survid.specdsl import (
    SpecDocument,
    build_idsystem,
    build_policies,
    build_reduction,
    find_reduction_decl,
    parse,
    pretty_print,
)
from survid.surveillance import ANON, UNIDENTIFIED, SurvSystem, run_surveillance, surv

from fuzzing import mutate, nest, run_one
from strategies import random_pairs, random_system

criterion = pytest.mark.criterion


def brute_shape(idents, ents, pairs):
    """Shape by a double loop over the pair list."""
    def count(x, side):
        return sum(1 for p in pairs if p[side] == x)

    i_fun = all(count(i, 0) <= 1 for i in idents)
    e_fun = all(count(e, 1) <= 1 for e in ents)
    i_tot = bool(idents) and all(count(i, 0) >= 1 for i in idents)
    e_tot = bool(ents) and all(count(e, 1) >= 1 for e in ents)
    if i_fun and e_fun:
        tag = "one_one"
    elif i_fun:
        tag = "many_one"
    elif e_fun:
        tag = "one_many"
    else:
        tag = "many_many"
    return tag, i_fun, e_fun, i_tot, e_tot


# 1


@criterion(1, title="shape oracle on 1000 random relations, < 5 s")
def test_shape_oracle():
    rng = random.Random(1)
    start = time.perf_counter()
    for _ in range(1000):
        idents, ents, pairs = random_pairs(rng, 8, 8)
        shape = classify_shape(IdSystem.from_pairs("r", pairs, identifiers=idents, entities=ents))
        got = (shape.tag, shape.identifier_functional, shape.entity_functional,
               shape.identifier_total, shape.entity_total)
        assert got == brute_shape(idents, ents, pairs), (idents, ents, pairs)
    assert time.perf_counter() - start < 5.0


# 2


@criterion(2, title="the four association fixtures reproduce their shapes")
@pytest.mark.parametrize(
    "pairs, tag",
    [
        # registration marks to cars
        ([("AB12CDE", "car1"), ("CD34EFG", "car2"), ("EF56GHI", "car3")], "one_one"),
        # registration marks to keepers: one keeper holds two cars
        ([("AB12CDE", "smith"), ("CD34EFG", "smith"), ("EF56GHI", "jones")], "many_one"),
        # postcodes to addresses: one postcode covers several buildings
        ([("SA28PP", "1 Singleton Park"), ("SA28PP", "2 Singleton Park"), ("SA11AA", "7 Bay Road")], "one_many"),
        # IP addresses and computers over a period
        ([("10.0.0.1", "pc1"), ("10.0.0.1", "pc2"), ("10.0.0.2", "pc1")], "many_many"),
    ],
    ids=["marks-cars", "marks-keepers", "postcodes-addresses", "ips-computers"],
)
def test_shape_fixtures(pairs, tag):
    assert classify_shape(IdSystem.from_pairs("fixture", pairs)).tag == tag


# 3

PROPS = [
    field_equals("kind", "a"),
    field_compare("n", ">", 1),
    event_count(field_equals("kind", "b"), ">=", 2),
    duration(field_equals("kind", "a"), field_equals("kind", "b"), ">", 1),
    occurs_at(0, field_equals("kind", "c")),
    all_of(field_equals("kind", "a"), negate(field_equals("kind", "c"))),
    any_of(field_compare("n", "<=", 0), event_count(field_equals("kind", "a"), "=", 0)),
    all_of(),
]


def random_surv_system(rng):
    ents = [f"e{k}" for k in range(rng.randint(1, 6))]
    idents = [f"i{k}" for k in range(rng.randint(0, 6))]
    pairs = [(i, e) for i in idents for e in ents if rng.random() < 0.3]
    sys = IdSystem.from_pairs("r", pairs, identifiers=idents, entities=ents)
    bm = BehaviourMap(
        (e, Trace(tuple({"kind": rng.choice("abc"), "n": rng.randint(-1, 3)}
                        for _ in range(rng.randint(0, 4)))))
        for e in ents
    )
    return SurvSystem(sys.entities, sys, bm, rng.choice(PROPS)), pairs


@criterion(3, title="run_surveillance matches per-entity evaluation on 500 random systems")
def test_surveillance_soundness():
    rng = random.Random(3)
    for _ in range(500):
        s, pairs = random_surv_system(rng)
        flagged, anon, unidentified = set(), 0, 0
        for e in sorted(s.entities):
            names = sorted(i for i, x in pairs if x == e)
            if not eval_property(s.prop, s.behaviour[e]):
                anon += 1
                assert surv(s, e) is ANON
            elif not names:
                unidentified += 1
                assert surv(s, e) is UNIDENTIFIED
            else:
                flagged.add(names[0])
                assert surv(s, e).identifier.value == names[0]
        report = run_surveillance(s)
        assert [i.value for i in report.flagged] == sorted(flagged)
        assert (report.anon_count, report.unidentified_count) == (anon, unidentified)


# 4


@criterion(4, title="enumerate then canonicalize yields one_one on 1000 relations, < 5 s")
def test_enumeration_principle():
    rng = random.Random(4)
    start = time.perf_counter()
    for _ in range(1000):
        sys = random_system(rng, 6, 6)
        out = enumerate_disambiguate(sys)
        ent_count = {}
        for i, _ in out.pairs:
            ent_count[i] = ent_count.get(i, 0) + 1
        assert all(n == 1 for n in ent_count.values())
        assert classify_shape(out).identifier_functional
        assert classify_shape(canonicalize(out)).tag == "one_one"
    assert time.perf_counter() - start < 5.0


# 5


def random_family(rng, carrier):
    k = rng.randint(1, 4)
    blocks = [set() for _ in range(k)]
    for x in carrier:
        for b in rng.sample(range(k), rng.randint(1, k)):
            blocks[b].add(x)
    if rng.random() < 0.5:
        # thin out to make disjoint families common
        for x in carrier:
            owners = [b for b in blocks if x in b]
            for b in owners[1:]:
                b.discard(x)
    return Categorization(frozenset(carrier), tuple((f"S{n}", frozenset(b)) for n, b in enumerate(blocks)))


def pairwise_disjoint(c):
    blocks = [m for _, m in c.blocks]
    return all(not (blocks[a] & blocks[b]) for a in range(len(blocks)) for b in range(a + 1, len(blocks)))


def triple_loop_respects(c, pairs):
    for _, members in c.blocks:
        for i in members:
            for j in c.carrier:
                for e in {x for y, x in pairs if y == i}:
                    if (j, e) in pairs and j not in members:
                        return False
    return True


@criterion(5, title="partition and respect oracles; lift exists iff respect holds")
def test_sorting_oracles():
    rng = random.Random(5)
    for _ in range(1000):
        c = random_family(rng, [f"x{k}" for k in range(6)])
        assert is_partition(c) == pairwise_disjoint(c)
    lifted = refused = 0
    for _ in range(1000):
        ents = [f"e{k}" for k in range(rng.randint(1, 5))]
        idents = [f"i{k}" for k in range(rng.randint(len(ents), 8))]
        # every entity named, as lifting requires
        pairs = {(idents[k], e) for k, e in enumerate(ents)}
        pairs |= {(i, e) for i in idents for e in ents if rng.random() < 0.15}
        sys = IdSystem.from_pairs("r", sorted(pairs), identifiers=idents, entities=ents)
        raw = {(i.value, e) for i, e in sys.pairs}
        c = random_family(rng, sorted(sys.identifiers))
        respects = respects_entities(c, sys)
        assert respects == triple_loop_respects(c, {(IdentifierDatum(i), e) for i, e in raw})
        if respects:
            lift = lift_to_entities(c, sys)
            lifted += 1
            for (name, ids_block), (_, ent_block) in zip(c.blocks, lift.blocks):
                for e in ents:
                    placed_any = any(i in ids_block for i in sys.ids(e))
                    placed_all = all(i in ids_block for i in sys.ids(e))
                    assert (e in ent_block) == placed_any == placed_all
        else:
            with pytest.raises(AmbiguousSort):
                lift_to_entities(c, sys)
            refused += 1
    assert lifted and refused


# 6


def enumerate_reductions(sys1, sys2):
    """All verified maps, by trying every total map of identifiers."""
    src, dst = sorted(sys1.identifiers), sorted(sys2.identifiers)
    found = []
    for images in itertools.product(dst, repeat=len(src)):
        if all(sys1.ent(i) == sys2.ent(j) for i, j in zip(src, images)):
            found.append(dict(zip(src, images)))
    return found


def functional(name, assignment, ents):
    return IdSystem.from_pairs(name, [(f"{name}{k}", e) for k, e in enumerate(assignment)], entities=ents)


def check_against_enumeration(sys1, sys2):
    verified = enumerate_reductions(sys1, sys2)
    red = find_reduction(sys1, sys2)
    assert (red is None) == (not verified)
    if red is not None:
        assert verify_reduction(sys1, sys2, red)
        assert red.mapping in verified
    for m in verified[:3]:
        assert verify_reduction(sys1, sys2, ReductionMap(sys1.name, sys2.name, m))


@criterion(6, title="DVLA reduction verifies; search matches full enumeration up to 5x5")
def test_reductions(data):
    doc = parse(data("dvla.svs").read_text())
    reg, add = build_idsystem(doc, "reg"), build_idsystem(doc, "add")
    red = build_reduction(doc, find_reduction_decl(doc, "reg", "add"))
    verdict = verify_reduction(reg, add, red)
    assert verdict.holds and verdict.counterexamples == ()
    for i in reg.identifiers:
        assert reg.ent(i) == add.ent(red(i))

    # every system up to 4 identifiers x 4 entities, up to renaming
    for m in range(1, 5):
        ents = [f"e{k}" for k in range(m)]
        shapes = [c for n in range(5) for c in itertools.combinations_with_replacement(ents, n)]
        for a in shapes:
            for b in shapes:
                check_against_enumeration(functional("a", a, ents), functional("b", b, ents))

    # random systems up to 5 x 5
    rng = random.Random(6)
    for _ in range(400):
        ents = [f"e{k}" for k in range(rng.randint(1, 5))]
        a = [rng.choice(ents) for _ in range(rng.randint(0, 5))]
        b = [rng.choice(ents) for _ in range(rng.randint(0, 5))]
        check_against_enumeration(functional("a", a, ents), functional("b", b, ents))


# 7

BANK_FORM = {"surname": "SMITH", "birthdate": "800101", "address": "7 Bay Road, SA1 1AA"}


def anchor(value, policy):
    return IdentifierRecord(IdentifierDatum(value), policy, (), True)


@criterion(7, title="bank-account identity tree, planted cycle, support substitution")
def test_provenance(data):
    reg = Registry.load(data("bank_account.reg"))
    tree = build_identity_tree(reg, "SMITH-800101#1")
    assert len(tree.nodes) == 5
    assert provenance_depth(tree) == 2
    assert tree.leaves() == tree.anchors
    assert all(reg.get(leaf).anchor for leaf in tree.leaves())

    cyclic = Registry.load(data("bank_account.reg"))
    cyclic.add(IdentifierRecord(IdentifierDatum("LOOP-A"), "p", (IdentifierDatum("LOOP-B"),)))
    cyclic.add(IdentifierRecord(IdentifierDatum("LOOP-B"), "p", (IdentifierDatum("LOOP-A"),)))
    with pytest.raises(CyclicProvenance):
        build_identity_tree(cyclic, "LOOP-A")

    policies = build_policies(parse(data("identity.svs").read_text()))
    births = [anchor(f"BC-80010{k}#1", "birth_certificate") for k in range(3)]
    photos = [anchor(f"PHOTO-{k}", "photo") for k in range(2)]
    bills = [anchor(f"UB-{k}", "utility_bill") for k in range(3)]
    base = births + photos + bills
    passports = [
        IdentifierRecord(IdentifierDatum(f"12345678{k}"), "passport", (b.datum, p.datum))
        for k, (b, p) in enumerate(itertools.product(births, photos))
    ]
    records = base + passports
    issued = set()
    accepted = 0
    for support in itertools.product(records, repeat=2):
        registry = Registry(records)
        if not check(policies["bank_account"], BANK_FORM, list(support), registry):
            continue
        accepted += 1
        issued.add(generate(policies["bank_account"], BANK_FORM, list(support), registry).value)
    assert accepted == len(passports) * len(bills)
    assert issued == {"SMITH-800101#1"}


# 8

FORMAT_TABLE = [
    ("reg_mark", "AB12CDE", True),
    ("reg_mark", "ZZ99ZZZ", True),
    ("reg_mark", "1234ABC", False),
    ("reg_mark", "AB12CD", False),
    ("ni_number", "AB123456C", True),
    ("ni_number", "ZX000000A", True),
    ("ni_number", "A1234567C", False),
    ("ni_number", "AB12345C", False),
    ("nhs_number", "943476591A", True),
    ("nhs_number", "9434765919", True),
    ("nhs_number", "943476591", False),
    ("nhs_number", "943 476 59", False),
    ("passport_number", "123456789", True),
    ("passport_number", "000000001", True),
    ("passport_number", "12345678A", False),
    ("passport_number", "1234567890", False),
    ("driving_licence", "MORGA753116SM9IJ35", True),
    ("driving_licence", "ABCDE123456789XYZ0", True),
    ("driving_licence", "MORGA753116SM9IJ3", False),
    ("driving_licence", "MORGA753116SM9IJ3-", False),
]


@criterion(8, title="format validators on the 20-case table")
@pytest.mark.parametrize("tag, value, ok", FORMAT_TABLE)
def test_formats(tag, value, ok):
    assert validate_format(tag, value) is ok


# 9


@criterion(9, title="sampling at 0.01 over 100k events, 10 seeds, < 2 s")
def test_sampling():
    stream = Trace(tuple({"i": k} for k in range(100_000)))
    start = time.perf_counter()
    for seed in range(10):
        kept = sample_stream(stream, 0.01, seed)
        again = sample_stream(stream, 0.01, seed)
        assert 0.005 <= len(kept) / len(stream) <= 0.015
        assert repr(kept).encode() == repr(again).encode()
    assert time.perf_counter() - start < 2.0


# 10


@criterion(10, title="round trip on bundled specs; 10,000 fuzz cases without a crash, < 30 s")
def test_dsl(data):
    sources = [data(n).read_text() for n in SPECS]
    for src in sources:
        doc = parse(src)
        assert parse(pretty_print(doc)) == doc
    rng = random.Random(10)
    start = time.perf_counter()
    for k in range(10_000):
        src = nest(rng) if k % 100 == 0 else mutate(rng, rng.choice(sources))
        result = run_one(src)
        if not isinstance(result, SpecDocument):
            assert result, "rejected source without diagnostics"
            last_line = src.count("\n") + 1
            assert all(1 <= d.line <= last_line and d.column >= 1 for d in result)
    assert time.perf_counter() - start < 30.0


# 11


def overstayers_from_log(text):
    """Cars whose last departure is more than 5 sightings after their first arrival."""
    kinds = {}
    for line in text.splitlines():
        if line and not line.startswith("#"):
            _, car, payload = line.split("\t")
            kinds.setdefault(car, []).append(dict(kv.split("=") for kv in payload.split(";"))["kind"])
    out = set()
    for car, ks in kinds.items():
        if "arrive" in ks and "depart" in ks:
            last = len(ks) - 1 - ks[::-1].index("depart")
            if last - ks.index("arrive") > 5:
                out.add(car)
    return out


@criterion(11, title="surveil on the car-park spec matches the golden report byte for byte")
def test_end_to_end(data, golden):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["surveil", str(data("anpr.svs")), "--events", str(data("anpr.log")), "--system", "carpark"])
    assert code == 0
    expected = (golden / "anpr_surveil.txt").read_bytes()
    assert buf.getvalue().encode() == expected

    marks = dict((e, i.value) for i, e in build_idsystem(parse(data("anpr.svs").read_text()), "marks").pairs)
    over = overstayers_from_log(data("anpr.log").read_text())
    assert sorted(marks[c] for c in over) == expected.decode().splitlines()[:-2]
    assert expected.decode().splitlines()[-1] == f"anonymous: {len(marks) - len(over)}"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
