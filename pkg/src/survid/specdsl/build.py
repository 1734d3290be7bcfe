"""Turn parsed declarations into model objects.

File references in a specification (``pairs_file``, ``log``, ``map_file``)
are resolved against ``base_dir``.
"""

from __future__ import annotations

from pathlib import Path

from ..behaviour import BehaviourMap, Trace
from ..eventlog import read_event_log
from ..errors import InvalidSystem
from ..identity import IdentifierDatum, IdSystem
from ..provenance import GenerationPolicy
from ..reduction import ReductionMap
from ..sorting import Categorization
from ..surveillance import Summary, SurvSystem
from .decls import (
    BehaviourDecl,
    CategorizationDecl,
    EntityDecl,
    IdSysDecl,
    PolicyDecl,
    PropertyDecl,
    ReductionDecl,
    SpecDocument,
    SurveillanceDecl,
)


def _path(base_dir, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() or base_dir is None else Path(base_dir) / p


def read_pairs_file(path: str | Path) -> list[tuple[str, str]]:
    """Two tab-separated columns per line; blank and ``#`` lines are skipped."""
    pairs = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cols = line.split("\t")
        if len(cols) != 2 or not cols[0].strip() or not cols[1].strip():
            raise InvalidSystem(f"{path}:{n}: expected two tab-separated values")
        pairs.append((cols[0].strip(), cols[1].strip()))
    return pairs


def members(doc: SpecDocument, entity_block: str) -> tuple[str, ...]:
    decl = doc.get(entity_block, "entity")
    assert isinstance(decl, EntityDecl)
    return decl.members


def all_entities(doc: SpecDocument) -> list[str]:
    seen: dict[str, None] = {}
    for d in doc.of_kind("entity"):
        for m in d.members:
            seen.setdefault(m, None)
    return list(seen)


def idsys_pairs(decl: IdSysDecl, base_dir=None) -> list[tuple[str, str]]:
    pairs = list(decl.pairs)
    if decl.pairs_file is not None:
        pairs += read_pairs_file(_path(base_dir, decl.pairs_file))
    return pairs


def build_idsystem(doc: SpecDocument, name: str, base_dir=None) -> IdSystem:
    decl = doc.get(name, "idsys")
    assert isinstance(decl, IdSysDecl)
    return IdSystem.from_pairs(
        decl.name,
        idsys_pairs(decl, base_dir),
        identifiers=decl.identifiers,
        entities=members(doc, decl.entities),
        format_tag=decl.format,
    )


def build_behaviour(doc: SpecDocument, name: str, base_dir=None) -> BehaviourMap:
    decl = doc.get(name, "behaviour")
    assert isinstance(decl, BehaviourDecl)
    ents = members(doc, decl.entities)
    traces: dict[str, Trace] = {}
    if decl.log is not None:
        traces.update(read_event_log(_path(base_dir, decl.log), ents))
    for ent, recs in decl.traces:
        if ent not in ents:
            raise InvalidSystem(f"behaviour {name}: {ent} is not a member of {decl.entities}")
        if ent in traces and len(traces[ent]):
            raise InvalidSystem(f"behaviour {name}: {ent} has more than one behaviour")
        traces[ent] = Trace(tuple(dict(r) for r in recs))
    return BehaviourMap((e, traces.get(e, Trace())) for e in ents)


def build_surveillance(
    doc: SpecDocument,
    name: str,
    base_dir=None,
    behaviour: BehaviourMap | None = None,
) -> SurvSystem:
    """Assemble a surveillance system; ``behaviour`` overrides the declared one."""
    decl = doc.get(name, "surveillance")
    assert isinstance(decl, SurveillanceDecl)
    idsys = build_idsystem(doc, decl.idsys, base_dir)
    if behaviour is None:
        if decl.behaviour is None:
            raise InvalidSystem(f"surveillance {name} declares no behaviour; supply an event log")
        behaviour = build_behaviour(doc, decl.behaviour, base_dir)
    prop = doc.get(decl.property, "property")
    assert isinstance(prop, PropertyDecl)
    summary = Summary(decl.entity, decl.observable, decl.attributes, decl.identity)
    return SurvSystem(idsys.entities, idsys, behaviour, prop.expr, decl.name, summary)


def build_categorization(doc: SpecDocument, name: str, base_dir=None) -> tuple[Categorization, IdSystem]:
    decl = doc.get(name, "categorization")
    assert isinstance(decl, CategorizationDecl)
    sys = build_idsystem(doc, decl.idsys, base_dir)
    blocks = tuple(
        (bname, frozenset(sys.lookup(v) for v in values)) for bname, values in decl.blocks
    )
    return Categorization(sys.identifiers, blocks), sys


def build_policy(decl: PolicyDecl) -> GenerationPolicy:
    return GenerationPolicy(
        name=decl.name,
        required_fields=frozenset(decl.fields),
        issue_template=decl.template,
        field_formats=dict(decl.formats),
        required_supports=decl.supports,
        counter=decl.counter,
        anchor=decl.anchor,
        supports_add_information=decl.augment,
    )


def build_policies(doc: SpecDocument) -> dict[str, GenerationPolicy]:
    return {d.name: build_policy(d) for d in doc.of_kind("policy")}


def find_reduction_decl(doc: SpecDocument, source: str, target: str) -> ReductionDecl | None:
    for d in doc.of_kind("reduction"):
        if d.source == source and d.target == target:
            return d
    return None


def build_reduction(doc: SpecDocument, decl: ReductionDecl, base_dir=None) -> ReductionMap:
    pairs = list(decl.mapping)
    if decl.map_file is not None:
        pairs += read_pairs_file(_path(base_dir, decl.map_file))
    return reduction_from_pairs(decl.source, decl.target, pairs)


def reduction_from_pairs(source: str, target: str, pairs) -> ReductionMap:
    mapping: dict[IdentifierDatum, IdentifierDatum] = {}
    for a, b in pairs:
        key = IdentifierDatum(a)
        if key in mapping and mapping[key] != IdentifierDatum(b):
            raise InvalidSystem(f"reduction {source}->{target} sends {a} to two identifiers")
        mapping[key] = IdentifierDatum(b)
    return ReductionMap(source, target, mapping)
