"""Canonical text form of a :class:`SpecDocument`."""

from __future__ import annotations

from ..behaviour import (
    And,
    Duration,
    EventCount,
    FieldCompare,
    FieldContains,
    FieldEquals,
    Not,
    OccursAt,
    Or,
    PropertyExpr,
)
from .decls import (
    Atom,
    BehaviourDecl,
    Call,
    CategorizationDecl,
    Decl,
    Entry,
    EntityDecl,
    Geo,
    IdSysDecl,
    Node,
    Pair,
    PolicyDecl,
    PropertyDecl,
    Record,
    ReductionDecl,
    SpecDocument,
    SurveillanceDecl,
)
from .lexer import lexes_as, quote

WIDTH = 88


def text(s: str) -> str:
    """A name or identifier value: bare when it reads back unchanged."""
    return s if lexes_as(s, ("WORD", "NUMBER")) else quote(s)


def _number(x) -> str:
    return repr(x)


def scalar(v) -> str:
    if isinstance(v, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(v, (int, float)):
        return _number(v)
    if isinstance(v, tuple):
        return f"({_number(float(v[0]))}, {_number(float(v[1]))})"
    return v if lexes_as(v, ("WORD",)) else quote(v)


def expr(p: PropertyExpr) -> str:
    if isinstance(p, FieldEquals):
        return f"field_equals({text(p.name)}, {scalar(p.value)})"
    if isinstance(p, FieldContains):
        return f"field_contains({text(p.name)}, {text(p.keyword)})"
    if isinstance(p, FieldCompare):
        return f"field_compare({text(p.name)}, {p.op}, {_number(p.number)})"
    if isinstance(p, EventCount):
        return f"event_count({expr(p.expr)}, {p.op}, {p.n})"
    if isinstance(p, Duration):
        return f"duration({expr(p.start)}, {expr(p.end)}, {p.op}, {p.n})"
    if isinstance(p, OccursAt):
        return f"occurs_at({p.t}, {expr(p.expr)})"
    if isinstance(p, And):
        return "and(" + ", ".join(map(expr, p.args)) + ")"
    if isinstance(p, Or):
        return "or(" + ", ".join(map(expr, p.args)) + ")"
    if isinstance(p, Not):
        return f"not({expr(p.arg)})"
    raise TypeError(f"cannot print {p!r}")


def record(fields) -> str:
    return "[" + ", ".join(f"{text(n)}={scalar(v)}" for n, v in fields) + "]"


def node(n: Node) -> str:
    if isinstance(n, Atom):
        if n.kind == "STRING":
            return quote(n.text)
        return n.text
    if isinstance(n, Geo):
        return f"({_number(n.lat)}, {_number(n.lon)})"
    if isinstance(n, Record):
        return "[" + ", ".join(f"{text(k)}={node(v)}" for k, v in n.fields) + "]"
    if isinstance(n, Call):
        return f"{n.name}(" + ", ".join(map(node, n.args)) + ")"
    if isinstance(n, Pair):
        return f"{node(n.left)} -> {node(n.right)}"
    raise TypeError(f"cannot print {n!r}")


def _line(key: str, values: list[str], arg: str | None = None) -> str:
    head = key if arg is None else f"{key} {text(arg)}"
    body = ", ".join(values)
    if not body:
        return f"  {head}: ;"
    line = f"  {head}: {body};"
    if len(line) <= WIDTH or len(values) == 1:
        return line
    return f"  {head}: " + ",\n      ".join(values) + ";"


def _pairs(pairs) -> list[str]:
    return [f"{text(a)} -> {text(b)}" for a, b in pairs]


def _bool(b: bool) -> list[str]:
    return ["true" if b else "false"]


def _entries(d: Decl) -> list[str]:
    out: list[str] = []
    if isinstance(d, EntityDecl):
        out.append(_line("members", [text(m) for m in d.members]))
    elif isinstance(d, IdSysDecl):
        out.append(_line("entities", [text(d.entities)]))
        if d.format != "free":
            out.append(_line("format", [text(d.format)]))
        if d.identifiers:
            out.append(_line("identifiers", [text(i) for i in d.identifiers]))
        if d.pairs:
            out.append(_line("pairs", _pairs(d.pairs)))
        if d.pairs_file is not None:
            out.append(_line("pairs_file", [quote(d.pairs_file)]))
    elif isinstance(d, BehaviourDecl):
        out.append(_line("entities", [text(d.entities)]))
        for ent, recs in d.traces:
            out.append(_line("trace", [record(r) for r in recs], ent))
        if d.log is not None:
            out.append(_line("log", [quote(d.log)]))
    elif isinstance(d, PropertyDecl):
        out.append(_line("expr", [expr(d.expr)]))
    elif isinstance(d, SurveillanceDecl):
        out.append(_line("idsys", [text(d.idsys)]))
        out.append(_line("property", [text(d.property)]))
        if d.behaviour is not None:
            out.append(_line("behaviour", [text(d.behaviour)]))
        for key in ("entity", "observable", "attributes", "identity"):
            out.append(_line(key, [quote(getattr(d, key))]))
    elif isinstance(d, CategorizationDecl):
        out.append(_line("idsys", [text(d.idsys)]))
        for name, members in d.blocks:
            out.append(_line("block", [text(m) for m in members], name))
    elif isinstance(d, PolicyDecl):
        out.append(_line("fields", [text(f) for f in d.fields]))
        for fname, tag in d.formats:
            out.append(_line("format", [text(tag)], fname))
        for role, issuer in d.supports:
            out.append(_line("support", [text(issuer)], role))
        out.append(_line("template", [text(f) for f in d.template]))
        for key in ("counter", "anchor", "augment"):
            if getattr(d, key):
                out.append(_line(key, _bool(True)))
    elif isinstance(d, ReductionDecl):
        out.append(_line("from", [text(d.source)]))
        out.append(_line("to", [text(d.target)]))
        if d.mapping:
            out.append(_line("map", _pairs(d.mapping)))
        if d.map_file is not None:
            out.append(_line("map_file", [quote(d.map_file)]))
    for e in d.extras:
        out.append(_entry(e))
    return out


def _entry(e: Entry) -> str:
    return _line(e.key, [node(v) for v in e.value], e.arg)


def pretty_print(doc: SpecDocument) -> str:
    """Render ``doc`` canonically; ``parse(pretty_print(doc)) == doc``."""
    blocks = []
    for d in doc.declarations:
        lines = [f"{d.kind} {text(d.name)} {{", *_entries(d), "}"]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
