"""Command-line interface.

Reports go to stdout and diagnostics to stderr.  Exit status is 0 for
success or a positive verdict, 1 for a negative verdict and 2 for usage,
parse or ingestion errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .. import __version__
from ..behaviour import BehaviourMap, Trace, sample_stream
from ..errors import (
    CyclicProvenance,
    FormRejected,
    SurvidError,
    UnanchoredProvenance,
)
from ..eventlog import read_lines
from ..identity import IdSystem, classify_shape
from ..provenance import (
    Registry,
    build_identity_tree,
    generate,
    provenance_depth,
    read_form,
)
from ..reduction import find_reduction, verify_reduction
from ..sorting import is_partition, lift_to_entities, respects_entities, sort_by_properties
from ..specdsl import (
    SpecDocument,
    SpecError,
    build_behaviour,
    build_idsystem,
    build_policies,
    build_reduction,
    build_surveillance,
    find_reduction_decl,
    parse,
    read_pairs_file,
    reduction_from_pairs,
    validate,
)
from ..surveillance import describe_specification, run_surveillance
from .ingest import ingest_events

__all__ = ["main", "ingest_events"]

OK, NEGATIVE, ERROR = 0, 1, 2


class CommandError(Exception):
    """An operational failure; reported on stderr with exit status 2."""


def _err(msg: str) -> None:
    print(f"survid: {msg}", file=sys.stderr)


def load_spec(path: str) -> SpecDocument:
    try:
        source = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(f"{path}: {exc.strerror}") from None
    try:
        doc = parse(source)
    except SpecError as exc:
        for d in exc.diagnostics:
            print(f"{path}:{d}", file=sys.stderr)
        raise CommandError(f"{path}: specification has errors") from None
    for d in doc.diagnostics:
        print(f"{path}:{d}", file=sys.stderr)
    return doc


def _only(doc: SpecDocument, kind: str, name: str | None, option: str) -> str:
    if name is not None:
        try:
            doc.get(name, kind)
        except KeyError as exc:
            raise CommandError(exc.args[0]) from None
        return name
    decls = doc.of_kind(kind)
    if len(decls) != 1:
        raise CommandError(f"the specification has {len(decls)} {kind} declarations; pass {option}")
    return decls[0].name


def _behaviour_for(doc: SpecDocument, sys: IdSystem, events: str | None, base: Path) -> BehaviourMap:
    if events is not None:
        return ingest_events(events, doc)
    entity_block = doc.get(sys.name, "idsys").entities
    for d in doc.of_kind("behaviour"):
        if d.entities == entity_block:
            return build_behaviour(doc, d.name, base)
    raise CommandError(f"no behaviour declared over {entity_block}; pass --events")


# ---- subcommands


def cmd_validate(args) -> int:
    try:
        source = Path(args.spec).read_text(encoding="utf-8")
    except OSError as exc:
        raise CommandError(f"{args.spec}: {exc.strerror}") from None
    try:
        doc = parse(source)
    except SpecError as exc:
        diags = exc.diagnostics
    else:
        diags = list(doc.diagnostics) + validate(doc, Path(args.spec).parent)
    for d in sorted(diags, key=lambda d: (d.line, d.column, d.message)):
        print(f"{args.spec}:{d}", file=sys.stderr)
    if any(d.severity == "error" for d in diags):
        return ERROR
    print(f"{args.spec}: ok")
    return OK


def cmd_describe(args) -> int:
    doc = load_spec(args.spec)
    name = _only(doc, "surveillance", args.system, "--system")
    decl = doc.get(name, "surveillance")
    idsys = build_idsystem(doc, decl.idsys, Path(args.spec).parent)
    # the summary does not depend on behaviour, so none is loaded
    empty = BehaviourMap((e, Trace()) for e in idsys.entities)
    sys_ = build_surveillance(doc, name, Path(args.spec).parent, behaviour=empty)
    print(describe_specification(sys_), end="")
    return OK


def cmd_surveil(args) -> int:
    doc = load_spec(args.spec)
    base = Path(args.spec).parent
    name = _only(doc, "surveillance", args.system, "--system")
    behaviour = ingest_events(args.events, doc) if args.events else None
    sys_ = build_surveillance(doc, name, base, behaviour=behaviour)
    print(run_surveillance(sys_).render(), end="")
    return OK


def cmd_classify(args) -> int:
    doc = load_spec(args.spec)
    name = _only(doc, "idsys", args.idsys, "--idsys")
    shape = classify_shape(build_idsystem(doc, name, Path(args.spec).parent))
    print(f"shape: {shape.tag}")
    for flag in ("identifier_functional", "entity_functional", "identifier_total", "entity_total"):
        print(f"{flag}: {str(getattr(shape, flag)).lower()}")
    return OK


def _flag(b: bool) -> str:
    return "true" if b else "false"


def cmd_sort(args) -> int:
    doc = load_spec(args.spec)
    base = Path(args.spec).parent
    name = _only(doc, "idsys", args.idsys, "--idsys")
    idsys = build_idsystem(doc, name, base)
    bm = _behaviour_for(doc, idsys, args.events, base)
    props = []
    for pname in [p.strip() for p in args.props.split(",") if p.strip()]:
        try:
            props.append((pname, doc.get(pname, "property").expr))
        except KeyError as exc:
            raise CommandError(exc.args[0]) from None
    if not props:
        raise CommandError("--props names no properties")
    try:
        cat = sort_by_properties(bm, idsys, props)
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    for bname, members in cat.blocks:
        print(f"{bname}: {', '.join(i.value for i in sorted(members))}".rstrip())
    respects = respects_entities(cat, idsys)
    print(f"partition: {_flag(is_partition(cat))}")
    print(f"respects_entities: {_flag(respects)}")
    if respects:
        try:
            lifted = lift_to_entities(cat, idsys)
        except SurvidError as exc:
            print(f"entity sort: unavailable ({exc})")
        else:
            for bname, members in lifted.blocks:
                print(f"entities {bname}: {', '.join(sorted(members))}".rstrip())
    return OK if respects else NEGATIVE


def cmd_reduce(args) -> int:
    doc = load_spec(args.spec)
    base = Path(args.spec).parent
    sys1 = build_idsystem(doc, _only(doc, "idsys", args.source, "--from"), base)
    sys2 = build_idsystem(doc, _only(doc, "idsys", args.target, "--to"), base)
    if args.search:
        red = find_reduction(sys1, sys2)
        if red is None:
            print(f"no reduction from {sys1.name} to {sys2.name}")
            return NEGATIVE
    elif args.map is not None:
        red = reduction_from_pairs(sys1.name, sys2.name, read_pairs_file(args.map))
    else:
        decl = find_reduction_decl(doc, sys1.name, sys2.name)
        if decl is None:
            print(f"no reduction from {sys1.name} to {sys2.name} is declared")
            return NEGATIVE
        red = build_reduction(doc, decl, base)
    verdict = verify_reduction(sys1, sys2, red)
    print(red.render(), end="")
    print(f"verified: {_flag(verdict.holds)}")
    for c in verdict.counterexamples:
        print(f"counterexample: {c}")
    return OK if verdict else NEGATIVE


def cmd_provenance(args) -> int:
    registry = Registry.load(args.registry)
    try:
        tree = build_identity_tree(registry, args.id)
    except (CyclicProvenance, UnanchoredProvenance) as exc:
        print(exc)
        return NEGATIVE
    print(tree.render(), end="")
    print(f"depth: {provenance_depth(tree)}")
    leaves = sorted(tree.leaves())
    print("anchors: " + ", ".join(a.value for a in leaves))
    print(f"all leaves anchored: {_flag(all(a in tree.anchors for a in leaves))}")
    return OK


def _default_policies() -> str:
    from ..data import path

    return str(path("identity.svs"))


def cmd_generate(args) -> int:
    spec = args.spec or _default_policies()
    policies = build_policies(load_spec(spec))
    if args.policy not in policies:
        raise CommandError(f"no policy named {args.policy!r} in {spec}")
    reg_path = Path(args.registry)
    registry = Registry.load(reg_path) if reg_path.exists() else Registry()
    try:
        form = read_form(args.form)
    except OSError as exc:
        raise CommandError(f"{args.form}: {exc.strerror}") from None
    except ValueError as exc:
        raise CommandError(str(exc)) from None
    supports = [registry.get(v) for v in args.support]
    try:
        record = generate(policies[args.policy], form, supports, registry)
    except FormRejected as exc:
        for reason in exc.reasons:
            print(f"rejected: {reason}")
        return NEGATIVE
    registry.save(reg_path)
    print(record.value)
    return OK


def cmd_sample(args) -> int:
    lines = read_lines(args.events)
    index = Trace(tuple({"k": k} for k in range(len(lines))))
    kept = sample_stream(index, args.rate, args.seed)
    for ev in kept.events:
        print(lines[ev["k"]].raw)
    return OK


# ---- argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="survid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("validate", help="check a specification")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("describe", help="print the summary of a surveillance system")
    p.add_argument("spec")
    p.add_argument("--system")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("surveil", help="run a surveillance system over behaviour")
    p.add_argument("spec")
    p.add_argument("--events", help="event log (defaults to the declared behaviour)")
    p.add_argument("--system")
    p.set_defaults(func=cmd_surveil)

    p = sub.add_parser("classify", help="shape and totality of an identifier system")
    p.add_argument("spec")
    p.add_argument("--idsys")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("sort", help="sort identifiers by properties")
    p.add_argument("spec")
    p.add_argument("--events")
    p.add_argument("--props", required=True, help="comma-separated property names")
    p.add_argument("--idsys")
    p.set_defaults(func=cmd_sort)

    p = sub.add_parser("reduce", help="check or find a reduction")
    p.add_argument("spec")
    p.add_argument("--from", dest="source")
    p.add_argument("--to", dest="target")
    how = p.add_mutually_exclusive_group()
    how.add_argument("--map", help="tab-separated identifier pairs")
    how.add_argument("--search", action="store_true", help="search for a reduction")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("provenance", help="audit the identity tree of an identifier")
    p.add_argument("--registry", required=True)
    p.add_argument("--id", required=True)
    p.set_defaults(func=cmd_provenance)

    p = sub.add_parser("generate", help="issue an identifier from a form")
    p.add_argument("--spec", help="specification holding the policy (default: bundled policies)")
    p.add_argument("--registry", required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--form", required=True)
    p.add_argument("--support", action="append", default=[])
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("sample", help="deterministic sample of an event log")
    p.add_argument("--events", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ERROR if exc.code else OK
    try:
        return args.func(args)
    except CommandError as exc:
        _err(str(exc))
    except (SurvidError, ValueError, KeyError) as exc:
        _err(exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc))
    except OSError as exc:
        _err(f"{exc.filename}: {exc.strerror}")
    return ERROR
