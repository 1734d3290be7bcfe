"""Semantic checks on a parsed specification."""

from __future__ import annotations

from collections import Counter
from pathlib import Path

from ..errors import SurvidError
from ..identity import FORMATS, IdentifierDatum, IdSystem, classify_shape
from .build import idsys_pairs
from .decls import (
    BehaviourDecl,
    CategorizationDecl,
    Decl,
    Diagnostic,
    EntityDecl,
    IdSysDecl,
    PolicyDecl,
    ReductionDecl,
    SpecDocument,
    SurveillanceDecl,
)


class _Checker:
    def __init__(self, doc: SpecDocument, base_dir):
        self.doc = doc
        self.base_dir = base_dir
        self.diags: list[Diagnostic] = []
        self._systems: dict[str, IdSystem | None] = {}

    def report(self, severity: str, decl: Decl, key: str | None, message: str) -> None:
        line, col = decl.pos(key)
        self.diags.append(Diagnostic(severity, line, col, f"{decl.kind} {decl.name}: {message}"))

    def error(self, decl: Decl, key: str | None, message: str) -> None:
        self.report("error", decl, key, message)

    def members(self, block: str) -> tuple[str, ...]:
        decl = self.doc.get(block, "entity")
        assert isinstance(decl, EntityDecl)
        return decl.members

    def system(self, name: str) -> IdSystem | None:
        """The built system, or None when it cannot be built from literals."""
        if name not in self._systems:
            decl = self.doc.get(name, "idsys")
            self._systems[name] = None
            if decl.pairs_file is None or self.base_dir is not None:
                try:
                    pairs = idsys_pairs(decl, self.base_dir)
                    self._systems[name] = IdSystem.from_pairs(
                        decl.name,
                        pairs,
                        identifiers=decl.identifiers,
                        entities=self.members(decl.entities),
                    )
                except (SurvidError, OSError):
                    pass
        return self._systems[name]

    # ---- per kind

    def entity(self, d: EntityDecl) -> None:
        for m, k in Counter(d.members).items():
            if k > 1:
                self.error(d, "members", f"entity {m!r} listed {k} times")

    def idsys(self, d: IdSysDecl) -> None:
        if d.format not in FORMATS:
            self.error(d, "format", f"unknown identifier format {d.format!r}")
            return
        ents = set(self.members(d.entities))
        try:
            pairs = idsys_pairs(d, self.base_dir) if d.pairs_file is None or self.base_dir else list(d.pairs)
        except (SurvidError, OSError) as exc:
            self.error(d, "pairs_file", str(exc))
            pairs = list(d.pairs)
        for _, e in pairs:
            if e not in ents:
                self.error(d, "pairs", f"{e!r} is not a member of {d.entities}")
        values = list(d.identifiers) + [i for i, _ in pairs]
        for v in dict.fromkeys(values):
            try:
                IdentifierDatum(v, d.format)
            except SurvidError:
                self.error(d, "pairs", f"identifier {v!r} is not a valid {d.format}")

    def behaviour(self, d: BehaviourDecl) -> None:
        ents = set(self.members(d.entities))
        counts = Counter(e for e, _ in d.traces)
        for e, k in counts.items():
            if e not in ents:
                self.error(d, f"trace {e}", f"{e!r} is not a member of {d.entities}")
            if k > 1:
                self.error(d, f"trace {e}", f"{e!r} has {k} behaviours; each entity has exactly one")

    def surveillance(self, d: SurveillanceDecl) -> None:
        for key in ("entity", "observable", "attributes", "identity"):
            if not getattr(d, key).strip():
                self.error(d, key, f"empty {key!r} summary row")
        if d.behaviour is None:
            return
        idsys = self.doc.get(d.idsys, "idsys")
        beh = self.doc.get(d.behaviour, "behaviour")
        assert isinstance(beh, BehaviourDecl)
        if idsys.entities != beh.entities:
            self.error(
                d, "behaviour",
                f"behaviour {beh.name} covers {beh.entities} but {idsys.name} names {idsys.entities}",
            )
            return
        if beh.log is not None:
            return  # coverage of logged behaviour is checked at ingestion
        traced = {e for e, _ in beh.traces}
        missing = [e for e in self.members(beh.entities) if e not in traced]
        if missing:
            self.error(d, "behaviour", "no behaviour for " + ", ".join(missing))

    def categorization(self, d: CategorizationDecl) -> None:
        if not d.blocks:
            self.error(d, None, "a categorization needs at least one block")
            return
        sys = self.system(d.idsys)
        if sys is None:
            return
        values = {i.value for i in sys.identifiers}
        covered = set()
        for name, members in d.blocks:
            for v in members:
                if v not in values:
                    self.error(d, f"block {name}", f"{v!r} is not an identifier of {d.idsys}")
            covered |= set(members)
        missing = sorted(values - covered)
        if missing:
            self.error(d, None, "blocks do not cover " + ", ".join(missing))

    def policy(self, d: PolicyDecl) -> None:
        fields = set(d.fields)
        for f in d.template:
            if f not in fields:
                self.error(d, "template", f"template field {f!r} is not a required field")
        if not d.template:
            self.error(d, "template", "empty issue template")
        for f, tag in d.formats:
            if tag not in FORMATS:
                self.error(d, f"format {f}", f"unknown identifier format {tag!r}")
            if f not in fields:
                self.report("warning", d, f"format {f}", f"format given for undeclared field {f!r}")
        if d.anchor and d.supports:
            self.error(d, "anchor", "anchor policies take no supporting identifiers")

    def reduction(self, d: ReductionDecl) -> None:
        src = self.doc.get(d.source, "idsys")
        dst = self.doc.get(d.target, "idsys")
        if src.entities != dst.entities:
            self.error(d, "to", f"{d.source} and {d.target} are over different entity sets")
            return
        s1, s2 = self.system(d.source), self.system(d.target)
        for sys, key in ((s1, "from"), (s2, "to")):
            if sys is not None and not classify_shape(sys).identifier_functional:
                self.report(
                    "warning", d, key,
                    f"{sys.name} is not identifier-functional; disambiguate before reducing",
                )
        if s1 is None or s2 is None:
            return
        v1 = {i.value for i in s1.identifiers}
        v2 = {i.value for i in s2.identifiers}
        for a, b in d.mapping:
            if a not in v1:
                self.error(d, "map", f"{a!r} is not an identifier of {d.source}")
            if b not in v2:
                self.error(d, "map", f"{b!r} is not an identifier of {d.target}")


def validate(doc: SpecDocument, base_dir: str | Path | None = None) -> list[Diagnostic]:
    """Checks that need more than the grammar; diagnostics are sorted by position.

    When ``base_dir`` is given, referenced pair files are read as well.
    """
    checker = _Checker(doc, base_dir)
    for d in doc.declarations:
        method = getattr(checker, d.kind, None)
        if method is not None:
            method(d)
    return sorted(checker.diags, key=lambda x: (x.line, x.column, x.message))
