"""Forms, identifier generation policies, registries and identity trees.

A new identifier is issued from a form; supporting identifiers presented with
the form only validate it.  The registry records which supports each issued
identifier relied on, so the dependency structure behind any identifier can
be rebuilt and audited down to its anchors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    CyclicProvenance,
    DuplicateIdentifier,
    FormRejected,
    InvalidSystem,
    UnanchoredProvenance,
    UnknownIdentifier,
)
from .identity import IdentifierDatum, validate_format

log = logging.getLogger(__name__)

FormDoc = Mapping[str, str]


def read_form(path: str | Path) -> dict[str, str]:
    """Read a form file: one ``name=value`` pair per line."""
    form: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        name, sep, value = line.partition("=")
        name = name.strip()
        if not sep or not name:
            raise ValueError(f"{path}:{n}: expected name=value")
        if name in form:
            raise ValueError(f"{path}:{n}: duplicate field {name}")
        form[name] = value.strip()
    return form


@dataclass(frozen=True)
class GenerationPolicy:
    name: str
    required_fields: frozenset[str]
    issue_template: tuple[str, ...]
    field_formats: Mapping[str, str] = field(default_factory=dict)
    required_supports: tuple[tuple[str, str], ...] = ()
    counter: bool = False
    anchor: bool = False
    # issue(f, i1..ik): support values become part of the issued identifier
    supports_add_information: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "required_fields", frozenset(self.required_fields))
        object.__setattr__(self, "issue_template", tuple(self.issue_template))
        object.__setattr__(self, "required_supports", tuple(map(tuple, self.required_supports)))
        object.__setattr__(self, "field_formats", dict(self.field_formats))
        if not self.issue_template:
            raise InvalidSystem(f"policy {self.name}: empty issue template")
        stray = [f for f in self.issue_template if f not in self.required_fields]
        if stray:
            raise InvalidSystem(f"policy {self.name}: template uses optional fields {stray}")
        for tag in self.field_formats.values():
            validate_format(tag, "x")  # raises UnknownFormat
        if self.anchor and self.required_supports:
            raise InvalidSystem(f"policy {self.name}: anchor policies take no supports")
        roles = [r for r, _ in self.required_supports]
        if len(set(roles)) != len(roles):
            raise InvalidSystem(f"policy {self.name}: duplicate support roles")

    def __hash__(self) -> int:
        return hash(self.name)


@dataclass(frozen=True)
class IdentifierRecord:
    datum: IdentifierDatum
    policy: str
    supports: tuple[IdentifierDatum, ...] = ()
    anchor: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "supports", tuple(self.supports))
        if self.anchor and self.supports:
            raise InvalidSystem(f"anchor record {self.datum} cannot have supports")

    @property
    def value(self) -> str:
        return self.datum.value

    def to_line(self) -> str:
        supports = ",".join(s.value for s in self.supports)
        return f"{self.datum.value}\t{self.policy}\t{int(self.anchor)}\t{supports}"

    @classmethod
    def from_line(cls, line: str) -> "IdentifierRecord":
        cols = line.rstrip("\r\n").split("\t")
        if len(cols) != 4:
            raise ValueError(f"expected 4 tab-separated columns, got {len(cols)}")
        value, policy, anchor, supports = cols
        if anchor not in ("0", "1"):
            raise ValueError(f"anchor flag must be 0 or 1, got {anchor!r}")
        sup = tuple(IdentifierDatum(s) for s in supports.split(",")) if supports else ()
        return cls(IdentifierDatum(value), policy, sup, anchor == "1")


class Registry:
    """Append-only store of issued identifiers.

    Records are kept in issuance order.  :meth:`load` accepts any file,
    including ones whose supports point forward or form cycles; such defects
    surface when an identity tree is built.
    """

    def __init__(self, records: Iterable[IdentifierRecord] = ()):
        self._records: list[IdentifierRecord] = []
        self._by_value: dict[str, IdentifierRecord] = {}
        for r in records:
            self.add(r)

    def add(self, record: IdentifierRecord) -> None:
        for d in (record.datum, *record.supports):
            if any(c in d.value for c in "\t\n\r,"):
                raise InvalidSystem(f"{d.value!r} cannot be stored in a registry file")
        if record.value in self._by_value:
            raise DuplicateIdentifier(f"{record.value} is already registered")
        self._records.append(record)
        self._by_value[record.value] = record

    def get(self, value: str | IdentifierDatum) -> IdentifierRecord:
        key = value.value if isinstance(value, IdentifierDatum) else value
        try:
            return self._by_value[key]
        except KeyError:
            raise UnknownIdentifier(f"{key} is not in the registry") from None

    def __contains__(self, value: object) -> bool:
        key = value.value if isinstance(value, (IdentifierDatum, IdentifierRecord)) else value
        return key in self._by_value

    def __iter__(self) -> Iterator[IdentifierRecord]:
        return iter(self._records)

    def __len__(self) -> int:
        return len(self._records)

    def next_counter(self, base: str) -> int:
        n = 1
        while f"{base}#{n}" in self._by_value:
            n += 1
        return n

    def position(self, value: str) -> int:
        return self._records.index(self.get(value))

    def dump(self) -> str:
        return "".join(r.to_line() + "\n" for r in self._records)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dump(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Registry":
        reg = cls()
        text = Path(path).read_text(encoding="utf-8")
        for n, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                reg.add(IdentifierRecord.from_line(line))
            except (ValueError, DuplicateIdentifier) as exc:
                raise ValueError(f"{path}:{n}: {exc}") from exc
        return reg


@dataclass(frozen=True)
class CheckResult:
    accepted: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.accepted


def check(
    policy: GenerationPolicy,
    form: FormDoc,
    supports: Sequence[IdentifierRecord] = (),
    registry: Registry | None = None,
) -> CheckResult:
    """Test a form and its supporting identifiers against ``policy``.

    Supports are matched positionally against ``policy.required_supports``.
    When a registry is given, each support must be a record stored there.
    """
    reasons: list[str] = []
    for fname in sorted(policy.required_fields):
        if not form.get(fname):
            reasons.append(f"missing field {fname}")
    for fname, tag in sorted(policy.field_formats.items()):
        value = form.get(fname)
        if value and not validate_format(tag, value):
            reasons.append(f"field {fname} is not a valid {tag}")
    wanted = policy.required_supports
    if len(supports) != len(wanted):
        reasons.append(f"expected {len(wanted)} supporting identifiers, got {len(supports)}")
    for (role, issuer), rec in zip(wanted, supports):
        if rec.policy != issuer:
            reasons.append(f"support {role} must be issued under {issuer}, not {rec.policy}")
        elif registry is not None and (rec.value not in registry or registry.get(rec.value) != rec):
            reasons.append(f"support {role} ({rec.value}) is not a registered record")
    return CheckResult(not reasons, tuple(reasons))


def _base_value(policy: GenerationPolicy, form: FormDoc, supports: Sequence[IdentifierRecord]) -> str:
    parts = [form[f] for f in policy.issue_template]
    if policy.supports_add_information:
        parts += [s.value for s in supports]
    return "-".join(parts)


def issue(
    policy: GenerationPolicy,
    form: FormDoc,
    registry: Registry | None = None,
    supports: Sequence[IdentifierRecord] = (),
) -> IdentifierDatum:
    """Make an identifier from the template fields of ``form``.

    ``supports`` is only consulted by policies with
    ``supports_add_information`` set.
    """
    registry = Registry() if registry is None else registry
    base = _base_value(policy, form, supports)
    if policy.counter:
        return IdentifierDatum(f"{base}#{registry.next_counter(base)}")
    if base in registry:
        raise DuplicateIdentifier(f"{base} is already registered")
    return IdentifierDatum(base)


def generate(
    policy: GenerationPolicy,
    form: FormDoc,
    supports: Sequence[IdentifierRecord],
    registry: Registry,
) -> IdentifierRecord:
    """Check, issue and register; raises :class:`FormRejected` on rejection."""
    verdict = check(policy, form, supports, registry)
    if not verdict:
        raise FormRejected(verdict.reasons)
    datum = issue(policy, form, registry, supports)
    record = IdentifierRecord(datum, policy.name, tuple(s.datum for s in supports), policy.anchor)
    registry.add(record)
    log.debug("issued %s under %s", datum.value, policy.name)
    return record


@dataclass(frozen=True)
class IdentityTree:
    """Dependency DAG below ``root``; edges run from dependent to support."""

    root: IdentifierDatum
    nodes: frozenset[IdentifierDatum]
    edges: frozenset[tuple[IdentifierDatum, IdentifierDatum]]
    anchors: frozenset[IdentifierDatum]

    def supports_of(self, node: IdentifierDatum) -> list[IdentifierDatum]:
        return sorted(s for d, s in self.edges if d == node)

    def leaves(self) -> frozenset[IdentifierDatum]:
        return frozenset(n for n in self.nodes if not self.supports_of(n))

    def render(self) -> str:
        lines: list[str] = []

        def walk(node: IdentifierDatum, depth: int) -> None:
            mark = " [anchor]" if node in self.anchors else ""
            lines.append("  " * depth + node.value + mark)
            for s in self.supports_of(node):
                walk(s, depth + 1)

        walk(self.root, 0)
        return "\n".join(lines) + "\n"


def build_identity_tree(registry: Registry, i: str | IdentifierDatum) -> IdentityTree:
    root = registry.get(i)
    nodes: set[IdentifierDatum] = set()
    edges: set[tuple[IdentifierDatum, IdentifierDatum]] = set()
    anchors: set[IdentifierDatum] = set()
    done: set[str] = set()
    path: list[str] = []

    def visit(rec: IdentifierRecord) -> None:
        if rec.value in path:
            start = path.index(rec.value)
            raise CyclicProvenance(path[start:] + [rec.value])
        if rec.value in done:
            return
        path.append(rec.value)
        nodes.add(rec.datum)
        if not rec.supports:
            if not rec.anchor:
                raise UnanchoredProvenance(
                    f"{rec.value} has no supports but is not an anchor identifier"
                )
            anchors.add(rec.datum)
        for s in rec.supports:
            edges.add((rec.datum, s))
            visit(registry.get(s))
        path.pop()
        done.add(rec.value)

    visit(root)
    return IdentityTree(root.datum, frozenset(nodes), frozenset(edges), frozenset(anchors))


def provenance_depth(tree: IdentityTree) -> int:
    """Length of the longest path from the root down to an anchor."""
    memo: dict[IdentifierDatum, int] = {}

    def depth(n: IdentifierDatum) -> int:
        if n not in memo:
            below = tree.supports_of(n)
            memo[n] = 1 + max(map(depth, below)) if below else 0
        return memo[n]

    return depth(tree.root)
