"""Recursive-descent parser for ``.svs`` specifications.

Grammar::

    document := block*
    block    := KIND NAME "{" entry* "}"
    entry    := KEY [ARG] ":" [item ("," item)*] ";"
    item     := term ["->" term]
    term     := WORD "(" [item ("," item)*] ")"      call
              | "[" [field ("," field)*] "]"          event record
              | "(" NUMBER "," NUMBER ")"            geo pair
              | WORD | NUMBER | STRING | OP | "="
    field    := (WORD | STRING) "=" scalar

Syntax errors stop the parse at the first offending token.  Reference and
key errors are collected for the whole document.
"""

from __future__ import annotations

from typing import Callable, Optional

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
from ..errors import AtomScopeError
from .decls import (
    DECL_TYPES,
    Atom,
    Call,
    Decl,
    Diagnostic,
    Entry,
    Geo,
    Node,
    Pair,
    PolicyDecl,
    Record,
    SpecDocument,
    SpecError,
)
from .lexer import NUMBER_RE, LexError, Token, tokenize

MAX_DEPTH = 64


class _Syntax:
    """Token-level parsing into blocks of generic entries."""

    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def fail(self, message: str, tok: Token | None = None) -> None:
        tok = tok or self.tok
        raise LexError(message, tok.line, tok.column)

    def take(self, kind: str, what: str | None = None) -> Token:
        tok = self.tok
        if tok.kind != kind:
            found = "end of input" if tok.kind == "EOF" else repr(tok.text)
            self.fail(f"expected {what or kind.lower()}, found {found}")
        self.i += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.tok.kind == kind:
            self.i += 1
            return self.tokens[self.i - 1]
        return None

    def blocks(self) -> list[tuple[Token, Token, list[Entry], Token]]:
        out = []
        while self.tok.kind != "EOF":
            kind = self.take("WORD", "block kind")
            name = self.tok
            if name.kind not in ("WORD", "NUMBER"):
                self.fail(f"expected a name after {kind.text!r}")
            self.i += 1
            self.take("LBRACE", "'{'")
            entries = []
            while not self.accept("RBRACE"):
                entries.append(self.entry())
            out.append((kind, name, entries, self.tokens[self.i - 1]))
        return out

    def entry(self) -> Entry:
        key = self.take("WORD", "a key or '}'")
        arg = None
        if self.tok.kind in ("WORD", "NUMBER", "STRING"):
            arg = self.tok.text
            self.i += 1
        self.take("COLON", "':'")
        items: list[Node] = []
        if self.tok.kind != "SEMI":
            items.append(self.item())
            while self.accept("COMMA"):
                items.append(self.item())
        self.take("SEMI", "';'")
        return Entry(key.text, arg, tuple(items), key.line, key.column)

    def item(self) -> Node:
        left = self.term()
        arrow = self.accept("ARROW")
        if arrow:
            right = self.term()
            return Pair(left, right, arrow.line, arrow.column)
        return left

    def term(self) -> Node:
        tok = self.tok
        if tok.kind == "WORD" and self.tokens[self.i + 1].kind == "LPAREN":
            self.i += 2
            self.depth += 1
            if self.depth > MAX_DEPTH:
                self.fail("expression nested too deeply", tok)
            args: list[Node] = []
            if not self.accept("RPAREN"):
                args.append(self.item())
                while self.accept("COMMA"):
                    args.append(self.item())
                self.take("RPAREN", "')'")
            self.depth -= 1
            return Call(tok.text, tuple(args), tok.line, tok.column)
        if tok.kind == "LBRACKET":
            self.i += 1
            fields = []
            if not self.accept("RBRACKET"):
                fields.append(self.field())
                while self.accept("COMMA"):
                    fields.append(self.field())
                self.take("RBRACKET", "']'")
            return Record(tuple(fields), tok.line, tok.column)
        if tok.kind == "LPAREN":
            return self.geo()
        if tok.kind in ("WORD", "NUMBER", "STRING", "OP"):
            self.i += 1
            return Atom(tok.kind, tok.text, tok.line, tok.column)
        if tok.kind == "EQ":
            self.i += 1
            return Atom("OP", "=", tok.line, tok.column)
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        self.fail(f"expected a value, found {found}")

    def geo(self) -> Geo:
        start = self.take("LPAREN")
        lat = self.take("NUMBER", "latitude")
        self.take("COMMA", "','")
        lon = self.take("NUMBER", "longitude")
        self.take("RPAREN", "')'")
        return Geo(float(lat.text), float(lon.text), start.line, start.column)

    def field(self) -> tuple[str, Atom | Geo]:
        name = self.tok
        if name.kind not in ("WORD", "STRING") or not name.text:
            self.fail("expected a field name")
        self.i += 1
        self.take("EQ", "'='")
        if self.tok.kind == "LPAREN":
            return name.text, self.geo()
        tok = self.tok
        if tok.kind not in ("WORD", "NUMBER", "STRING"):
            self.fail("expected a field value")
        self.i += 1
        return name.text, Atom(tok.kind, tok.text, tok.line, tok.column)


# ---------------------------------------------------------------------------
# value conversion


class _Bad(Exception):
    def __init__(self, message: str, node: Node | None):
        super().__init__(message)
        self.node = node


def _where(node) -> tuple[int, int]:
    return (getattr(node, "line", 0), getattr(node, "column", 0))


def to_text(node: Node) -> str:
    if isinstance(node, Atom) and node.kind in ("WORD", "NUMBER", "STRING"):
        return node.text
    raise _Bad("expected a name or text value", node)


def to_scalar(node: Node):
    if isinstance(node, Geo):
        return (node.lat, node.lon)
    if isinstance(node, Atom):
        if node.kind == "NUMBER":
            t = node.text
            return int(t) if NUMBER_RE.fullmatch(t) and not any(c in t for c in ".eE") else float(t)
        if node.kind in ("WORD", "STRING"):
            return node.text
    raise _Bad("expected a scalar value", node)


def to_number(node: Node) -> int | float:
    v = to_scalar(node)
    if isinstance(v, (int, float)):
        return v
    raise _Bad("expected a number", node)


def to_int(node: Node) -> int:
    v = to_scalar(node)
    if isinstance(v, int):
        return v
    raise _Bad("expected an integer", node)


def to_op(node: Node) -> str:
    if isinstance(node, Atom) and node.kind in ("OP", "STRING") and node.text in (
        "<", "<=", "=", ">=", ">", "≤", "≥",
    ):
        return {"≤": "<=", "≥": ">="}.get(node.text, node.text)
    raise _Bad("expected a comparison operator", node)


def to_pair(node: Node) -> tuple[str, str]:
    if isinstance(node, Pair):
        return to_text(node.left), to_text(node.right)
    raise _Bad("expected a pair 'a -> b'", node)


def to_record(node: Node) -> tuple:
    if not isinstance(node, Record):
        raise _Bad("expected an event record '[field=value, ...]'", node)
    names = [n for n, _ in node.fields]
    if len(set(names)) != len(names):
        raise _Bad("duplicate field in event record", node)
    return tuple((n, to_scalar(v)) for n, v in node.fields)


_ARITY = {
    "field_equals": 2,
    "field_contains": 2,
    "field_compare": 3,
    "event_count": 3,
    "duration": 4,
    "occurs_at": 2,
    "not": 1,
}


def to_expr(node: Node) -> PropertyExpr:
    if not isinstance(node, Call):
        raise _Bad("expected a property expression", node)
    name, args = node.name, node.args
    want = _ARITY.get(name)
    if want is None and name not in ("and", "or"):
        raise _Bad(f"unknown property form {name!r}", node)
    if want is not None and len(args) != want:
        raise _Bad(f"{name} takes {want} argument(s), got {len(args)}", node)
    try:
        if name == "and":
            return And(tuple(map(to_expr, args)))
        if name == "or":
            return Or(tuple(map(to_expr, args)))
        if name == "not":
            return Not(to_expr(args[0]))
        if name == "field_equals":
            return FieldEquals(to_text(args[0]), to_scalar(args[1]))
        if name == "field_contains":
            return FieldContains(to_text(args[0]), to_text(args[1]))
        if name == "field_compare":
            return FieldCompare(to_text(args[0]), to_op(args[1]), to_number(args[2]))
        if name == "event_count":
            return EventCount(to_expr(args[0]), to_op(args[1]), to_int(args[2]))
        if name == "duration":
            return Duration(to_expr(args[0]), to_expr(args[1]), to_op(args[2]), to_int(args[3]))
        t = to_int(args[0])
        if t < 0:
            raise _Bad("time points are non-negative", args[0])
        return OccursAt(t, to_expr(args[1]))
    except (AtomScopeError, ValueError) as exc:
        raise _Bad(str(exc), node) from None


def to_bool(node: Node) -> bool:
    if isinstance(node, Atom) and node.kind == "WORD" and node.text in ("true", "false"):
        return node.text == "true"
    raise _Bad("expected true or false", node)


# ---------------------------------------------------------------------------
# per-kind key tables: key -> (target attribute, converter, mode)
#   mode "one": single value, "list": list of values, "keyed": repeatable with ARG

Conv = Callable[[Node], object]

KEYS: dict[str, dict[str, tuple[str, Conv, str]]] = {
    "entity": {"members": ("members", to_text, "list")},
    "idsys": {
        "entities": ("entities", to_text, "one"),
        "format": ("format", to_text, "one"),
        "identifiers": ("identifiers", to_text, "list"),
        "pairs": ("pairs", to_pair, "list"),
        "pairs_file": ("pairs_file", to_text, "one"),
    },
    "behaviour": {
        "entities": ("entities", to_text, "one"),
        "trace": ("traces", to_record, "keyed"),
        "log": ("log", to_text, "one"),
    },
    "property": {"expr": ("expr", to_expr, "one")},
    "surveillance": {
        "idsys": ("idsys", to_text, "one"),
        "property": ("property", to_text, "one"),
        "behaviour": ("behaviour", to_text, "one"),
        "entity": ("entity", to_text, "one"),
        "observable": ("observable", to_text, "one"),
        "attributes": ("attributes", to_text, "one"),
        "identity": ("identity", to_text, "one"),
    },
    "categorization": {
        "idsys": ("idsys", to_text, "one"),
        "block": ("blocks", to_text, "keyed"),
    },
    "policy": {
        "fields": ("fields", to_text, "list"),
        "format": ("formats", to_text, "keyed1"),
        "support": ("supports", to_text, "keyed1"),
        "template": ("template", to_text, "list"),
        "counter": ("counter", to_bool, "one"),
        "anchor": ("anchor", to_bool, "one"),
        "augment": ("augment", to_bool, "one"),
    },
    "reduction": {
        "from": ("source", to_text, "one"),
        "to": ("target", to_text, "one"),
        "map": ("mapping", to_pair, "list"),
        "map_file": ("map_file", to_text, "one"),
    },
}

REQUIRED = {
    "entity": ("members",),
    "idsys": ("entities",),
    "behaviour": ("entities",),
    "property": ("expr",),
    "surveillance": ("idsys", "property", "entity", "observable", "attributes", "identity"),
    "categorization": ("idsys",),
    "policy": ("fields", "template"),
    "reduction": ("from", "to"),
}

# attribute -> kind of declaration it must name
REFERENCES = {
    "idsys": {"entities": "entity"},
    "behaviour": {"entities": "entity"},
    "surveillance": {"idsys": "idsys", "property": "property", "behaviour": "behaviour"},
    "categorization": {"idsys": "idsys"},
    "reduction": {"source": "idsys", "target": "idsys"},
}


def _build_decl(kind_tok: Token, name_tok: Token, entries: list[Entry], diags: list[Diagnostic]) -> Decl | None:
    kind = kind_tok.text
    cls = DECL_TYPES[kind]
    table = KEYS[kind]
    values: dict[str, object] = {}
    keyed: dict[str, list] = {}
    positions = {"": (kind_tok.line, kind_tok.column)}
    extras = []
    seen: set[str] = set()
    ok = True
    for entry in entries:
        spec = table.get(entry.key)
        if spec is None:
            diags.append(
                Diagnostic("warning", entry.line, entry.column, f"unknown key {entry.key!r} in {kind} block")
            )
            extras.append(entry)
            continue
        attr, conv, mode = spec
        here = (entry.line, entry.column)
        if mode.startswith("keyed"):
            if entry.arg is None:
                diags.append(Diagnostic("error", *here, f"{entry.key!r} needs a name before ':'"))
                ok = False
                continue
            label = f"{entry.key} {entry.arg}"
        else:
            if entry.arg is not None:
                diags.append(Diagnostic("error", *here, f"{entry.key!r} takes no name before ':'"))
                ok = False
                continue
            label = entry.key
        if label in seen:
            diags.append(Diagnostic("error", *here, f"duplicate entry {label!r}"))
            ok = False
            continue
        seen.add(label)
        positions[label] = here
        positions.setdefault(entry.key, here)
        try:
            if mode == "one":
                if len(entry.value) != 1:
                    raise _Bad(f"{entry.key!r} takes exactly one value", entry)
                values[attr] = conv(entry.value[0])
            elif mode == "list":
                values[attr] = tuple(conv(v) for v in entry.value)
            elif mode == "keyed":
                keyed.setdefault(attr, []).append((entry.arg, tuple(conv(v) for v in entry.value)))
            else:
                if len(entry.value) != 1:
                    raise _Bad(f"{entry.key!r} takes exactly one value", entry)
                keyed.setdefault(attr, []).append((entry.arg, conv(entry.value[0])))
        except _Bad as bad:
            line, col = _where(bad.node)
            if not line:
                line, col = here
            diags.append(Diagnostic("error", line, col, f"{entry.key}: {bad}"))
            ok = False
    for key in REQUIRED[kind]:
        if key not in seen:
            diags.append(
                Diagnostic("error", kind_tok.line, kind_tok.column, f"{kind} {name_tok.text}: missing required key {key!r}")
            )
            ok = False
    if not ok:
        return None
    for attr, items in keyed.items():
        values[attr] = tuple(items)
    return cls(name_tok.text, extras=tuple(extras), positions=positions, **values)


def parse(source: str) -> SpecDocument:
    """Parse a specification, raising :class:`SpecError` on any error.

    Warnings (unknown keys) are returned on ``doc.diagnostics``.
    """
    diags: list[Diagnostic] = []
    try:
        raw = _Syntax(source).blocks()
    except LexError as exc:
        raise SpecError([Diagnostic("error", exc.line, exc.column, str(exc))]) from None
    decls: list[Decl] = []
    names: dict[str, Token] = {}
    for kind_tok, name_tok, entries, _ in raw:
        if kind_tok.text not in DECL_TYPES:
            diags.append(Diagnostic("error", kind_tok.line, kind_tok.column, f"unknown block kind {kind_tok.text!r}"))
            continue
        if name_tok.text in names:
            first = names[name_tok.text]
            diags.append(
                Diagnostic(
                    "error",
                    name_tok.line,
                    name_tok.column,
                    f"duplicate name {name_tok.text!r} (first declared at {first.line}:{first.column})",
                )
            )
            continue
        names[name_tok.text] = name_tok
        decl = _build_decl(kind_tok, name_tok, entries, diags)
        if decl is not None:
            decls.append(decl)
    _resolve(decls, diags)
    if any(d.severity == "error" for d in diags):
        raise SpecError(sorted(diags, key=lambda d: (d.line, d.column)))
    return SpecDocument(tuple(decls), tuple(diags))


def _resolve(decls: list[Decl], diags: list[Diagnostic]) -> None:
    kinds = {d.name: d.kind for d in decls}

    def need(decl: Decl, key: str, target: Optional[str], kind: str) -> None:
        if target is None:
            return
        found = kinds.get(target)
        if found == kind:
            return
        line, col = decl.pos(key)
        if found is None:
            msg = f"{decl.kind} {decl.name}: undeclared {kind} {target!r}"
        else:
            msg = f"{decl.kind} {decl.name}: {target!r} is a {found}, expected {kind}"
        diags.append(Diagnostic("error", line, col, msg))

    src_key = {"source": "from", "target": "to"}
    for d in decls:
        for attr, kind in REFERENCES.get(d.kind, {}).items():
            need(d, src_key.get(attr, attr), getattr(d, attr), kind)
        if isinstance(d, PolicyDecl):
            for role, issuer in d.supports:
                need(d, f"support {role}", issuer, "policy")


__all__ = ["parse", "SpecError", "SpecDocument", "Diagnostic"]
