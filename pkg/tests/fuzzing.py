"""Mutation fuzzer for specification sources."""

from __future__ import annotations

import random

from survid.specdsl import SpecError, parse

ALPHABET = 'abz09_#@-> ;:,{}()[]="\\\n\t.+/<>≤≥é'
FRAGMENTS = [
    "entity", "idsys", "property", "surveillance", "behaviour", "policy",
    "reduction", "categorization", "{", "}", ";", ":", ",", "->", "(", ")",
    "[", "]", "=", '"', "#", "\n", "duration(", "and(", "not(", "field_equals(k, v)",
    "1e309", "-0.5", "trace x:", "pairs:", "members:", '"\\q"', "(1, 2)",
]


def mutate(rng: random.Random, source: str) -> str:
    s = source
    for _ in range(rng.randint(1, 6)):
        op = rng.randrange(5)
        pos = rng.randint(0, len(s))
        if op == 0:
            s = s[:pos] + rng.choice(ALPHABET) + s[pos:]
        elif op == 1:
            s = s[:pos] + s[pos + rng.randint(1, 8):]
        elif op == 2:
            s = s[:pos] + rng.choice(FRAGMENTS) + s[pos:]
        elif op == 3 and s:
            a, b = sorted(rng.sample(range(len(s) + 1), 2)) if len(s) > 1 else (0, len(s))
            s = s[:pos] + s[a:b] + s[pos:]
        else:
            s = "".join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 40))) if op == 4 else s
    return s


def nest(rng: random.Random) -> str:
    depth = rng.randint(1, 200)
    return "property p { expr: " + "not(" * depth + "field_equals(k, v)" + ")" * depth + "; }"


def run_one(source: str):
    """Parse ``source``; return the document or the diagnostics.

    Anything other than a document or a :class:`SpecError` propagates.
    """
    try:
        return parse(source)
    except SpecError as exc:
        return exc.diagnostics
