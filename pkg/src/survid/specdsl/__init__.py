"""The ``.svs`` scenario specification language."""

from .build import (
    all_entities,
    build_behaviour,
    build_categorization,
    build_idsystem,
    build_policies,
    build_reduction,
    build_surveillance,
    find_reduction_decl,
    read_pairs_file,
    reduction_from_pairs,
)
from .decls import Diagnostic, SpecDocument, SpecError
from .parser import parse
from .printer import pretty_print
from .validate import validate

__all__ = [
    "Diagnostic",
    "SpecDocument",
    "SpecError",
    "all_entities",
    "build_behaviour",
    "build_categorization",
    "build_idsystem",
    "build_policies",
    "build_reduction",
    "build_surveillance",
    "find_reduction_decl",
    "parse",
    "pretty_print",
    "read_pairs_file",
    "reduction_from_pairs",
    "validate",
]
