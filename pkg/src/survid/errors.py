"""Exception hierarchy shared by every survid module."""

from __future__ import annotations


class SurvidError(Exception):
    """Base class for all errors raised by this package."""


# identifier systems
class UnknownIdentifier(SurvidError, LookupError):
    pass


class UnknownEntity(SurvidError, LookupError):
    pass


class NotFunctional(SurvidError):
    """An operation needed an identifier-functional, identifier-total system."""


class UnknownFormat(SurvidError, ValueError):
    pass


class InvalidSystem(SurvidError, ValueError):
    """A model object was constructed with inconsistent parts."""


# behaviour
class IndexOutOfRange(SurvidError, IndexError):
    pass


class AtomScopeError(SurvidError):
    """A trace-level atom appeared where only per-event atoms are allowed."""


class InvalidRate(SurvidError, ValueError):
    pass


# sorting
class NotACategorization(SurvidError, ValueError):
    pass


class CarrierMismatch(SurvidError, ValueError):
    pass


class AmbiguousSort(SurvidError):
    pass


class UncoveredEntity(SurvidError):
    pass


# provenance
class DuplicateIdentifier(SurvidError):
    pass


class FormRejected(SurvidError):
    def __init__(self, reasons):
        self.reasons = tuple(reasons)
        super().__init__("; ".join(self.reasons) or "form rejected")


class CyclicProvenance(SurvidError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("cyclic provenance: " + " -> ".join(self.cycle))


class UnanchoredProvenance(SurvidError):
    pass


# reduction
class PartialMap(SurvidError):
    pass


class IncompatibleReductions(SurvidError):
    pass


class EntityMismatch(SurvidError):
    """Two identifier systems are not over the same entity set."""


# input files
class EventLogError(SurvidError, ValueError):
    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = f"{path}:" if path is not None else ""
        where += f"{line}: " if line is not None else (" " if where else "")
        super().__init__(f"{where}{message}")
