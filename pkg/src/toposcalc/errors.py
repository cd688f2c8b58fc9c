"""Exception hierarchy shared by every toposcalc module.

Errors fall in two families that the CLI maps to distinct exit codes:
malformed input (2) and violated preconditions (3).
"""

from __future__ import annotations


class ToposcalcError(Exception):
    exit_code = 1


class MalformedInput(ToposcalcError, ValueError):
    exit_code = 2


class LawViolation(MalformedInput):
    """A category table breaks an identity, associativity or totality law."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class FunctorialityViolation(MalformedInput):
    pass


class NaturalityViolation(MalformedInput):
    pass


class ArityMismatch(MalformedInput):
    pass


class UnboundVariable(MalformedInput):
    pass


class PreconditionError(ToposcalcError, ValueError):
    exit_code = 3


class UnknownObject(PreconditionError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownElement(PreconditionError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BaseMismatch(PreconditionError):
    pass


class NotFullSubcategory(PreconditionError):
    pass


class NotASheaf(PreconditionError):
    pass


class SiteNotLocallyConnected(PreconditionError):
    pass


class NotAtomicSite(PreconditionError):
    pass


class NotAnAtom(PreconditionError):
    pass


class SignatureMismatch(PreconditionError):
    pass


class LengthMismatch(PreconditionError):
    pass


class GroupTooLarge(PreconditionError):
    pass


class CorpusMissing(PreconditionError):
    pass
