"""Exception taxonomy shared across the package.

The split mirrors the CLI exit-code contract: structural and precondition
problems are input errors, budget exhaustion is its own category, and a
postcondition failure always indicates a bug in this library rather than
bad input.
"""

from __future__ import annotations


class BqoError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(BqoError):
    """Malformed data: bad indices, non-increasing sequences, carrier mismatches."""


class PreconditionError(BqoError):
    """An operation was invoked on inputs that violate its contract."""


class DomainError(BqoError):
    """A value lies outside an operation's domain (e.g. minimum of an empty set)."""


class CoverageError(BqoError):
    """A sequence has no initial segment among a block's elements."""


class PostconditionError(BqoError):
    """An internally guaranteed property failed; this is a bug, not bad input."""


class BudgetError(BqoError):
    """An enumeration exceeded its budget; distinct from "none exists".

    ``progress`` carries partial accounting (candidates tried, blocks seen,
    elapsed time) so callers can report how far the search got.
    """

    def __init__(self, message: str, progress: dict | None = None):
        super().__init__(message)
        self.progress = dict(progress or {})
