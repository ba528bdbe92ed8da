"""Exception types shared across the package."""

from __future__ import annotations


class SqhexError(Exception):
    """Base class for all package errors."""


class ValidationError(SqhexError, ValueError):
    """Malformed input: bad boundary data, weights or signatures."""


class NoPerfectMatchingError(SqhexError):
    """The graph admits no perfect matching."""


class KasteleynSignError(SqhexError):
    """A bounded face violates the Kasteleyn sign condition."""


class NumericalError(SqhexError, ArithmeticError):
    """A floating point computation lost too much accuracy to be trusted."""
