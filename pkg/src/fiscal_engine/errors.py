"""Exception hierarchy shared by every calculator."""

from __future__ import annotations


class FiscalError(Exception):
    """Base class for all engine errors."""


class DomainError(FiscalError, ValueError):
    """An input lies outside the domain of the operation (e.g. a negative base)."""


class CurrencyMismatchError(DomainError):
    pass


class ValidationError(FiscalError, ValueError):
    """A value object violates one or more of its invariants."""

    def __init__(self, message: str, violations: list[str] | None = None):
        self.violations = list(violations or [])
        if self.violations:
            message = f"{message}: " + "; ".join(self.violations)
        super().__init__(message)


class DataError(FiscalError, ValueError):
    """A record is missing data or carries data inconsistent with its kind."""


class RegimeError(FiscalError):
    """An enterprise was routed to a calculator that does not apply to its regime."""


class EligibilityError(FiscalError):
    """Declared status contradicts the thresholds that define it."""


class BandViolationError(ValidationError):
    """A municipal property-tax rate falls outside the band allowed for the income class."""
