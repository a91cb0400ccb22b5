"""Deterministic fiscal rules engine: Georgian tax calculators, budget
allocation, municipal equalization transfers and policy scenarios."""

from .errors import (
    BandViolationError,
    CurrencyMismatchError,
    DataError,
    DomainError,
    EligibilityError,
    FiscalError,
    RegimeError,
    ValidationError,
)
from .money import format_money, gel, parse_money, round_half_up

__version__ = "0.1.0"
