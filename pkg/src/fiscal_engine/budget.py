"""Revenue allocation between the state and local budgets, and consolidation.

Profit tax, VAT, excise and import duty go to the state budget in full.
Property tax is local. Income tax is state revenue except where it is
assigned to the budgets of the autonomous republics.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Union

from .errors import DataError, DomainError
from .geo_tax import TAX_KINDS
from .transfers import TransferAllocation

STATE_KINDS = frozenset({"profit", "vat", "excise", "import_duty"})
STATE = "state"


@dataclass(frozen=True)
class RevenueEntry:
    tax_kind: str
    amount: int
    jurisdiction: str = ""
    in_autonomous_republic: bool = False

    def __post_init__(self):
        if self.tax_kind not in TAX_KINDS:
            raise DataError(f"unknown tax kind {self.tax_kind!r}")
        if self.amount < 0:
            raise DomainError("revenue amounts must be non-negative")


@dataclass(frozen=True)
class TransferLine:
    locality: str
    amount: int
    kind: str  # equalization | targeted | special


@dataclass(frozen=True)
class BudgetReport:
    state_total: int
    local: dict[str, int]
    transfers: tuple[TransferLine, ...] = field(default=())

    @property
    def consolidated_total(self) -> int:
        return self.state_total + sum(self.local.values())


def destination(entry: RevenueEntry) -> str:
    """Which budget an entry lands in: ``"state"`` or the entry's locality id."""
    if entry.tax_kind in STATE_KINDS:
        return STATE
    if entry.tax_kind == "income" and not entry.in_autonomous_republic:
        return STATE
    if not entry.jurisdiction:
        raise DataError(f"{entry.tax_kind} revenue needs a jurisdiction")
    return entry.jurisdiction


def allocate_revenue(ledger: Iterable[RevenueEntry], localities: Iterable[str] = ()) -> BudgetReport:
    """Route every ledger entry to exactly one budget.

    ``localities`` pre-registers local budgets that may collect nothing
    (so they can still receive transfers).
    """
    state = 0
    local = {loc: 0 for loc in localities}
    for entry in ledger:
        dest = destination(entry)
        if dest == STATE:
            state += entry.amount
        else:
            local[dest] = local.get(dest, 0) + entry.amount
    return BudgetReport(state, dict(sorted(local.items())))


def _transfer_lines(transfers) -> list[TransferLine]:
    if isinstance(transfers, TransferAllocation):
        lines = [TransferLine(uid, t, "equalization") for uid, t in transfers.equalization.items()]
        lines += [TransferLine(uid, t, "targeted") for uid, t in transfers.targeted_transfers.items()]
        lines += [TransferLine(uid, t, "special") for uid, t in transfers.special_transfers.items()]
        return [line for line in lines if line.amount]
    return [TransferLine(loc, amount, "equalization") for loc, amount in sorted(transfers.items()) if amount]


def consolidate(report: BudgetReport,
                transfers: Union[TransferAllocation, Mapping[str, int]]) -> BudgetReport:
    """Move transfers from the state budget to localities; the consolidated total does not change."""
    lines = _transfer_lines(transfers)
    unknown = sorted({line.locality for line in lines} - set(report.local))
    if unknown:
        raise DataError(f"transfers to unknown localities: {', '.join(unknown)}")
    if any(line.amount < 0 for line in lines):
        raise DomainError("transfer amounts must be non-negative")
    local = dict(report.local)
    state = report.state_total
    for line in lines:
        state -= line.amount
        local[line.locality] += line.amount
    return replace(report, state_total=state, local=local, transfers=report.transfers + tuple(lines))
