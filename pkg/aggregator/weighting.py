"""Weighted sum of a report and its store key.

    W = (n_prr * C[n_prr] + n_irr * C[n_irr]) * V      for cohort V >= 1
    W =  n_prr * C[n_prr] + n_irr * C[n_irr]           for V = 0

so cohorts 0 and 1 produce the same W. Keys are W rounded half-up to five
decimals, e.g. ``25.28652`` or ``0.00000``.
"""
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from rappor.exceptions import DomainError

from .constants import ConstantTable

KEY_PLACES = 5
_QUANTUM = Decimal(1).scaleb(-KEY_PLACES)


def quantize(value: float) -> str:
    # Decimal(str(x)), not Decimal(x): keys follow the shortest round-trip repr.
    return format(Decimal(str(value)).quantize(_QUANTUM, rounding=ROUND_HALF_UP), 'f')


@dataclass(frozen=True)
class WeightedSum:
    value: float
    key: str

    @classmethod
    def of(cls, value):
        return cls(value=value, key=quantize(value))


def weighted_sum(n_prr: int, n_irr: int, cohort: int, table: ConstantTable) -> WeightedSum:
    if cohort < 0:
        raise DomainError(f'cohort must be nonnegative, got {cohort}')
    bracket = (n_prr * table.constant_for_count(n_prr)
               + n_irr * table.constant_for_count(n_irr))
    return WeightedSum.of(bracket * cohort if cohort >= 1 else bracket)


def weighted_sum_of_report(report, table: ConstantTable) -> WeightedSum:
    if report.prr.width != table.k or report.irr.width != table.k:
        raise DomainError(f'report bitsets are not {table.k} bits wide')
    return weighted_sum(report.prr.popcount(), report.irr.popcount(), report.cohort, table)
