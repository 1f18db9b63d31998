from __future__ import annotations

from fractions import Fraction
from typing import Union

from .types import CostLedger, MeasurementReport

UNIT_PAIR_COST = Fraction("7.1e-4")  # Ether per measured pair


def full_mesh_pairs(n: int) -> int:
    return n * (n - 1) // 2


def account_cost(report: Union[MeasurementReport, int], unit_pair_cost: Fraction = UNIT_PAIR_COST) -> CostLedger:
    """Ether spent: unit cost times pairs measured.  Futures are never mined, so they add nothing."""
    unit = Fraction(unit_pair_cost)
    if unit < 0:
        raise ValueError("unit_pair_cost must be >= 0")
    if isinstance(report, MeasurementReport):
        pairs = len({e.pair for e in report.edges})
        base = report.cost
        return CostLedger(base.pending_txs_sent, base.futures_sent, base.assumed_inclusions, unit, unit * pairs)
    if report < 0:
        raise ValueError("pair count must be >= 0")
    return CostLedger(3 * report, 0, report, unit, unit * report)
