from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

from ..netsim import edge_key


def score(
    detected: Iterable[tuple[str, str]],
    truth: Iterable[tuple[str, str]],
    tested: Optional[Iterable[tuple[str, str]]] = None,
) -> tuple[Fraction, Fraction]:
    """(precision, recall) as exact fractions; an empty denominator scores 1.

    Recall only counts true edges among ``tested`` pairs when that is given.
    """
    det = {edge_key(*e) for e in detected}
    tru = {edge_key(*e) for e in truth}
    if tested is not None:
        tested = {edge_key(*e) for e in tested}
        tru &= tested
        det &= tested
    tp = len(det & tru)
    precision = Fraction(tp, len(det)) if det else Fraction(1)
    recall = Fraction(tp, len(tru)) if tru else Fraction(1)
    return precision, recall
