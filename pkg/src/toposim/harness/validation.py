from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from ..engine import CONNECTED, INCONCLUSIVE, MeasurementReport
from ..netsim import Topology, edge_key


class ScoringError(ValueError):
    pass


@dataclass(frozen=True)
class ValidationScore:
    true_positives: int
    false_positives: int
    false_negatives: int
    inconclusive: int = 0

    @property
    def precision(self) -> Fraction:
        d = self.true_positives + self.false_positives
        return Fraction(self.true_positives, d) if d else Fraction(1)

    @property
    def recall(self) -> Fraction:
        d = self.true_positives + self.false_negatives
        return Fraction(self.true_positives, d) if d else Fraction(1)

    def as_dict(self) -> dict:
        return {
            "true_positives": self.true_positives,
            "false_positives": self.false_positives,
            "false_negatives": self.false_negatives,
            "inconclusive": self.inconclusive,
            "precision": str(self.precision),
            "recall": str(self.recall),
        }


def score_report(
    report: MeasurementReport,
    truth: Topology,
    *,
    true_edges: Optional[Iterable[tuple[str, str]]] = None,
) -> ValidationScore:
    """Count verdicts against ground truth.

    Every true edge that is not reported connected is a false negative,
    whether or not its pair was measured.  Inconclusive verdicts sit outside
    both denominators and are counted on their own.  ``true_edges`` defaults
    to the truth topology's edges (pass a subset to leave excluded nodes out).
    """
    edges = {edge_key(*e) for e in (truth.edges if true_edges is None else true_edges)}
    for a, b in (v.pair for v in report.edges):
        if a not in truth or b not in truth:
            raise ScoringError(f"pair {a}-{b} is outside the ground-truth node set")
    detected = {edge_key(*v.pair) for v in report.edges if v.verdict == CONNECTED}
    unsure = {edge_key(*v.pair) for v in report.edges if v.verdict == INCONCLUSIVE} - detected
    return ValidationScore(
        true_positives=len(detected & edges),
        false_positives=len(detected - edges),
        false_negatives=len(edges - detected - unsure),
        inconclusive=len(unsure),
    )
