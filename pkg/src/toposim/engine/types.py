from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Any, Optional

from ..mempool.types import Price

CONNECTED = "connected"
NOT_DETECTED = "not_detected"
INCONCLUSIVE = "inconclusive"


class UnsupportedClient(Exception):
    """Target profile has R = 0, so tx_A cannot replace tx_B."""


class MeasurementError(Exception):
    pass


@dataclass(frozen=True)
class MeasureConfig:
    """Knobs of one measurement.

    ``R``/``U`` default to the target's profile.  ``timeout`` defaults to 2X.
    ``confirm_eviction`` turns failed step checks into inconclusive verdicts
    instead of recording them next to a normal verdict.
    """

    X: float = 10.0
    Y: Price = Fraction(1, 10)
    Z: int = 5120
    R: Optional[Fraction] = None
    U: Optional[int] = None
    K: int = 1
    timeout: Optional[float] = None
    step_gap: float = 1.0
    retries: int = 3
    confirm_eviction: bool = False
    slot_budget: Optional[int] = None
    cleanup: bool = True

    def __post_init__(self) -> None:
        if self.X <= 0:
            raise ValueError("X must be positive")
        if self.Y <= 0:
            raise ValueError("Y must be positive")
        if self.Z < 0:
            raise ValueError("Z must be non-negative")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.retries < 1:
            raise ValueError("retries must be >= 1")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.slot_budget is not None and self.slot_budget < 1:
            raise ValueError("slot_budget must be >= 1")

    @property
    def wait(self) -> float:
        return self.timeout if self.timeout is not None else 2 * self.X

    def with_(self, **changes) -> "MeasureConfig":
        return replace(self, **changes)

    def echo(self) -> dict:
        return {f.name: jsonable(getattr(self, f.name)) for f in fields(self)}


@dataclass
class EdgeVerdict:
    pair: tuple[str, str]
    verdict: str
    detected_in: str = ""
    checks: dict = field(default_factory=dict)
    attempts: int = 1
    evidence: Optional[tuple[float, str]] = None

    @property
    def connected(self) -> bool:
        return self.verdict == CONNECTED

    def as_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "verdict": self.verdict,
            "iteration": self.detected_in,
            "checks": jsonable(self.checks),
            "attempts": self.attempts,
        }


@dataclass
class CostLedger:
    pending_txs_sent: int = 0
    futures_sent: int = 0
    assumed_inclusions: int = 0
    unit_pair_cost: Fraction = Fraction(0)
    ether_cost: Fraction = Fraction(0)

    def as_dict(self) -> dict:
        return jsonable(self.__dict__)


@dataclass
class MeasurementReport:
    edges: list[EdgeVerdict] = field(default_factory=list)
    precision: Optional[Fraction] = None
    recall: Optional[Fraction] = None
    cost: CostLedger = field(default_factory=CostLedger)
    iterations: list[dict] = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)

    def connected_pairs(self) -> set[tuple[str, str]]:
        return {e.pair for e in self.edges if e.connected}

    def as_dict(self) -> dict:
        return {
            "edges": [e.as_dict() for e in sorted(self.edges, key=lambda e: e.pair)],
            "precision": jsonable(self.precision),
            "recall": jsonable(self.recall),
            "cost": self.cost.as_dict(),
            "iterations": jsonable(self.iterations),
            "config_echo": self.config_echo,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def jsonable(value: Any) -> Any:
    """Fractions become strings, tuples lists, sets sorted lists."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    return value
