from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..mempool.types import Price
from ..netsim import BlockRecord


class InconclusiveStream(Exception):
    """The block stream does not cover the window, or skips heights inside it."""


@dataclass(frozen=True)
class NonInterferenceWindow:
    t1: float
    t2: float
    e: float
    Y0: Price

    def __post_init__(self) -> None:
        if not self.t1 < self.t2:
            raise ValueError("need t1 < t2")
        if self.e <= 0:
            raise ValueError("e must be positive")

    @property
    def end(self) -> float:
        return self.t2 + self.e


@dataclass
class NonInterferenceResult:
    passed: bool
    v1_heights: list[int] = field(default_factory=list)
    v2_heights: list[int] = field(default_factory=list)
    blocks_checked: int = 0

    def as_dict(self) -> dict:
        return {"passed": self.passed, "v1_violations": self.v1_heights,
                "v2_violations": self.v2_heights, "blocks_checked": self.blocks_checked}


def verify_noninterference(blocks: Iterable[BlockRecord], w: NonInterferenceWindow) -> NonInterferenceResult:
    """V1: every block produced in [t1, t2+e] is full.  V2: every price it includes is above Y0."""
    blocks = sorted(blocks, key=lambda b: b.height)
    for prev, cur in zip(blocks, blocks[1:]):
        if cur.produce_time <= prev.produce_time:
            raise ValueError(f"heights {prev.height}, {cur.height} not increasing in time")
    if not blocks or blocks[0].produce_time > w.t1 or blocks[-1].produce_time < w.end:
        raise InconclusiveStream(f"stream does not cover [{w.t1}, {w.end}]")
    inside = [b for b in blocks if w.t1 <= b.produce_time <= w.end]
    for prev, cur in zip(inside, inside[1:]):
        if cur.height != prev.height + 1:
            raise InconclusiveStream(f"gap between heights {prev.height} and {cur.height}")
    v1 = [b.height for b in inside if b.gas_used_fraction < 1]
    v2 = [b.height for b in inside if any(p <= w.Y0 for p in b.included_tx_prices)]
    return NonInterferenceResult(not v1 and not v2, v1, v2, len(inside))
