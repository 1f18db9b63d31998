from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Union

from ..mempool import Mempool, Transaction
from ..mempool.types import Price

Profile = Union[None, Mapping[int, object], Callable[[int], object]]


@dataclass(frozen=True)
class BlockRecord:
    height: int
    produce_time: float
    gas_used_fraction: Fraction
    included_tx_prices: tuple = ()
    included_tx_ids: tuple = field(default=(), compare=False)

    @property
    def full(self) -> bool:
        return self.gas_used_fraction >= 1


def _lookup(profile: Profile, height: int, default):
    if profile is None:
        return default
    if callable(profile):
        return profile(height)
    return profile.get(height, default)


def block_stream(
    interval: float,
    count: int,
    *,
    start: float = 0.0,
    first_height: int = 0,
    fullness: Profile = None,
    price_floor: Profile = None,
    txs_per_block: int = 1,
) -> Iterator[BlockRecord]:
    """Synthetic blocks every ``interval`` seconds.

    ``fullness`` / ``price_floor`` map height to a value (mapping or callable);
    unmapped heights are full and use a floor of 1 Gwei.  Each block lists
    ``txs_per_block`` prices, all equal to the floor.
    """
    if interval <= 0:
        raise ValueError("interval must be positive")
    for i in range(count):
        h = first_height + i
        frac = Fraction(_lookup(fullness, h, 1))
        if not 0 <= frac <= 1:
            raise ValueError(f"gas_used_fraction {frac} outside [0, 1] at height {h}")
        floor = _lookup(price_floor, h, 1)
        yield BlockRecord(h, start + i * interval, frac, (floor,) * txs_per_block)


def select_greedy(pool: Mempool, capacity: int) -> list[Transaction]:
    """Top-``capacity`` pending entries by price, nonce order kept per sender.

    Ties break on tx_id so the choice is a function of the pool contents.
    """
    heads: dict[str, list[Transaction]] = {}
    for tx in pool:
        if pool.is_pending(tx.tx_id):
            heads.setdefault(tx.sender, []).append(tx)
    heap = []
    for sender, txs in heads.items():
        txs.sort(key=lambda t: t.nonce)
        heap.append((-pool.price(txs[0]), txs[0].tx_id, sender, 0))
    heapq.heapify(heap)
    chosen = []
    while heap and len(chosen) < capacity:
        _, _, sender, i = heapq.heappop(heap)
        txs = heads[sender]
        chosen.append(txs[i])
        if i + 1 < len(txs):
            nxt = txs[i + 1]
            heapq.heappush(heap, (-pool.price(nxt), nxt.tx_id, sender, i + 1))
    return chosen


def block_from(height: int, t: float, txs: list[Transaction], capacity: int) -> BlockRecord:
    prices: tuple[Price, ...] = tuple(tx.gas_price for tx in txs)
    return BlockRecord(height, t, Fraction(len(txs), capacity), prices, tuple(tx.tx_id for tx in txs))
