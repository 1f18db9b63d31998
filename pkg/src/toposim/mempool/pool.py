"""Single-node transaction pool with R/U/P/L admission semantics."""

from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .types import PolicyProfile, Price, Transaction


class StaleTransaction(Exception):
    """Nonce below the sender's next on-chain nonce."""


class Status(enum.Enum):
    ADMITTED = "admitted"
    EVICTED = "admitted_with_eviction"
    REPLACED = "replaced"
    REJECTED = "rejected"
    DUPLICATE = "duplicate"
    STALE = "stale"


class Reject(str, enum.Enum):
    UNDERPRICED = "underpriced"
    SENDER_QUOTA = "sender-quota"
    PENDING_FLOOR = "pending-floor"
    REPLACEMENT_UNDERPRICED = "replacement-underpriced"


PENDING = "pending"
FUTURE = "future"


@dataclass(slots=True)
class Admission:
    status: Status
    tx: Transaction
    victim: Optional[Transaction] = None
    reason: Optional[Reject] = None
    pending: bool = False

    @property
    def accepted(self) -> bool:
        return self.status in (Status.ADMITTED, Status.EVICTED, Status.REPLACED)


class Mempool:
    """Unconfirmed-transaction buffer of one node.

    ``nonces`` is the shared chain view (sender -> next on-chain nonce); a
    missing sender counts as nonce 0.  Classification is cached per sender as
    the length of the contiguous nonce run starting at the on-chain nonce.

    When the pool is full, a pending incoming transaction displaces the
    cheapest *future* entry if any exist; otherwise the generic rule applies
    (cheapest entry evicted if strictly outbid, pending count above P, sender
    below U).
    """

    def __init__(self, profile: PolicyProfile, nonces: Optional[Mapping[str, int]] = None):
        self.profile = profile
        self._nonces = nonces if nonces is not None else {}
        self._eip = profile.eip1559_mode
        self._bump = 1 + profile.R
        self._capacity = profile.L
        self._txs: dict[str, Transaction] = {}
        self._senders: dict[str, dict[int, Transaction]] = {}
        self._runs: dict[str, int] = {}
        self._pending: set[str] = set()
        self._heap: list = []
        self._future_heap: list = []
        # heaps are plain lists until the first peek; bulk fills then cost one heapify
        self._heaped = False

    # -- inspection -------------------------------------------------------

    def __len__(self) -> int:
        return len(self._txs)

    def __contains__(self, tx_id: object) -> bool:
        return tx_id in self._txs

    def __iter__(self):
        return iter(self._txs.values())

    def get(self, tx_id: str) -> Optional[Transaction]:
        return self._txs.get(tx_id)

    @property
    def capacity(self) -> int:
        return self.profile.L

    @property
    def full(self) -> bool:
        return len(self._txs) >= self.profile.L

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def is_pending(self, tx_id: str) -> bool:
        return tx_id in self._pending

    def sender_count(self, sender: str) -> int:
        return len(self._senders.get(sender, ()))

    def entry(self, sender: str, nonce: int) -> Optional[Transaction]:
        return self._senders.get(sender, {}).get(nonce)

    def price(self, tx: Transaction) -> Price:
        if self._eip and tx.max_fee is not None:
            return tx.max_fee
        return tx.gas_price

    def snapshot(self) -> list[tuple[str, Price, str]]:
        return sorted(
            (tx.tx_id, tx.gas_price, PENDING if tx.tx_id in self._pending else FUTURE)
            for tx in self._txs.values()
        )

    def pending_prices(self) -> list[Price]:
        return [self.price(self._txs[t]) for t in self._pending]

    def base_nonce(self, sender: str) -> int:
        return self._nonces.get(sender, 0)

    def classify(self, tx: Transaction) -> str:
        base = self.base_nonce(tx.sender)
        if tx.nonce < base:
            raise StaleTransaction(f"{tx.tx_id}: nonce {tx.nonce} below on-chain nonce {base}")
        return PENDING if tx.nonce <= base + self._runs.get(tx.sender, 0) else FUTURE

    def lowest(self) -> Optional[Transaction]:
        return self._peek(self._heap, futures_only=False)

    def lowest_future(self) -> Optional[Transaction]:
        return self._peek(self._future_heap, futures_only=True)

    # -- admission --------------------------------------------------------

    def add(self, tx: Transaction) -> Admission:
        """Full admission pipeline: duplicate, stale, replacement, then admission."""
        txs = self._txs
        if tx.tx_id in txs:
            return Admission(Status.DUPLICATE, tx)
        sender = tx.sender
        base = self._nonces.get(sender, 0)
        if tx.nonce < base:
            return Admission(Status.STALE, tx)
        by_nonce = self._senders.get(sender)
        if by_nonce is not None and tx.nonce in by_nonce:
            return self.try_replace(tx)
        if len(txs) < self._capacity:
            self._insert(tx)
            return Admission(Status.ADMITTED, tx, pending=tx.tx_id in self._pending)
        return self.try_admit(tx)

    def try_replace(self, incoming: Transaction) -> Admission:
        old = self.entry(incoming.sender, incoming.nonce)
        if old is None:
            raise ValueError(f"no entry with sender/nonce of {incoming.tx_id}")
        if self.price(incoming) < self._bump * self.price(old):
            return Admission(Status.REJECTED, incoming, reason=Reject.REPLACEMENT_UNDERPRICED)
        was_pending = old.tx_id in self._pending
        del self._txs[old.tx_id]
        self._senders[incoming.sender][incoming.nonce] = incoming
        self._txs[incoming.tx_id] = incoming
        self._push(incoming)
        if was_pending:
            self._pending.discard(old.tx_id)
            self._pending.add(incoming.tx_id)
        else:
            self._push_future(incoming)
        return Admission(Status.REPLACED, incoming, victim=old, pending=was_pending)

    def try_admit(self, incoming: Transaction) -> Admission:
        sender = incoming.sender
        base = self._nonces.get(sender, 0)
        if incoming.nonce < base:
            raise StaleTransaction(incoming.tx_id)
        pending = incoming.nonce == base + self._runs.get(sender, 0)
        profile = self.profile
        if len(self._txs) < profile.L:
            self._insert(incoming)
            return Admission(Status.ADMITTED, incoming, pending=incoming.tx_id in self._pending)

        if profile.U is not None and self.sender_count(sender) >= profile.U:
            return Admission(Status.REJECTED, incoming, reason=Reject.SENDER_QUOTA)
        if pending:
            victim = self.lowest_future()
            if victim is not None:
                self._remove(victim)
                self._insert(incoming)
                return Admission(
                    Status.EVICTED, incoming, victim=victim, pending=incoming.tx_id in self._pending
                )
        if len(self._pending) <= profile.P:
            return Admission(Status.REJECTED, incoming, reason=Reject.PENDING_FLOOR)
        victim = self.lowest()
        if self.price(incoming) <= self.price(victim):
            return Admission(Status.REJECTED, incoming, reason=Reject.UNDERPRICED)
        self._remove(victim)
        self._insert(incoming)
        return Admission(
            Status.EVICTED, incoming, victim=victim, pending=incoming.tx_id in self._pending
        )

    # -- removal ----------------------------------------------------------

    def remove(self, tx_id: str) -> Optional[Transaction]:
        tx = self._txs.get(tx_id)
        if tx is not None:
            self._remove(tx)
        return tx

    def remove_sender(self, sender: str) -> list[Transaction]:
        by_nonce = self._senders.pop(sender, None)
        if not by_nonce:
            return []
        self._runs.pop(sender, None)
        for tx in by_nonce.values():
            del self._txs[tx.tx_id]
            self._pending.discard(tx.tx_id)
        return list(by_nonce.values())

    def drop_expired(self, now: float, e: float) -> list[Transaction]:
        if e <= 0:
            raise ValueError("expiration must be positive")
        expired = [tx for tx in self._txs.values() if now - tx.submit_time > e]
        for tx in sorted(expired, key=lambda t: -t.nonce):
            self._remove(tx)
        return expired

    def resync(self, sender: str) -> list[Transaction]:
        """Re-derive a sender's classification after its on-chain nonce moved.

        Entries below the new on-chain nonce are dropped and returned.
        """
        by_nonce = self._senders.get(sender)
        if not by_nonce:
            return []
        base = self.base_nonce(sender)
        stale = [tx for n, tx in by_nonce.items() if n < base]
        for tx in stale:
            del by_nonce[tx.nonce]
            del self._txs[tx.tx_id]
            self._pending.discard(tx.tx_id)
        if not by_nonce:
            del self._senders[sender]
            self._runs.pop(sender, None)
            return stale
        for tx in by_nonce.values():
            if tx.tx_id in self._pending:
                self._pending.discard(tx.tx_id)
                self._push_future(tx)
        self._runs[sender] = 0
        self._extend_run(sender, base, by_nonce)
        return stale

    # -- internals --------------------------------------------------------

    def _push(self, tx: Transaction) -> None:
        self._add_entry(self._heap, (self.price(tx), tx.submit_time, tx.tx_id))

    def _push_future(self, tx: Transaction) -> None:
        self._add_entry(self._future_heap, (self.price(tx), tx.submit_time, tx.tx_id))

    def _add_entry(self, heap: list, entry: tuple) -> None:
        if self._heaped:
            heapq.heappush(heap, entry)
        else:
            heap.append(entry)
        if len(heap) > 2 * len(self._txs) + 64:
            self._compact()

    def _peek(self, heap: list, futures_only: bool) -> Optional[Transaction]:
        if not self._heaped:
            heapq.heapify(self._heap)
            heapq.heapify(self._future_heap)
            self._heaped = True
            heap = self._future_heap if futures_only else self._heap
        txs, pending = self._txs, self._pending
        while heap:
            tx_id = heap[0][2]
            if tx_id in txs and not (futures_only and tx_id in pending):
                return txs[tx_id]
            heapq.heappop(heap)
        return None

    def _insert(self, tx: Transaction) -> None:
        sender = tx.sender
        tx_id = tx.tx_id
        by_nonce = self._senders.get(sender)
        if by_nonce is None:
            by_nonce = self._senders[sender] = {}
        by_nonce[tx.nonce] = tx
        self._txs[tx_id] = tx
        price = tx.gas_price if tx.max_fee is None or not self._eip else tx.max_fee
        entry = (price, tx.submit_time, tx_id)
        heap = self._heap
        if self._heaped:
            heapq.heappush(heap, entry)
        else:
            heap.append(entry)
        if len(heap) > 2 * len(self._txs) + 64:
            self._compact()
        base = self._nonces.get(sender, 0)
        run = self._runs.get(sender, 0)
        if tx.nonce == base + run:
            if len(by_nonce) == run + 1:
                self._pending.add(tx_id)
                self._runs[sender] = run + 1
            else:
                self._extend_run(sender, base, by_nonce)
        else:
            self._add_entry(self._future_heap, entry)

    def _compact(self) -> None:
        txs, pending = self._txs, self._pending
        self._heap = [(self.price(t), t.submit_time, t.tx_id) for t in txs.values()]
        heapq.heapify(self._heap)
        self._future_heap = [e for e in self._heap if e[2] not in pending]
        heapq.heapify(self._future_heap)
        self._heaped = True

    def _extend_run(self, sender: str, base: int, by_nonce: dict[int, Transaction]) -> None:
        k = base + self._runs.get(sender, 0)
        while k in by_nonce:
            self._pending.add(by_nonce[k].tx_id)
            k += 1
        self._runs[sender] = k - base

    def _remove(self, tx: Transaction) -> None:
        sender = tx.sender
        by_nonce = self._senders[sender]
        del by_nonce[tx.nonce]
        del self._txs[tx.tx_id]
        if tx.tx_id in self._pending:
            self._pending.discard(tx.tx_id)
            base = self._nonces.get(sender, 0)
            end = base + self._runs[sender]
            for n in range(tx.nonce + 1, end):
                demoted = by_nonce[n]
                self._pending.discard(demoted.tx_id)
                self._push_future(demoted)
            self._runs[sender] = tx.nonce - base
        if not by_nonce:
            del self._senders[sender]
            self._runs.pop(sender, None)

    def check_invariants(self) -> None:
        """Recompute classification from scratch and compare with the cache."""
        assert len(self._txs) <= self.profile.L, "capacity exceeded"
        expected: set[str] = set()
        for sender, by_nonce in self._senders.items():
            k = self.base_nonce(sender)
            while k in by_nonce:
                expected.add(by_nonce[k].tx_id)
                k += 1
        assert expected == self._pending, "stale classification cache"
        assert sum(len(v) for v in self._senders.values()) == len(self._txs)


def fill(pool: Mempool, txs: Iterable[Transaction]) -> list[Admission]:
    return [pool.add(tx) for tx in txs]
