"""Black-box test battery that recovers R, U, P and L from a mempool.

The battery only submits transactions and asks whether a given transaction
is held.  Every unit test starts from a fresh target built by the factory.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Optional, Protocol

from .pool import Mempool
from .types import PolicyProfile, Transaction

BASE_PRICE = 10**6
MAX_SEARCH_ITERATIONS = 32
MAX_FILL = 1 << 20
MAX_DENOMINATOR = 1000


class ProfilingError(Exception):
    pass


class Target(Protocol):
    def submit(self, tx: Transaction) -> None: ...

    def holds(self, tx_id: str) -> bool: ...


class MempoolTarget:
    """Exposes a :class:`Mempool` through the black-box interface only."""

    def __init__(self, profile: PolicyProfile):
        self._pool = Mempool(profile)

    def submit(self, tx: Transaction) -> None:
        self._pool.add(tx)

    def holds(self, tx_id: str) -> bool:
        return tx_id in self._pool


class _Accounts:
    def __init__(self) -> None:
        self._ids = itertools.count()
        self._fillers: dict[tuple[str, int], list[Transaction]] = {}

    def fresh(self, tag: str) -> str:
        return f"prof-{tag}-{next(self._ids)}"

    def fillers(self, tag: str, nonce: int, count: int) -> list[Transaction]:
        """``count`` single-entry accounts at BASE_PRICE, shared across unit tests.

        Each test uses a fresh target, so reusing the same objects is safe.
        """
        cached = self._fillers.setdefault((tag, nonce), [])
        while len(cached) < count:
            cached.append(Transaction(f"prof-{tag}-{len(cached)}", nonce, BASE_PRICE))
        return cached[:count]


def profile_policy(
    factory: Callable[[], Target], client_name: str = "measured", max_iterations: int = MAX_SEARCH_ITERATIONS
) -> PolicyProfile:
    accounts = _Accounts()
    L = measure_capacity(factory, accounts)
    R = measure_replacement(factory, accounts, max_iterations)
    P = measure_pending_floor(factory, accounts, L)
    U = measure_sender_quota(factory, accounts, L)
    return PolicyProfile(client_name, R, U, P, L)


def measure_capacity(factory, accounts: Optional[_Accounts] = None) -> int:
    """Fill with equally priced pending transactions until one is turned away."""
    accounts = accounts or _Accounts()
    target = factory()
    for count in range(MAX_FILL):
        tx = Transaction(accounts.fresh("L"), 0, BASE_PRICE)
        target.submit(tx)
        if not target.holds(tx.tx_id):
            if count == 0:
                raise ProfilingError("target rejects every transaction")
            return count
    raise ProfilingError(f"capacity not reached after {MAX_FILL} transactions")


def measure_replacement(factory, accounts: Optional[_Accounts] = None,
                        max_iterations: int = MAX_SEARCH_ITERATIONS) -> Fraction:
    accounts = accounts or _Accounts()

    def replaces(price: int) -> bool:
        target = factory()
        sender = accounts.fresh("R")
        target.submit(Transaction(sender, 0, BASE_PRICE))
        tx = Transaction(sender, 0, price)
        target.submit(tx)
        return target.holds(tx.tx_id)

    lo, hi = BASE_PRICE, 2 * BASE_PRICE
    iterations = 0
    while not replaces(hi):
        lo, hi = hi, 2 * hi
        iterations += 1
        if iterations > max_iterations:
            raise ProfilingError("no replacement at any probed price")
    iterations = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if replaces(mid):
            hi = mid
        else:
            lo = mid
        iterations += 1
        if iterations > max_iterations:
            raise ProfilingError("replacement threshold search did not converge")
    if hi == BASE_PRICE + 1:
        return Fraction(0)
    # threshold (1+R)*BASE lies in (hi-1, hi]; report the simplest such R
    lower = Fraction(hi - 1 - BASE_PRICE, BASE_PRICE)
    upper = Fraction(hi - BASE_PRICE, BASE_PRICE)
    for d in range(1, MAX_DENOMINATOR + 1):
        n = (upper.numerator * d) // upper.denominator
        if Fraction(n, d) > lower:
            return Fraction(n, d)
    return upper


def _eviction_succeeds(target: Target, tx: Transaction) -> bool:
    target.submit(tx)
    return target.holds(tx.tx_id)


def measure_pending_floor(factory, accounts: Optional[_Accounts], L: int) -> int:
    """Smallest pending count l that lets a top-priced future evict, minus one."""
    accounts = accounts or _Accounts()

    def evicts(l: int) -> bool:
        target = factory()
        submit = target.submit
        for tx in accounts.fillers("Pf", 1, L - l):
            submit(tx)
        for tx in accounts.fillers("Pp", 0, l):
            submit(tx)
        return _eviction_succeeds(target, Transaction(accounts.fresh("Px"), 1, 2 * BASE_PRICE))

    lo, hi = -1, L
    if not evicts(hi):
        raise ProfilingError("no eviction even with a pool full of pending transactions")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if evicts(mid):
            hi = mid
        else:
            lo = mid
    return hi - 1


def measure_sender_quota(factory, accounts: Optional[_Accounts], L: int) -> Optional[int]:
    """Smallest same-sender count u at which eviction fails; None if none does."""
    accounts = accounts or _Accounts()

    def evicts(u: int) -> bool:
        target = factory()
        sender = accounts.fresh("U")
        for nonce in range(u):
            target.submit(Transaction(sender, nonce, BASE_PRICE))
        for tx in accounts.fillers("Uf", 0, L - u):
            target.submit(tx)
        return _eviction_succeeds(target, Transaction(sender, u + 1, 2 * BASE_PRICE))

    if evicts(L):
        return None
    lo, hi = 0, L
    if not evicts(lo):
        raise ProfilingError("eviction fails with no same-sender entries")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if evicts(mid):
            lo = mid
        else:
            hi = mid
    return hi
