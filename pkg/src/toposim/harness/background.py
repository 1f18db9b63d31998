"""Background pending load from dedicated accounts."""

from __future__ import annotations

import logging
import random
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from ..mempool import Transaction
from ..mempool.types import Price
from ..netsim import SimNetwork

log = logging.getLogger(__name__)

PriceDist = Union[tuple, Callable[[random.Random], Price]]
_GRID = 10**6


def uniform_prices(lo, hi) -> Callable[[random.Random], Price]:
    """Exact rational prices on a 1e-6 grid over [lo, hi]."""
    lo, hi = Fraction(lo), Fraction(hi)
    if not 0 < lo <= hi:
        raise ValueError("need 0 < lo <= hi")

    def draw(rng: random.Random) -> Price:
        p = lo + (hi - lo) * Fraction(rng.randrange(_GRID + 1), _GRID)
        return p.numerator if p.denominator == 1 else p

    draw.bounds = (lo, hi)
    return draw


def default_prices(Y) -> Callable[[random.Random], Price]:
    return uniform_prices(Fraction(Y) / 2, 5 * Fraction(Y))


def inject_background(
    net: SimNetwork,
    rate: float,
    price_dist: Optional[PriceDist],
    duration: float,
    *,
    Y=None,
    at_nodes: Optional[Sequence[str]] = None,
    seed: Optional[int] = None,
) -> list[Transaction]:
    """Schedule ``rate * duration`` pending transactions, one fresh account each.

    Submissions are evenly spaced from now on and rotate over ``at_nodes``
    (default: every node).  Returns the scheduled transactions; the caller
    runs the clock.  Warns when no price can fall at or below ``Y``, since
    tx_C would then be the pool minimum.
    """
    if rate < 0:
        raise ValueError("rate must be >= 0")
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if price_dist is None:
        if Y is None:
            raise ValueError("need a price distribution or Y")
        price_dist = default_prices(Y)
    elif isinstance(price_dist, tuple):
        price_dist = uniform_prices(*price_dist)
    count = int(rate * duration)
    if count == 0:
        return []
    lo = getattr(price_dist, "bounds", (None,))[0]
    if Y is not None and lo is not None and lo > Fraction(Y):
        log.warning("every background price exceeds Y=%s; tx_C will be the pool minimum", Y)
    targets = sorted(at_nodes if at_nodes is not None else net.nodes)
    rng = random.Random(net.seed if seed is None else seed)
    txs = []
    for i in range(count):
        tx = Transaction(net.fresh_account("bg"), 0, price_dist(rng), submit_time=net.now + i / rate)
        at = targets[i % len(targets)]
        net.schedule_timer(i / rate, f"bg:{tx.tx_id}", lambda n, at=at, tx=tx: n.inject_tx(at, tx))
        txs.append(tx)
    return txs
