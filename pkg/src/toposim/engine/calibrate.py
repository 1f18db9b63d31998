from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Union

from ..mempool import Mempool, Transaction
from ..mempool.types import Price
from ..netsim import SimNetwork
from .primitive import norm_price


class EstimationError(Exception):
    pass


class CalibrationError(Exception):
    pass


def estimate_Y(source: Union[Mempool, Iterable[Price]]) -> Price:
    """Median pending price; the mean of the two middle values for even counts."""
    prices = sorted(source.pending_prices() if isinstance(source, Mempool) else source)
    if not prices:
        raise EstimationError("no pending transactions to take a median over")
    mid = len(prices) // 2
    if len(prices) % 2:
        return prices[mid]
    return norm_price(Fraction(prices[mid - 1] + prices[mid], 2))


def quantile_wait(samples: list[float], confidence: float) -> float:
    """The ceil(confidence * n)-th order statistic."""
    if not 0 < confidence <= 1:
        raise ValueError("confidence must lie in (0, 1]")
    ordered = sorted(samples)
    return ordered[max(1, math.ceil(confidence * len(ordered) - 1e-9)) - 1]


def calibrate_X(
    net: SimNetwork,
    probe_count: int,
    confidence: float = 0.999,
    *,
    source: Optional[str] = None,
    price: Price = 1,
    horizon: float = 3600.0,
) -> float:
    """Flood ``probe_count`` probes from one node; quantile of the time until all nodes hold each."""
    if probe_count < 1:
        raise ValueError("probe_count must be >= 1")
    nodes = sorted(n for n, node in net.nodes.items() if node.alive)
    if len(nodes) <= 1:
        return 0.0
    source = source or nodes[0]
    waits = []
    for _ in range(probe_count):
        acct = net.fresh_account("cal")
        tx = Transaction(acct, net.nonces.get(acct, 0), price, submit_time=net.now)
        start = net.now
        net.watch(tx.tx_id)
        net.inject_tx(source, tx)
        net.run_until(start + horizon)
        times = net.admission_times(tx.tx_id)
        net.unwatch(tx.tx_id)
        net.retire_accounts([acct])
        if len(times) < len(nodes):
            lost = sorted(set(nodes) - set(times))
            raise CalibrationError(f"probe never reached {len(lost)} node(s), e.g. {lost[0]}")
        waits.append(max(times.values()) - start)
    return quantile_wait(waits, confidence)
