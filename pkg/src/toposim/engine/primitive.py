"""Serial link primitive: tx_C flood, future floods, tx_B / tx_A price sandwich."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional

from ..mempool import Transaction
from ..mempool.types import Price
from ..netsim import SimNetwork, edge_key
from .types import (
    CONNECTED, INCONCLUSIVE, NOT_DETECTED, CostLedger, EdgeVerdict, MeasureConfig,
    MeasurementError, UnsupportedClient,
)


def norm_price(p) -> Price:
    p = Fraction(p)
    return p.numerator if p.denominator == 1 else p


def replacement_fraction(net: SimNetwork, nodes: Iterable[str], cfg: MeasureConfig) -> Fraction:
    if cfg.R is not None:
        R = Fraction(cfg.R)
        if R <= 0:
            raise UnsupportedClient("configured R must be positive")
        return R
    rs = {n: net.node(n).profile.R for n in nodes}
    bad = sorted(n for n, r in rs.items() if r == 0)
    if bad:
        raise UnsupportedClient(f"R = 0 on {', '.join(bad)}")
    return min(rs.values())


def future_quota(net: SimNetwork, nodes: Iterable[str], cfg: MeasureConfig) -> Optional[int]:
    if cfg.U is not None:
        return cfg.U
    quotas = [net.node(n).profile.U for n in nodes]
    bounded = [u for u in quotas if u is not None]
    return min(bounded) if bounded else None


def make_futures(net: SimNetwork, count: int, price: Price, quota: Optional[int]) -> list[Transaction]:
    """``count`` futures spread over ceil(count/quota) fresh accounts (nonce gap at the head)."""
    if count == 0:
        return []
    per = count if quota is None else quota
    out = []
    for _ in range(math.ceil(count / per)):
        acct = net.fresh_account("f")
        base = net.nonces.get(acct, 0)
        take = min(per, count - len(out))
        out.extend(Transaction(acct, base + 1 + i, price, submit_time=net.now) for i in range(take))
    return out


def observer_of(net: SimNetwork, *nodes: str) -> str:
    if net.observer is None:
        raise MeasurementError("no observer attached to the network")
    for n in nodes:
        if not net.node(n).observed:
            raise MeasurementError(f"observer is not connected to {n}")
    return net.observer


def merge_attempts(verdicts: list[EdgeVerdict]) -> EdgeVerdict:
    """Union over retries: any positive wins, then any conclusive negative."""
    for want in (CONNECTED, NOT_DETECTED):
        for v in verdicts:
            if v.verdict == want:
                v.attempts = len(verdicts)
                return v
    last = verdicts[-1]
    last.attempts = len(verdicts)
    return last


def measure_one_link(
    net: SimNetwork,
    A: str,
    B: str,
    cfg: MeasureConfig,
    *,
    label: str = "serial",
    ledger: Optional[CostLedger] = None,
) -> EdgeVerdict:
    if A == B:
        raise ValueError("A and B must differ")
    M = observer_of(net, A, B)
    R = replacement_fraction(net, (A, B), cfg)
    U = future_quota(net, (A, B), cfg)
    attempts = []
    for _ in range(cfg.retries):
        v = _attempt(net, M, A, B, cfg, R, U, label, ledger)
        attempts.append(v)
        if v.connected:
            break
    return merge_attempts(attempts)


def _attempt(net, M, A, B, cfg, R, U, label, ledger) -> EdgeVerdict:
    Y = cfg.Y
    acct = net.fresh_account("m")
    nonce = net.nonces.get(acct, 0)
    tx_C = Transaction(acct, nonce, norm_price(Y), submit_time=net.now)

    # 1: tx_C everywhere
    net.send(M, A, [tx_C])
    net.run_for(cfg.X)

    # 2: evict tx_C on B, plant tx_B
    fut_price = norm_price((1 + R) * Y)
    fut_B = make_futures(net, cfg.Z, fut_price, U)
    tx_B = Transaction(acct, nonce, norm_price((1 - R / 2) * Y), submit_time=net.now)
    net.send(M, B, fut_B + [tx_B])
    net.run_for(cfg.step_gap)

    # 3: evict tx_C on A, plant tx_A
    fut_A = make_futures(net, cfg.Z, fut_price, U)
    tx_A = Transaction(acct, nonce, norm_price((1 + R / 2) * Y), submit_time=net.now)
    net.watch(tx_A.tx_id)
    sent = net.now
    landed = net.send(M, A, fut_A + [tx_A])
    deadline = sent + cfg.wait
    net.run_until(min(max(landed, net.now), deadline))

    a_pool, b_pool = net.node(A).pool, net.node(B).pool
    checks = {
        "tx_C_evicted_A": tx_C.tx_id not in a_pool,
        "tx_C_evicted_B": tx_C.tx_id not in b_pool,
        "pool_full_A": a_pool.full,
        "pool_full_B": b_pool.full,
        "tx_A_stored_A": tx_A.tx_id in a_pool,
        "tx_B_stored_B": tx_B.tx_id in b_pool or tx_A.tx_id in b_pool,
    }
    step_ok = all(checks.values())

    # 4: does tx_A come back from B?
    net.run_until(deadline)
    evidence = next((o for o in net.observations(tx_A) if o[1] == B and o[0] <= deadline), None)
    holders = net.unwatch(tx_A.tx_id)
    checks["isolation"] = holders <= {A, B}
    checks["steps_confirmed"] = step_ok

    if ledger is not None:
        ledger.pending_txs_sent += 3
        ledger.futures_sent += len(fut_A) + len(fut_B)
        ledger.assumed_inclusions += 1
    if cfg.cleanup:
        net.retire_accounts([acct])
        net.retire_accounts(sorted({t.sender for t in fut_A + fut_B}),
                            None if net.forwards_futures else (A, B))

    if cfg.confirm_eviction and not step_ok:
        verdict = INCONCLUSIVE
    else:
        verdict = CONNECTED if evidence is not None else NOT_DETECTED
    return EdgeVerdict(edge_key(A, B), verdict, label, checks, evidence=evidence)
