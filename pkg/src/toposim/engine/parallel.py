"""Parallel primitive: many (source, sink) edges measured in one pass.

Sinks are prepared before sources.  Propagation is push-once, so a tx_A
leaving its source must find tx_B already planted on its sink; if the sink
still held tx_C at that moment the replacement would fail and never be
retried.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..mempool import Transaction
from ..netsim import SimNetwork, edge_key
from .primitive import (
    future_quota, make_futures, merge_attempts, norm_price, observer_of, replacement_fraction,
)
from .types import (
    CONNECTED, INCONCLUSIVE, NOT_DETECTED, CostLedger, EdgeVerdict, MeasureConfig, MeasurementError,
)


class ParallelAbort(MeasurementError):
    """A source failed to store its tx_A's; the iteration is abandoned."""

    def __init__(self, message: str, missing: dict[str, list[str]]):
        super().__init__(message)
        self.missing = missing


def measure_par(
    net: SimNetwork,
    sources: Sequence[str],
    sinks: Sequence[str],
    edges: Sequence[tuple[str, str]],
    cfg: MeasureConfig,
    *,
    label: str = "par",
    ledger: Optional[CostLedger] = None,
) -> list[EdgeVerdict]:
    """Verdicts for ``edges`` (source, sink), in input order.

    Negative edges are re-measured up to ``cfg.retries`` times in total; with
    ``cfg.slot_budget`` set, each pass is split into chunks of at most that
    many edges; otherwise chunks are capped by the free headroom of the
    observed pools.  An edge whose tx_C went missing on a third node is
    INCONCLUSIVE, since tx_A may have crossed there.
    """
    src_set, sink_set = set(sources), set(sinks)
    if src_set & sink_set:
        raise ValueError(f"nodes both source and sink: {sorted(src_set & sink_set)}")
    for a, b in edges:
        if a not in src_set or b not in sink_set:
            raise ValueError(f"edge ({a}, {b}) not between given sources and sinks")
    if len(set(edges)) != len(edges):
        raise ValueError("duplicate edges")
    if not edges:
        return []
    involved = sorted(src_set | sink_set)
    M = observer_of(net, *involved)
    R = replacement_fraction(net, involved, cfg)
    U = future_quota(net, involved, cfg)

    history: dict[tuple[str, str], list[EdgeVerdict]] = {e: [] for e in edges}
    remaining = list(edges)
    for attempt in range(cfg.retries):
        budget = cfg.slot_budget or min(len(remaining), _headroom(net, cfg.Y))
        chunks = [remaining[i:i + budget] for i in range(0, len(remaining), budget)]
        for ci, chunk in enumerate(chunks):
            tag = label if len(chunks) == 1 else f"{label}.{ci}"
            for e, v in zip(chunk, _attempt(net, M, chunk, cfg, R, U, tag, ledger)):
                history[e].append(v)
        remaining = [e for e in remaining if not history[e][-1].connected]
        if not remaining:
            break
    return [merge_attempts(history[e]) for e in edges]


def _headroom(net: SimNetwork, Y) -> int:
    """tx_C slots every attached pool can offer: capacity minus entries priced at or above Y.

    Every attached pool must hold one tx_C per edge in a pass, or tx_A can
    slip through a third node that lacks its tx_C.
    """
    floor = norm_price(Y)
    room = min(
        node.pool.capacity - sum(1 for t in node.pool if node.pool.price(t) >= floor)
        for node in net.nodes.values() if node.observed
    )
    return max(room, 1)


def _missing_blockers(net, attached, tx_C, edges) -> list[bool]:
    """Per edge: is its tx_C absent from some node other than the edge's ends?"""
    out = []
    for c, (a, b) in zip(tx_C, edges):
        out.append(any(c.tx_id not in net.node(n).pool for n in attached if n != a and n != b))
    return out


def _attempt(net, M, edges, cfg, R, U, label, ledger) -> list[EdgeVerdict]:
    Y = cfg.Y
    accts = [net.fresh_account("p") for _ in edges]
    tx_C = [Transaction(a, net.nonces.get(a, 0), norm_price(Y), submit_time=net.now) for a in accts]
    srcs = sorted({a for a, _ in edges})
    snks = sorted({b for _, b in edges})

    # p1: every tx_C onto every attached node
    attached = [n for n, node in net.nodes.items() if node.observed]
    for n in attached:
        net.send(M, n, tx_C)
    net.run_for(cfg.X)

    fut_price = norm_price((1 + R) * Y)
    b_price, a_price = norm_price((1 - R / 2) * Y), norm_price((1 + R / 2) * Y)
    tx_B = [Transaction(c.sender, c.nonce, b_price, submit_time=net.now) for c in tx_C]
    futures: list[Transaction] = []

    # p3: sinks get futures, then tx_B for their own edges and tx_C otherwise
    for b in snks:
        fut = make_futures(net, cfg.Z, fut_price, U)
        futures += fut
        net.send(M, b, fut + [tx_B[i] if e[1] == b else tx_C[i] for i, e in enumerate(edges)])
    net.run_for(cfg.step_gap)
    gaps = _missing_blockers(net, attached, tx_C, edges)

    # p2: sources get futures, the other sources' tx_C, then their own tx_A
    tx_A = [Transaction(c.sender, c.nonce, a_price, submit_time=net.now) for c in tx_C]
    for t in tx_A:
        net.watch(t.tx_id)
    sent = net.now
    landed = sent
    for a in srcs:
        fut = make_futures(net, cfg.Z, fut_price, U)
        futures += fut
        others = [tx_C[i] for i, e in enumerate(edges) if e[0] != a]
        own = [tx_A[i] for i, e in enumerate(edges) if e[0] == a]
        landed = max(landed, net.send(M, a, fut + others + own))
    deadline = sent + cfg.wait
    net.run_until(min(landed, deadline))

    missing = {
        a: [tx_A[i].tx_id for i, e in enumerate(edges) if e[0] == a and tx_A[i].tx_id not in net.node(a).pool]
        for a in srcs
    }
    missing = {a: ids for a, ids in missing.items() if ids}
    sink_full = {b: net.node(b).pool.full for b in snks}
    if missing:
        _cleanup(net, cfg, accts, futures, tx_A, ledger, len(edges))
        raise ParallelAbort(f"{label}: tx_A not stored on {', '.join(sorted(missing))}", missing)

    # p4
    net.run_until(deadline)
    gaps = [g or late for g, late in zip(gaps, _missing_blockers(net, attached, tx_C, edges))]
    out = []
    for i, (a, b) in enumerate(edges):
        evidence = next((o for o in net.observations(tx_A[i]) if o[1] == b and o[0] <= deadline), None)
        holders = net.unwatch(tx_A[i].tx_id)
        checks = {
            "tx_A_stored_A": True,
            "pool_full_B": sink_full[b],
            "pool_full_A": net.node(a).pool.full,
            "isolation": holders <= {a, b},
            "tx_C_held": not gaps[i],
        }
        if not checks["tx_C_held"]:
            verdict = INCONCLUSIVE
        elif cfg.confirm_eviction and not (checks["pool_full_A"] and checks["pool_full_B"]):
            verdict = INCONCLUSIVE
        else:
            verdict = CONNECTED if evidence is not None else NOT_DETECTED
        out.append(EdgeVerdict(edge_key(a, b), verdict, label, checks, evidence=evidence))
    _cleanup(net, cfg, accts, futures, tx_A, ledger, len(edges))
    return out


def _cleanup(net, cfg, accts, futures, tx_A, ledger, r) -> None:
    for t in tx_A:
        net.unwatch(t.tx_id)
    if ledger is not None:
        ledger.pending_txs_sent += 3 * r
        ledger.futures_sent += len(futures)
        ledger.assumed_inclusions += r
    if cfg.cleanup:
        net.retire_accounts(accts)
        fut_accts = sorted({t.sender for t in futures})
        net.retire_accounts(fut_accts)
