"""Two-round group schedule covering every unordered pair once.

Round 1 pairs group i with all later groups (ceil(N/K) iterations; the last
one has nothing left to pair with but is still counted).  Round 2 splits every
block into first half (floor) and second half, measures across the split for
all blocks at once, and recurses on both halves: ceil(log2 K) iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from ..netsim import SimNetwork
from .parallel import measure_par
from .primitive import measure_one_link
from .types import INCONCLUSIVE, CostLedger, EdgeVerdict, MeasureConfig, MeasurementReport
from .scoring import score


@dataclass(frozen=True)
class Iteration:
    index: int
    round: int
    sources: tuple[str, ...]
    sinks: tuple[str, ...]
    pairs: tuple[tuple[str, str], ...]

    @property
    def label(self) -> str:
        return f"r{self.round}.i{self.index}"


def expected_iterations(N: int, K: int) -> int:
    return math.ceil(N / K) + (math.ceil(math.log2(K)) if K > 1 else 0)


def build_schedule(nodes: Sequence[str], K: int) -> list[Iteration]:
    if K < 1:
        raise ValueError("K must be >= 1")
    if len(set(nodes)) != len(nodes):
        raise ValueError("duplicate node ids")
    nodes = list(nodes)
    groups = [nodes[i:i + K] for i in range(0, len(nodes), K)]
    its: list[Iteration] = []
    for gi, g in enumerate(groups):
        rest = [n for h in groups[gi + 1:] for n in h]
        its.append(Iteration(len(its), 1, tuple(g), tuple(rest), tuple((a, b) for a in g for b in rest)))
    blocks = [g for g in groups if len(g) > 1]
    while blocks:
        srcs: list[str] = []
        snks: list[str] = []
        pairs: list[tuple[str, str]] = []
        nxt = []
        for b in blocks:
            h = len(b) // 2
            first, second = b[:h], b[h:]
            srcs += first
            snks += second
            pairs += [(a, c) for a in first for c in second]
            nxt += [x for x in (first, second) if len(x) > 1]
        its.append(Iteration(len(its), 2, tuple(srcs), tuple(snks), tuple(pairs)))
        blocks = nxt
    return its


def schedule_network(
    net: SimNetwork,
    nodes: Sequence[str],
    K: int,
    cfg: MeasureConfig,
    *,
    truth: Optional[set[tuple[str, str]]] = None,
) -> MeasurementReport:
    ledger = CostLedger()
    report = MeasurementReport(cost=ledger, config_echo=cfg.echo() | {"K": K, "nodes": len(nodes)})
    for it in build_schedule(nodes, K):
        t0, ev0 = net.now, net.events_processed
        verdicts: list[EdgeVerdict] = []
        if it.pairs:
            verdicts = measure_par(net, it.sources, it.sinks, list(it.pairs), cfg, label=it.label, ledger=ledger)
        report.edges += verdicts
        report.iterations.append({
            "label": it.label,
            "round": it.round,
            "sources": len(it.sources),
            "sinks": len(it.sinks),
            "pairs": len(it.pairs),
            "sim_seconds": round(net.now - t0, 6),
            "events": net.events_processed - ev0,
        })
    if truth is not None:
        # inconclusive pairs count toward neither precision nor recall
        tested = {e.pair for e in report.edges if e.verdict != INCONCLUSIVE}
        report.precision, report.recall = score(report.connected_pairs(), truth, tested)
    return report


def serial_network(
    net: SimNetwork,
    nodes: Sequence[str],
    cfg: MeasureConfig,
    *,
    configs: Optional[dict[str, MeasureConfig]] = None,
    truth: Optional[set[tuple[str, str]]] = None,
) -> MeasurementReport:
    """measure_one_link over every unordered pair.

    ``configs`` holds per-node overrides (e.g. from preprocessing); a pair
    uses the larger Z of its two ends.
    """
    configs = configs or {}
    ledger = CostLedger()
    report = MeasurementReport(cost=ledger, config_echo=cfg.echo() | {"K": 1, "mode": "serial", "nodes": len(nodes)})
    t0, ev0 = net.now, net.events_processed
    order = sorted(nodes)
    pairs = 0
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            z = max(configs.get(a, cfg).Z, configs.get(b, cfg).Z)
            report.edges.append(measure_one_link(net, a, b, cfg.with_(Z=z) if z != cfg.Z else cfg, ledger=ledger))
            pairs += 1
    report.iterations.append({
        "label": "serial",
        "round": 0,
        "sources": len(order),
        "sinks": len(order),
        "pairs": pairs,
        "sim_seconds": round(net.now - t0, 6),
        "events": net.events_processed - ev0,
    })
    if truth is not None:
        tested = {e.pair for e in report.edges if e.verdict != INCONCLUSIVE}
        report.precision, report.recall = score(report.connected_pairs(), truth, tested)
    return report
