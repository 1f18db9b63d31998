"""Desk-scale check of the non-interference verifier against a brute-force replay.

A scenario is run twice from the same seed: once with a serial measurement
and once without.  A miner node builds blocks greedily by price from its own
pool at a fixed cadence; every pool drops entries older than the expiration
time.  The verifier's verdict on the measured run is compared with whether
the two runs produced the same per-block transaction multisets.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..engine import MeasureConfig, NonInterferenceWindow, measure_one_link, verify_noninterference
from ..mempool import GETH, PolicyProfile
from ..netsim import BlockRecord, LatencyModel, SimNetwork, Topology, block_from, select_greedy
from .background import inject_background


@dataclass(frozen=True)
class BlockScenario:
    seed: int
    n: int = 5
    profile: PolicyProfile = GETH.with_(L=48)
    Y: int = 20
    block_interval: float = 2.0
    block_capacity: int = 4
    expiry: float = 30.0
    warmup: float = 10.0
    bg_rate: float = 2.0
    bg_prices: tuple = (10, 100)
    miner: str = "n0"
    A: str = "n0"
    B: str = "n1"

    @classmethod
    def random(cls, seed: int) -> "BlockScenario":
        """Vary load and price band so both verdicts occur."""
        rng = random.Random(seed)
        Y = 20
        lo = rng.choice((Y // 2, Y + 5, 2 * Y, 3 * Y))
        hi = lo + rng.choice((Y, 2 * Y, 4 * Y))
        return cls(
            seed=seed,
            Y=Y,
            block_capacity=rng.choice((2, 4, 6)),
            bg_rate=rng.choice((0.5, 1.0, 2.0, 4.0)),
            bg_prices=(lo, hi),
            miner=rng.choice(("n0", "n1", "n2")),
        )

    def topology(self) -> Topology:
        rng = random.Random(self.seed)
        nodes = [f"n{i}" for i in range(self.n)]
        topo = Topology(nodes, [(nodes[i], nodes[rng.randrange(i)]) for i in range(1, self.n)])
        topo.add_edge(self.A, self.B)
        for _ in range(self.n // 2):
            a, b = rng.sample(nodes, 2)
            topo.add_edge(a, b)
        return topo

    def config(self) -> MeasureConfig:
        # keep the measurement's transactions in the pools so they can be mined
        return MeasureConfig(X=5.0, Y=self.Y, Z=self.profile.L, retries=1, cleanup=False)


@dataclass
class BlockRun:
    blocks: list[BlockRecord]
    t1: Optional[float] = None
    t2: Optional[float] = None
    included: list[Counter] = field(default_factory=list)


def run_blocks(sc: BlockScenario, measure: bool) -> BlockRun:
    # fixed latency: measurement traffic must not shift background arrival times
    net = SimNetwork(sc.topology(), sc.profile, latency=LatencyModel.fixed(0.05), seed=sc.seed)
    net.attach_observer()
    cfg = sc.config()
    horizon = sc.warmup + cfg.X + cfg.step_gap + cfg.wait + sc.expiry + 2 * sc.block_interval
    inject_background(net, sc.bg_rate, sc.bg_prices, horizon, seed=sc.seed)
    run = BlockRun([])

    def mine(n: SimNetwork) -> None:
        for node in n.nodes.values():
            node.pool.drop_expired(n.now, sc.expiry)
        txs = select_greedy(n.node(sc.miner).pool, sc.block_capacity)
        run.blocks.append(block_from(len(run.blocks), n.now, txs, sc.block_capacity))
        run.included.append(Counter(tx.tx_id for tx in txs))
        n.confirm(txs)
        n.schedule_timer(sc.block_interval, "block", mine)

    net.schedule_timer(sc.block_interval / 2, "block", mine)
    net.run_until(sc.warmup)
    if measure:
        run.t1 = net.now
        measure_one_link(net, sc.A, sc.B, cfg)
        run.t2 = net.now
    net.run_until(horizon)
    return run


@dataclass
class BlockCheck:
    seed: int
    passed: bool
    identical: bool
    v1: list[int]
    v2: list[int]

    @property
    def agrees(self) -> bool:
        return self.passed == self.identical


def check_scenario(sc: BlockScenario, Y0=None) -> BlockCheck:
    """Verifier verdict on the measured run versus the replay's ground truth.

    ``Y0`` defaults to the future-flood price (1+R)Y, the highest price at
    which the measurement can displace a pending entry.
    """
    measured = run_blocks(sc, True)
    replay = run_blocks(sc, False)
    if Y0 is None:
        Y0 = (1 + sc.profile.R) * Fraction(sc.Y)
    w = NonInterferenceWindow(measured.t1, measured.t2, sc.expiry, Y0)
    res = verify_noninterference(measured.blocks, w)
    inside = [i for i, b in enumerate(measured.blocks) if w.t1 <= b.produce_time <= w.end]
    identical = all(measured.included[i] == replay.included[i] for i in inside)
    return BlockCheck(sc.seed, res.passed, identical, res.v1_heights, res.v2_heights)
