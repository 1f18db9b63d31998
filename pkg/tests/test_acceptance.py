"""Acceptance criteria 1-11.

Every test is named ``test_criterion_NN_*``; the terminal summary prints one
PASS/FAIL line per criterion.  Tolerances and instance values are pinned in
the constants below.
"""

import functools
import math
import random
import statistics
import time
from fractions import Fraction

import networkx as nx
import pytest

from toposim.engine import (
    CONNECTED, MeasureConfig, account_cost, build_schedule, expected_iterations, full_mesh_pairs,
    measure_one_link, measure_par, serial_network,
)
from toposim.graphs import gen_ba, gen_er, louvain
from toposim.harness import BlockScenario, Scenario, check_scenario, inject_background, run_scenario
from toposim.harness.pipeline import build_topology, run_validation
from toposim.mempool import ALETH, BESU, GETH, NETHERMIND, PARITY, MempoolTarget, profile_policy
from toposim.netsim import SimNetwork, Topology

# criterion 1
PROFILE_TABLE = {
    "Geth": (GETH, (Fraction(1, 10), 4096, 0, 5120)),
    "Parity": (PARITY, (Fraction(1, 8), 81, 2000, 8192)),
    "Nethermind": (NETHERMIND, (0, 17, 0, 2048)),
    "Besu": (BESU, (Fraction(1, 10), None, 0, 4096)),
    "Aleth": (ALETH, (0, 1, 0, 2048)),
}
PROFILE_SECONDS = 1.0

# criterion 2
C2_GRAPHS, C2_N_RANGE, C2_L, C2_Y = 200, (10, 100), 16, 20
C2_SECONDS = 600

# criterion 3
C3_Z, C3_Y = 5120, 20
C3_L_VALUES = range(3120, 9121, 1000)
C3_BACKGROUND = (1, 1000, 2000, 3000)

# criterion 4
C4_REPEATS = 100

# criterion 5
C5_MAX_N = 64
C5_INSTANCES = [(8, 3, 4), (500, 4, 127)]

# criterion 6
C6_NODES, C6_EDGES, C6_L = 100, 300, 128
C6_GROUP_SIZES = (1, 2, 5, 10, 30, 60, 99)

# criterion 8
C8_SEEDS = range(50)

# criterion 9
C9_SEEDS = range(10)
C9_SECONDS = 300
C9_ER588 = dict(n=588, m=7496, clustering=(0.044, 0.005), modularity=(0.161, 0.02))
C9_ER446 = dict(n=446, m=15380, clustering=(0.1548, 0.01))
C9_BA1025 = dict(n=1025, l=36, modularity=(0.084, 0.02))

# criterion 10
C10_UNIT = Fraction("7.1e-4")
C10_MESH_NODES, C10_MESH_COST = 8000, Fraction("2.2845e4")


def within(value, target_tol):
    target, tol = target_tol
    return abs(value - target) <= tol


def observed(topo, profile=GETH, *, seed=0, overrides=None):
    net = SimNetwork(topo, profile, overrides=overrides, seed=seed)
    net.attach_observer()
    return net


def random_connected(seed):
    rng = random.Random(seed)
    n = rng.randint(*C2_N_RANGE)
    nodes = [f"n{i}" for i in range(n)]
    topo = Topology(nodes, [(nodes[i], nodes[rng.randrange(i)]) for i in range(1, n)])
    for _ in range(n // 2):
        a, b = rng.sample(nodes, 2)
        topo.add_edge(a, b)
    return topo


def isolation_tally(verdicts):
    checks = [v.checks["isolation"] for v in verdicts]
    return len(checks), checks.count(False)


# -- cached campaigns (criterion 7 re-reads their isolation tallies) ------------------

@functools.lru_cache(maxsize=None)
def campaign_2():
    t0 = time.perf_counter()
    rows, verdicts = [], []
    for seed in range(C2_GRAPHS):
        topo = random_connected(seed)
        net = observed(topo, GETH.with_(L=C2_L), seed=seed)
        rep = serial_network(net, topo.nodes, MeasureConfig(Y=C2_Y, Z=C2_L, retries=1), truth=topo.edges)
        preconditions = all(v.checks["steps_confirmed"] for v in rep.edges)
        rows.append((seed, len(topo), rep.precision, rep.recall, preconditions))
        verdicts += rep.edges
    return rows, isolation_tally(verdicts), time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def campaign_3():
    rows, verdicts = [], []
    fut_price = (1 + GETH.R) * C3_Y
    for band in (None, (2 * C3_Y, 5 * C3_Y)):
        for L in C3_L_VALUES:
            for bg in C3_BACKGROUND:
                net = observed(Topology(["A", "B"], [("A", "B")]), overrides={"A": GETH.with_(L=L)}, seed=1)
                txs = inject_background(net, 100, band, bg / 100, Y=C3_Y)
                net.run_for(bg / 100 + 5)
                deficit = L - sum(1 for t in txs if t.gas_price >= fut_price)
                v = measure_one_link(net, "A", "B", MeasureConfig(Y=C3_Y, Z=C3_Z, retries=1))
                rows.append((band, L, bg, deficit, v.verdict == CONNECTED))
                verdicts.append(v)
    return rows, isolation_tally(verdicts)


PERMUTATIONS = {
    "A1A2 A1B A2B": [("A1", "A2"), ("A1", "B"), ("A2", "B")],
    "A1A2 A1B": [("A1", "A2"), ("A1", "B")],
    "A1A2 A2B": [("A1", "A2"), ("A2", "B")],
    "A1A2": [("A1", "A2")],
    "A1B A2B": [("A1", "B"), ("A2", "B")],
    "A1B": [("A1", "B")],
    "A2B": [("A2", "B")],
    "none": [],
}


@functools.lru_cache(maxsize=None)
def campaign_4():
    cfg = MeasureConfig(Y=20, Z=16, retries=1)
    rows, verdicts = {}, []
    tested = [("A1", "B"), ("A2", "B")]
    for name, edges in PERMUTATIONS.items():
        topo = Topology(["A1", "A2", "B"], edges)
        net = observed(topo, GETH.with_(L=16), seed=len(name))
        union, runs = set(), []
        for _ in range(C4_REPEATS):
            out = measure_par(net, ["A1", "A2"], ["B"], tested, cfg)
            verdicts += out
            hits = {v.pair for v in out if v.verdict == CONNECTED}
            runs.append(hits)
            union |= hits
        truth = {e for e in tested if topo.has_edge(*e)}
        tp = len(union & truth)
        precision = Fraction(tp, len(union)) if union else Fraction(1)
        recall = Fraction(tp, len(truth)) if truth else Fraction(1)
        rows[name] = (precision, recall, all(r == truth for r in runs))
    return rows, isolation_tally(verdicts)


def c6_scenario(**kw):
    base = dict(model="er", nodes=C6_NODES, edges=C6_EDGES, seed=2, default_profile=GETH.with_(L=C6_L),
                measure=MeasureConfig(Y=20, Z=C6_L, retries=1), trace=False)
    base.update(kw)
    return Scenario(**base)


@functools.lru_cache(maxsize=None)
def campaign_6():
    sc = c6_scenario()
    topo = build_topology(sc)
    serial = run_validation(sc, topo=topo)
    verdicts = list(serial.report.edges)
    rows = {}
    for K in C6_GROUP_SIZES:
        v = run_validation(sc.with_(mode="parallel", group_size=K), topo=topo)
        rows[K] = (v.score.precision, v.score.recall, len(v.report.iterations))
        verdicts += v.report.edges
    return serial.score.recall, rows, isolation_tally(verdicts)


# -- 1 ----------------------------------------------------------------------------------

@pytest.mark.parametrize("name", PROFILE_TABLE)
def test_criterion_01_profiling_recovers_table(name):
    profile, expected = PROFILE_TABLE[name]
    t0 = time.perf_counter()
    m = profile_policy(lambda: MempoolTarget(profile), name)
    elapsed = time.perf_counter() - t0
    print(f"{name}: R={m.R} U={m.U} P={m.P} L={m.L} in {elapsed:.3f}s")
    assert (m.R, m.U, m.P, m.L) == expected
    assert elapsed < PROFILE_SECONDS


# -- 2 ----------------------------------------------------------------------------------

def test_criterion_02_serial_precision_and_recall():
    rows, _, elapsed = campaign_2()
    print(f"{len(rows)} graphs, n in [{min(r[1] for r in rows)}, {max(r[1] for r in rows)}], {elapsed:.1f}s")
    assert len(rows) == C2_GRAPHS
    assert all(r[2] == 1 and r[3] == 1 for r in rows), [r for r in rows if r[2] != 1 or r[3] != 1]
    assert all(r[4] for r in rows)
    assert elapsed < C2_SECONDS


# -- 3 ----------------------------------------------------------------------------------

def test_criterion_03_recall_cliff():
    rows, _ = campaign_3()
    wrong = [r for r in rows if r[4] != (r[3] <= C3_Z)]
    print(f"{len(rows)} cliff points, step at deficit {C3_Z}")
    assert not wrong
    # both sides of the step are exercised
    assert any(r[4] for r in rows) and any(not r[4] for r in rows)


# -- 4 ----------------------------------------------------------------------------------

def test_criterion_04_parallel_permutations():
    rows, _ = campaign_4()
    for name, (p, r, every_run) in rows.items():
        print(f"{name:>14}: precision {p} recall {r} every run exact: {every_run}")
    assert all(p == 1 and r == 1 for p, r, _ in rows.values())


# -- 5 ----------------------------------------------------------------------------------

def test_criterion_05_exhaustive_pair_coverage():
    for N in range(1, C5_MAX_N + 1):
        nodes = [f"n{i}" for i in range(N)]
        want = N * (N - 1) // 2
        for K in range(1, N + 1):
            its = build_schedule(nodes, K)
            assert len(its) == math.ceil(N / K) + math.ceil(math.log2(K)) == expected_iterations(N, K)
            pairs = {frozenset(p) for it in its for p in it.pairs}
            assert sum(len(it.pairs) for it in its) == len(pairs) == want


@pytest.mark.parametrize("N,K,iterations", C5_INSTANCES)
def test_criterion_05_named_instances(N, K, iterations):
    got = len(build_schedule([f"n{i}" for i in range(1, N + 1)], K))
    print(f"N={N} K={K}: {got} iterations (expected {iterations})")
    assert got == iterations


# -- 6 ----------------------------------------------------------------------------------

def test_criterion_06_parallel_precision():
    serial_recall, rows, _ = campaign_6()
    for K, (p, r, its) in rows.items():
        print(f"K={K:>2}: precision {p} recall {float(r):.3f} iterations {its}")
    assert all(p == 1 for p, _, _ in rows.values())
    assert rows[1][1] == serial_recall
    assert max(C6_GROUP_SIZES) == C6_NODES - 1


# -- 7 ----------------------------------------------------------------------------------

def test_criterion_07_isolation():
    tallies = {
        2: campaign_2()[1],
        3: campaign_3()[1],
        4: campaign_4()[1],
        6: campaign_6()[2],
    }
    for c, (checked, bad) in tallies.items():
        print(f"criterion {c}: {checked} verdicts, {bad} isolation violations")
    assert all(checked > 0 for checked, _ in tallies.values())
    assert sum(bad for _, bad in tallies.values()) == 0


# -- 8 ----------------------------------------------------------------------------------

def test_criterion_08_noninterference():
    checks = [check_scenario(BlockScenario.random(s)) for s in C8_SEEDS]
    passed = sum(c.passed for c in checks)
    print(f"{len(checks)} scenarios, {passed} verifier passes, "
          f"{sum(c.identical for c in checks)} identical replays")
    assert [c.seed for c in checks if not c.agrees] == []


# -- 9 ----------------------------------------------------------------------------------

def test_criterion_09_baseline_metrics():
    t0 = time.perf_counter()
    er588 = [gen_er(C9_ER588["n"], C9_ER588["m"], s) for s in C9_SEEDS]
    c588 = statistics.fmean(nx.average_clustering(g) for g in er588)
    q588 = statistics.fmean(louvain(g, s).modularity for s, g in zip(C9_SEEDS, er588))
    c446 = statistics.fmean(nx.average_clustering(gen_er(C9_ER446["n"], C9_ER446["m"], s)) for s in C9_SEEDS)
    qba = statistics.fmean(louvain(gen_ba(C9_BA1025["n"], C9_BA1025["l"], s), s).modularity for s in C9_SEEDS)
    elapsed = time.perf_counter() - t0
    print(f"ER(588): clustering {c588:.4f} modularity {q588:.4f}; ER(446): clustering {c446:.4f}; "
          f"BA(1025): modularity {qba:.4f}; {elapsed:.1f}s")
    assert within(c588, C9_ER588["clustering"])
    assert within(q588, C9_ER588["modularity"])
    assert within(c446, C9_ER446["clustering"])
    assert within(qba, C9_BA1025["modularity"])
    assert elapsed < C9_SECONDS


# -- 10 ---------------------------------------------------------------------------------

def test_criterion_10_unit_pair_cost():
    assert account_cost(1).ether_cost == C10_UNIT
    assert account_cost(0).ether_cost == 0


def test_criterion_10_full_mesh_cost():
    cost = account_cost(full_mesh_pairs(C10_MESH_NODES)).ether_cost
    print(f"{full_mesh_pairs(C10_MESH_NODES)} pairs x {C10_UNIT} = {cost} ({float(cost)})")
    assert cost == C10_MESH_COST


# -- 11 ---------------------------------------------------------------------------------

DETERMINISM = """\
[scenario]
seed = 11
mode = parallel
group_size = 4
announce_fraction = 0.25
[topology]
model = ba
nodes = 14
avg_degree = 2
[measure]
y = 20
z = 32
retries = 2
[background]
rate = 2
duration = 10
[analysis]
runs = 2
[profile.small]
client = geth
l = 32
nodes = {nodes}
"""


def test_criterion_11_determinism(tmp_path):
    cfg = tmp_path / "s.ini"
    cfg.write_text(DETERMINISM.format(nodes=",".join(f"n{i}" for i in range(14))))
    outs = []
    for run in ("a", "b"):
        res = run_scenario(cfg, tmp_path / run)
        assert res.code == 0, res.message
        outs.append({n: (tmp_path / run / n).read_bytes() for n in ("report.json", "metrics.json", "trace.csv")})
    assert outs[0] == outs[1]
    assert len(outs[0]["trace.csv"].splitlines()) > 100
