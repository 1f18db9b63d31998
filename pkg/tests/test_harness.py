import logging
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from toposim.engine import CONNECTED, INCONCLUSIVE, NOT_DETECTED, EdgeVerdict, MeasureConfig, MeasurementReport
from toposim.harness import (
    EXIT_CONFIG, EXIT_INVARIANT, EXIT_OK, EXIT_PRECONDITION, BlockScenario, ConfigError, Scenario,
    ScoringError, ValidationScore, bench_speedup, check_scenario, inject_background, load_scenario,
    parse_scenario, run_scenario, score_report, sweep_recall_vs_futures, sweep_recall_vs_group,
)
from toposim.harness import pipeline
from toposim.mempool import GETH, PARITY
from toposim.netsim import SimNetwork, Topology, write_edge_list

SMALL = GETH.with_(L=16)

BASIC = """\
[scenario]
seed = 4
mode = parallel
group_size = 3

[topology]
model = er
nodes = 12
edges = 20

[measure]
y = 20
z = 16
retries = 1

[profile.tiny]
client = geth
l = 16
nodes = {nodes}
"""


def basic(**fmt):
    return BASIC.format(nodes=fmt.get("nodes", ",".join(f"n{i}" for i in range(12))))


def write(tmp_path, text, name="s.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def report_of(pairs):
    return MeasurementReport(edges=[EdgeVerdict(tuple(sorted(p)), v) for p, v in pairs])


# -- config ------------------------------------------------------------------------

def test_parse_basic_scenario():
    sc = parse_scenario(basic(), env={})
    assert (sc.seed, sc.mode, sc.group_size, sc.model, sc.nodes, sc.edges) == (4, "parallel", 3, "er", 12, 20)
    assert sc.measure.Y == 20 and sc.measure.Z == 16 and sc.measure.retries == 1
    assert sc.override_map["n3"].L == 16 and sc.override_map["n3"].client_name == "tiny"


def test_dotted_keys_equal_sections():
    a = parse_scenario("[scenario]\nlatency.lo_ms = 5\ntopology.file = g.txt\n", env={})
    b = parse_scenario("[scenario]\n[latency]\nlo_ms = 5\n[topology]\nfile = g.txt\n", env={})
    assert a == b and a.latency_lo_ms == 5


@pytest.mark.parametrize("text,line", [
    ("[scenario]\nseed = 1\nbogus = 2\n[topology]\nfile = g\n", 3),
    ("[scenario]\nseed = x\n[topology]\nfile = g\n", 2),
    ("[scenario]\nseed = 1\nthis line is broken\n", 3),
    ("[topology]\nfile = g\n[measure]\nz = -4\n", 3),
    ("[scenario]\nmode = diagonal\n[topology]\nfile = g\n", 2),
    ("[topology]\nmodel = er\nnodes = 5\n", None),
])
def test_config_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as err:
        parse_scenario(text, path="x.ini", env={})
    assert err.value.line == line
    if line:
        assert str(err.value).startswith(f"x.ini:{line}:")


def test_topology_source_must_be_unique():
    with pytest.raises(ConfigError, match="exactly one"):
        parse_scenario("[topology]\nfile = g\nmodel = er\nnodes = 3\nedges = 2\n", env={})
    with pytest.raises(ConfigError, match="exactly one"):
        parse_scenario("[scenario]\nseed = 1\n", env={})


def test_seed_env_overrides(tmp_path):
    p = write(tmp_path, basic())
    assert load_scenario(p, env={"TOPOSIM_SEED": "99"}).seed == 99
    assert load_scenario(p, env={}).seed == 4
    with pytest.raises(ConfigError):
        load_scenario(p, env={"TOPOSIM_SEED": "nine"})


def test_paths_resolve_against_config_dir(tmp_path):
    p = write(tmp_path, "[scenario]\noutput = res\n[topology]\nfile = g.txt\n")
    sc = load_scenario(p, env={})
    assert Path(sc.topology_file) == tmp_path / "g.txt" and Path(sc.output) == tmp_path / "res"


def test_bad_profile_section():
    with pytest.raises(ConfigError, match="profile.x"):
        parse_scenario("[topology]\nfile = g\n[profile.x]\nclient = geth\nr = -1\n", env={})


# -- background ------------------------------------------------------------------------

def _pair_net(profile=GETH):
    net = SimNetwork(Topology(["A", "B"], [("A", "B")]), profile, seed=2)
    net.attach_observer()
    return net


def test_zero_rate_injects_nothing():
    net = _pair_net()
    assert inject_background(net, 0, None, 100, Y=20) == []
    net.run_for(100)
    assert len(net.node("A").pool) == 0
    with pytest.raises(ValueError):
        inject_background(net, -1, None, 1, Y=20)


def test_background_fills_pools_and_enables_measurement():
    net = _pair_net()
    txs = inject_background(net, 1000, None, 4.5, Y=20)
    net.run_for(10)
    assert len(txs) == 4500 and len({t.sender for t in txs}) == 4500
    assert all(min(net.node(n).pool.pending_count, len(txs)) >= 4000 for n in "AB")
    assert all(Fraction(10) <= t.gas_price <= 100 for t in txs)
    from toposim.engine import measure_one_link
    v = measure_one_link(net, "A", "B", MeasureConfig(Y=20, Z=5120, retries=1))
    assert v.verdict == CONNECTED and v.checks["steps_confirmed"]


def test_background_above_Y_warns(caplog):
    with caplog.at_level(logging.WARNING):
        inject_background(_pair_net(), 1, (30, 40), 3, Y=20)
    assert "pool minimum" in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING):
        inject_background(_pair_net(), 1, (10, 40), 3, Y=20)
    assert caplog.text == ""


# -- scoring --------------------------------------------------------------------------

def _star(k):
    return Topology([f"x{i}" for i in range(k + 1)], [("x0", f"x{i}") for i in range(1, k + 1)])


def test_score_29_of_35():
    truth = _star(35)
    rep = report_of([(("x0", f"x{i}"), CONNECTED if i <= 29 else NOT_DETECTED) for i in range(1, 36)])
    s = score_report(rep, truth)
    assert (s.true_positives, s.false_positives, s.false_negatives) == (29, 0, 6)
    assert s.precision == 1 and s.recall == Fraction(29, 35) and round(float(s.recall), 3) == 0.829


def test_score_empty_and_exact_reports():
    truth = _star(4)
    empty = score_report(MeasurementReport(), truth)
    assert (empty.precision, empty.recall) == (1, 0)
    exact = score_report(report_of([(e, CONNECTED) for e in truth.edges]), truth)
    assert (exact.precision, exact.recall) == (1, 1)


def test_score_inconclusive_reported_apart():
    truth = _star(3)
    rep = report_of([(("x0", "x1"), CONNECTED), (("x0", "x2"), INCONCLUSIVE), (("x1", "x2"), CONNECTED)])
    s = score_report(rep, truth)
    assert s == ValidationScore(1, 1, 1, 1)
    assert s.as_dict()["inconclusive"] == 1


def test_score_rejects_foreign_pairs():
    with pytest.raises(ScoringError):
        score_report(report_of([(("x0", "zz"), CONNECTED)]), _star(2))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_score_matches_raw_recount(seed):
    rng = random.Random(seed)
    nodes = [f"v{i}" for i in range(rng.randint(2, 9))]
    pairs = [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:]]
    truth = Topology(nodes, [p for p in pairs if rng.random() < 0.4])
    verdicts = [(p, rng.choice((CONNECTED, NOT_DETECTED, INCONCLUSIVE))) for p in pairs if rng.random() < 0.8]
    s = score_report(report_of(verdicts), truth)
    tp = sum(v == CONNECTED and truth.has_edge(*p) for p, v in verdicts)
    fp = sum(v == CONNECTED and not truth.has_edge(*p) for p, v in verdicts)
    unsure = sum(v == INCONCLUSIVE and truth.has_edge(*p) for p, v in verdicts)
    inc = sum(v == INCONCLUSIVE for p, v in verdicts)
    fn = truth.number_of_edges() - tp - unsure
    assert (s.true_positives, s.false_positives, s.false_negatives, s.inconclusive) == (tp, fp, fn, inc)
    assert s.precision == (Fraction(tp, tp + fp) if tp + fp else 1)
    if tp + fn:
        assert s.recall == Fraction(tp, tp + fn)


# -- sweeps and bench ------------------------------------------------------------------

def _path_scenario(tmp_path, Ls):
    nodes = [f"t{i}" for i in range(len(Ls))]
    topo = Topology(nodes, list(zip(nodes, nodes[1:])))
    write_edge_list(topo, tmp_path / "path.txt")
    over = tuple((n, GETH.with_(L=L)) for n, L in zip(nodes, Ls))
    return Scenario(topology_file=str(tmp_path / "path.txt"), overrides=over,
                    measure=MeasureConfig(Y=20, Z=5120, retries=1), trace=False)


def test_futures_sweep_uniform_step(tmp_path):
    sc = _path_scenario(tmp_path, [5120] * 3)
    curve = sweep_recall_vs_futures(sc, [3120, 4120, 5120, 9120])
    assert [r for _, r in curve] == [0, 0, 1, 1]


def test_futures_sweep_mixed_staircase(tmp_path):
    # path edges have max-L 5120, 6120, 9120
    sc = _path_scenario(tmp_path, [5120, 5120, 6120, 9120])
    curve = [r for _, r in sweep_recall_vs_futures(sc, [3120, 5120, 6120, 9120])]
    assert curve == [0, Fraction(1, 3), Fraction(2, 3), 1]
    assert all(a < b for a, b in zip(curve, curve[1:]))


def _group_scenario(**kw):
    base = dict(model="er", nodes=16, edges=30, seed=3, default_profile=GETH.with_(L=64),
                measure=MeasureConfig(Y=20, Z=64, retries=1, slot_budget=32), trace=False)
    base.update(kw)
    return Scenario(**base)


def test_group_sweep_precision_and_degenerate_K():
    sc = _group_scenario()
    serial = pipeline.run_validation(sc).score
    curve = sweep_recall_vs_group(sc.with_(mode="parallel"), [1, 2, 4, 8, 16])
    assert all(p == 1 for _, p, _ in curve)
    assert curve[0][2] == serial.recall == 1
    assert all(r == 1 for _, _, r in curve)


def test_bench_iteration_counts_and_sim_time(tmp_path):
    rows = bench_speedup(_group_scenario(nodes=12, edges=20), [1, 3, 12])
    assert [r["iterations"] for r in rows] == [12, 4 + 2, 1 + 4]
    times = [r["sim_time"] for r in rows]
    assert times == sorted(times, reverse=True)
    assert all(r["precision"] == "1" for r in rows)


# -- run_scenario -------------------------------------------------------------------------

def test_run_scenario_writes_artifacts(tmp_path):
    res = run_scenario(write(tmp_path, basic()), tmp_path / "out")
    assert res.code == EXIT_OK, res.message
    assert set(res.artifacts) == {"report.json", "metrics.json", "communities.csv", "edges.csv",
                                  "topology.dot", "exclusions.txt", "trace.csv"}
    assert (tmp_path / "out" / "trace.csv").read_text().startswith("time,kind,from,to,tx_id\n")


def test_run_scenario_is_byte_identical(tmp_path):
    p = write(tmp_path, basic())
    run_scenario(p, tmp_path / "a")
    run_scenario(p, tmp_path / "b")
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes(), f.name


def test_exit_code_config(tmp_path):
    res = run_scenario(write(tmp_path, "[scenario]\nseed = 1\nwhat = 3\n"))
    assert res.code == EXIT_CONFIG and ":3:" in res.message
    assert run_scenario(tmp_path / "missing.ini").code == EXIT_CONFIG
    res = run_scenario(write(tmp_path, basic(nodes="n0,nowhere")), tmp_path / "o")
    assert res.code == EXIT_CONFIG


def test_exit_code_precondition(tmp_path):
    (tmp_path / "g.txt").write_text("a,b\nc,d\n")
    res = run_scenario(write(tmp_path, "[topology]\nfile = g.txt\n"), tmp_path / "o")
    assert res.code == EXIT_PRECONDITION
    p = write(tmp_path, "[scenario]\ndefault_profile = nethermind\n[topology]\nmodel = er\nnodes = 4\nedges = 4\n", "n.ini")
    assert run_scenario(p, tmp_path / "o2").code == EXIT_PRECONDITION


def test_exit_code_invariant_breach_writes_trace(tmp_path, monkeypatch):
    real = pipeline.run_validation

    def tampered(sc, **kw):
        v = real(sc, **kw)
        object.__setattr__(v, "score", ValidationScore(v.score.true_positives, 1, v.score.false_negatives))
        return v

    monkeypatch.setattr(pipeline, "run_validation", tampered)
    res = run_scenario(write(tmp_path, basic()), tmp_path / "o")
    assert res.code == EXIT_INVARIANT
    assert set(res.artifacts) == {"trace.csv"}


def test_preprocess_in_pipeline(tmp_path):
    text = basic(nodes="n0,n1") + "\n[profile.fwd]\nclient = geth\nl = 16\nforwards_futures = true\nnodes = n5\n"
    text = text.replace("[scenario]\n", "[scenario]\npreprocess = true\n").replace("mode = parallel", "mode = serial")
    text = text.replace("[measure]\n", "[measure]\nx = 5\n")
    text = text.replace("default_profile", "x")
    p = write(tmp_path, text.replace("[scenario]\n", "[scenario]\ndefault_profile = geth\n") )
    sc = load_scenario(p, env={}).with_(default_profile=SMALL)
    res = run_scenario(sc, tmp_path / "o")
    assert res.code == EXIT_OK, res.message
    assert (tmp_path / "o" / "exclusions.txt").read_text() == "n5 FWD_FUTURE\n"


def test_unsupported_profile_constant():
    assert PARITY.R > 0


# -- non-interference at desk scale -------------------------------------------------------

@pytest.mark.parametrize("seed", range(10))
def test_verifier_agrees_with_replay(seed):
    assert check_scenario(BlockScenario.random(seed)).agrees


def test_tx_C_price_floor_is_unsound():
    # futures priced (1+R)Y push out background entries priced between Y
    # and (1+R)Y, yet blocks stay full and above Y
    sc = BlockScenario(seed=16, bg_prices=(20, 23), bg_rate=4.0, block_capacity=2)
    weak = check_scenario(sc, Y0=20)
    assert weak.passed and not weak.identical
    strict = check_scenario(sc)
    assert strict.agrees or not strict.passed
