"""End-to-end scenario runs: topology, load, preprocessing, measurement, scoring, export."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

import networkx as nx

from ..engine import (
    CONNECTED, CalibrationError, EstimationError, MeasurementError, MeasurementReport, UnsupportedClient,
    account_cost, expected_iterations, preprocess_targets, schedule_network, serial_network,
)
from ..graphs import compare_baselines, gen_ba, gen_cm, gen_er, louvain, metrics, table_json, to_dot, to_topology
from ..netsim import LatencyModel, SimNetwork, Topology, read_edge_list, write_edge_list
from .background import inject_background
from .config import ConfigError, Scenario, load_scenario
from .validation import ValidationScore, score_report

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_INVARIANT = 0, 2, 3, 4


class PreconditionFailure(Exception):
    pass


class InvariantBreach(Exception):
    pass


def relabel(g: nx.Graph) -> Topology:
    return to_topology(nx.relabel_nodes(g, {n: f"n{n}" for n in g}))


def build_topology(sc: Scenario) -> Topology:
    if sc.topology_file:
        try:
            return read_edge_list(sc.topology_file)
        except OSError as exc:
            raise ConfigError(f"topology.file: {exc.strerror}: {sc.topology_file}") from None
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    try:
        if sc.model == "er":
            return relabel(gen_er(sc.nodes, sc.edges, sc.seed))
        if sc.model == "ba":
            return relabel(gen_ba(sc.nodes, sc.avg_degree, sc.seed))
        return relabel(gen_cm(sc.degree_seq, sc.seed))
    except ValueError as exc:
        raise ConfigError(f"topology: {exc}") from None


def build_network(sc: Scenario, topo: Topology, *, trace: Optional[bool] = None) -> SimNetwork:
    unknown = sorted(n for n, _ in sc.overrides if n not in topo)
    if unknown:
        raise ConfigError(f"profile override for unknown node {unknown[0]}")
    lat = LatencyModel(sc.latency_lo_ms / 1000, sc.latency_hi_ms / 1000, seed=sc.seed)
    net = SimNetwork(topo, sc.default_profile, overrides=sc.override_map, latency=lat, seed=sc.seed,
                     announce_fraction=sc.announce_fraction, trace=sc.trace if trace is None else trace)
    net.attach_observer()
    return net


def load_background(sc: Scenario, net: SimNetwork) -> list:
    if sc.bg_rate <= 0 or sc.bg_duration <= 0:
        return []
    prices = None if sc.bg_price_lo is None else (sc.bg_price_lo, sc.bg_price_hi)
    txs = inject_background(net, sc.bg_rate, prices, sc.bg_duration, Y=sc.measure.Y, seed=sc.seed)
    net.run_for(sc.bg_duration + sc.measure.X)
    return txs


@dataclass
class Validation:
    report: MeasurementReport
    score: ValidationScore
    nodes: list[str]
    exclusions: dict[str, str] = field(default_factory=dict)
    net: Optional[SimNetwork] = None


def run_validation(sc: Scenario, *, trace: Optional[bool] = None, topo: Optional[Topology] = None) -> Validation:
    """Measure the scenario's network and score it against the ground truth."""
    topo = topo or build_topology(sc)
    if len(topo) < 2:
        raise PreconditionFailure("need at least two nodes")
    if not topo.is_connected():
        raise PreconditionFailure("ground-truth topology is not connected")
    net = build_network(sc, topo, trace=trace)
    load_background(sc, net)
    cfg = sc.measure
    nodes = topo.nodes
    configs, exclusions = {}, {}
    if sc.preprocess:
        pre = preprocess_targets(net, nodes, cfg)
        configs, exclusions = pre.configs, pre.exclusions
        nodes = [n for n in nodes if n not in exclusions]
    try:
        if sc.mode == "serial":
            report = serial_network(net, nodes, cfg, configs=configs)
        else:
            z = max([cfg.Z] + [c.Z for c in configs.values()])
            report = schedule_network(net, nodes, sc.group_size, cfg.with_(Z=z))
    except (UnsupportedClient, MeasurementError) as exc:
        raise PreconditionFailure(str(exc)) from exc
    kept = set(nodes)
    truth_edges = {e for e in topo.edges if e[0] in kept and e[1] in kept}
    score = score_report(report, topo, true_edges=truth_edges)
    report.precision, report.recall = score.precision, score.recall
    report.cost = account_cost(report)
    return Validation(report, score, list(nodes), exclusions, net)


def sweep_recall_vs_futures(sc: Scenario, z_values: Sequence[int]) -> list[tuple[int, Fraction]]:
    topo = build_topology(sc)
    return [(z, run_validation(sc.with_(measure=sc.measure.with_(Z=z)), trace=False, topo=topo).score.recall)
            for z in z_values]


def sweep_recall_vs_group(sc: Scenario, k_values: Sequence[int]) -> list[tuple[int, Fraction, Fraction]]:
    topo = build_topology(sc)
    out = []
    for k in k_values:
        mode = {"mode": "serial"} if k == 1 and sc.mode == "serial" else {"mode": "parallel", "group_size": k}
        s = run_validation(sc.with_(**mode), trace=False, topo=topo).score
        out.append((k, s.precision, s.recall))
    return out


def bench_speedup(sc: Scenario, k_values: Sequence[int]) -> list[dict]:
    topo = build_topology(sc)
    rows = []
    for k in k_values:
        t0 = time.perf_counter()
        v = run_validation(sc.with_(mode="parallel", group_size=k), trace=False, topo=topo)
        host = time.perf_counter() - t0
        its = len(v.report.iterations)
        if its != expected_iterations(len(v.nodes), k):
            raise InvariantBreach(f"K={k}: {its} iterations, expected {expected_iterations(len(v.nodes), k)}")
        rows.append({
            "K": k,
            "iterations": its,
            "sim_time": round(sum(i["sim_seconds"] for i in v.report.iterations), 6),
            "host_time": round(host, 3),
            "precision": str(v.score.precision),
            "recall": str(v.score.recall),
        })
    return rows


def inferred_graph(v: Validation) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(sorted(v.nodes))
    g.add_edges_from(sorted(e.pair for e in v.report.edges if e.verdict == CONNECTED))
    return g


def report_document(sc: Scenario, v: Validation) -> dict:
    doc = v.report.as_dict()
    doc["validation"] = v.score.as_dict()
    doc["exclusions"] = dict(sorted(v.exclusions.items()))
    doc["scenario"] = {k: val for k, val in sc.echo().items() if k not in ("output", "topology_file")}
    return doc


@dataclass
class RunResult:
    code: int
    message: str = ""
    artifacts: dict[str, str] = field(default_factory=dict)


def _write(out: Path, name: str, text: str, artifacts: dict) -> None:
    path = out / name
    path.write_text(text)
    artifacts[name] = str(path)


def execute(sc: Scenario, out_dir: Optional[Union[str, Path]] = None) -> RunResult:
    out = Path(out_dir or sc.output)
    out.mkdir(parents=True, exist_ok=True)
    artifacts: dict[str, str] = {}
    v = None
    try:
        v = run_validation(sc)
        if v.score.false_positives:
            raise InvariantBreach(f"{v.score.false_positives} false positive verdict(s)")
        if sc.mode == "serial":
            leaks = [e.pair for e in v.report.edges if not e.checks.get("isolation", True)]
            if leaks:
                raise InvariantBreach(f"tx_A left its targets while measuring {leaks[0]}")
    except PreconditionFailure as exc:
        return RunResult(EXIT_PRECONDITION, f"precondition failure: {exc}", artifacts)
    except InvariantBreach as exc:
        if v is not None and v.net is not None and v.net.trace is not None:
            _write(out, "trace.csv", "time,kind,from,to,tx_id\n" + v.net.trace_text(), artifacts)
        return RunResult(EXIT_INVARIANT, f"invariant breach: {exc}", artifacts)

    g = inferred_graph(v)
    _write(out, "report.json", json.dumps(report_document(sc, v), sort_keys=True, indent=2) + "\n", artifacts)
    if g.number_of_nodes():
        table = (compare_baselines(g, sc.analysis_runs, sc.seed, models=sc.baselines or ("er", "cm", "ba"))
                 if sc.analysis_runs else {"measured": metrics(g, 1, sc.seed)})
        _write(out, "metrics.json", table_json(table), artifacts)
        if g.number_of_edges():
            _write(out, "communities.csv", louvain(g, sc.seed).to_csv(), artifacts)
    edges_path = out / "edges.csv"
    write_edge_list(to_topology(g), edges_path)
    artifacts["edges.csv"] = str(edges_path)
    _write(out, "topology.dot", to_dot(g, "inferred"), artifacts)
    _write(out, "exclusions.txt", "".join(f"{n} {r}\n" for n, r in sorted(v.exclusions.items())), artifacts)
    if v.net.trace is not None:
        _write(out, "trace.csv", "time,kind,from,to,tx_id\n" + v.net.trace_text(), artifacts)
    s = v.score
    return RunResult(EXIT_OK, f"precision {s.precision} recall {s.recall} over {len(v.report.edges)} pairs", artifacts)


def run_scenario(path: Union[str, Path, Scenario], out_dir: Optional[Union[str, Path]] = None) -> RunResult:
    """Load, run and export; every failure maps to one exit code."""
    try:
        sc = path if isinstance(path, Scenario) else load_scenario(path)
        return execute(sc, out_dir)
    except ConfigError as exc:
        return RunResult(EXIT_CONFIG, f"config error: {exc}")
    except (CalibrationError, EstimationError) as exc:
        return RunResult(EXIT_PRECONDITION, f"precondition failure: {exc}")
