import itertools
import math
import statistics

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from toposim.graphs import (
    UNDEFINED, CliqueGuardExceeded, average_metrics, compare_baselines, count_maximal_cliques,
    degree_tv_distance, from_topology, gen_ba, gen_cm, gen_er, louvain, maximal_cliques, metrics,
    read_graph, table_json, to_dot, to_topology, write_graph,
)


def test_triangle_metrics():
    m = metrics(nx.complete_graph(3))
    assert (m.clustering_coefficient, m.transitivity, m.diameter, m.radius) == (1, 1, 1, 1)


def test_path_metrics():
    m = metrics(nx.path_graph(3))
    assert m.transitivity == 0
    assert m.diameter == 2
    assert m.center_size == 1
    assert m.periphery_size == 2
    assert m.mean_eccentricity == pytest.approx(5 / 3)


def test_cycle_assortativity_undefined():
    m = metrics(nx.cycle_graph(4))
    assert m.degree_assortativity is None
    assert m.as_dict()["Degree assortativity"] == UNDEFINED


def test_assortativity_star_is_minus_one():
    m = metrics(nx.star_graph(5))
    assert m.degree_assortativity == pytest.approx(-1.0)


def test_disconnected_uses_largest_component():
    g = nx.disjoint_union(nx.path_graph(5), nx.complete_graph(2))
    m = metrics(g)
    assert m.diameter == 4
    assert m.component_coverage == pytest.approx(5 / 7)


def test_empty_graph_rejected():
    with pytest.raises(ValueError):
        metrics(nx.Graph())


def test_metrics_json_row_labels():
    doc = metrics(nx.complete_graph(4)).as_dict()
    for key in ("Diameter", "Periphery size", "Radius", "Center size", "Eccentricity",
                "Clustering coefficient", "Transitivity", "Degree assortativity", "Clique number", "Modularity"):
        assert key in doc
    assert "maximal cliques" in doc["note"]


# cliques

def _brute_maximal_cliques(g):
    nodes = list(g)
    cliques = [set(c) for r in range(1, len(nodes) + 1) for c in itertools.combinations(nodes, r)
               if all(g.has_edge(a, b) for a, b in itertools.combinations(c, 2))]
    return {frozenset(c) for c in cliques if not any(c < d for d in cliques)}


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.floats(0, 1), st.integers(0, 10**6))
def test_bron_kerbosch_matches_brute_force(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    assert {frozenset(c) for c in maximal_cliques(g)} == _brute_maximal_cliques(g)


def test_clique_counts_small():
    assert count_maximal_cliques(nx.complete_graph(6)) == 1
    assert count_maximal_cliques(nx.path_graph(4)) == 3
    assert count_maximal_cliques(nx.empty_graph(3)) == 3
    assert count_maximal_cliques(nx.Graph()) == 0


def test_clique_guard():
    g = gen_er(60, 900, 1)
    with pytest.raises(CliqueGuardExceeded):
        count_maximal_cliques(g, max_steps=10)
    assert metrics(g, clique_guard=10).clique_count is None


# communities

def _two_cliques():
    g = nx.disjoint_union(nx.complete_graph(5), nx.complete_graph(5))
    g.add_edge(4, 5)
    return g


def test_louvain_two_cliques_matches_exhaustive_optimum():
    g = _two_cliques()
    p = louvain(g, seed=0)
    assert p.count == 2
    best = -1.0
    nodes = list(g)
    for mask in range(1, 2 ** (len(nodes) - 1)):
        a = {n for i, n in enumerate(nodes) if mask >> i & 1}
        best = max(best, nx.community.modularity(g, [a, set(nodes) - a]))
    assert p.modularity == pytest.approx(best, abs=1e-12)


def test_louvain_complete_graph_single_community():
    p = louvain(nx.complete_graph(8), seed=3)
    assert p.count == 1
    assert p.modularity == pytest.approx(0.0, abs=1e-12)


def test_partition_bookkeeping_and_csv():
    p = louvain(_two_cliques(), seed=0)
    assert p.sizes == (5, 5)
    assert p.intra_edges == (10, 10)
    assert p.inter_edges == (1, 1)
    assert p.densities == (1.0, 1.0)
    assert set(p.assignment) == set(range(10))
    lines = p.to_csv().splitlines()
    assert lines[0] == "community,size,intra_edges,intra_density,inter_edges"
    assert lines[1] == "0,5,10,1.000000,1"


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 30), st.floats(0.05, 0.9), st.integers(0, 10**6))
def test_louvain_properties(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    part = louvain(g, seed)
    assert sum(part.sizes) == n
    assert sum(part.intra_edges) + sum(part.inter_edges) // 2 == g.number_of_edges()
    assert -0.5 <= part.modularity <= 1
    if g.number_of_edges():
        assert part.modularity >= -1e-12
    assert louvain(g, seed) == part


# generators

def test_gen_er_exact_edges_and_extremes():
    g = gen_er(50, 123, 4)
    assert (g.number_of_nodes(), g.number_of_edges()) == (50, 123)
    assert gen_er(10, 0, 0).number_of_edges() == 0
    assert metrics(gen_er(10, 0, 0)).clustering_coefficient == 0
    assert gen_er(7, 21, 0).number_of_edges() == 21
    with pytest.raises(ValueError):
        gen_er(7, 22, 0)


@pytest.mark.parametrize("n,m", [(100, 500), (588, 7496)])
def test_er_clustering_matches_density(n, m):
    vals = [nx.average_clustering(gen_er(n, m, s)) for s in range(10)]
    density = m / math.comb(n, 2)
    se = statistics.stdev(vals) / math.sqrt(len(vals))
    assert abs(statistics.mean(vals) - density) <= 3 * se


@pytest.mark.parametrize("seed", range(10))
def test_gen_cm_two_regular_is_union_of_cycles(seed):
    g = gen_cm([2] * 10, seed)
    assert g.graph["degree_shortfall"] == 0
    assert all(d == 2 for _, d in g.degree())
    assert all(len(c) >= 3 for c in nx.connected_components(g))


def test_gen_cm_without_repair_reports_losses():
    seq = [d for _, d in gen_ba(200, 10, 0).degree()]
    g = gen_cm(seq, 0, repair=False)
    lost = g.graph["self_loops_removed"] + g.graph["multi_edges_removed"]
    assert lost > 0
    assert g.graph["degree_shortfall"] == sum(seq) - 2 * g.number_of_edges() == 2 * lost
    assert nx.number_of_selfloops(g) == 0


def test_gen_cm_infeasible_pair_reports_shortfall():
    g = gen_cm([3, 1], 0)
    assert g.number_of_edges() == 1
    assert g.graph["degree_shortfall"] == 2
    with pytest.raises(ValueError):
        gen_cm([3, 2], 0)


def test_gen_cm_preserves_degree_histogram():
    for src in (gen_ba(588, 13, 1), gen_ba(1025, 36, 2), gen_er(588, 7496, 3)):
        seq = [d for _, d in src.degree()]
        for seed in range(3):
            assert degree_tv_distance(seq, gen_cm(seq, seed)) <= 0.02


def test_gen_ba_small_tree_and_errors():
    g = gen_ba(5, 1, 0)
    assert g.number_of_edges() == 4 and nx.is_tree(g)
    assert gen_ba(5, 2, 0, halve=True).number_of_edges() == 4
    with pytest.raises(ValueError):
        gen_ba(3, 3, 0)


def test_ba_assortativity_near_published():
    vals = [metrics(gen_ba(588, 26, s)).degree_assortativity for s in range(3)]
    assert abs(statistics.mean(vals) - -0.0181) <= 0.02


# baselines

def test_compare_baselines_measured_column_self_consistent():
    g = gen_er(40, 120, 2)
    table = compare_baselines(g, runs=2, seed=5)
    assert set(table) == {"measured", "er", "cm", "ba"}
    assert table["measured"] == metrics(g, 2, 5)
    assert table["er"].m == 120


def test_average_metrics_handles_undefined():
    a = metrics(nx.cycle_graph(5))
    b = metrics(nx.star_graph(4))
    avg = average_metrics([a, b])
    assert avg.degree_assortativity == pytest.approx(-1.0)
    assert avg.diameter == pytest.approx((2 + 2) / 2)


def test_determinism_graphs_and_metrics():
    assert nx.utils.graphs_equal(gen_ba(80, 4, 9), gen_ba(80, 4, 9))
    a = table_json(compare_baselines(gen_er(30, 60, 1), runs=2, seed=1))
    b = table_json(compare_baselines(gen_er(30, 60, 1), runs=2, seed=1))
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 25), st.floats(0.1, 1), st.integers(0, 10**6))
def test_metric_sanity(n, p, seed):
    g = nx.gnp_random_graph(n, p, seed=seed)
    if not nx.is_connected(g):
        return
    m = metrics(g, 1, seed)
    assert m.radius <= m.mean_eccentricity <= m.diameter <= 2 * m.radius
    assert 0 <= m.clustering_coefficient <= 1 and 0 <= m.transitivity <= 1
    assert m.periphery_size <= n and m.center_size <= n


# io

def test_edge_list_round_trip_and_dot(tmp_path):
    g = gen_er(12, 20, 3)
    g.add_node(99)
    path = tmp_path / "g.csv"
    write_graph(g, path)
    h = read_graph(path)
    assert to_topology(h).edges == to_topology(g).edges
    assert set(h) == {str(n) for n in g}
    dot = to_dot(h)
    assert dot.startswith('graph "topology" {') and dot.count(" -- ") == 20
    assert from_topology(to_topology(g)).number_of_edges() == 20
