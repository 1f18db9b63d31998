"""Random-graph baselines: G(n, m), configuration model, preferential attachment."""

from __future__ import annotations

import math
import random
from collections import Counter
from typing import Sequence

import networkx as nx


def gen_er(n: int, m: int, seed: int) -> nx.Graph:
    """Uniform simple graph with exactly n nodes and m edges."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 0 <= m <= n * (n - 1) // 2:
        raise ValueError(f"m={m} outside [0, C({n}, 2)]")
    return nx.gnm_random_graph(n, m, seed=seed)


def gen_cm(degree_sequence: Sequence[int], seed: int, *, repair: bool = True) -> nx.Graph:
    """Configuration model collapsed to a simple graph.

    ``g.graph`` records ``self_loops_removed``, ``multi_edges_removed`` and
    ``degree_shortfall`` (stubs still missing at the end).  Stubs lost to
    the simplification are re-wired by ``_repair_stubs`` unless
    ``repair=False``, so the degree sequence is kept wherever that is
    feasible.
    """
    seq = [int(d) for d in degree_sequence]
    if any(d < 0 for d in seq):
        raise ValueError("degrees must be non-negative")
    if sum(seq) % 2:
        raise ValueError(f"degree sum {sum(seq)} is odd")
    multi = nx.configuration_model(seq, seed=seed)
    loops = nx.number_of_selfloops(multi)
    g = nx.Graph(multi)
    g.remove_edges_from(list(nx.selfloop_edges(g)))
    g.graph.update(
        self_loops_removed=loops,
        multi_edges_removed=multi.number_of_edges() - loops - g.number_of_edges(),
    )
    if repair:
        _repair_stubs(g, dict(enumerate(seq)), random.Random(seed))
    g.graph["degree_shortfall"] = sum(seq) - 2 * g.number_of_edges()
    return g


def _repair_stubs(g: nx.Graph, target: dict[int, int], rng: random.Random, tries: int = 50) -> None:
    """Re-attach stubs dropped by simplification, keeping the graph simple.

    Two open stubs u, v are joined directly when u != v and u, v are not yet
    adjacent.  Otherwise a random edge (x, y) is split into (u, x), (v, y),
    which keeps the degrees of x and y.
    """
    stubs = [u for u, d in target.items() for _ in range(d - g.degree(u))]
    rng.shuffle(stubs)
    while len(stubs) >= 2:
        u = stubs.pop()
        partner = next((i for i in range(len(stubs) - 1, -1, -1)
                        if stubs[i] != u and not g.has_edge(u, stubs[i])), None)
        if partner is not None:
            g.add_edge(u, stubs.pop(partner))
            continue
        v = stubs.pop()
        edges = list(g.edges())
        for _ in range(tries if edges else 0):
            x, y = rng.choice(edges)
            if rng.random() < 0.5:
                x, y = y, x
            if len({u, v, x, y}) == 4 and not g.has_edge(u, x) and not g.has_edge(v, y):
                g.remove_edge(x, y)
                g.add_edge(u, x)
                g.add_edge(v, y)
                break
            if u == v and u not in (x, y) and not g.has_edge(u, x) and not g.has_edge(u, y):
                g.remove_edge(x, y)
                g.add_edge(u, x)
                g.add_edge(u, y)
                break


def gen_ba(n: int, avg_degree: int, seed: int, *, halve: bool = False) -> nx.Graph:
    """Barabasi-Albert graph with attachment count ``avg_degree``.

    The published baseline columns are reproduced with the attachment count
    set to l' itself; ``halve=True`` uses round(l'/2) instead, which matches
    the stated average degree.
    """
    m = max(1, round(avg_degree / 2)) if halve else int(avg_degree)
    if m < 1 or n <= m:
        raise ValueError(f"need 1 <= attachment ({m}) < n ({n})")
    return nx.barabasi_albert_graph(n, m, seed=seed)


def degree_tv_distance(expected: Sequence[int], g: nx.Graph) -> float:
    """Total-variation distance between the input degree histogram and g's."""
    a = Counter(int(d) for d in expected)
    b = Counter(d for _, d in g.degree())
    total_a, total_b = sum(a.values()), sum(b.values())
    if not total_a or not total_b:
        return 0.0 if total_a == total_b else 1.0
    keys = set(a) | set(b)
    return 0.5 * math.fsum(abs(a[k] / total_a - b[k] / total_b) for k in keys)
