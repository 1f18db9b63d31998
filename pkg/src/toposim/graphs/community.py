from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Hashable

import networkx as nx


@dataclass(frozen=True)
class CommunityPartition:
    assignment: dict[Hashable, int]
    sizes: tuple[int, ...]
    intra_edges: tuple[int, ...]
    inter_edges: tuple[int, ...]
    modularity: float

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def densities(self) -> tuple[float, ...]:
        """Intra edges over C(size, 2); a singleton has density 0."""
        return tuple(e / (s * (s - 1) // 2) if s > 1 else 0.0 for s, e in zip(self.sizes, self.intra_edges))

    def communities(self) -> list[set[Hashable]]:
        out: list[set[Hashable]] = [set() for _ in self.sizes]
        for node, c in self.assignment.items():
            out[c].add(node)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["community", "size", "intra_edges", "intra_density", "inter_edges"])
        for i, (s, a, d, b) in enumerate(zip(self.sizes, self.intra_edges, self.densities, self.inter_edges)):
            w.writerow([i, s, a, f"{d:.6f}", b])
        return buf.getvalue()


def partition_from(g: nx.Graph, communities) -> CommunityPartition:
    """Index communities by decreasing size, then by smallest member."""
    groups = sorted((sorted(c, key=str) for c in communities), key=lambda c: (-len(c), str(c[0])))
    assignment = {n: i for i, c in enumerate(groups) for n in c}
    if set(assignment) != set(g) or len(assignment) != g.number_of_nodes():
        raise ValueError("communities must partition the node set")
    intra = [0] * len(groups)
    inter = [0] * len(groups)
    for u, v in g.edges():
        cu, cv = assignment[u], assignment[v]
        if cu == cv:
            intra[cu] += 1
        else:
            inter[cu] += 1
            inter[cv] += 1
    q = nx.community.modularity(g, groups) if g.number_of_edges() else 0.0
    return CommunityPartition(assignment, tuple(len(c) for c in groups), tuple(intra), tuple(inter), q)


def louvain(g: nx.Graph, seed: int) -> CommunityPartition:
    if g.number_of_nodes() == 0:
        raise ValueError("empty graph")
    return partition_from(g, nx.community.louvain_communities(g, seed=seed))


def best_louvain(g: nx.Graph, runs: int, seed: int) -> CommunityPartition:
    """Highest-modularity partition over ``runs`` seeds (seed, seed+1, ...)."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    best = None
    for i in range(runs):
        p = louvain(g, seed + i)
        if best is None or p.modularity > best.modularity:
            best = p
    return best
