"""Undirected ground-truth overlay."""

from __future__ import annotations

from collections import deque
from pathlib import Path
from typing import Iterable, Iterator


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


class Topology:
    """Node set plus a set of unordered edges (stored as sorted pairs)."""

    def __init__(self, nodes: Iterable[str] = (), edges: Iterable[tuple[str, str]] = ()):
        self._adj: dict[str, set[str]] = {}
        for n in nodes:
            self.add_node(n)
        for a, b in edges:
            self.add_edge(a, b)

    def add_node(self, n: str) -> None:
        if not isinstance(n, str) or not n:
            raise ValueError(f"node ids must be non-empty strings, got {n!r}")
        self._adj.setdefault(n, set())

    def add_edge(self, a: str, b: str) -> None:
        if a == b:
            raise ValueError(f"self-loop on {a!r}")
        self.add_node(a)
        self.add_node(b)
        self._adj[a].add(b)
        self._adj[b].add(a)

    @property
    def nodes(self) -> list[str]:
        return sorted(self._adj)

    @property
    def edges(self) -> set[tuple[str, str]]:
        return {edge_key(a, b) for a, nbrs in self._adj.items() for b in nbrs if a < b}

    def neighbors(self, n: str) -> set[str]:
        return self._adj[n]

    def has_edge(self, a: str, b: str) -> bool:
        return b in self._adj.get(a, ())

    def degree(self, n: str) -> int:
        return len(self._adj[n])

    def __contains__(self, n: object) -> bool:
        return n in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)

    def number_of_edges(self) -> int:
        return sum(len(v) for v in self._adj.values()) // 2

    def bfs_depths(self, source: str) -> dict[str, int]:
        depth = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for v in self._adj[u]:
                if v not in depth:
                    depth[v] = depth[u] + 1
                    queue.append(v)
        return depth

    def is_connected(self) -> bool:
        if not self._adj:
            return True
        return len(self.bfs_depths(next(iter(self._adj)))) == len(self._adj)

    def pairs(self) -> Iterator[tuple[str, str]]:
        ns = self.nodes
        for i, a in enumerate(ns):
            for b in ns[i + 1:]:
                yield a, b


def read_edge_list(path: str | Path) -> Topology:
    """One ``node_a,node_b`` per line; blank lines and ``#`` comments skipped.

    A line with a single token declares an isolated node.
    """
    topo = Topology()
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        try:
            if len(parts) == 1:
                topo.add_node(parts[0])
            elif len(parts) == 2:
                topo.add_edge(parts[0], parts[1])
            else:
                raise ValueError("expected node_a,node_b")
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from None
    return topo


def write_edge_list(topo: Topology, path: str | Path) -> None:
    lines = [f"{a},{b}" for a, b in sorted(topo.edges)]
    lines += [n for n in topo.nodes if topo.degree(n) == 0]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
