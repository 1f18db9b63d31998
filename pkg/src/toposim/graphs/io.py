from __future__ import annotations

from pathlib import Path
from typing import Union

import networkx as nx

from ..netsim import Topology, read_edge_list, write_edge_list


def to_topology(g: nx.Graph) -> Topology:
    return Topology((str(n) for n in g.nodes()), ((str(a), str(b)) for a, b in g.edges()))


def from_topology(topo: Topology) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(topo.nodes)
    g.add_edges_from(sorted(topo.edges))
    return g


def read_graph(path: Union[str, Path]) -> nx.Graph:
    return from_topology(read_edge_list(path))


def write_graph(g: nx.Graph, path: Union[str, Path]) -> None:
    write_edge_list(to_topology(g), path)


def to_dot(g: nx.Graph, name: str = "topology") -> str:
    topo = to_topology(g)
    lines = [f'graph "{name}" {{']
    lines += [f'  "{n}";' for n in topo.nodes]
    lines += [f'  "{a}" -- "{b}";' for a, b in sorted(topo.edges)]
    lines.append("}")
    return "\n".join(lines) + "\n"
