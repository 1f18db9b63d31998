"""Distance, clustering, assortativity, clique and community statistics."""

from __future__ import annotations

import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field, fields
from typing import Optional, Sequence

import networkx as nx

from .cliques import DEFAULT_STEP_GUARD, CliqueGuardExceeded, count_maximal_cliques
from .community import best_louvain
from .generators import gen_ba, gen_cm, gen_er

UNDEFINED = "undefined"

# field name -> row label in the metrics table
ROW_LABELS = {
    "diameter": "Diameter",
    "periphery_size": "Periphery size",
    "radius": "Radius",
    "center_size": "Center size",
    "mean_eccentricity": "Eccentricity",
    "clustering_coefficient": "Clustering coefficient",
    "transitivity": "Transitivity",
    "degree_assortativity": "Degree assortativity",
    "clique_count": "Clique number",
    "modularity": "Modularity",
}
CLIQUE_NOTE = "Clique number is the count of maximal cliques, averaged over runs"


@dataclass
class GraphMetrics:
    n: int
    m: int
    diameter: float
    radius: float
    periphery_size: float
    center_size: float
    mean_eccentricity: float
    clustering_coefficient: float
    transitivity: float
    degree_assortativity: Optional[float]  # None when undefined
    clique_count: Optional[float]  # None when the step guard tripped
    modularity: float
    component_coverage: float = 1.0
    degree_histogram: dict[int, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        out: dict = {label: _cell(getattr(self, name)) for name, label in ROW_LABELS.items()}
        out.update(
            nodes=self.n,
            edges=_cell(self.m),
            component_coverage=_cell(self.component_coverage),
            degree_histogram={str(k): _cell(v) for k, v in sorted(self.degree_histogram.items())},
            note=CLIQUE_NOTE,
        )
        return out

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"


def _cell(v):
    if v is None:
        return UNDEFINED
    if isinstance(v, float) and v.is_integer():
        return int(v)
    return v


def degree_assortativity(g: nx.Graph) -> Optional[float]:
    """Pearson degree correlation over edge ends; None when every edge end has the same degree."""
    if g.number_of_edges() == 0:
        return None
    ends = {d for u, v in g.edges() for d in (g.degree(u), g.degree(v))}
    if len(ends) < 2:
        return None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        r = nx.degree_assortativity_coefficient(g)
    return None if math.isnan(r) else float(r)


def largest_component(g: nx.Graph) -> nx.Graph:
    if nx.is_connected(g):
        return g
    nodes = min(nx.connected_components(g), key=lambda c: (-len(c), min(map(str, c))))
    return g.subgraph(nodes)


def metrics(g: nx.Graph, runs: int = 1, seed: int = 0, *, clique_guard: int = DEFAULT_STEP_GUARD) -> GraphMetrics:
    """Full statistics record.  Distances use the largest component when g is disconnected."""
    if g.number_of_nodes() == 0:
        raise ValueError("empty graph")
    core = largest_component(g)
    ecc = nx.eccentricity(core)
    diameter, radius = max(ecc.values()), min(ecc.values())
    try:
        cliques: Optional[float] = float(count_maximal_cliques(g, clique_guard))
    except CliqueGuardExceeded:
        cliques = None
    return GraphMetrics(
        n=g.number_of_nodes(),
        m=g.number_of_edges(),
        diameter=diameter,
        radius=radius,
        periphery_size=sum(1 for e in ecc.values() if e == diameter),
        center_size=sum(1 for e in ecc.values() if e == radius),
        mean_eccentricity=math.fsum(ecc.values()) / len(ecc),
        clustering_coefficient=nx.average_clustering(g),
        transitivity=nx.transitivity(g),
        degree_assortativity=degree_assortativity(g),
        clique_count=cliques,
        modularity=best_louvain(g, runs, seed).modularity if g.number_of_edges() else 0.0,
        component_coverage=core.number_of_nodes() / g.number_of_nodes(),
        degree_histogram=dict(sorted(Counter(d for _, d in g.degree()).items())),
    )


def average_metrics(items: Sequence[GraphMetrics]) -> GraphMetrics:
    """Field-wise mean; optional fields average over the runs where they are defined."""
    if not items:
        raise ValueError("nothing to average")
    out = {}
    for f in fields(GraphMetrics):
        vals = [getattr(x, f.name) for x in items]
        if f.name == "degree_histogram":
            keys = sorted({k for h in vals for k in h})
            out[f.name] = {k: math.fsum(h.get(k, 0) for h in vals) / len(vals) for k in keys}
            continue
        defined = [v for v in vals if v is not None]
        out[f.name] = math.fsum(defined) / len(defined) if defined else None
    return GraphMetrics(**out)


BASELINES = ("er", "cm", "ba")


def baseline_graph(model: str, g: nx.Graph, seed: int, *, halve_ba: bool = False) -> nx.Graph:
    n, m = g.number_of_nodes(), g.number_of_edges()
    if model == "er":
        return gen_er(n, m, seed)
    if model == "cm":
        return gen_cm([d for _, d in g.degree()], seed)
    if model == "ba":
        return gen_ba(n, math.ceil(2 * m / n), seed, halve=halve_ba)
    raise ValueError(f"unknown baseline model {model!r}")


def compare_baselines(
    g: nx.Graph,
    runs: int = 10,
    seed: int = 0,
    *,
    models: Sequence[str] = BASELINES,
    halve_ba: bool = False,
    clique_guard: int = DEFAULT_STEP_GUARD,
) -> dict[str, GraphMetrics]:
    """Measured column plus one column per baseline, each averaged over ``runs`` generated graphs."""
    table = {"measured": metrics(g, runs, seed, clique_guard=clique_guard)}
    for model in models:
        cols = [
            metrics(baseline_graph(model, g, seed + i, halve_ba=halve_ba), 1, seed + i, clique_guard=clique_guard)
            for i in range(runs)
        ]
        table[model] = average_metrics(cols)
    return table


def table_json(table: dict[str, GraphMetrics]) -> str:
    return json.dumps({k: v.as_dict() for k, v in table.items()}, sort_keys=True, indent=2) + "\n"
