from .cliques import DEFAULT_STEP_GUARD, CliqueGuardExceeded, count_maximal_cliques, maximal_cliques
from .community import CommunityPartition, best_louvain, louvain, partition_from
from .generators import degree_tv_distance, gen_ba, gen_cm, gen_er
from .io import from_topology, read_graph, to_dot, to_topology, write_graph
from .metrics import (
    BASELINES, ROW_LABELS, UNDEFINED, GraphMetrics, average_metrics, baseline_graph,
    compare_baselines, degree_assortativity, largest_component, metrics, table_json,
)

__all__ = [
    "BASELINES", "CliqueGuardExceeded", "CommunityPartition", "DEFAULT_STEP_GUARD", "GraphMetrics",
    "ROW_LABELS", "UNDEFINED", "average_metrics", "baseline_graph", "best_louvain", "compare_baselines",
    "count_maximal_cliques", "degree_assortativity", "degree_tv_distance", "from_topology", "gen_ba",
    "gen_cm", "gen_er", "largest_component", "louvain", "maximal_cliques", "metrics", "partition_from",
    "read_graph", "table_json", "to_dot", "to_topology", "write_graph",
]
