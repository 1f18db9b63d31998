from .blocks import BlockRecord, block_from, block_stream, select_greedy
from .latency import LatencyModel
from .network import ANNOUNCE_WINDOW, KIND_NAMES, SimNetwork, SimNode, UnknownNode
from .topology import Topology, edge_key, read_edge_list, write_edge_list

__all__ = [
    "ANNOUNCE_WINDOW", "BlockRecord", "KIND_NAMES", "LatencyModel", "SimNetwork", "SimNode",
    "Topology", "UnknownNode", "block_from", "block_stream", "edge_key", "read_edge_list",
    "select_greedy", "write_edge_list",
]
