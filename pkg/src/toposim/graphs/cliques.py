from __future__ import annotations

from typing import Hashable, Iterator

import networkx as nx

DEFAULT_STEP_GUARD = 10**7


class CliqueGuardExceeded(RuntimeError):
    pass


def maximal_cliques(g: nx.Graph, max_steps: int = DEFAULT_STEP_GUARD) -> Iterator[list[Hashable]]:
    """Bron-Kerbosch with Tomita pivoting, iterative.

    Raises CliqueGuardExceeded once more than ``max_steps`` search nodes have
    been expanded.
    """
    adj = {u: set(g[u]) - {u} for u in g}
    if not adj:
        return
    steps = 0
    # frame: (R, P, X, candidates still to branch on)
    stack = [([], set(adj), set(), None)]
    while stack:
        R, P, X, todo = stack.pop()
        if todo is None:
            steps += 1
            if steps > max_steps:
                raise CliqueGuardExceeded(f"more than {max_steps} Bron-Kerbosch steps")
            if not P and not X:
                yield R
                continue
            pivot = max(P | X, key=lambda u: len(P & adj[u]))
            todo = list(P - adj[pivot])
        if not todo:
            continue
        v = todo.pop()
        stack.append((R, P - {v}, X | {v}, todo))
        nv = adj[v]
        stack.append((R + [v], P & nv, X & nv, None))


def count_maximal_cliques(g: nx.Graph, max_steps: int = DEFAULT_STEP_GUARD) -> int:
    return sum(1 for _ in maximal_cliques(g, max_steps))
