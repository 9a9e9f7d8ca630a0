"""Linear-time-class recognition of treewidth <= 2.

Works on the underlying simple graph (loops dropped, parallel edges
collapsed, constraints ignored): a graph has treewidth at most two exactly
when it can be emptied by repeatedly deleting vertices of degree <= 1 and
bypassing degree-2 vertices with an edge between their neighbors, collapsing
any parallel edge that bypassing creates.
"""
from __future__ import annotations

from collections import deque

from .multigraph import Multigraph


def tw_at_most_2(g: Multigraph) -> bool:
    adj: dict[int, set[int]] = {v: set() for v in g.vertices()}
    for _, (u, v) in g.edge_items():
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    queue = deque(adj)
    queued = set(adj)
    while queue:
        v = queue.popleft()
        queued.discard(v)
        if v not in adj:
            continue
        nbrs = adj[v]
        if len(nbrs) > 2:
            continue
        touched = list(nbrs)
        if len(nbrs) == 2:
            a, b = touched
            adj[a].discard(v)
            adj[b].discard(v)
            adj[a].add(b)
            adj[b].add(a)
        else:
            for x in touched:
                adj[x].discard(v)
        del adj[v]
        for x in touched:
            if x not in queued:
                queue.append(x)
                queued.add(x)
    return not adj
