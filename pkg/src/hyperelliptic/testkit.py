"""Corpus generators and the bounded refinement oracle.

Everything here is deterministic for a fixed seed so that failures are
reproducible from the seed alone.
"""
from __future__ import annotations

import random
from itertools import product

from .chipfiring import dgon_at_most_2
from .multigraph import GraphError, Multigraph
from .treewidth2 import tw_at_most_2

YES = "YES"
UNKNOWN = "UNKNOWN"


def gen_multigraph(
    seed: int,
    n: int,
    m: int,
    p_parallel: float = 0.2,
    p_loop: float = 0.1,
) -> Multigraph:
    """Random connected multigraph: a random spanning tree plus m - n + 1
    extra edges that duplicate existing pairs with probability p_parallel and
    loop with probability p_loop."""
    if n < 1:
        raise GraphError("need at least one vertex")
    if m < n - 1:
        raise GraphError("need at least n - 1 edges for connectivity")
    rng = random.Random(seed)
    g = Multigraph()
    verts = [g.add_vertex() for _ in range(n)]
    for i in range(1, n):
        g.add_edge(verts[i], verts[rng.randrange(i)])
    for _ in range(m - (n - 1)):
        r = rng.random()
        if r < p_loop:
            v = verts[rng.randrange(n)]
            g.add_edge(v, v)
        elif r < p_loop + p_parallel and g.edge_count:
            ids = [e for e, _ in g.edge_items()]
            u, v = g.endpoints(ids[rng.randrange(len(ids))])
            g.add_edge(u, v)
        elif n == 1:
            g.add_edge(verts[0], verts[0])
        else:
            u, v = rng.sample(verts, 2)
            g.add_edge(u, v)
    return g


def gen_tree(seed: int, n: int) -> Multigraph:
    return gen_multigraph(seed, n, n - 1, p_parallel=0.0, p_loop=0.0)


def gen_series_parallel(
    seed: int,
    n: int,
    p_series: float = 0.5,
    max_parallel: int | None = None,
) -> Multigraph:
    """Grow a series-parallel multigraph from a single edge by random series
    subdivisions and parallel duplications until it has n vertices.

    With max_parallel=2 the output stays in the two-parallel-edges regime, so
    decision runs reduce deeply instead of rejecting on early constraint
    collisions."""
    if n < 2:
        raise GraphError("series-parallel generator needs n >= 2")
    rng = random.Random(seed)
    g = Multigraph()
    a = g.add_vertex()
    b = g.add_vertex()
    edge_pool = [g.add_edge(a, b)]
    while g.vertex_count < n:
        e = edge_pool[rng.randrange(len(edge_pool))]
        if not g.has_edge(e):
            continue
        u, v = g.endpoints(e)
        if rng.random() < p_series:
            g.delete_edge(e)
            w = g.add_vertex()
            edge_pool.append(g.add_edge(u, w))
            edge_pool.append(g.add_edge(w, v))
        elif max_parallel is None or g.parallel_count(u, v) < max_parallel:
            edge_pool.append(g.add_edge(u, v))
    return g


def sdgon_leq2_bounded(
    g: Multigraph,
    max_subdiv: int = 2,
    tw_prefilter: bool = True,
) -> str:
    """One-sided refinement search for stable divisorial gonality <= 2.

    Enumerates every way of subdividing each edge 0..max_subdiv times (leaf
    additions are omitted; they cannot help a degree-2 divisor) and answers
    YES when some refinement passes the brute-force divisorial oracle.
    Never claims NO: anything else is UNKNOWN.

    The treewidth prefilter only converts guaranteed-negative instances
    (treewidth >= 3 survives refinement) into an immediate UNKNOWN.
    """
    if g.vertex_count > 6 or g.edge_count > 8:
        raise GraphError("bounded refinement oracle capped at n <= 6, m <= 8")
    if max_subdiv > 2:
        raise GraphError("bounded refinement oracle capped at max_subdiv <= 2")
    if g.constraint_count:
        raise GraphError("refinement oracle expects a plain graph")
    if tw_prefilter and not tw_at_most_2(g):
        return UNKNOWN
    edge_ids = [e for e, _ in g.edge_items()]
    for counts in sorted(product(range(max_subdiv + 1), repeat=len(edge_ids)), key=sum):
        h = g.copy()
        for e, k in zip(edge_ids, counts):
            if k:
                h.subdivide_edge(e, k)
        if dgon_at_most_2(h):
            return YES
    return UNKNOWN
