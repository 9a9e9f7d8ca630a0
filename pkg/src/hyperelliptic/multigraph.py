"""Mutable finite multigraph with parallel edges, loops and colored constraint pairs.

Vertices and edges are dense integer handles that are never reused within the
lifetime of a graph, so reduction traces stay stable.  Black (structural)
edges are kept separate from the constraint set: constraints are unordered
vertex pairs, self-pairs allowed, each stored at most once, and they never
contribute to vertex degree.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphError(Exception):
    """Raised when an operation would violate a multigraph invariant."""


def pair_key(u: int, v: int) -> tuple[int, int]:
    """Canonical unordered form of a vertex pair."""
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class ChainCycle:
    """A candidate cycle assembled from at most two maximal degree-2 chains.

    ``vertices`` lists each cycle vertex once in traversal order and
    ``edges[i]`` joins ``vertices[i]`` and ``vertices[(i+1) % L]``.
    ``branches`` are the cycle vertices of degree greater than two (0, 1 or 2
    of them); all remaining cycle vertices have degree exactly two.
    """

    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    branches: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.edges)

    def positions(self) -> dict[int, int]:
        """Map each cycle vertex to its index along the traversal order."""
        return {v: i for i, v in enumerate(self.vertices)}


class Multigraph:
    """Undirected multigraph; loops count twice toward degree."""

    __slots__ = ("_adj", "_edges", "_deg", "_cons", "_cv", "_next_v", "_next_e")

    def __init__(self) -> None:
        self._adj: dict[int, dict[int, list[int]]] = {}
        self._edges: dict[int, tuple[int, int]] = {}
        self._deg: dict[int, int] = {}
        self._cons: set[tuple[int, int]] = set()
        self._cv: dict[int, set[tuple[int, int]]] = {}
        self._next_v = 0
        self._next_e = 0

    # ------------------------------------------------------------------
    # basic queries

    @property
    def vertex_count(self) -> int:
        return len(self._adj)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def edge_items(self) -> list[tuple[int, tuple[int, int]]]:
        return sorted(self._edges.items())

    def has_vertex(self, v: int) -> bool:
        return v in self._adj

    def has_edge(self, e: int) -> bool:
        return e in self._edges

    def endpoints(self, e: int) -> tuple[int, int]:
        try:
            return self._edges[e]
        except KeyError:
            raise GraphError(f"dead edge handle {e}") from None

    def degree(self, v: int) -> int:
        """Black-edge degree; loops contribute 2, constraints contribute 0."""
        self._check_vertex(v)
        return self._deg[v]

    def neighbors(self, v: int) -> list[int]:
        self._check_vertex(v)
        return sorted(self._adj[v])

    def parallel_count(self, u: int, v: int) -> int:
        self._check_vertex(u)
        self._check_vertex(v)
        return len(self._adj[u].get(v, ()))

    def edge_ids(self, u: int, v: int) -> list[int]:
        self._check_vertex(u)
        self._check_vertex(v)
        return sorted(self._adj[u].get(v, ()))

    def loops_at(self, v: int) -> list[int]:
        return self.edge_ids(v, v)

    def has_loop(self, v: int) -> bool:
        self._check_vertex(v)
        return bool(self._adj[v].get(v))

    # ------------------------------------------------------------------
    # constraints

    @property
    def constraints(self) -> set[tuple[int, int]]:
        return set(self._cons)

    @property
    def constraint_count(self) -> int:
        return len(self._cons)

    def constraints_of(self, v: int) -> set[tuple[int, int]]:
        self._check_vertex(v)
        return set(self._cv.get(v, ()))

    def constraint_degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self._cv.get(v, ()))

    def has_constraint(self, u: int, v: int) -> bool:
        return pair_key(u, v) in self._cons

    def add_constraint(self, u: int, v: int) -> bool:
        """Add the unordered pair (u, v); return False if already present."""
        self._check_vertex(u)
        self._check_vertex(v)
        key = pair_key(u, v)
        if key in self._cons:
            return False
        self._cons.add(key)
        self._cv.setdefault(key[0], set()).add(key)
        self._cv.setdefault(key[1], set()).add(key)
        return True

    def remove_constraint(self, u: int, v: int) -> None:
        key = pair_key(u, v)
        if key not in self._cons:
            raise GraphError(f"no constraint {key}")
        self._cons.discard(key)
        for x in set(key):
            s = self._cv.get(x)
            if s is not None:
                s.discard(key)
                if not s:
                    del self._cv[x]

    # ------------------------------------------------------------------
    # mutations

    def add_vertex(self) -> int:
        v = self._next_v
        self._next_v += 1
        self._adj[v] = {}
        self._deg[v] = 0
        return v

    def add_edge(self, u: int, v: int) -> int:
        self._check_vertex(u)
        self._check_vertex(v)
        e = self._next_e
        self._next_e += 1
        self._edges[e] = pair_key(u, v)
        self._adj[u].setdefault(v, []).append(e)
        if u != v:
            self._adj[v].setdefault(u, []).append(e)
            self._deg[u] += 1
            self._deg[v] += 1
        else:
            self._deg[v] += 2
        return e

    def delete_edge(self, e: int) -> None:
        u, v = self.endpoints(e)
        del self._edges[e]
        self._adj[u][v].remove(e)
        if not self._adj[u][v]:
            del self._adj[u][v]
        if u != v:
            self._adj[v][u].remove(e)
            if not self._adj[v][u]:
                del self._adj[v][u]
            self._deg[u] -= 1
            self._deg[v] -= 1
        else:
            self._deg[v] -= 2

    def delete_vertex(self, v: int, drop_edges: bool = False) -> None:
        """Delete v.  Incident edges are an error unless drop_edges is set;
        constraints mentioning v are always an error (rewrite them first)."""
        self._check_vertex(v)
        if self._cv.get(v):
            raise GraphError(f"vertex {v} still referenced by constraints")
        if self._adj[v]:
            if not drop_edges:
                raise GraphError(f"vertex {v} still has incident edges")
            for e in [e for ids in self._adj[v].values() for e in ids]:
                if e in self._edges:
                    self.delete_edge(e)
        del self._adj[v]
        del self._deg[v]

    def contract_edge(self, e: int) -> int:
        """Contract a non-loop edge; endpoints merge into the lower id.

        Parallel edges between the endpoints become loops at the survivor;
        constraints on the removed endpoint are rewritten to the survivor and
        deduplicated.
        """
        u, v = self.endpoints(e)
        if u == v:
            raise GraphError(f"cannot contract loop {e}")
        keep, gone = (u, v) if u < v else (v, u)
        self.delete_edge(e)
        for nbr, ids in list(self._adj[gone].items()):
            for eid in list(ids):
                a, b = self._edges[eid]
                na = keep if a == gone else a
                nb = keep if b == gone else b
                self.delete_edge(eid)
                # re-register under the same id to keep traces replayable
                self._edges[eid] = pair_key(na, nb)
                self._adj[na].setdefault(nb, []).append(eid)
                if na != nb:
                    self._adj[nb].setdefault(na, []).append(eid)
                    self._deg[na] += 1
                    self._deg[nb] += 1
                else:
                    self._deg[na] += 2
        for key in list(self._cv.get(gone, ())):
            self.remove_constraint(*key)
            a = keep if key[0] == gone else key[0]
            b = keep if key[1] == gone else key[1]
            self.add_constraint(a, b)
        del self._adj[gone]
        del self._deg[gone]
        return keep

    def subdivide_edge(self, e: int, k: int) -> list[int]:
        """Replace e by a path of k+1 edges through k fresh degree-2 vertices."""
        if k < 1:
            raise GraphError("subdivision count must be >= 1")
        u, v = self.endpoints(e)
        self.delete_edge(e)
        new = [self.add_vertex() for _ in range(k)]
        prev = u
        for w in new:
            self.add_edge(prev, w)
            prev = w
        self.add_edge(prev, v)
        return new

    # ------------------------------------------------------------------
    # structure queries

    def components(self) -> list[set[int]]:
        """Connected components over black edges only."""
        seen: set[int] = set()
        out = []
        for start in sorted(self._adj):
            if start in seen:
                continue
            comp = {start}
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for nbr in self._adj[x]:
                    if nbr not in comp:
                        comp.add(nbr)
                        queue.append(nbr)
            seen |= comp
            out.append(comp)
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def betti(self) -> int:
        """First Betti number m - n + c of the black graph."""
        return self.edge_count - self.vertex_count + len(self.components())

    def side_subgraph(self, v: int, u: int) -> set[int]:
        """{v} plus the component of u in the graph without v."""
        self._check_vertex(v)
        self._check_vertex(u)
        if u == v:
            raise GraphError("side_subgraph needs two distinct vertices")
        comp = {u}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for nbr in self._adj[x]:
                if nbr != v and nbr not in comp:
                    comp.add(nbr)
                    queue.append(nbr)
        comp.add(v)
        return comp

    def connected_with_constraints(
        self, u: int, v: int, excluded_edges: Iterable[int] = ()
    ) -> bool:
        """Is u reachable from v using black edges (minus excluded) plus
        constraint pairs as extra edges?"""
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            return True
        excluded = set(excluded_edges)
        seen = {u}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for nbr, ids in self._adj[x].items():
                if nbr in seen:
                    continue
                if any(eid not in excluded for eid in ids):
                    if nbr == v:
                        return True
                    seen.add(nbr)
                    queue.append(nbr)
            for key in self._cv.get(x, ()):
                nbr = key[1] if key[0] == x else key[0]
                if nbr not in seen:
                    if nbr == v:
                        return True
                    seen.add(nbr)
                    queue.append(nbr)
        return False

    # ------------------------------------------------------------------
    # chains and candidate cycles

    def _chain_interior(self, v: int) -> bool:
        return self._deg[v] == 2 and not self._adj[v].get(v)

    def chain_step(self, prev: int, cur: int, eid_in: int) -> tuple[int, int] | None:
        """From interior vertex cur entered via eid_in, return (next vertex,
        edge id), or None if cur is not interior."""
        if not self._chain_interior(cur):
            return None
        for nbr, ids in self._adj[cur].items():
            for eid in ids:
                if eid != eid_in:
                    return nbr, eid
        return None

    def walk_chain(self, start: int, first_edge: int) -> tuple[int, list[int], list[int]]:
        """Follow the chain leaving ``start`` along ``first_edge`` until a
        vertex that is not interior (degree != 2 or loop-bearing).

        Returns (end vertex, interior vertices in order, edge ids in order).
        """
        u, v = self.endpoints(first_edge)
        cur = v if u == start else u
        prev = start
        interior: list[int] = []
        edges = [first_edge]
        eid = first_edge
        while self._chain_interior(cur):
            interior.append(cur)
            nxt = self.chain_step(prev, cur, eid)
            assert nxt is not None
            prev = cur
            cur, eid = nxt
            edges.append(eid)
        return cur, interior, edges

    def chains(self) -> list[tuple[int, int, list[int], list[int]]]:
        """Maximal chains (u, w, interior, edges) between non-interior
        endpoints; loops are skipped.  Each chain is reported once."""
        out = []
        seen_edges: set[int] = set()
        for u in sorted(self._adj):
            if self._chain_interior(u):
                continue
            for nbr in sorted(self._adj[u]):
                if nbr == u:
                    continue
                for eid in sorted(self._adj[u][nbr]):
                    if eid in seen_edges:
                        continue
                    w, interior, edges = self.walk_chain(u, eid)
                    seen_edges.update(edges)
                    out.append((u, w, interior, edges))
        return out

    def chain_cycles(self) -> list[ChainCycle]:
        """Candidate cycles with at most two branch vertices.

        Emits (a) the whole graph when connected with every vertex of degree
        two, (b) pendant cycles from a chain closing on one branch vertex,
        (c) cycles from two distinct chains joining the same endpoint pair.
        """
        if not self._adj:
            return []
        if all(self._chain_interior(v) for v in self._adj):
            if not self.is_connected():
                return []
            start = min(self._adj)
            nbr = min(self._adj[start])
            eid = min(self._adj[start][nbr])
            verts = [start]
            edges = [eid]
            prev, cur = start, nbr
            while cur != start:
                verts.append(cur)
                nxt = self.chain_step(prev, cur, eid)
                assert nxt is not None
                prev = cur
                cur, eid = nxt
                edges.append(eid)
            return [self._make_cycle(verts, edges)]
        cycles = []
        by_pair: dict[tuple[int, int], list[tuple[list[int], list[int]]]] = {}
        for u, w, interior, edges in self.chains():
            if u == w:
                cycles.append(self._make_cycle([u] + interior, edges))
            else:
                by_pair.setdefault(pair_key(u, w), []).append((interior, edges))
        for (u, w), group in sorted(by_pair.items()):
            if len(group) < 2:
                continue
            group.sort(key=lambda c: (len(c[1]), c[1]))
            for i in range(len(group)):
                for j in range(i + 1, len(group)):
                    int1, eds1 = group[i]
                    int2, eds2 = group[j]
                    # chains are both recorded walking u -> w
                    first = self._edges[eds1[0]]
                    if u not in first:
                        int1, eds1 = list(reversed(int1)), list(reversed(eds1))
                    first = self._edges[eds2[0]]
                    if u not in first:
                        int2, eds2 = list(reversed(int2)), list(reversed(eds2))
                    verts = [u] + int1 + [w] + list(reversed(int2))
                    edges = list(eds1) + list(reversed(eds2))
                    cycles.append(self._make_cycle(verts, edges))
        cycles.sort(key=lambda c: (len(c.branches), len(c), c.vertices))
        return cycles

    def _make_cycle(self, verts: list[int], edges: list[int]) -> ChainCycle:
        """Canonicalize rotation/reflection: start at the lowest vertex id and
        move toward its lower-id cycle neighbor."""
        n = len(verts)
        if n == 2:
            verts = sorted(verts)
            edges = sorted(edges)
        elif n > 2:
            i0 = verts.index(min(verts))
            fwd = verts[(i0 + 1) % n]
            back = verts[(i0 - 1) % n]
            if back < fwd:
                verts = [verts[i0]] + [verts[(i0 - k) % n] for k in range(1, n)]
                edges = [edges[(i0 - 1 - k) % n] for k in range(n)]
            else:
                verts = [verts[(i0 + k) % n] for k in range(n)]
                edges = [edges[(i0 + k) % n] for k in range(n)]
        branches = tuple(v for v in sorted(verts) if self._deg[v] > 2)
        return ChainCycle(tuple(verts), tuple(edges), branches)

    # ------------------------------------------------------------------
    # copying / equality helpers

    def copy(self) -> "Multigraph":
        g = Multigraph()
        g._adj = {v: {n: list(ids) for n, ids in nbrs.items()} for v, nbrs in self._adj.items()}
        g._edges = dict(self._edges)
        g._deg = dict(self._deg)
        g._cons = set(self._cons)
        g._cv = {v: set(s) for v, s in self._cv.items()}
        g._next_v = self._next_v
        g._next_e = self._next_e
        return g

    def copy_induced(self, keep: Iterable[int]) -> "Multigraph":
        """Copy of the subgraph induced by ``keep``, preserving all ids."""
        keep = set(keep)
        g = Multigraph()
        g._adj = {
            v: {n: list(ids) for n, ids in nbrs.items() if n in keep}
            for v, nbrs in self._adj.items()
            if v in keep
        }
        g._edges = {e: uv for e, uv in self._edges.items() if uv[0] in keep and uv[1] in keep}
        g._deg = {v: 0 for v in g._adj}
        for e, (u, v) in g._edges.items():
            if u == v:
                g._deg[v] += 2
            else:
                g._deg[u] += 1
                g._deg[v] += 1
        g._cons = {c for c in self._cons if c[0] in keep and c[1] in keep}
        g._cv = {}
        for c in g._cons:
            g._cv.setdefault(c[0], set()).add(c)
            g._cv.setdefault(c[1], set()).add(c)
        g._next_v = self._next_v
        g._next_e = self._next_e
        return g

    def signature(self) -> tuple:
        """Hashable full-state snapshot (for replay checks)."""
        return (
            tuple(sorted(self._adj)),
            tuple(sorted(self._edges.items())),
            tuple(sorted(self._cons)),
        )

    def __repr__(self) -> str:
        return (
            f"Multigraph(n={self.vertex_count}, m={self.edge_count}, "
            f"c={len(self._cons)})"
        )

    def _check_vertex(self, v: int) -> None:
        if v not in self._adj:
            raise GraphError(f"dead vertex handle {v}")


def degree_sum(g: Multigraph) -> int:
    return sum(g.degree(v) for v in g.vertices())


def iter_parallel_pairs(g: Multigraph, at_least: int = 2) -> Iterator[tuple[int, int]]:
    """Unordered distinct-vertex pairs joined by >= at_least parallel edges."""
    for v in g.vertices():
        for nbr in g.neighbors(v):
            if v < nbr and g.parallel_count(v, nbr) >= at_least:
                yield (v, nbr)
