"""Divisor algebra on multigraphs.

Divisors are dicts mapping live vertex ids to integer chip counts (negative
means debt).  Loops never move chips, so every routine here works on the
loopless view of the graph.  The module provides the Laplacian and set-firing
primitives, level-set replays, q-reduced forms via the burning algorithm,
equivalence and rank-threshold queries, and two brute-force gonality oracles
used as independent ground truth by the reduction engines' test suites.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations_with_replacement

from .multigraph import GraphError, Multigraph


class _Index:
    """Loopless adjacency snapshot with dense positions."""

    __slots__ = ("verts", "pos", "nbrs", "deg", "n")

    def __init__(self, g: Multigraph):
        self.verts = g.vertices()
        self.n = len(self.verts)
        self.pos = {v: i for i, v in enumerate(self.verts)}
        mult: dict[tuple[int, int], int] = {}
        for _, (u, v) in g.edge_items():
            if u == v:
                continue
            i, j = self.pos[u], self.pos[v]
            if i > j:
                i, j = j, i
            mult[(i, j)] = mult.get((i, j), 0) + 1
        self.nbrs: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for (i, j), k in mult.items():
            self.nbrs[i].append((j, k))
            self.nbrs[j].append((i, k))
        self.deg = [sum(k for _, k in row) for row in self.nbrs]

    def vec(self, D: dict[int, int]) -> list[int]:
        return [D.get(v, 0) for v in self.verts]

    def divisor(self, vec: list[int]) -> dict[int, int]:
        return dict(zip(self.verts, vec))

    def connected(self) -> bool:
        if self.n == 0:
            return True
        seen = [False] * self.n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for x, _ in self.nbrs[u]:
                if not seen[x]:
                    seen[x] = True
                    count += 1
                    queue.append(x)
        return count == self.n


# ----------------------------------------------------------------------
# Laplacian and firing

def apply_laplacian(g: Multigraph, f: dict[int, int]) -> dict[int, int]:
    """The principal divisor L @ f; loops cancel out of the Laplacian."""
    idx = _Index(g)
    if set(f) != set(idx.verts):
        raise GraphError("firing vector must cover exactly the live vertices")
    fv = idx.vec(f)
    out = [0] * idx.n
    for i in range(idx.n):
        acc = idx.deg[i] * fv[i]
        for j, k in idx.nbrs[i]:
            acc -= k * fv[j]
        out[i] = acc
    return idx.divisor(out)


def _outdeg(idx: _Index, inside: list[bool], i: int) -> int:
    return sum(k for j, k in idx.nbrs[i] if not inside[j])


def is_valid_firing(g: Multigraph, D: dict[int, int], A) -> bool:
    """D(a) >= outdeg_A(a) for every a in the nonempty set A."""
    idx = _Index(g)
    A = set(A)
    if not A:
        raise GraphError("firing set must be nonempty")
    inside = [False] * idx.n
    for v in A:
        inside[idx.pos[v]] = True
    return all(D.get(v, 0) >= _outdeg(idx, inside, idx.pos[v]) for v in A)


def fire_set(g: Multigraph, D: dict[int, int], A) -> dict[int, int]:
    """D - L @ indicator(A); chips cross exactly the boundary edges of A."""
    idx = _Index(g)
    A = set(A)
    if not A:
        raise GraphError("firing set must be nonempty")
    inside = [False] * idx.n
    for v in A:
        inside[idx.pos[v]] = True
    vec = idx.vec(D)
    for v in A:
        i = idx.pos[v]
        for j, k in idx.nbrs[i]:
            if not inside[j]:
                vec[i] -= k
                vec[j] += k
    return idx.divisor(vec)


# ----------------------------------------------------------------------
# level sets

def level_sets(f: dict[int, int]) -> list[frozenset[int]]:
    """Nested sets A_i = {v : f(v) >= max(f) - i}, i = 0..max(f)-min(f)."""
    if not f:
        return [frozenset()]
    top = max(f.values())
    k = top - min(f.values())
    return [frozenset(v for v, x in f.items() if x >= top - i) for i in range(k + 1)]


def replay(g: Multigraph, D: dict[int, int], levels: list[frozenset[int]]) -> list[dict[int, int]]:
    """Fire levels[0..k-1] in order, returning all k+1 intermediate divisors.

    The last level set is the full vertex set, whose firing is a no-op, so it
    is skipped; the final divisor equals D - L @ f for the originating f.
    """
    out = [dict(D)]
    cur = D
    for A in levels[:-1]:
        cur = fire_set(g, cur, A)
        out.append(cur)
    return out


# ----------------------------------------------------------------------
# q-reduced divisors (burning algorithm)

def _layers_from(idx: _Index, qi: int) -> list[int]:
    dist = [-1] * idx.n
    dist[qi] = 0
    queue = deque([qi])
    while queue:
        u = queue.popleft()
        for x, _ in idx.nbrs[u]:
            if dist[x] < 0:
                dist[x] = dist[u] + 1
                queue.append(x)
    return dist


def _reduce_vec(idx: _Index, vec: list[int], qi: int) -> list[int]:
    n = idx.n
    if n <= 1:
        return vec
    dist = _layers_from(idx, qi)
    maxd = max(dist)
    # Phase 1: settle debt outside q by firing balls around q, outermost
    # debtor layer first; only the layer below a fired ball loses chips.
    if any(vec[i] < 0 for i in range(n) if i != qi):
        for depth in range(maxd, 0, -1):
            layer = [i for i in range(n) if dist[i] == depth]
            crossing = [
                (i, j, k)
                for i in range(n)
                if dist[i] == depth - 1
                for j, k in idx.nbrs[i]
                if dist[j] == depth
            ]
            while any(vec[i] < 0 for i in layer):
                for i, j, k in crossing:
                    vec[i] -= k
                    vec[j] += k
    # Phase 2: burn from q; fire the unburnt remainder until all burns.
    while True:
        burnt = [False] * n
        burnt[qi] = True
        incoming = [0] * n
        stack = [qi]
        while stack:
            u = stack.pop()
            for x, k in idx.nbrs[u]:
                if not burnt[x]:
                    incoming[x] += k
                    if incoming[x] > vec[x]:
                        burnt[x] = True
                        stack.append(x)
        if all(burnt):
            return vec
        for i in range(n):
            if not burnt[i]:
                vec[i] -= incoming[i]
                for j, k in idx.nbrs[i]:
                    if burnt[j]:
                        vec[j] += k


def reduce_divisor(g: Multigraph, D: dict[int, int], q: int) -> dict[int, int]:
    """The unique q-reduced divisor equivalent to D (g must be connected)."""
    idx = _Index(g)
    if q not in idx.pos:
        raise GraphError(f"dead vertex handle {q}")
    if not idx.connected():
        raise GraphError("reduction needs a connected graph")
    return idx.divisor(_reduce_vec(idx, idx.vec(D), idx.pos[q]))


def equivalent(g: Multigraph, D1: dict[int, int], D2: dict[int, int]) -> bool:
    """Linear equivalence, decided by comparing q-reduced forms."""
    idx = _Index(g)
    v1, v2 = idx.vec(D1), idx.vec(D2)
    if sum(v1) != sum(v2):
        raise GraphError("equivalent divisors must have equal degree")
    if not idx.connected():
        raise GraphError("equivalence needs a connected graph")
    if idx.n == 0:
        return True
    return _reduce_vec(idx, v1, 0) == _reduce_vec(idx, v2, 0)


def effective_equivalent(g: Multigraph, D: dict[int, int]) -> bool:
    """Is D equivalent to an effective divisor?"""
    idx = _Index(g)
    if not idx.connected():
        raise GraphError("equivalence needs a connected graph")
    if idx.n == 0:
        return True
    red = _reduce_vec(idx, idx.vec(D), 0)
    return red[0] >= 0


def rank_at_least_one(g: Multigraph, D: dict[int, int]) -> bool:
    """Can D put a chip on every vertex?  True iff the v-reduced form of D
    keeps a chip on v for every choice of v."""
    idx = _Index(g)
    vec = idx.vec(D)
    if any(x < 0 for x in vec):
        raise GraphError("rank threshold expects an effective divisor")
    if not idx.connected():
        raise GraphError("rank needs a connected graph")
    for qi in range(idx.n):
        if _reduce_vec(idx, list(vec), qi)[qi] < 1:
            return False
    return True


# ----------------------------------------------------------------------
# gonality oracles

def dgon_at_most_2(g: Multigraph) -> bool:
    """Brute force: does some effective degree-2 divisor reach every vertex?

    Trees answer True outright.  Otherwise all ~n^2/2 chip placements are
    grouped into equivalence classes by their reduced forms, and a class
    witnesses the answer when its members jointly cover the vertex set.
    """
    idx = _Index(g)
    if idx.n == 0:
        return True
    if not idx.connected():
        raise GraphError("gonality oracle needs a connected graph")
    m = sum(idx.deg) // 2
    if m == idx.n - 1:
        return True
    full = (1 << idx.n) - 1
    cover: dict[tuple[int, ...], int] = {}
    for i, j in combinations_with_replacement(range(idx.n), 2):
        vec = [0] * idx.n
        vec[i] += 1
        vec[j] += 1
        key = tuple(_reduce_vec(idx, list(vec), 0))
        bits = cover.get(key, 0) | (1 << i) | (1 << j)
        if bits == full:
            return True
        cover[key] = bits
    return False


def _cut_masks(idx: _Index) -> list[tuple[int, tuple, tuple]]:
    """All nonempty vertex subsets whose boundary cut has at most 2 edges.

    A valid firing set for a degree-2 effective divisor can spill at most two
    chips, so only these masks can ever fire.  Returns (mask, losses, gains)
    with losses = ((i, outdeg_i), ...) for members sending chips out and
    gains = ((j, amount), ...) for outside receivers.

    Enumeration walks the Gray code so the cut updates in O(deg) per step.
    """
    n = idx.n
    inset = [False] * n
    nbr_in = [0] * n  # sum of multiplicities toward current set
    cut = 0
    kept: list[int] = []
    for i in range(1, 1 << n):
        b = (i & -i).bit_length() - 1
        if inset[b]:
            for j, k in idx.nbrs[b]:
                nbr_in[j] -= k
            inset[b] = False
            cut -= idx.deg[b] - 2 * nbr_in[b]
        else:
            cut += idx.deg[b] - 2 * nbr_in[b]
            inset[b] = True
            for j, k in idx.nbrs[b]:
                nbr_in[j] += k
        if cut <= 2:
            kept.append(i ^ (i >> 1))
    out = []
    for mask in kept:
        losses = []
        gains: dict[int, int] = {}
        for a in range(n):
            if not (mask >> a) & 1:
                continue
            od = 0
            for j, k in idx.nbrs[a]:
                if not (mask >> j) & 1:
                    od += k
                    gains[j] = gains.get(j, 0) + k
            if od:
                losses.append((a, od))
        out.append((mask, tuple(losses), tuple(sorted(gains.items()))))
    return out


def constrained_suitable_exists(
    g: Multigraph,
    constraints: set[tuple[int, int]] | None = None,
    max_vertices: int = 12,
) -> bool:
    """Brute-force decision for graphs with constraints (small n only).

    Explores all effective degree-2 divisors under valid, constraint-closed
    set firings (a set must contain both members of a constraint pair or
    neither).  True iff some reachability component covers every vertex and,
    for every constraint (u, w), contains a divisor with chips on both u and
    w (two chips on u when u = w).
    """
    idx = _Index(g)
    n = idx.n
    if n > max_vertices:
        raise GraphError(f"constrained oracle capped at {max_vertices} vertices")
    if n == 0:
        return True
    if not idx.connected():
        raise GraphError("constrained oracle needs a connected graph")
    cons = g.constraints if constraints is None else set(constraints)
    per_vertex: dict[int, int] = {}
    for a, b in cons:
        for x in {a, b}:
            per_vertex[x] = per_vertex.get(x, 0) + 1
    if any(c > 1 for c in per_vertex.values()):
        return False
    cons_idx = [(idx.pos[a], idx.pos[b]) for a, b in cons]

    moves = []
    for mask, losses, gains in _cut_masks(idx):
        if all(((mask >> a) & 1) == ((mask >> b) & 1) for a, b in cons_idx if a != b):
            if losses or gains:
                moves.append((losses, gains))

    states: dict[tuple[int, ...], int] = {}
    vecs: list[tuple[int, ...]] = []
    for i, j in combinations_with_replacement(range(n), 2):
        vec = [0] * n
        vec[i] += 1
        vec[j] += 1
        t = tuple(vec)
        states[t] = len(vecs)
        vecs.append(t)

    parent = list(range(len(vecs)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, si in states.items():
        for losses, gains in moves:
            if any(t[a] < od for a, od in losses):
                continue
            nxt = list(t)
            for a, od in losses:
                nxt[a] -= od
            for b, amt in gains:
                nxt[b] += amt
            ti = states[tuple(nxt)]
            ra, rb = find(si), find(ti)
            if ra != rb:
                parent[ra] = rb

    comp_cover: dict[int, int] = {}
    comp_pairs: dict[int, set[int]] = {}
    full = (1 << n) - 1
    for t, si in states.items():
        root = find(si)
        bits = comp_cover.get(root, 0)
        for a in range(n):
            if t[a]:
                bits |= 1 << a
        comp_cover[root] = bits
        sat = comp_pairs.setdefault(root, set())
        for ci, (a, b) in enumerate(cons_idx):
            if a == b:
                if t[a] >= 2:
                    sat.add(ci)
            elif t[a] >= 1 and t[b] >= 1:
                sat.add(ci)
    want = set(range(len(cons_idx)))
    return any(
        comp_cover[root] == full and comp_pairs[root] == want for root in comp_cover
    )


def cycle_pair_equivalent(length: int, p: tuple[int, int], q: tuple[int, int]) -> bool:
    """On a cycle of the given length, chip pairs are equivalent exactly when
    their position sums agree modulo the length."""
    if length < 1:
        raise GraphError("cycle length must be >= 1")
    for x in (*p, *q):
        if not 0 <= x < length:
            raise GraphError("positions must lie in [0, length)")
    return (p[0] + p[1]) % length == (q[0] + q[1]) % length
