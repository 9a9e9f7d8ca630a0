"""Reduction rules deciding divisorial gonality <= 2.

Constraint pairs couple chips and firing sets: a constraint (u, v) demands a
suitable divisor stay effective after removing a chip from each endpoint, and
forbids firing sets separating u from v.  End rules empty the terminal
shapes, leaf rules push constraints inward, and the cycle rules collapse
cycles with at most two branch vertices once every constraint touching the
cycle lands on it and all chip pairs agree modulo the cycle length.
"""
from __future__ import annotations

from collections import deque
from itertools import combinations

from .engine import ReductionStep, RulesBase
from .multigraph import pair_key


class DgonRules(RulesBase):
    FLAVOR = "dgon"
    FAMILIES = ("E1", "E2", "T1", "T2", "T3", "C2", "L", "M", "C1", "C3")
    VERTEX_FAMILIES = ("T1", "T2", "T3", "C2", "C3", "L")
    PAIR_FAMILIES = ("M",)
    LEAF_FAMILIES = ("T1", "T2", "T3")
    BRANCH_FAMILIES = ("C2", "C3")

    def __init__(self, *args, **kwargs):
        self._blocked_c3: set[tuple[int, int]] = set()
        super().__init__(*args, **kwargs)

    def _clear_blocks(self) -> None:
        self._blocked_c3.clear()

    # -- end rules -------------------------------------------------------

    def _find_E1(self) -> ReductionStep | None:
        g = self.g
        if g.vertex_count != 1 or g.edge_count != 0:
            return None
        v = g.vertices()[0]
        removed = tuple(sorted(g.constraints_of(v)))
        for pair in removed:
            self._del_con(*pair)
        self._del_vertex(v)
        return self._emit("E1", removed_vertices=(v,), removed_constraints=removed)

    def _find_E2(self) -> ReductionStep | None:
        g = self.g
        if g.vertex_count != 2 or g.edge_count != 1:
            return None
        e, (u, v) = g.edge_items()[0]
        if u == v:
            return None
        key = pair_key(u, v)
        if g.constraints != {key}:
            return None
        self._del_con(*key)
        self._del_edge(e)
        self._del_vertex(u)
        self._del_vertex(v)
        return self._emit(
            "E2",
            removed_vertices=(u, v),
            removed_edge_ids=(e,),
            removed_constraints=(key,),
        )

    # -- leaf rules --------------------------------------------------------

    def _find_T1(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("T1"):
            if g.degree(v) == 1 and g.constraint_degree(v) == 0:
                u = g.neighbors(v)[0]
                e = g.edge_ids(v, u)[0]
                self._del_edge(e)
                self._del_vertex(v)
                return self._emit("T1", removed_vertices=(v,), removed_edge_ids=(e,))
        return None

    def _find_T2(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("T2"):
            if g.degree(v) != 1 or g.constraints_of(v) != {(v, v)}:
                continue
            u = g.neighbors(v)[0]
            e = g.edge_ids(v, u)[0]
            self._del_con(v, v)
            self._del_edge(e)
            self._del_vertex(v)
            self._add_con(u, u)
            return self._emit(
                "T2",
                removed_vertices=(v,),
                removed_edge_ids=(e,),
                removed_constraints=((v, v),),
                added_constraint=(u, u),
            )
        return None

    def _find_T3(self) -> ReductionStep | None:
        g = self.g
        for v1 in self._vertex_candidates("T3"):
            if g.degree(v1) != 1:
                continue
            cons = g.constraints_of(v1)
            if len(cons) != 1:
                continue
            key = next(iter(cons))
            v2 = key[1] if key[0] == v1 else key[0]
            if v2 == v1 or g.degree(v2) != 1 or g.constraints_of(v2) != cons:
                continue
            u1 = g.neighbors(v1)[0]
            if u1 == v2:
                continue
            u2 = g.neighbors(v2)[0]
            e1 = g.edge_ids(v1, u1)[0]
            e2 = g.edge_ids(v2, u2)[0]
            self._del_con(*key)
            self._del_edge(e1)
            self._del_edge(e2)
            self._del_vertex(v1)
            self._del_vertex(v2)
            added = self._add_con(u1, u2)
            return self._emit(
                "T3",
                removed_vertices=tuple(sorted((v1, v2))),
                removed_edge_ids=tuple(sorted((e1, e2))),
                removed_constraints=(key,),
                added_constraint=added,
            )
        return None

    # -- cycle rules -------------------------------------------------------

    def _compatible(self, verts: list[int], length: int, extra=None) -> bool:
        """All constraints touching the cycle must land on it and place chip
        pairs in one equivalence class modulo the cycle length."""
        g = self.g
        pos = {x: i for i, x in enumerate(verts)}
        sums = []
        seen = set()
        for x in verts:
            for pair in g.constraints_of(x):
                if pair in seen:
                    continue
                seen.add(pair)
                a, b = pair
                if a not in pos or b not in pos:
                    return False
                sums.append((pos[a] + pos[b]) % length)
        if extra is not None:
            sums.append((pos[extra[0]] + pos[extra[1]]) % length)
        return len(set(sums)) <= 1

    def _forward_interior(self, v: int) -> None:
        """A touched chain-interior vertex re-queues its chain endpoints."""
        g = self.g
        eids = [eid for nbr in g.neighbors(v) for eid in g.edge_ids(v, nbr)]
        for eid in eids[:2]:
            end, _, _ = g.walk_chain(v, eid)
            self._push("C2", end)
            self._push("C3", end)

    def _find_C1(self) -> ReductionStep | None:
        g = self.g
        if g.vertex_count == 0 or self.not_deg2 != 0:
            return None
        start = g.vertices()[0]
        if g.has_loop(start):
            return None
        cycles = g.chain_cycles()
        if not cycles:
            return None
        cyc = cycles[0]
        if not self._compatible(list(cyc.vertices), len(cyc)):
            return None
        removed = tuple(sorted(g.constraints))
        for pair in removed:
            self._del_con(*pair)
        for e in cyc.edges:
            self._del_edge(e)
        for x in sorted(cyc.vertices):
            self._del_vertex(x)
        nv = self._add_vertex()
        return self._emit(
            "C1",
            removed_vertices=tuple(sorted(cyc.vertices)),
            removed_edge_ids=tuple(sorted(cyc.edges)),
            removed_constraints=removed,
            added_vertex=nv,
        )

    def _find_C2(self) -> ReductionStep | None:
        for v in self._vertex_candidates("C2"):
            step = self._try_C2_at(v)
            if step is not None:
                return step
        return None

    def _try_C2_at(self, v: int) -> ReductionStep | None:
        g = self.g
        if self.not_deg2 == 0:
            return None
        d = g.degree(v)
        if d == 2 and not g.has_loop(v):
            if self.incremental:
                self._forward_interior(v)
            return None
        if d <= 2:
            return None
        pendants = []
        seen: set[int] = set()
        for nbr in g.neighbors(v):
            if nbr == v:
                continue
            for eid in g.edge_ids(v, nbr):
                if eid in seen:
                    continue
                w, interior, edges = g.walk_chain(v, eid)
                seen.update(edges)
                if w == v:
                    pendants.append((len(edges), tuple(edges), tuple(interior)))
        for _, edges, interior in sorted(pendants):
            verts = [v, *interior]
            if self._compatible(verts, len(edges), extra=(v, v)):
                return self._apply_cycle("C2", (v,), verts, edges, (v, v))
        return None

    def _find_C3(self) -> ReductionStep | None:
        for v in self._vertex_candidates("C3"):
            step = self._try_C3_at(v)
            if step is not None:
                return step
        return None

    def _try_C3_at(self, v: int) -> ReductionStep | None:
        g = self.g
        if self.not_deg2 == 0:
            return None
        d = g.degree(v)
        if d == 2 and not g.has_loop(v):
            if self.incremental:
                self._forward_interior(v)
            return None
        if d <= 2:
            return None
        groups: dict[int, list] = {}
        seen: set[int] = set()
        for nbr in g.neighbors(v):
            if nbr == v:
                continue
            for eid in g.edge_ids(v, nbr):
                if eid in seen:
                    continue
                w, interior, edges = g.walk_chain(v, eid)
                seen.update(edges)
                if w != v and g.degree(w) > 2:
                    groups.setdefault(w, []).append(
                        (len(edges), tuple(edges), tuple(interior))
                    )
        for w in sorted(groups):
            chains = sorted(groups[w])
            if len(chains) < 2:
                continue
            if len(chains) == 2:
                # the two chains are the whole candidate cycle: the rule needs
                # some third black route between the branch vertices
                key = pair_key(v, w)
                if self.incremental and key in self._blocked_c3:
                    continue
                excluded = set(chains[0][1]) | set(chains[1][1])
                if not self._black_connected(v, w, excluded):
                    if self.incremental:
                        self._blocked_c3.add(key)
                    continue
            for i, j in combinations(range(len(chains)), 2):
                _, eds1, int1 = chains[i]
                _, eds2, int2 = chains[j]
                verts = [v, *int1, w, *reversed(int2)]
                edges = (*eds1, *reversed(eds2))
                if self._compatible(verts, len(edges), extra=(v, w)):
                    return self._apply_cycle("C3", (v, w), verts, edges, (v, w))
        return None

    def _apply_cycle(self, rule, kept, verts, edges, added) -> ReductionStep:
        g = self.g
        interior = [x for x in verts if x not in kept]
        removed = sorted({p for x in interior for p in g.constraints_of(x)})
        for pair in removed:
            self._del_con(*pair)
        for e in edges:
            self._del_edge(e)
        for x in sorted(interior):
            self._del_vertex(x)
        self._add_con(*added)
        return self._emit(
            rule,
            removed_vertices=tuple(sorted(interior)),
            removed_edge_ids=tuple(sorted(edges)),
            removed_constraints=tuple(removed),
            added_constraint=pair_key(*added),
        )

    def _black_connected(self, u: int, w: int, excluded: set[int]) -> bool:
        """Bidirectional search over black edges avoiding ``excluded``; the
        smaller frontier expands, so a separated side is paid for only once."""
        adj = self.g._adj
        seen_u: dict[int, None] = {u: None}
        seen_w: dict[int, None] = {w: None}
        front_u, front_w = [u], [w]
        while front_u and front_w:
            if len(front_u) <= len(front_w):
                frontier, seen, other = front_u, seen_u, seen_w
            else:
                frontier, seen, other = front_w, seen_w, seen_u
            nxt = []
            for x in frontier:
                for nbr, ids in adj[x].items():
                    if nbr in seen:
                        continue
                    for eid in ids:
                        if eid not in excluded:
                            break
                    else:
                        continue
                    if nbr in other:
                        return True
                    seen[nbr] = None
                    nxt.append(nbr)
            if frontier is front_u:
                front_u = nxt
            else:
                front_w = nxt
        return False

    # -- loop / parallel normalization --------------------------------------

    def _find_L(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("L"):
            if g.has_loop(v):
                return self._apply_L(v)
        return None

    def _apply_L(self, v: int) -> ReductionStep:
        loops = self.g.loops_at(v)
        for e in loops:
            self._del_edge(e)
        return self._emit("L", removed_edge_ids=tuple(loops))

    def _find_M(self) -> ReductionStep | None:
        g = self.g
        for u, v in self._pair_candidates("M"):
            if g.parallel_count(u, v) >= 3:
                return self._apply_M(u, v)
        return None

    def _apply_M(self, u: int, v: int) -> ReductionStep:
        ids = self.g.edge_ids(u, v)
        k = (len(ids) - 1) // 2
        removed = ids[len(ids) - 2 * k :]
        for e in removed:
            self._del_edge(e)
        added = self._add_con(u, v)
        return self._emit(
            "M", removed_edge_ids=tuple(removed), added_constraint=added
        )
