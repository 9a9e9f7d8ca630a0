"""Reduction rules deciding stable gonality <= 2.

Constraints are "green edges": a pair (u, v) records that any degree-2
harmonic morphism witnessing the answer must map u and v to the same tree
vertex (a green loop (v, v) forces local multiplicity 2 at v).  Leaf and
degree-2 rules contract, loop and heavy-parallel rules recolor structure
green, and the end rules erase the three terminal shapes.

The two context rules (T3, S2) carry a global guard: they only fire once
every leaf and degree-2 vertex is incident to a green edge, so the plain
contraction rules always take precedence.
"""
from __future__ import annotations

from .engine import ReductionStep, RulesBase
from .multigraph import pair_key


class StableRules(RulesBase):
    """Shared machinery for the two stable flavors."""

    LOOP_ADDS_SELF_CONSTRAINT = True

    # -- end rules -------------------------------------------------------

    def _find_E1(self) -> ReductionStep | None:
        g = self.g
        if g.vertex_count != 1 or g.edge_count != 0 or g.constraint_count != 0:
            return None
        v = g.vertices()[0]
        self._del_vertex(v)
        return self._emit("E1", removed_vertices=(v,))

    def _find_E2(self) -> ReductionStep | None:
        g = self.g
        if g.vertex_count != 1 or g.edge_count != 0:
            return None
        v = g.vertices()[0]
        if g.constraints != {(v, v)}:
            return None
        self._del_con(v, v)
        self._del_vertex(v)
        return self._emit("E2", removed_vertices=(v,), removed_constraints=((v, v),))

    def _find_E3(self) -> ReductionStep | None:
        g = self.g
        if g.vertex_count != 2 or g.edge_count != 0:
            return None
        u, v = g.vertices()
        key = pair_key(u, v)
        if g.constraints != {key}:
            return None
        self._del_con(*key)
        self._del_vertex(u)
        self._del_vertex(v)
        return self._emit("E3", removed_vertices=(u, v), removed_constraints=(key,))

    # -- leaf rules --------------------------------------------------------

    def _contract_step(self, rule: str, *edges: int) -> ReductionStep:
        survivor = None
        for e in edges:
            survivor = self._contract(e)
        return self._emit(rule, contracted_edges=edges, survivor=survivor)

    def _find_T1(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("T1"):
            if g.degree(v) == 1 and g.constraint_degree(v) == 0:
                e = g.edge_ids(v, g.neighbors(v)[0])[0]
                return self._contract_step("T1", e)
        return None

    def _find_T2(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("T2"):
            if g.degree(v) == 1 and g.constraints_of(v) == {(v, v)}:
                e = g.edge_ids(v, g.neighbors(v)[0])[0]
                return self._contract_step("T2", e)
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
            if not self.guard_ok:
                self._park("T3", v1)
                continue
            e1 = g.edge_ids(v1, u1)[0]
            e2 = g.edge_ids(v2, g.neighbors(v2)[0])[0]
            return self._contract_step("T3", e1, e2)
        return None

    # -- degree-2 rules ------------------------------------------------------

    def _series_candidate(self, v: int) -> bool:
        g = self.g
        return g.degree(v) == 2 and not g.has_loop(v)

    def _find_S1(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("S1"):
            if self._series_candidate(v) and g.constraint_degree(v) == 0:
                e = min(
                    eid for nbr in g.neighbors(v) for eid in g.edge_ids(v, nbr)
                )
                return self._contract_step("S1", e)
        return None

    def _find_S2(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("S2"):
            if not self._series_candidate(v) or g.constraints_of(v) != {(v, v)}:
                continue
            if not self.guard_ok:
                self._park("S2", v)
                continue
            eids = sorted(
                eid for nbr in g.neighbors(v) for eid in g.edge_ids(v, nbr)
            )
            ends = []
            for e in eids:
                a, b = g.endpoints(e)
                ends.append(b if a == v else a)
            u1, u2 = ends
            if u1 != u2 and not g.connected_with_constraints(u1, u2, eids):
                self._park("S2", v)
                continue
            self._del_con(v, v)
            for e in eids:
                self._del_edge(e)
            self._del_vertex(v)
            added = self._add_con(u1, u2)
            return self._emit(
                "S2",
                removed_vertices=(v,),
                removed_edge_ids=tuple(eids),
                removed_constraints=((v, v),),
                added_constraint=added,
            )
        return None

    # -- loop / parallel rules -------------------------------------------------

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
        if self.LOOP_ADDS_SELF_CONSTRAINT:
            added = self._add_con(v, v)
            return self._emit(
                "L", removed_edge_ids=tuple(loops), added_constraint=added
            )
        return self._emit("L", removed_edge_ids=tuple(loops))

    def _find_P1(self) -> ReductionStep | None:
        g = self.g
        for u, v in self._pair_candidates("P1"):
            if g.has_constraint(u, v) and g.parallel_count(u, v) >= 1:
                e = g.edge_ids(u, v)[0]
                self._del_edge(e)
                return self._emit("P1", removed_edge_ids=(e,))
        return None

    def _find_P2(self) -> ReductionStep | None:
        g = self.g
        for u, v in self._pair_candidates("P2"):
            ids = g.edge_ids(u, v)
            if len(ids) < 2:
                continue
            e, f = ids[0], ids[1]
            if (
                len(ids) < 3
                and not g.has_constraint(u, v)
                and not g.connected_with_constraints(u, v, (e, f))
            ):
                self._park("P2", (u, v))
                continue
            self._del_edge(e)
            self._del_edge(f)
            added = self._add_con(u, v)
            return self._emit(
                "P2", removed_edge_ids=(e, f), added_constraint=added
            )
        return None

    def _find_M(self) -> ReductionStep | None:
        g = self.g
        for u, v in self._pair_candidates("M"):
            if g.parallel_count(u, v) >= 3:
                return self._apply_M(u, v)
        return None

    def _apply_M(self, u: int, v: int) -> ReductionStep:
        ids = self.g.edge_ids(u, v)
        for e in ids:
            self._del_edge(e)
        added = self._add_con(u, v)
        return self._emit("M", removed_edge_ids=tuple(ids), added_constraint=added)

    # -- rejection lemmas ---------------------------------------------------

    def stuck_reject(self) -> str | None:
        """With every leaf constrained, a constraint joining a leaf to a
        non-leaf certifies gonality >= 3."""
        g = self.g
        if self.leaf_unconstrained == 0:
            for a, b in g.constraints:
                if a != b and (g.degree(a) == 1) != (g.degree(b) == 1):
                    return "conflicting-constraints"
        return None


class SgonRules(StableRules):
    FLAVOR = "sgon"
    FAMILIES = ("E1", "E2", "E3", "T1", "T2", "T3", "S1", "S2", "L", "P1", "P2", "M")
    VERTEX_FAMILIES = ("T1", "T2", "T3", "S1", "S2", "L")
    PAIR_FAMILIES = ("P1", "P2", "M")
    GUARD_FAMILIES = ("T3", "S2")
    PATH_FAMILIES = ("S2", "P2")
    LEAF_FAMILIES = ("T1", "T2", "T3")
    SERIES_FAMILIES = ("S1", "S2")
    LOOP_ADDS_SELF_CONSTRAINT = True
