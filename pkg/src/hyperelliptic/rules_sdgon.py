"""Reduction rules deciding stable divisorial gonality <= 2.

Same shape as the stable rules but with the divisorial ("red edge")
constraint semantics: loops are simply dropped, and the single degree-2
contraction rule splits into a doubled-neighbor form (replace the vertex by a
red loop) and a distinct-neighbor form (plain contraction).
"""
from __future__ import annotations

from .engine import ReductionStep
from .rules_sgon import StableRules


class SdgonRules(StableRules):
    FLAVOR = "sdgon"
    FAMILIES = (
        "E1", "E2", "E3", "T1", "T2", "T3", "S1a", "S1b", "S2", "L", "P1", "P2", "M",
    )
    VERTEX_FAMILIES = ("T1", "T2", "T3", "S1a", "S1b", "S2", "L")
    PAIR_FAMILIES = ("P1", "P2", "M")
    GUARD_FAMILIES = ("T3", "S2")
    PATH_FAMILIES = ("S2", "P2")
    LEAF_FAMILIES = ("T1", "T2", "T3")
    SERIES_FAMILIES = ("S1a", "S1b", "S2")
    LOOP_ADDS_SELF_CONSTRAINT = False

    def _find_S1a(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("S1a"):
            if not self._series_candidate(v) or g.constraint_degree(v) != 0:
                continue
            nbrs = g.neighbors(v)
            if len(nbrs) != 1:
                continue
            u = nbrs[0]
            eids = g.edge_ids(v, u)
            for e in eids:
                self._del_edge(e)
            self._del_vertex(v)
            added = self._add_con(u, u)
            return self._emit(
                "S1a",
                removed_vertices=(v,),
                removed_edge_ids=tuple(eids),
                added_constraint=added,
            )
        return None

    def _find_S1b(self) -> ReductionStep | None:
        g = self.g
        for v in self._vertex_candidates("S1b"):
            if not self._series_candidate(v) or g.constraint_degree(v) != 0:
                continue
            if len(g.neighbors(v)) != 2:
                continue
            e = min(eid for nbr in g.neighbors(v) for eid in g.edge_ids(v, nbr))
            return self._contract_step("S1b", e)
        return None
