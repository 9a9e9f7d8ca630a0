"""Shared reduction scheduler.

A rule set owns a graph and repeatedly applies one rule instance chosen by a
deterministic family priority; the engine wraps that loop with the
preprocessing pass, the treewidth pre-check, conflict rejection, budget
accounting and verdict assembly.  Every applied rule is recorded as a
replayable ReductionStep.

Rule sets run in one of two modes.  Full-scan mode re-examines all candidates
each step and is the obviously-correct reference used on small graphs.
Incremental mode keeps per-family worklists fed by mutation events so large
graphs reduce in near-linear time; the two modes always agree on the verdict.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .multigraph import GraphError, Multigraph, pair_key
from .treewidth2 import tw_at_most_2

DGON = "dgon"
SGON = "sgon"
SDGON = "sdgon"
FLAVORS = (DGON, SGON, SDGON)

REDUCED = "reduced-to-empty"
STUCK = "stuck"
TW_REJECT = "treewidth-reject"
CONFLICT = "conflicting-constraints"
DISCONNECTED = "disconnected"

INCREMENTAL_THRESHOLD = 1500


class EngineError(Exception):
    """Internal invariant violation (budget overrun, replay mismatch)."""


@dataclass(frozen=True)
class ReductionStep:
    """One applied rule instance, with enough detail to replay it."""

    rule: str
    removed_vertices: tuple[int, ...] = ()
    removed_edge_ids: tuple[int, ...] = ()
    removed_constraints: tuple[tuple[int, int], ...] = ()
    added_constraint: tuple[int, int] | None = None
    added_vertex: int | None = None
    contracted_edges: tuple[int, ...] = ()
    survivor: int | None = None

    @property
    def removed_edges(self) -> int:
        return len(self.removed_edge_ids)


@dataclass
class Verdict:
    answer: bool
    reason: str
    flavor: str
    trace: list[ReductionStep] = field(default_factory=list)
    is_tree: bool = False
    steps_total: int = 0
    steps_main: int = 0
    budget: int = 0
    scan_fallbacks: int = 0

    @property
    def text(self) -> str:
        return "YES" if self.answer else "NO"


def rule_application_budget(n: int, flavor: str) -> int:
    """Cap on main-loop rule applications for an n-vertex preprocessed graph:
    3n for the divisorial rules, 9n (potential n + 2m with m <= 4n) for the
    stable flavors."""
    if flavor == DGON:
        return 3 * n
    if flavor in (SGON, SDGON):
        return 9 * n
    raise GraphError(f"unknown flavor {flavor!r}")


def default_order(flavor: str) -> list[str]:
    from . import rules_dgon, rules_sdgon, rules_sgon

    cls = {
        DGON: rules_dgon.DgonRules,
        SGON: rules_sgon.SgonRules,
        SDGON: rules_sdgon.SdgonRules,
    }[flavor]
    return list(cls.FAMILIES)


def make_rules(
    flavor: str,
    g: Multigraph,
    order: list[str] | None = None,
    incremental: bool = False,
    record_trace: bool = True,
):
    from . import rules_dgon, rules_sdgon, rules_sgon

    cls = {
        DGON: rules_dgon.DgonRules,
        SGON: rules_sgon.SgonRules,
        SDGON: rules_sdgon.SdgonRules,
    }.get(flavor)
    if cls is None:
        raise GraphError(f"unknown flavor {flavor!r}")
    return cls(g, order=order, incremental=incremental, record_trace=record_trace)


# ----------------------------------------------------------------------
# rule-set base machinery


class RulesBase:
    """Queue/counter bookkeeping shared by the three rule sets.

    Subclasses declare FAMILIES (default priority), the vertex- and
    pair-keyed families, and implement one ``_find_<family>`` per rule
    family.  All graph mutations go through the wrapper methods so that
    worklists, guard counters and the conflict flag stay exact.
    """

    FLAVOR = ""
    FAMILIES: tuple[str, ...] = ()
    VERTEX_FAMILIES: tuple[str, ...] = ()
    PAIR_FAMILIES: tuple[str, ...] = ()
    GUARD_FAMILIES: tuple[str, ...] = ()
    PATH_FAMILIES: tuple[str, ...] = ()

    def __init__(self, g, order=None, incremental=False, record_trace=True):
        self.g = g
        if order is None:
            self.order = list(self.FAMILIES)
        else:
            if sorted(order) != sorted(self.FAMILIES):
                raise GraphError(
                    f"order must be a permutation of {sorted(self.FAMILIES)}"
                )
            self.order = list(order)
        self.incremental = incremental
        self.record = record_trace
        self.trace: list[ReductionStep] = []
        self.steps = 0
        self.conflict = False
        self._con_touched: set[int] = set()
        self.scan_fallbacks = 0
        self.green_gen = 0
        self.low_unconstrained = 0
        self.leaf_unconstrained = 0
        self.not_deg2 = 0
        for v in g.vertices():
            self._count(v, +1)
            if g.constraint_degree(v) > 1:
                self.conflict = True
        self._pending: dict[str, deque] = {}
        self._pending_in: dict[str, set] = {}
        self._parked: dict[str, set] = {}
        for fam in (*self.VERTEX_FAMILIES, *self.PAIR_FAMILIES):
            self._pending[fam] = deque()
            self._pending_in[fam] = set()
        for fam in (*self.GUARD_FAMILIES, *self.PATH_FAMILIES):
            self._parked[fam] = set()
        if incremental:
            self._seed()

    # -- counters ------------------------------------------------------

    def _count(self, v, sign: int) -> None:
        g = self.g
        d = g.degree(v)
        c = g.constraint_degree(v)
        if d != 2:
            self.not_deg2 += sign
        if d in (1, 2) and c == 0:
            self.low_unconstrained += sign
            if d == 1:
                self.leaf_unconstrained += sign

    def _snapshot(self, verts) -> list[int]:
        self._guard_before = self.low_unconstrained == 0
        live = [v for v in dict.fromkeys(verts) if self.g.has_vertex(v)]
        for v in live:
            self._count(v, -1)
        return live

    def _restore(self, live) -> None:
        for v in live:
            if self.g.has_vertex(v):
                self._count(v, +1)
        if not self._guard_before and self.low_unconstrained == 0:
            self._release_parked(self.GUARD_FAMILIES)

    @property
    def guard_ok(self) -> bool:
        """Every leaf and degree-2 vertex carries a constraint."""
        return self.low_unconstrained == 0

    # -- worklists -----------------------------------------------------

    def _push(self, fam: str, key) -> None:
        if not self.incremental:
            return
        if key not in self._pending_in[fam]:
            self._pending_in[fam].add(key)
            self._pending[fam].append(key)

    def _push_vertex(self, v) -> None:
        for fam in self.VERTEX_FAMILIES:
            self._push(fam, v)

    def _push_pair(self, u, v) -> None:
        if u == v:
            return
        key = pair_key(u, v)
        for fam in self.PAIR_FAMILIES:
            self._push(fam, key)

    def _park(self, fam: str, key) -> None:
        if self.incremental:
            self._parked[fam].add(key)

    def _release_parked(self, fams) -> None:
        for fam in fams:
            for key in self._parked[fam]:
                self._push(fam, key)
            self._parked[fam].clear()

    def _vertex_candidates(self, fam: str):
        if self.incremental:
            dq, present = self._pending[fam], self._pending_in[fam]
            while dq:
                v = dq.popleft()
                present.discard(v)
                if self.g.has_vertex(v):
                    yield v
        else:
            yield from self.g.vertices()

    def _pair_candidates(self, fam: str):
        if self.incremental:
            dq, present = self._pending[fam], self._pending_in[fam]
            while dq:
                key = dq.popleft()
                present.discard(key)
                if self.g.has_vertex(key[0]) and self.g.has_vertex(key[1]):
                    yield key
        else:
            for v in self.g.vertices():
                for n in self.g.neighbors(v):
                    if v < n:
                        yield (v, n)
                for a, b in sorted(self.g.constraints_of(v)):
                    if a == v and b > v:
                        yield (a, b)

    def _seed(self) -> None:
        """Queue only plausible initial candidates; mutation touches keep the
        queues complete afterwards."""
        g = self.g
        for v in g.vertices():
            d = g.degree(v)
            loop = g.has_loop(v)
            for fam in self.LEAF_FAMILIES:
                if d == 1:
                    self._push(fam, v)
            for fam in self.SERIES_FAMILIES:
                if d == 2 and not loop:
                    self._push(fam, v)
            for fam in self.BRANCH_FAMILIES:
                if d != 2 or loop:
                    self._push(fam, v)
            if loop and "L" in self.VERTEX_FAMILIES:
                self._push("L", v)
            for n in g.neighbors(v):
                if v < n and g.parallel_count(v, n) >= 2:
                    self._push_pair(v, n)
            for a, b in g.constraints_of(v):
                if a != b:
                    self._push_pair(a, b)

    LEAF_FAMILIES: tuple[str, ...] = ()
    SERIES_FAMILIES: tuple[str, ...] = ()
    BRANCH_FAMILIES: tuple[str, ...] = ()

    def _reseed(self, clear_blocks: bool = True) -> None:
        for v in self.g.vertices():
            self._push_vertex(v)
            for n in self.g.neighbors(v):
                if v < n:
                    self._push_pair(v, n)
            for a, b in self.g.constraints_of(v):
                if a != b:
                    self._push_pair(a, b)
        for fam in self._parked:
            self._parked[fam].clear()
        if clear_blocks:
            self._clear_blocks()

    def _clear_blocks(self) -> None:
        pass

    # -- mutation wrappers ----------------------------------------------

    def _del_edge(self, e: int) -> None:
        u, v = self.g.endpoints(e)
        live = self._snapshot((u, v))
        self.g.delete_edge(e)
        self._restore(live)
        self._push_vertex(u)
        self._push_vertex(v)
        self._push_pair(u, v)

    def _del_vertex(self, v: int) -> None:
        self._snapshot((v,))
        self.g.delete_vertex(v)

    def _contract(self, e: int) -> int:
        u, v = self.g.endpoints(e)
        gone = max(u, v)
        moved = list(self.g.neighbors(gone))
        live = self._snapshot((u, v))
        s = self.g.contract_edge(e)
        self._restore(live)
        self._push_vertex(s)
        for nbr in moved:
            x = s if nbr in (u, v) else nbr
            self._push_vertex(x)
            self._push_pair(s, x)
        for a, b in self.g.constraints_of(s):
            other = b if a == s else a
            self._push_vertex(other)
            self._push_pair(s, other)
        self._con_touched.add(s)
        return s

    def _add_con(self, u: int, v: int) -> tuple[int, int]:
        live = self._snapshot((u, v))
        added = self.g.add_constraint(u, v)
        self._restore(live)
        self._push_vertex(u)
        self._push_vertex(v)
        self._push_pair(u, v)
        if added:
            self.green_gen += 1
            self._release_parked(self.PATH_FAMILIES)
        self._con_touched.update((u, v))
        return pair_key(u, v)

    def _del_con(self, u: int, v: int) -> None:
        live = self._snapshot((u, v))
        self.g.remove_constraint(u, v)
        self._restore(live)
        self._push_vertex(u)
        self._push_vertex(v)

    def _add_vertex(self) -> int:
        v = self.g.add_vertex()
        self._count(v, +1)
        self._push_vertex(v)
        return v

    def _emit(self, rule: str, **fields) -> ReductionStep:
        # conflicts count only on settled states: a compound rule may pass a
        # vertex through two constraints before deduplication merges them
        g = self.g
        for v in self._con_touched:
            if g.has_vertex(v) and g.constraint_degree(v) > 1:
                self.conflict = True
        self._con_touched.clear()
        step = ReductionStep(rule=rule, **fields)
        self.steps += 1
        if self.record:
            self.trace.append(step)
        return step

    # -- driving ---------------------------------------------------------

    def preprocess(self) -> None:
        """Normalize loops and heavy parallel classes before the main loop."""
        for v in [v for v in self.g.vertices() if self.g.has_loop(v)]:
            self._apply_L(v)
            if self.conflict:
                return
        for u, v in [
            (u, v)
            for u in self.g.vertices()
            for v in self.g.neighbors(u)
            if u < v and self.g.parallel_count(u, v) >= 3
        ]:
            self._apply_M(u, v)
            if self.conflict:
                return

    def find_step(self) -> ReductionStep | None:
        step = self._find_pass()
        if step is None and self.incremental:
            self._reseed()
            step = self._find_pass()
            if step is not None:
                self.scan_fallbacks += 1
        return step

    def _find_pass(self) -> ReductionStep | None:
        for fam in self.order:
            step = getattr(self, "_find_" + fam)()
            if step is not None:
                return step
        return None

    def stuck_reject(self) -> str | None:
        return None

    # provided by subclasses
    def _apply_L(self, v):  # pragma: no cover - abstract
        raise NotImplementedError

    def _apply_M(self, u, v):  # pragma: no cover - abstract
        raise NotImplementedError


# ----------------------------------------------------------------------
# engine entry points


def _full_components(g: Multigraph) -> list[set[int]]:
    """Connected components counting both black and constraint edges."""
    comps = g.components()
    if not comps:
        return []
    owner: dict[int, int] = {}
    for i, comp in enumerate(comps):
        for v in comp:
            owner[v] = i
    parent = list(range(len(comps)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in g.constraints:
        ra, rb = find(owner[a]), find(owner[b])
        if ra != rb:
            parent[ra] = rb
    merged: dict[int, set[int]] = {}
    for i, comp in enumerate(comps):
        merged.setdefault(find(i), set()).update(comp)
    return sorted(merged.values(), key=min)


def run(
    g: Multigraph,
    flavor: str,
    *,
    order: list[str] | None = None,
    record_trace: bool = True,
    incremental: bool | None = None,
    mutate: bool = False,
) -> Verdict:
    """Decide whether the graph's gonality (in the requested flavor) is <= 2.

    The input is copied unless ``mutate`` is set.  Disconnected graphs are
    accepted exactly when they consist of two constraint-free trees (gonality
    1 + 1); otherwise the flavor's rule set reduces the single component.
    """
    work = g if mutate else g.copy()
    if incremental is None:
        incremental = work.vertex_count > INCREMENTAL_THRESHOLD
    n0 = work.vertex_count
    budget = rule_application_budget(n0, flavor)
    is_tree = (
        n0 >= 1
        and work.constraint_count == 0
        and work.betti() == 0
        and work.is_connected()
    )
    verdict = Verdict(True, REDUCED, flavor, is_tree=is_tree, budget=budget)
    if n0 == 0:
        return verdict

    comps = _full_components(work)
    if len(comps) > 1:
        ok = len(comps) == 2 and work.constraint_count == 0
        if ok:
            for comp in comps:
                edges = sum(
                    1 for _, (u, v) in work.edge_items() if u in comp and v in comp
                )
                if edges != len(comp) - 1:
                    ok = False
                    break
        if not ok:
            verdict.answer = False
            verdict.reason = DISCONNECTED
            return verdict
        for comp in comps:
            sub = run(
                work.copy_induced(comp),
                flavor,
                order=order,
                record_trace=record_trace,
                incremental=incremental,
                mutate=True,
            )
            if not sub.answer:  # pragma: no cover - trees always reduce
                raise EngineError("tree component failed to reduce")
            verdict.trace.extend(sub.trace)
            verdict.steps_total += sub.steps_total
            verdict.steps_main += sub.steps_main
        return verdict

    rules = make_rules(flavor, work, order=order, incremental=incremental,
                       record_trace=record_trace)
    if not rules.conflict:
        rules.preprocess()
    pre_steps = rules.steps

    def finish(answer: bool, reason: str) -> Verdict:
        verdict.answer = answer
        verdict.reason = reason
        verdict.trace = rules.trace
        verdict.steps_total = rules.steps
        verdict.steps_main = rules.steps - pre_steps
        verdict.scan_fallbacks = rules.scan_fallbacks
        return verdict

    if rules.conflict:
        return finish(False, CONFLICT)
    if not tw_at_most_2(work):
        return finish(False, TW_REJECT)
    while work.vertex_count:
        step = rules.find_step()
        if step is None:
            return finish(False, rules.stuck_reject() or STUCK)
        if rules.steps - pre_steps > budget:
            raise EngineError(
                f"{flavor} exceeded its {budget}-step budget on n={n0}"
            )
        if rules.conflict:
            return finish(False, CONFLICT)
    return finish(True, REDUCED)


def step(g: Multigraph, flavor: str, *, order: list[str] | None = None) -> ReductionStep | None:
    """Apply exactly one rule instance in priority order, mutating g."""
    rules = make_rules(flavor, g, order=order, incremental=False, record_trace=True)
    return rules.find_step()


def replay_trace(g: Multigraph, trace) -> Multigraph:
    """Re-apply recorded steps to (a copy of) g and return the result."""
    h = g.copy()
    for s in trace:
        for pair in s.removed_constraints:
            h.remove_constraint(*pair)
        for e in s.removed_edge_ids:
            h.delete_edge(e)
        for v in s.removed_vertices:
            h.delete_vertex(v)
        if s.added_constraint is not None:
            h.add_constraint(*s.added_constraint)
        if s.added_vertex is not None:
            nv = h.add_vertex()
            if nv != s.added_vertex:
                raise EngineError(f"replay produced vertex {nv}, trace says {s.added_vertex}")
        for e in s.contracted_edges:
            h.contract_edge(e)
    return h
