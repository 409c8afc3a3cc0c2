"""The five inconsistency measures, evaluated exactly on conflict graphs.

For FDs, a fact set is consistent iff it is pairwise consistent, so repairs
are exactly maximal independent sets of the conflict graph and the
cardinality-repair cost is its minimum vertex cover.  One engine therefore
covers every tractability class at desk scale; the vertex-cover and
repair-counting searches are exponential in the worst case and honor an
optional node budget.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .errors import BudgetExceededError, SchemaError
from .relational import Database, FDSet, build_conflict_graph


class MeasureKind(enum.Enum):
    DRASTIC = "d"
    MI = "mi"
    P = "p"
    R = "r"
    MC = "mc"


class CoalitionEvaluator:
    """Evaluates any measure on arbitrary fact subsets encoded as bitmasks.

    Bit i corresponds to ``facts[i]`` (database load order across relations).
    Vertex-cover and repair-count results are memoized per induced-subgraph
    mask, so repeated coalition queries (oracles, samplers) stay cheap.
    """

    def __init__(self, db: Database, fds: FDSet, budget: int | None = None):
        if db.schema != fds.schema:
            raise SchemaError("database and FD set are over different schemas")
        self.db = db
        self.fds = fds
        self.budget = budget
        self.facts = db.facts
        self.bit_of = {fact.id: i for i, fact in enumerate(self.facts)}
        self.full_mask = (1 << len(self.facts)) - 1
        self.adj = [0] * len(self.facts)
        self.graphs = build_conflict_graph(db, fds)
        for relation, graph in self.graphs.items():
            for i, j in graph.edges:
                gi = self.bit_of[graph.facts[i].id]
                gj = self.bit_of[graph.facts[j].id]
                self.adj[gi] |= 1 << gj
                self.adj[gj] |= 1 << gi
        self._vc_memo: dict[int, int] = {}
        self._mis_memo: dict[int, int] = {}

    def mask_of(self, fact_ids) -> int:
        mask = 0
        for fid in fact_ids:
            mask |= 1 << self.bit_of[fid]
        return mask

    def _bits(self, mask: int):
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def value(self, kind: MeasureKind, mask: int) -> int:
        if kind is MeasureKind.DRASTIC:
            return self.drastic(mask)
        if kind is MeasureKind.MI:
            return self.violating_pairs(mask)
        if kind is MeasureKind.P:
            return self.problematic(mask)
        if kind is MeasureKind.R:
            return self.repair_cost(mask)
        if kind is MeasureKind.MC:
            return self.repair_count(mask)
        raise ValueError(f"unknown measure kind {kind!r}")

    def drastic(self, mask: int) -> int:
        for i in self._bits(mask):
            if self.adj[i] & mask:
                return 1
        return 0

    def violating_pairs(self, mask: int) -> int:
        total = 0
        for i in self._bits(mask):
            total += (self.adj[i] & mask).bit_count()
        return total // 2

    def problematic(self, mask: int) -> int:
        return sum(1 for i in self._bits(mask) if self.adj[i] & mask)

    def _components(self, mask: int):
        remaining = mask
        while remaining:
            frontier = remaining & -remaining
            comp = 0
            while frontier:
                comp |= frontier
                grown = 0
                for i in self._bits(frontier):
                    grown |= self.adj[i] & remaining
                frontier = grown & ~comp
            yield comp
            remaining &= ~comp

    def repair_cost(self, mask: int) -> int:
        """Minimum vertex cover of the induced conflict graph."""
        return sum(self._vc(comp) for comp in self._components(mask))

    def _vc(self, mask: int, _nodes: list | None = None) -> int:
        if mask in self._vc_memo:
            return self._vc_memo[mask]
        if _nodes is None:
            _nodes = [0]
        _nodes[0] += 1
        if self.budget is not None and _nodes[0] > self.budget:
            raise BudgetExceededError(
                f"vertex-cover search exceeded the node budget of {self.budget}"
            )
        best_i, best_deg = -1, -1
        pendant = -1
        for i in self._bits(mask):
            deg = (self.adj[i] & mask).bit_count()
            if deg == 1 and pendant < 0:
                pendant = i
            if deg > best_deg:
                best_i, best_deg = i, deg
        if best_deg <= 0:
            result = 0
        elif pendant >= 0:
            # A degree-1 vertex: some minimum cover takes its neighbor.
            neighbor_bit = self.adj[pendant] & mask
            result = 1 + self._vc(mask & ~neighbor_bit & ~(1 << pendant), _nodes)
        else:
            take_v = 1 + self._vc(mask & ~(1 << best_i), _nodes)
            closed = (self.adj[best_i] & mask) | (1 << best_i)
            take_neighbors = best_deg + self._vc(mask & ~closed, _nodes)
            result = min(take_v, take_neighbors)
        self._vc_memo[mask] = result
        return result

    def repair_count(self, mask: int) -> int:
        """Number of maximal independent sets; 1 for the empty set."""
        result = 1
        for comp in self._components(mask):
            if comp in self._mis_memo:
                result *= self._mis_memo[comp]
                continue
            count = sum(1 for _ in self._maximal_independent_sets(comp))
            self._mis_memo[comp] = count
            result *= count
        return result

    def _maximal_independent_sets(self, mask: int):
        """Pivoting enumeration (clique search on the implicit complement)."""
        universe = mask
        nodes = [0]

        def nonadj(i: int) -> int:
            return universe & ~self.adj[i] & ~(1 << i)

        def extend(current: int, candidates: int, excluded: int):
            nodes[0] += 1
            if self.budget is not None and nodes[0] > self.budget:
                raise BudgetExceededError(
                    f"repair enumeration exceeded the node budget of {self.budget}"
                )
            if not candidates and not excluded:
                yield current
                return
            pivot = -1
            best = -1
            for i in self._bits(candidates | excluded):
                gain = (candidates & nonadj(i)).bit_count()
                if gain > best:
                    pivot, best = i, gain
            for i in self._bits(candidates & ~nonadj(pivot)):
                bit = 1 << i
                yield from extend(current | bit, candidates & nonadj(i), excluded & nonadj(i))
                candidates &= ~bit
                excluded |= bit

        yield from extend(0, mask, 0)


def measure(kind: MeasureKind, db: Database, fds: FDSet, budget: int | None = None) -> int:
    """Exact measure value of the whole database."""
    engine = CoalitionEvaluator(db, fds, budget=budget)
    return engine.value(kind, engine.full_mask)


@dataclass(frozen=True)
class RepairEnumeration:
    repairs: tuple[tuple[str, ...], ...]
    truncated: bool


def enumerate_repairs(db: Database, fds: FDSet, cap: int = 10000) -> RepairEnumeration:
    """All repairs (maximal consistent subsets) as sorted fact-id tuples.

    Per-relation maximal independent sets are combined by Cartesian product
    in schema relation order; output order is deterministic and the list is
    truncated at `cap` with an explicit flag.
    """
    engine = CoalitionEvaluator(db, fds)
    per_relation: list[list[tuple[int, ...]]] = []
    for relation in db.schema.relation_names:
        facts = db.facts_of(relation)
        if not facts:
            continue
        mask = engine.mask_of(f.id for f in facts)
        sets = []
        for mis in engine._maximal_independent_sets(mask):
            sets.append(tuple(sorted(engine._bits(mis))))
            if len(sets) > cap:
                break  # any prefix of the eventual product only needs this many
        per_relation.append(sorted(sets))

    combined = itertools.islice(itertools.product(*per_relation), cap + 1)
    flat = [tuple(itertools.chain.from_iterable(parts)) for parts in combined]
    truncated = len(flat) > cap
    repairs = tuple(
        tuple(engine.facts[i].id for i in members) for members in flat[:cap]
    )
    return RepairEnumeration(repairs, truncated)
