"""Relational core: schemas, facts, databases, FDs, and conflict graphs.

Constants are opaque strings compared by exact equality; databases are sets
(duplicate rows within a relation are rejected).  Everything here is
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InputError, SchemaError


@dataclass(frozen=True)
class Schema:
    """Relation names mapped to their ordered attribute lists."""

    relations: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        seen = set()
        for name, attrs in self.relations:
            if name in seen:
                raise SchemaError(f"duplicate relation name {name!r}")
            seen.add(name)
            if not attrs:
                raise SchemaError(f"relation {name!r} has no attributes")
            if len(set(attrs)) != len(attrs):
                raise SchemaError(f"relation {name!r} has duplicate attributes")

    @classmethod
    def from_dict(cls, mapping: dict[str, Iterable[str]]) -> "Schema":
        return cls(tuple((name, tuple(attrs)) for name, attrs in mapping.items()))

    @property
    def relation_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def attributes(self, relation: str) -> tuple[str, ...]:
        for name, attrs in self.relations:
            if name == relation:
                return attrs
        raise SchemaError(f"unknown relation {relation!r}")

    def has_relation(self, relation: str) -> bool:
        return any(name == relation for name, _ in self.relations)

    def position(self, relation: str, attribute: str) -> int:
        attrs = self.attributes(relation)
        try:
            return attrs.index(attribute)
        except ValueError:
            raise SchemaError(
                f"unknown attribute {attribute!r} in relation {relation!r}"
            ) from None

    def project(self, fact: "Fact", attributes: Iterable[str]) -> tuple[str, ...]:
        """Values of `fact` on `attributes`, in sorted attribute order."""
        return tuple(
            fact.values[self.position(fact.relation, a)] for a in sorted(attributes)
        )


@dataclass(frozen=True)
class Fact:
    """One tuple.  ``index`` is the zero-based load position within its relation."""

    relation: str
    values: tuple[str, ...]
    index: int

    @property
    def id(self) -> str:
        return f"{self.relation}:{self.index}"

    def __repr__(self):
        return f"Fact({self.id}={','.join(self.values)})"


@dataclass(frozen=True)
class FD:
    """Functional dependency lhs -> rhs over one relation."""

    relation: str
    lhs: frozenset[str]
    rhs: frozenset[str]

    def __str__(self):
        left = " ".join(sorted(self.lhs)) if self.lhs else "_"
        return f"{self.relation}: {left} -> {' '.join(sorted(self.rhs))}"

    def sort_key(self):
        return (len(self.lhs), tuple(sorted(self.lhs)), tuple(sorted(self.rhs)))


@dataclass(frozen=True)
class FDSet:
    """A set of FDs together with the schema they are validated against."""

    schema: Schema
    fds: tuple[FD, ...]

    def __post_init__(self):
        for fd in self.fds:
            attrs = set(self.schema.attributes(fd.relation))
            unknown = (fd.lhs | fd.rhs) - attrs
            if unknown:
                raise SchemaError(
                    f"FD {fd} uses unknown attributes {sorted(unknown)}"
                )
            if not fd.rhs:
                raise SchemaError(f"FD {fd} has an empty right-hand side")

    def per_relation(self, relation: str) -> tuple[FD, ...]:
        if not self.schema.has_relation(relation):
            raise SchemaError(f"unknown relation {relation!r}")
        return tuple(fd for fd in self.fds if fd.relation == relation)

    def __iter__(self) -> Iterator[FD]:
        return iter(self.fds)

    def __len__(self) -> int:
        return len(self.fds)


@dataclass(frozen=True)
class Database:
    """Facts partitioned by relation, kept in deterministic load order."""

    schema: Schema
    facts: tuple[Fact, ...] = field(default=())

    def __post_init__(self):
        for fact in self.facts:
            attrs = self.schema.attributes(fact.relation)
            if len(fact.values) != len(attrs):
                raise SchemaError(
                    f"fact {fact.id} has {len(fact.values)} values, "
                    f"expected {len(attrs)}"
                )
        for relation in self.schema.relation_names:
            seen: dict[tuple[str, ...], Fact] = {}
            for fact in self.facts_of(relation):
                if fact.values in seen:
                    raise InputError(
                        f"duplicate fact in relation {relation!r}: "
                        f"{fact.id} repeats {seen[fact.values].id}"
                    )
                seen[fact.values] = fact

    @classmethod
    def build(cls, schema: Schema, rows: dict[str, Iterable[Iterable[str]]]) -> "Database":
        """Construct from per-relation row lists, assigning load indexes."""
        facts = []
        for relation in schema.relation_names:
            for i, row in enumerate(rows.get(relation, ())):
                facts.append(Fact(relation, tuple(row), i))
        return cls(schema, tuple(facts))

    def facts_of(self, relation: str) -> tuple[Fact, ...]:
        return tuple(f for f in self.facts if f.relation == relation)

    def get(self, fact_id: str) -> Fact:
        for fact in self.facts:
            if fact.id == fact_id:
                return fact
        raise InputError(f"no fact with id {fact_id!r}")

    def __contains__(self, fact: Fact) -> bool:
        return fact in self.facts

    def __len__(self) -> int:
        return len(self.facts)


@dataclass(frozen=True)
class ConflictGraph:
    """Pairs of same-relation facts that jointly violate at least one FD.

    Vertices are the relation's load indexes; edges are (i, j) with i < j.
    """

    relation: str
    facts: tuple[Fact, ...]
    edges: tuple[tuple[int, int], ...]

    @property
    def n(self) -> int:
        return len(self.facts)

    def neighbors(self, index: int) -> frozenset[int]:
        return self._adjacency()[index]

    def degree(self, index: int) -> int:
        return len(self._adjacency()[index])

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in set(self.edges)

    def _adjacency(self) -> dict[int, frozenset[int]]:
        adj: dict[int, set[int]] = {i: set() for i in range(self.n)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return {i: frozenset(s) for i, s in adj.items()}


def _check_same_schema(f: Fact, g: Fact, fds: FDSet) -> None:
    for fact in (f, g):
        if not fds.schema.has_relation(fact.relation):
            raise SchemaError(f"fact {fact.id} is not over the FD set's schema")
        if len(fact.values) != len(fds.schema.attributes(fact.relation)):
            raise SchemaError(f"fact {fact.id} has the wrong arity for its relation")


def violates(f: Fact, g: Fact, fds: FDSet) -> bool:
    """True iff f and g jointly violate some FD: equal on a lhs, different on its rhs."""
    _check_same_schema(f, g, fds)
    if f.relation != g.relation:
        return False
    schema = fds.schema
    for fd in fds.per_relation(f.relation):
        if schema.project(f, fd.lhs) == schema.project(g, fd.lhs) and (
            schema.project(f, fd.rhs) != schema.project(g, fd.rhs)
        ):
            return True
    return False


def build_conflict_graph(db: Database, fds: FDSet) -> dict[str, ConflictGraph]:
    """Per-relation conflict graphs; vertex order is fact load order.

    Edges are found by bucketing each relation's facts on every FD's lhs
    values and pairing across distinct rhs values inside a bucket, so the
    cost is near-linear in facts plus quadratic only inside conflicting
    groups.
    """
    if db.schema != fds.schema:
        raise SchemaError("database and FD set are over different schemas")
    graphs = {}
    for relation in db.schema.relation_names:
        facts = db.facts_of(relation)
        edges: set[tuple[int, int]] = set()
        for fd in fds.per_relation(relation):
            groups: dict[tuple[str, ...], list[Fact]] = {}
            for fact in facts:
                groups.setdefault(db.schema.project(fact, fd.lhs), []).append(fact)
            for group in groups.values():
                by_rhs: dict[tuple[str, ...], list[Fact]] = {}
                for fact in group:
                    by_rhs.setdefault(db.schema.project(fact, fd.rhs), []).append(fact)
                if len(by_rhs) < 2:
                    continue
                parts = list(by_rhs.values())
                for a, part in enumerate(parts):
                    for other in parts[a + 1 :]:
                        for x in part:
                            for y in other:
                                i, j = sorted((x.index, y.index))
                                edges.add((i, j))
        graphs[relation] = ConflictGraph(relation, facts, tuple(sorted(edges)))
    return graphs


def is_consistent(db: Database, fds: FDSet) -> bool:
    """For FDs, set consistency is equivalent to pairwise consistency."""
    return all(not g.edges for g in build_conflict_graph(db, fds).values())
