"""Normative brute-force Shapley computation for small instances.

Two independent routes: the weighted sum over all coalitions, and the
average marginal over all permutations.  Both are exact and agree
algebraically; the test suite uses them as the ground truth for every
other algorithm in the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial

from .errors import InputError, OracleLimitError
from .measures import CoalitionEvaluator, MeasureKind
from .relational import Database, Fact, FDSet


@dataclass(frozen=True)
class OracleLimits:
    max_facts_subsets: int = 18
    max_facts_perms: int = 8

    def __post_init__(self):
        if self.max_facts_subsets <= 0 or self.max_facts_perms <= 0:
            raise InputError("oracle limits must be positive")


DEFAULT_LIMITS = OracleLimits()


def _prepare(db, fds, fact, limit, limit_name, engine):
    if fact not in db:
        raise InputError(f"fact {fact.id} is not in the database")
    n = len(db)
    if n > limit:
        raise OracleLimitError(
            f"database has {n} facts, above the {limit_name} limit of {limit}"
        )
    if engine is None:
        engine = CoalitionEvaluator(db, fds)
    return n, engine


def shapley_bruteforce_subsets(
    db: Database,
    fds: FDSet,
    fact: Fact,
    kind: MeasureKind,
    limits: OracleLimits = DEFAULT_LIMITS,
    engine: CoalitionEvaluator | None = None,
) -> Fraction:
    """Exact weighted sum over every coalition not containing the fact.

    Coalitions are walked in Gray-code order over the remaining facts, and
    the per-coalition measure values come from the shared evaluator whose
    repair-cost/repair-count results are memoized by induced subgraph, so
    the full 2^(n-1) enumeration stays cheap at the size limit.  Passing a
    prebuilt `engine` shares those memos across facts and measures.
    """
    n, engine = _prepare(
        db, fds, fact, limits.max_facts_subsets, "subset-enumeration", engine
    )
    f_bit = 1 << engine.bit_of[fact.id]
    others = [i for i in range(n) if (1 << i) != f_bit]
    total = 0
    mask = 0
    weights = [factorial(m) * factorial(n - m - 1) for m in range(n)]
    for code in range(1 << len(others)):
        gray = code ^ (code >> 1)
        if code:
            flipped = (gray ^ ((code - 1) ^ ((code - 1) >> 1))).bit_length() - 1
            mask ^= 1 << others[flipped]
        m = mask.bit_count()
        diff = engine.value(kind, mask | f_bit) - engine.value(kind, mask)
        if diff:
            total += weights[m] * diff
    return Fraction(total, factorial(n))


def shapley_bruteforce_perms(
    db: Database,
    fds: FDSet,
    fact: Fact,
    kind: MeasureKind,
    limits: OracleLimits = DEFAULT_LIMITS,
    engine: CoalitionEvaluator | None = None,
) -> Fraction:
    """Exact average marginal contribution over all |D|! permutations."""
    n, engine = _prepare(
        db, fds, fact, limits.max_facts_perms, "permutation-enumeration", engine
    )
    f_bit = 1 << engine.bit_of[fact.id]
    total = 0
    for perm in permutations(range(n)):
        mask = 0
        for i in perm:
            bit = 1 << i
            if bit == f_bit:
                break
            mask |= bit
        total += engine.value(kind, mask | f_bit) - engine.value(kind, mask)
    return Fraction(total, factorial(n))
