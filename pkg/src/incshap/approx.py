"""Permutation-sampling estimator with explicit (epsilon, delta) contracts.

Additive mode draws enough permutations for a two-sided Hoeffding bound at
the measure's marginal range; multiplicative mode (drastic and repair-cost
only) tightens epsilon by the gap bound 1/(n*(n-1)) below which nonzero
values cannot fall.  Sampling is deterministic given the seed: each sample
uses its own generator keyed by SHA-256(seed:index), so results are
independent of any parallel scheduling of the samples.
"""

from __future__ import annotations

import enum
import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, InputError, UnsupportedModeError
from .fd_analysis import TractabilityKind, classify
from .measures import CoalitionEvaluator, MeasureKind
from .relational import Database, Fact, FDSet


class Mode(enum.Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


class Guarantee(enum.Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"
    NO_GUARANTEE = "none"


@dataclass(frozen=True)
class ApproxParams:
    epsilon: float
    delta: float
    mode: Mode = Mode.ADDITIVE
    seed: int = 0
    samples_override: int | None = None

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise InputError("epsilon must lie strictly in (0, 1)")
        if not 0 < self.delta < 1:
            raise InputError("delta must lie strictly in (0, 1)")
        if self.samples_override is not None and self.samples_override < 1:
            raise InputError("sample-count override must be positive")


@dataclass(frozen=True)
class Estimate:
    value: Fraction
    samples_used: int
    marginal_range: int | None
    guarantee: Guarantee


def marginal_bound(kind: MeasureKind, n: int) -> int | None:
    """Largest possible per-permutation contribution, or None when unbounded.

    Adding one fact flips the drastic flag or raises the repair cost by at
    most one; it can create up to n-1 new violating pairs, or make up to n
    facts (itself included) newly problematic.  The repair count can jump
    by an amount exponential in n, so it carries no usable bound.
    """
    return {
        MeasureKind.DRASTIC: 1,
        MeasureKind.R: 1,
        MeasureKind.MI: max(n - 1, 1),
        MeasureKind.P: max(n, 1),
        MeasureKind.MC: None,
    }[kind]


def _hoeffding_count(epsilon: float, delta: float, value_range: int) -> int:
    return math.ceil(value_range**2 * math.log(2 / delta) / (2 * epsilon**2))


def sample_count(params: ApproxParams, n: int, kind: MeasureKind) -> int:
    """Permutations needed for the requested guarantee on an n-fact database."""
    if params.samples_override is not None:
        return params.samples_override
    bound = marginal_bound(kind, n)
    if params.mode is Mode.MULTIPLICATIVE:
        if kind in (MeasureKind.MI, MeasureKind.P):
            raise UnsupportedModeError(
                f"multiplicative mode is unsupported for {kind.value!r}; "
                "an exact polynomial algorithm exists; use --method exact"
            )
        if kind is MeasureKind.MC:
            # No multiplicative scheme is known for the repair count; fall
            # back to the additive default and report no guarantee.
            return _hoeffding_count(params.epsilon, params.delta, 1)
        epsilon = params.epsilon / (n * (n - 1)) if n >= 2 else params.epsilon
        return _hoeffding_count(epsilon, params.delta, bound)
    if bound is None:
        # Unbounded marginals: run the additive budget for range 1 and
        # report no guarantee.
        return _hoeffding_count(params.epsilon, params.delta, 1)
    return _hoeffding_count(params.epsilon, params.delta, bound)


def _guarantee(params: ApproxParams, kind: MeasureKind, db, fds) -> Guarantee:
    if kind is MeasureKind.MC or params.samples_override is not None:
        return Guarantee.NO_GUARANTEE
    if params.mode is Mode.ADDITIVE:
        return Guarantee.ADDITIVE
    if kind is MeasureKind.R:
        # The sampled bound still holds, but repair-cost marginals on a
        # hard-classified relation are themselves exponential-time in the
        # worst case, so the polynomial multiplicative claim is dropped.
        kinds = {c.kind for c in classify(fds).values()}
        if TractabilityKind.HARD_CREPAIR in kinds:
            return Guarantee.NO_GUARANTEE
    return Guarantee.MULTIPLICATIVE


def _sample_rng(seed: int, index: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def estimate_shapley(
    db: Database,
    fds: FDSet,
    fact: Fact,
    kind: MeasureKind,
    params: ApproxParams,
    engine: CoalitionEvaluator | None = None,
    budget: int | None = None,
) -> Estimate:
    """Mean marginal contribution over seeded random permutations.

    Deterministic given (inputs, params, seed).  The returned value is the
    exact rational mean of the sampled integer marginals.
    """
    if fact not in db:
        raise InputError(f"fact {fact.id} is not in the database")
    n = len(db)
    samples = sample_count(params, n, kind)
    guarantee = _guarantee(params, kind, db, fds)
    if engine is None:
        engine = CoalitionEvaluator(db, fds, budget=budget)
    f_bit = 1 << engine.bit_of[fact.id]
    order_template = list(range(n))
    bound = marginal_bound(kind, n)
    total = 0
    for index in range(samples):
        rng = _sample_rng(params.seed, index)
        order = order_template[:]
        rng.shuffle(order)
        mask = 0
        for i in order:
            bit = 1 << i
            if bit == f_bit:
                break
            mask |= bit
        try:
            marginal = engine.value(kind, mask | f_bit) - engine.value(kind, mask)
        except BudgetExceededError as exc:
            raise BudgetExceededError(
                f"measure evaluation aborted on a sampled coalition of size "
                f"{mask.bit_count()}: {exc}",
                coalition_size=mask.bit_count(),
            ) from exc
        if bound is not None:
            assert 0 <= marginal <= bound, (
                f"marginal {marginal} outside [0, {bound}] for {kind.value}"
            )
        total += marginal
    return Estimate(
        value=Fraction(total, samples),
        samples_used=samples,
        marginal_range=bound,
        guarantee=guarantee,
    )
