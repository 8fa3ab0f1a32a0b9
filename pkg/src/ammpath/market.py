"""Binary-outcome prediction market on a constant-product pool.

YES tokens sit in ``reserve_x`` and NO tokens in ``reserve_y``; the implied
probability of YES is ``no / (yes + no)``.  A trade of NO tokens into the
pool (``Swap(Token.Y, ...)``) pushes the YES probability up.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ammpath.paths import SequenceError, apply_sequence
from ammpath.pool import (
    AddLiquidity,
    DegeneratePoolError,
    Number,
    Operation,
    Pool,
    PoolError,
    RemoveLiquidity,
    Swap,
    Token,
    apply_operation,
    to_fraction,
)

YES = Token.X
NO = Token.Y


@dataclass(frozen=True)
class MarketPool:
    pool: Pool

    @classmethod
    def create(cls, yes_reserve: Number, no_reserve: Number, fee: Number = 0) -> "MarketPool":
        return cls(Pool(to_fraction(yes_reserve), to_fraction(no_reserve), to_fraction(fee)))

    @property
    def yes_reserve(self) -> Fraction:
        return self.pool.reserve_x

    @property
    def no_reserve(self) -> Fraction:
        return self.pool.reserve_y

    def apply(self, op: Operation) -> "MarketPool":
        return MarketPool(apply_operation(self.pool, op))


def implied_probability(market: MarketPool) -> Fraction:
    if not market.pool.tradable:
        raise DegeneratePoolError("implied probability undefined for an empty side")
    return market.no_reserve / (market.yes_reserve + market.no_reserve)


@dataclass(frozen=True)
class TrajectoryStep:
    op: Operation
    market: MarketPool
    probability: Fraction


def run_scenario_path(market0: MarketPool, ops: Sequence[Operation]) -> tuple[list[TrajectoryStep], Fraction]:
    steps = []
    market = market0
    for i, op in enumerate(ops):
        try:
            market = market.apply(op)
        except PoolError as exc:
            raise SequenceError(i, op, exc) from exc
        steps.append(TrajectoryStep(op, market, implied_probability(market)))
    return steps, implied_probability(market)


def closed_form_prob_path1(x0: Number, y0: Number, alpha: Number, delta_y: Number) -> Fraction:
    """YES probability when liquidity ``alpha`` is added before ``delta_y`` NO is traded in."""
    x0, y0, alpha, delta_y = map(to_fraction, (x0, y0, alpha, delta_y))
    g = 1 + alpha
    k0 = x0 * y0
    y2 = y0 * g + delta_y
    x2 = k0 * g * g / y2
    return y2 / (x2 + y2)


def closed_form_prob_path2(x0: Number, y0: Number, alpha: Number, delta_y: Number) -> Fraction:
    """YES probability when the trade precedes the liquidity addition (independent of ``alpha``)."""
    x0, y0, alpha, delta_y = map(to_fraction, (x0, y0, alpha, delta_y))
    g = 1 + alpha
    k0 = x0 * y0
    y2 = (y0 + delta_y) * g
    x2 = k0 * g / (y0 + delta_y)
    return y2 / (x2 + y2)


def divergence_table(x0: Number, y0: Number, delta_y: Number, alphas: Sequence[Number]) -> list[tuple[Fraction, Fraction]]:
    """``(alpha, 100 * (P_path2 - P_path1))`` in percentage points for each alpha."""
    rows = []
    for a in map(to_fraction, alphas):
        if a < 0:
            raise PoolError(f"alpha must be nonnegative, got {a}")
        diff = closed_form_prob_path2(x0, y0, a, delta_y) - closed_form_prob_path1(x0, y0, a, delta_y)
        rows.append((a, 100 * diff))
    return rows


def liquidity_position_probs(
    market0: MarketPool, alpha: Number, delta_y: Number, fragments: int
) -> list[Fraction]:
    """Final YES probability with one liquidity addition placed after ``j`` of
    ``fragments`` equal NO trades, for ``j = 0 .. fragments``.

    Entry 0 is the liquidity-first ordering and the last entry the
    trade-first ordering.
    """
    if fragments < 1:
        raise PoolError("fragments must be at least 1")
    piece = Swap(NO, to_fraction(delta_y) / fragments)
    add = AddLiquidity(alpha)
    probs = []
    for j in range(fragments + 1):
        ops: list[Operation] = [piece] * j + [add] + [piece] * (fragments - j)
        probs.append(run_scenario_path(market0, ops)[1])
    return probs


def fragmented_divergence(market0: MarketPool, alpha: Number, delta_y: Number, fragments: int) -> Fraction:
    """Divergence in pp between liquidity-last and liquidity-first with the trade split ``fragments`` ways."""
    probs = liquidity_position_probs(market0, alpha, delta_y, fragments)
    return 100 * (probs[-1] - probs[0])


@dataclass(frozen=True)
class MonteCarloSummary:
    n_paths: int
    seed: int
    final_probs: tuple[Fraction, ...]
    rejected: int
    min: Fraction | None
    max: Fraction | None
    mean: Fraction | None
    stddev: float
    spread: Fraction
    distinct: tuple[Fraction, ...] = field(default=())

    @property
    def spread_pp(self) -> Fraction:
        return 100 * self.spread


def _sample_stddev(values: Sequence[Fraction], mean: Fraction) -> float:
    if len(values) < 2:
        return 0.0
    ss = sum((v - mean) ** 2 for v in values)
    return math.sqrt(ss / (len(values) - 1))


def monte_carlo_paths(market0: MarketPool, ops: Sequence[Operation], n: int, seed: int) -> MonteCarloSummary:
    """Evaluate ``n`` random orderings of ``ops`` and summarise final YES probabilities.

    Orderings are drawn with :class:`random.Random` (MT19937) seeded with
    ``seed``, one Fisher-Yates shuffle of the operation list per path.  An
    ordering that makes some operation invalid is counted in ``rejected``
    and contributes no probability.
    """
    if n < 1:
        raise PoolError("n must be at least 1")
    if not 0 <= seed < 2**64:
        raise PoolError("seed must be an unsigned 64-bit integer")
    rng = random.Random(seed)
    base = list(ops)
    finals: list[Fraction] = []
    rejected = 0
    for _ in range(n):
        order = base[:]
        rng.shuffle(order)
        try:
            finals.append(implied_probability(MarketPool(apply_sequence(market0.pool, order))))
        except PoolError:
            rejected += 1
    if not finals:
        return MonteCarloSummary(n, seed, (), rejected, None, None, None, 0.0, Fraction(0))
    lo, hi = min(finals), max(finals)
    mean = sum(finals, Fraction(0)) / len(finals)
    return MonteCarloSummary(
        n_paths=n,
        seed=seed,
        final_probs=tuple(finals),
        rejected=rejected,
        min=lo,
        max=hi,
        mean=mean,
        stddev=_sample_stddev(finals, mean),
        spread=hi - lo,
        distinct=tuple(sorted(set(finals))),
    )


__all__ = [
    "AddLiquidity",
    "MarketPool",
    "MonteCarloSummary",
    "NO",
    "RemoveLiquidity",
    "Swap",
    "TrajectoryStep",
    "YES",
    "closed_form_prob_path1",
    "closed_form_prob_path2",
    "divergence_table",
    "fragmented_divergence",
    "implied_probability",
    "liquidity_position_probs",
    "monte_carlo_paths",
    "run_scenario_path",
]
