"""Operation sequences, ordering comparisons and the non-commutativity closed forms."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ammpath.pool import (
    AddLiquidity,
    Number,
    Operation,
    Pool,
    PoolError,
    Swap,
    Token,
    apply_operation,
    spot_price,
    to_fraction,
)

# Ordering labels used throughout reports.
CASE_1 = "liquidity-then-swap"
CASE_2 = "swap-then-liquidity"


class SequenceError(PoolError):
    """An operation in a sequence failed; ``index`` locates it."""

    def __init__(self, index: int, op: Operation, cause: Exception):
        super().__init__(f"operation {index} ({op!r}) failed: {cause}")
        self.index = index
        self.op = op
        self.cause = cause


@dataclass(frozen=True)
class PathComparison:
    final_ab: Pool
    final_ba: Pool
    delta_x: Fraction
    delta_y: Fraction
    price_impact_pct: Fraction


@dataclass(frozen=True)
class HeatmapCell:
    alpha: Fraction
    swap_amount: Fraction
    price_impact_pct: Fraction


def apply_sequence(pool: Pool, ops: Iterable[Operation]) -> Pool:
    for i, op in enumerate(ops):
        try:
            pool = apply_operation(pool, op)
        except PoolError as exc:
            raise SequenceError(i, op, exc) from exc
    return pool


def price_impact_pct(final_ab: Pool, final_ba: Pool) -> Fraction:
    """Percent change of the B-then-A spot price relative to A-then-B.

    With A a liquidity addition and B a swap of X in, this is negative: the
    swap-first ordering ends at the lower price.
    """
    p_ab = spot_price(final_ab)
    p_ba = spot_price(final_ba)
    if p_ab == 0:
        raise PoolError("reference price is zero")
    return 100 * (p_ba - p_ab) / p_ab


def commute_compare(pool: Pool, op_a: Operation, op_b: Operation) -> PathComparison:
    final_ab = apply_sequence(pool, [op_a, op_b])
    final_ba = apply_sequence(pool, [op_b, op_a])
    return PathComparison(
        final_ab=final_ab,
        final_ba=final_ba,
        delta_x=final_ba.reserve_x - final_ab.reserve_x,
        delta_y=final_ab.reserve_y - final_ba.reserve_y,
        price_impact_pct=price_impact_pct(final_ab, final_ba),
    )


def closed_form_x_diff(delta_x_in: Number, alpha: Number) -> Fraction:
    return to_fraction(delta_x_in) * to_fraction(alpha)


def closed_form_y_states(x0: Number, y0: Number, alpha: Number, delta_x: Number) -> tuple[Fraction, Fraction]:
    """Final Y reserves for add-then-swap (y2) and swap-then-add (y2_prime)."""
    x0, y0, alpha, delta_x = map(to_fraction, (x0, y0, alpha, delta_x))
    k0 = x0 * y0
    g = 1 + alpha
    y2 = k0 * g * g / (x0 * g + delta_x)
    y2_prime = k0 * g / (x0 + delta_x)
    return y2, y2_prime


def heatmap_grid(pool0: Pool, alphas: Sequence[Number], swap_amounts: Sequence[Number]) -> list[HeatmapCell]:
    """Price impact of adding ``alpha`` liquidity around an X-in swap, per grid cell.

    Cells are ordered alpha-major.  ``alpha == 0`` rows are defined as zero
    impact since both orderings coincide.
    """
    cells = []
    for a in map(to_fraction, alphas):
        if a < 0:
            raise PoolError(f"grid alpha must be nonnegative, got {a}")
        for dx in map(to_fraction, swap_amounts):
            if dx <= 0:
                raise PoolError(f"grid swap amount must be positive, got {dx}")
            if a == 0:
                impact = Fraction(0)
            else:
                impact = commute_compare(pool0, AddLiquidity(a), Swap(Token.X, dx)).price_impact_pct
            cells.append(HeatmapCell(a, dx, impact))
    return cells


def frange(start: Number, stop: Number, step: Number) -> list[Fraction]:
    """Inclusive exact range ``start, start+step, ..., <= stop``."""
    start, stop, step = map(to_fraction, (start, stop, step))
    if step <= 0:
        raise PoolError("step must be positive")
    if stop < start:
        raise PoolError("range stop precedes start")
    n = int((stop - start) / step)
    return [start + i * step for i in range(n + 1)]


def default_alphas() -> list[Fraction]:
    return frange("0.01", "0.50", "0.01")


def default_swap_amounts() -> list[Fraction]:
    return frange(1, 20, 1)
