"""Normalized pool events, decimal handling, time windows and opportunity detection."""

from __future__ import annotations

import enum
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ammpath.paths import commute_compare
from ammpath.pool import AddLiquidity, Pool, Swap, Token, spot_price

log = logging.getLogger(__name__)

Q96 = 2**96


class EventKind(str, enum.Enum):
    SWAP = "swap"
    MINT = "mint"
    BURN = "burn"


@dataclass(frozen=True)
class PoolEvent:
    """One swap, mint or burn.

    Swap amounts are signed from the pool's point of view: positive means the
    token entered the pool.  ``price`` is token0 per token1, decimal-adjusted
    (USDC per ETH for the USDC/WETH pool) and is only known for swaps.
    """

    kind: EventKind
    tx_id: str
    timestamp: int
    amount0: Fraction
    amount1: Fraction
    amount_usd: float
    price: float | None = None
    block_number: int | None = None
    event_id: str = ""

    @property
    def is_liquidity(self) -> bool:
        return self.kind is not EventKind.SWAP


@dataclass(frozen=True)
class PoolMetadata:
    pool_id: str
    token0_decimals: int
    token1_decimals: int
    fee_tier: int
    tvl_usd: float | None = None
    token0_symbol: str = ""
    token1_symbol: str = ""

    def __post_init__(self) -> None:
        for d in (self.token0_decimals, self.token1_decimals):
            if not 0 <= d <= 36:
                raise ValueError(f"token decimals out of range: {d}")


@dataclass(frozen=True)
class OraclePoint:
    block_number: int
    timestamp: int
    eth_usd: float


@dataclass(frozen=True)
class OpportunityWindow:
    window_start: int
    swap_usd: float
    liquidity_usd: float
    alpha_est: float
    price_impact_pct: float
    price_case1: float
    price_case2: float
    n_swaps: int = 0
    n_liquidity: int = 0
    mean_price: float = 0.0


def adjust_amount(raw: int, decimals: int) -> Fraction:
    return Fraction(raw, 10**decimals)


def to_raw_amount(amount: Fraction, decimals: int) -> int:
    scaled = Fraction(amount) * 10**decimals
    if scaled.denominator != 1:
        raise ValueError(f"{amount} is not representable with {decimals} decimals")
    return scaled.numerator


def price_from_sqrt_x96(sqrt_price_x96: int, decimals0: int, decimals1: int) -> Fraction:
    """Token0 per token1 (decimal-adjusted) from a v3 ``sqrtPriceX96``."""
    if sqrt_price_x96 <= 0:
        raise ValueError("sqrtPriceX96 must be positive")
    token1_per_token0_raw = Fraction(sqrt_price_x96 * sqrt_price_x96, Q96 * Q96)
    token1_per_token0 = token1_per_token0_raw * Fraction(10**decimals0, 10**decimals1)
    return 1 / token1_per_token0


def price_deviation(amm_price: float, oracle_price: float) -> float:
    if not oracle_price > 0:
        raise ValueError(f"oracle price must be positive, got {oracle_price}")
    return (amm_price - oracle_price) / oracle_price


def filter_events(events: Iterable[PoolEvent], min_usd: float = 1.0) -> list[PoolEvent]:
    return [e for e in events if abs(e.amount_usd) >= min_usd]


def window_events(events: Sequence[PoolEvent], width: int = 60) -> list[tuple[int, list[PoolEvent]]]:
    """Partition time-sorted events into epoch-aligned windows ``[t, t + width)``."""
    if width <= 0:
        raise ValueError("window width must be positive")
    windows: list[tuple[int, list[PoolEvent]]] = []
    prev = None
    for e in events:
        if prev is not None and e.timestamp < prev:
            raise ValueError("events must be sorted by timestamp")
        prev = e.timestamp
        start = e.timestamp - e.timestamp % width
        if windows and windows[-1][0] == start:
            windows[-1][1].append(e)
        else:
            windows.append((start, [e]))
    return windows


class HourlyTvl:
    """Step lookup of pool TVL by hour start."""

    def __init__(self, points: Iterable[tuple[int, float]]):
        pts = sorted(points)
        self._starts = [p[0] for p in pts]
        self._values = [p[1] for p in pts]

    def at(self, timestamp: int) -> float | None:
        i = bisect_right(self._starts, timestamp)
        return self._values[i - 1] if i else None


def detect_opportunities(
    windows: Sequence[tuple[int, Sequence[PoolEvent]]],
    metadata: PoolMetadata | None,
    reserve_estimate: tuple[float, float],
    hourly_tvl: HourlyTvl | None = None,
) -> list[OpportunityWindow]:
    """Model each window holding both swaps and liquidity events as a reorderable pair.

    The window's liquidity events (gross USD) become one proportional addition
    of ``alpha = liquidity_usd / tvl``; its swaps become one X-in swap sized by
    the window-mean pool price.  Both orderings are replayed on the reserve
    estimate.  Output is sorted by absolute impact, largest first.
    """
    x, y = reserve_estimate
    if not (x > 0 and y > 0):
        raise ValueError("reserve estimate must be positive")
    pool = Pool(Fraction(x), Fraction(y))
    reserve_price = float(spot_price(pool))
    out = []
    for start, evs in windows:
        swaps = [e for e in evs if e.kind is EventKind.SWAP]
        liq = [e for e in evs if e.is_liquidity]
        if not swaps or not liq:
            continue
        swap_usd = math.fsum(abs(e.amount_usd) for e in swaps)
        liquidity_usd = math.fsum(abs(e.amount_usd) for e in liq)
        tvl = hourly_tvl.at(start) if hourly_tvl is not None else None
        if tvl is None and metadata is not None:
            tvl = metadata.tvl_usd
        if tvl is None:
            tvl = x * reserve_price + y
        if not tvl > 0:
            log.info("window %d skipped: zero TVL", start)
            continue
        if swap_usd <= 0 or liquidity_usd <= 0:
            log.info("window %d skipped: zero-value events", start)
            continue
        prices = [e.price for e in swaps if e.price]
        mean_price = math.fsum(prices) / len(prices) if prices else reserve_price
        alpha = liquidity_usd / tvl
        swap_x = swap_usd / mean_price
        cmp = commute_compare(pool, AddLiquidity(Fraction(alpha)), Swap(Token.X, Fraction(swap_x)))
        out.append(
            OpportunityWindow(
                window_start=start,
                swap_usd=swap_usd,
                liquidity_usd=liquidity_usd,
                alpha_est=alpha,
                price_impact_pct=float(cmp.price_impact_pct),
                price_case1=float(spot_price(cmp.final_ab)),
                price_case2=float(spot_price(cmp.final_ba)),
                n_swaps=len(swaps),
                n_liquidity=len(liq),
                mean_price=mean_price,
            )
        )
    out.sort(key=lambda w: (-abs(w.price_impact_pct), w.window_start))
    return out
