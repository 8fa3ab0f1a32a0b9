"""Exact constant-product pool state and the three pool operations.

All state transitions use :class:`fractions.Fraction`; nothing in this module
touches floating point.  Pools are immutable and every operation returns a
new :class:`Pool`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, str, Fraction, Decimal]


class PoolError(ValueError):
    """Raised when an operation is invalid for a pool or its arguments."""


class DegeneratePoolError(PoolError):
    """Raised when a quantity is undefined because a reserve is zero."""


class Token(str, enum.Enum):
    X = "X"
    Y = "Y"

    @property
    def other(self) -> "Token":
        return Token.Y if self is Token.X else Token.X


def to_fraction(value: Number | float) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings are parsed as exact decimals or ``p/q`` ratios, so ``"0.1"`` is
    one tenth.  Floats are converted by their exact binary value; pass a
    string when the decimal literal is what is meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not amounts")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, (str, Decimal, float)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise PoolError(f"not an exact number: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


@dataclass(frozen=True)
class Pool:
    reserve_x: Fraction
    reserve_y: Fraction
    fee: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("reserve_x", "reserve_y", "fee"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.reserve_x < 0 or self.reserve_y < 0:
            raise PoolError("reserves must be nonnegative")
        if not 0 <= self.fee < 1:
            raise PoolError(f"fee must lie in [0, 1), got {self.fee}")

    @property
    def k(self) -> Fraction:
        return self.reserve_x * self.reserve_y

    @property
    def tradable(self) -> bool:
        return self.reserve_x > 0 and self.reserve_y > 0

    def reserve(self, token: Token) -> Fraction:
        return self.reserve_x if token is Token.X else self.reserve_y

    def scaled(self, factor: Fraction) -> "Pool":
        return Pool(self.reserve_x * factor, self.reserve_y * factor, self.fee)


@dataclass(frozen=True)
class Swap:
    token_in: Token
    amount_in: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "token_in", Token(self.token_in))
        object.__setattr__(self, "amount_in", to_fraction(self.amount_in))
        if self.amount_in <= 0:
            raise PoolError(f"swap amount must be positive, got {self.amount_in}")


@dataclass(frozen=True)
class AddLiquidity:
    alpha: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", to_fraction(self.alpha))
        if self.alpha <= 0:
            raise PoolError(f"liquidity addition alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class RemoveLiquidity:
    alpha: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", to_fraction(self.alpha))
        if not 0 < self.alpha < 1:
            raise PoolError(f"liquidity removal alpha must lie in (0, 1), got {self.alpha}")


Operation = Union[Swap, AddLiquidity, RemoveLiquidity]


def new_pool(x0: Number, y0: Number, fee: Number = 0) -> Pool:
    pool = Pool(to_fraction(x0), to_fraction(y0), to_fraction(fee))
    if not pool.tradable:
        raise PoolError("initial reserves must be positive")
    return pool


def _require_tradable(pool: Pool) -> None:
    if not pool.tradable:
        raise DegeneratePoolError(f"pool has a zero reserve: {pool}")


def swap_exact_in(pool: Pool, token_in: Token | str, amount_in: Number) -> tuple[Pool, Fraction]:
    """Swap ``amount_in`` of ``token_in`` into the pool.

    The fee-adjusted input ``amount_in * (1 - fee)`` moves the pool along the
    curve; the full input is credited to the reserves.  Returns the new pool
    and the amount of the other token paid out.
    """
    token_in = Token(token_in)
    amount = to_fraction(amount_in)
    if amount <= 0:
        raise PoolError(f"swap amount must be positive, got {amount}")
    _require_tradable(pool)
    r_in = pool.reserve(token_in)
    r_out = pool.reserve(token_in.other)
    effective = amount * (1 - pool.fee)
    new_out = r_in * r_out / (r_in + effective)
    out = r_out - new_out
    new_in = r_in + amount
    if token_in is Token.X:
        return Pool(new_in, new_out, pool.fee), out
    return Pool(new_out, new_in, pool.fee), out


def add_liquidity(pool: Pool, alpha: Number) -> Pool:
    alpha = to_fraction(alpha)
    if alpha <= 0:
        raise PoolError(f"liquidity addition alpha must be positive, got {alpha}")
    return pool.scaled(1 + alpha)


def remove_liquidity(pool: Pool, alpha: Number) -> Pool:
    alpha = to_fraction(alpha)
    if not 0 < alpha < 1:
        raise PoolError(f"liquidity removal alpha must lie in (0, 1), got {alpha}")
    return pool.scaled(1 - alpha)


def spot_price(pool: Pool) -> Fraction:
    """Marginal price of X in units of Y."""
    if pool.reserve_x == 0:
        raise DegeneratePoolError("spot price undefined for zero reserve_x")
    return pool.reserve_y / pool.reserve_x


def apply_operation(pool: Pool, op: Operation) -> Pool:
    if isinstance(op, Swap):
        return swap_exact_in(pool, op.token_in, op.amount_in)[0]
    if isinstance(op, AddLiquidity):
        return add_liquidity(pool, op.alpha)
    if isinstance(op, RemoveLiquidity):
        return remove_liquidity(pool, op.alpha)
    raise TypeError(f"unknown operation {op!r}")


def to_decimal_str(value: Number, places: int) -> str:
    """Render ``value`` with ``places`` decimals, rounding half-even."""
    q = to_fraction(value)
    with localcontext() as ctx:
        ctx.prec = 200
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return str(d.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def to_significant_str(value: Number, digits: int = 10) -> str:
    """Render ``value`` at ``digits`` significant digits, rounding half-even."""
    q = to_fraction(value)
    if q == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d.normalize(), "f") if -6 <= d.adjusted() < digits else str(d.normalize())
