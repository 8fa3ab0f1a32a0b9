from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ammpath.pool import (
    AddLiquidity,
    DegeneratePoolError,
    Pool,
    PoolError,
    RemoveLiquidity,
    Swap,
    Token,
    add_liquidity,
    new_pool,
    remove_liquidity,
    spot_price,
    swap_exact_in,
    to_decimal_str,
    to_fraction,
    to_significant_str,
)

from conftest import alphas, positive, unit_open


@pytest.mark.parametrize(
    "x0, y0, k",
    [(100, 200_000, 20_000_000), (1000, 1000, 1_000_000), (1, 1, 1)],
)
def test_new_pool_k(x0, y0, k):
    assert new_pool(x0, y0).k == k


@pytest.mark.parametrize("x0, y0, fee", [(0, 1, 0), (1, 0, 0), (-1, 5, 0), (1, 1, 1), (1, 1, "-0.01")])
def test_new_pool_rejects(x0, y0, fee):
    with pytest.raises(PoolError):
        new_pool(x0, y0, fee)


def test_to_fraction_parses_decimal_strings_exactly():
    assert to_fraction("0.1") == Fraction(1, 10)
    assert to_fraction("1/11") == Fraction(1, 11)
    assert to_fraction(Decimal("2.5")) == Fraction(5, 2)
    with pytest.raises(PoolError):
        to_fraction("ten")
    with pytest.raises(TypeError):
        to_fraction(True)


def test_swap_x_in_worked_example():
    pool, out = swap_exact_in(new_pool(100, 200_000), Token.X, 10)
    assert pool == Pool(Fraction(110), Fraction(2_000_000, 11))
    assert out == 200_000 - Fraction(2_000_000, 11)
    assert to_decimal_str(pool.reserve_y, 2) == "181818.18"
    assert to_decimal_str(out, 2) == "18181.82"


def test_swap_y_in_sharp_shock():
    pool, out = swap_exact_in(new_pool(1000, 1000), "Y", 500)
    assert pool.reserve_x == Fraction(2000, 3)
    assert pool.reserve_y == 1500
    assert pool.k == 10**6
    assert out == Fraction(1000, 3)


@pytest.mark.parametrize("amount", [0, -1, "-0.5"])
def test_swap_rejects_nonpositive(amount):
    with pytest.raises(PoolError):
        swap_exact_in(new_pool(1, 1), Token.X, amount)
    with pytest.raises(PoolError):
        Swap(Token.X, amount)


def test_swap_with_fee_credits_full_input():
    pool = new_pool(100, 100, "0.003")
    after, out = swap_exact_in(pool, Token.X, 10)
    assert after.reserve_x == 110
    assert out == 100 - Fraction(10_000) / (100 + Fraction(997, 100))
    assert after.k > pool.k


def test_add_liquidity_examples():
    pool = add_liquidity(new_pool(100, 200_000), "0.1")
    assert (pool.reserve_x, pool.reserve_y, pool.k) == (110, 220_000, 24_200_000)
    assert add_liquidity(new_pool(1000, 1000), "0.5") == Pool(Fraction(1500), Fraction(1500))
    with pytest.raises(PoolError):
        add_liquidity(pool, 0)
    with pytest.raises(PoolError):
        AddLiquidity(-1)


def test_remove_liquidity_examples():
    assert remove_liquidity(new_pool(110, 220_000), Fraction(1, 11)) == Pool(Fraction(100), Fraction(200_000))
    assert remove_liquidity(new_pool(1000, 1000), "0.5") == Pool(Fraction(500), Fraction(500))
    for bad in (0, 1, "1.5", -1):
        with pytest.raises(PoolError):
            remove_liquidity(new_pool(1, 1), bad)
        with pytest.raises(PoolError):
            RemoveLiquidity(bad)


def test_spot_price():
    assert spot_price(new_pool(100, 200_000)) == 2000
    assert spot_price(Pool(Fraction(120), Fraction(605_000, 3))) == Fraction(605_000, 360)
    assert to_decimal_str(spot_price(Pool(Fraction(120), Fraction(605_000, 3))), 2) == "1680.56"
    with pytest.raises(DegeneratePoolError):
        spot_price(Pool(Fraction(0), Fraction(1)))


def test_swap_on_empty_pool_is_degenerate():
    with pytest.raises(DegeneratePoolError):
        swap_exact_in(Pool(Fraction(0), Fraction(5)), Token.X, 1)


@pytest.mark.parametrize(
    "value, places, expected",
    [("201666.665", 2, "201666.66"), ("201666.675", 2, "201666.68"), (Fraction(5000, 3), 2, "1666.67"), (1, 0, "1")],
)
def test_decimal_rendering_half_even(value, places, expected):
    assert to_decimal_str(value, places) == expected


def test_significant_rendering():
    assert to_significant_str(Fraction(1, 100)) == "0.01"
    assert to_significant_str(Fraction(2, 3)) == "0.6666666667"
    assert to_significant_str(Fraction(-1646090534979424, 10**15)) == "-1.646090535"
    assert to_significant_str(Fraction(9, 13), 4) == "0.6923"
    assert to_significant_str(0) == "0"


@given(positive, positive, positive, st.sampled_from(list(Token)))
def test_fee_free_swap_preserves_k(x, y, amount, token):
    pool = new_pool(x, y)
    after, out = swap_exact_in(pool, token, amount)
    assert after.k == pool.k
    assert out > 0


@given(positive, positive, alphas)
def test_liquidity_scales_k_and_keeps_price(x, y, alpha):
    pool = new_pool(x, y)
    after = add_liquidity(pool, alpha)
    assert after.k == pool.k * (1 + alpha) ** 2
    assert spot_price(after) == spot_price(pool)


@given(positive, positive, positive, positive, st.sampled_from(list(Token)))
def test_swaps_compose(x, y, a, b, token):
    pool = new_pool(x, y)
    twice = swap_exact_in(swap_exact_in(pool, token, a)[0], token, b)[0]
    once = swap_exact_in(pool, token, a + b)[0]
    assert twice == once


@given(positive, positive, positive)
def test_x_in_lowers_y_and_price(x, y, amount):
    pool = new_pool(x, y)
    after, _ = swap_exact_in(pool, Token.X, amount)
    assert after.reserve_y < pool.reserve_y
    assert spot_price(after) < spot_price(pool)


@given(positive, positive, unit_open)
def test_remove_then_compensating_add_round_trips(x, y, alpha):
    pool = new_pool(x, y)
    back = add_liquidity(remove_liquidity(pool, alpha), alpha / (1 - alpha))
    assert back == pool


def test_pool_is_immutable():
    pool = new_pool(1, 1)
    with pytest.raises(AttributeError):
        pool.reserve_x = Fraction(2)
