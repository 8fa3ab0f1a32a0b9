import json
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ammpath.market import (
    NO,
    YES,
    MarketPool,
    closed_form_prob_path1,
    closed_form_prob_path2,
    divergence_table,
    fragmented_divergence,
    implied_probability,
    liquidity_position_probs,
    monte_carlo_paths,
    run_scenario_path,
)
from ammpath.pool import AddLiquidity, DegeneratePoolError, Pool, PoolError, RemoveLiquidity, Swap
from ammpath.scenarios import (
    DIVERGENCE_ALPHAS,
    Scenario,
    ScenarioError,
    builtin_scenarios,
    discrepancies,
    dump_scenarios,
    load_scenarios,
    run_scenario,
)

from conftest import alphas, positive, rationals, unit_open

SYM = MarketPool.create(1000, 1000)
SHARP1 = [AddLiquidity("0.5"), Swap(NO, 500)]
SHARP2 = [Swap(NO, 500), AddLiquidity("0.5")]


def test_implied_probability():
    assert implied_probability(SYM) == Fraction(1, 2)
    assert implied_probability(MarketPool.create(1, 3)) == Fraction(3, 4)
    with pytest.raises(DegeneratePoolError):
        implied_probability(MarketPool(Pool(Fraction(0), Fraction(1))))


def test_sharp_shock_paths():
    steps, p2 = run_scenario_path(SYM, SHARP2)
    assert p2 == Fraction(2250, 3250) == Fraction(9, 13)
    assert [s.probability for s in steps] == [Fraction(1500, 1500 + Fraction(2000, 3)), Fraction(9, 13)]
    _, p1 = run_scenario_path(SYM, SHARP1)
    # hand evaluation: k = 2.25e6, NO reserve 2000, YES reserve 1125
    assert p1 == Fraction(2000, 3125) == Fraction(16, 25)


def test_empty_path():
    steps, p = run_scenario_path(SYM, [])
    assert steps == [] and p == Fraction(1, 2)


def test_closed_form_examples():
    assert closed_form_prob_path1(1000, 1000, "0.5", 500) == Fraction(16, 25)
    assert closed_form_prob_path2(1000, 1000, "0.5", 500) == Fraction(9, 13)
    assert closed_form_prob_path1(300, 700, "0.4", 0) == Fraction(7, 10)
    assert closed_form_prob_path2(1000, 1000, 7, 500) == Fraction(9, 13)


@given(positive, positive, alphas, positive)
@settings(max_examples=200)
def test_closed_forms_match_simulation(x0, y0, alpha, dy):
    m = MarketPool.create(x0, y0)
    p1 = run_scenario_path(m, [AddLiquidity(alpha), Swap(NO, dy)])[1]
    p2 = run_scenario_path(m, [Swap(NO, dy), AddLiquidity(alpha)])[1]
    assert p1 == closed_form_prob_path1(x0, y0, alpha, dy)
    assert p2 == closed_form_prob_path2(x0, y0, alpha, dy)
    assert p1 != p2


@given(positive, positive, alphas, alphas, positive)
def test_path2_independent_of_alpha(x0, y0, a, b, dy):
    assert closed_form_prob_path2(x0, y0, a, dy) == closed_form_prob_path2(x0, y0, b, dy)


@given(positive, positive, alphas, st.one_of(st.just("add"), st.just("remove")), rationals(Fraction(1, 100), Fraction(99, 100)))
def test_probability_invariant_under_liquidity(x, y, a, kind, r):
    m = MarketPool.create(x, y)
    op = AddLiquidity(a) if kind == "add" else RemoveLiquidity(r)
    assert implied_probability(m.apply(op)) == implied_probability(m)


def test_divergence_table_sharp_shock():
    rows = divergence_table(1000, 1000, 500, [0, "0.5"])
    assert rows[0] == (0, 0)
    assert rows[1][1] == 100 * (Fraction(9, 13) - Fraction(16, 25))
    assert round(float(rows[1][1]), 2) == 5.23
    grid = divergence_table(1000, 1000, 500, DIVERGENCE_ALPHAS)
    values = [d for _, d in grid]
    assert all(u < v for u, v in zip(values, values[1:]))


@given(positive, positive, alphas, alphas, positive)
def test_divergence_monotone_in_alpha(x0, y0, a, b, dy):
    assume(a != b)
    (_, d_lo), (_, d_hi) = divergence_table(x0, y0, dy, sorted((a, b)))
    assert d_hi > d_lo > 0


@given(positive, rationals(Fraction(1, 1000), Fraction(1000)), alphas, unit_open, unit_open)
def test_divergence_monotone_in_moderate_trade(y0, ratio, alpha, a, b):
    # both paths saturate towards 1 for large trades; the peak sits above y0/2 once x0 >= y0/1000
    assume(a != b)
    x0 = ratio * y0
    lo, hi = (y0 * 2 * t / 5 for t in sorted((a, b)))
    d_lo = divergence_table(x0, y0, lo, [alpha])[0][1]
    d_hi = divergence_table(x0, y0, hi, [alpha])[0][1]
    assert d_hi > d_lo


def test_divergence_falls_for_huge_trades():
    d = [divergence_table(1000, 1000, dy, ["0.5"])[0][1] for dy in (500, 1000, 5000)]
    assert d[0] < d[1] > d[2]


@pytest.mark.parametrize("m", [1, 2, 5, 10])
def test_fragmented_trade_diverges_no_more_than_concentrated(m):
    concentrated = divergence_table(1000, 1000, 500, ["0.5"])[0][1]
    frag = fragmented_divergence(SYM, "0.5", 500, m)
    assert frag <= concentrated
    probs = liquidity_position_probs(SYM, "0.5", 500, m)
    lo, hi = probs[0], probs[-1]
    assert all(lo <= p <= hi for p in probs)
    assert probs == sorted(probs)


def test_fragmented_rejects_zero_fragments():
    with pytest.raises(PoolError):
        liquidity_position_probs(SYM, "0.5", 500, 0)


def test_monte_carlo_two_orderings():
    mc = monte_carlo_paths(SYM, SHARP1, 1000, seed=42)
    assert mc.n_paths == 1000 and mc.rejected == 0
    assert set(mc.final_probs) == {Fraction(16, 25), Fraction(9, 13)}
    assert mc.distinct == (Fraction(16, 25), Fraction(9, 13))
    assert mc.spread == Fraction(9, 13) - Fraction(16, 25)
    assert round(float(mc.spread_pp), 2) == 5.23
    assert mc == monte_carlo_paths(SYM, SHARP1, 1000, seed=42)


def test_monte_carlo_liquidity_only_has_no_spread():
    mc = monte_carlo_paths(SYM, [AddLiquidity("0.2"), RemoveLiquidity("0.1"), AddLiquidity(1)], 200, seed=1)
    assert mc.spread == 0 and mc.stddev == 0.0


def test_monte_carlo_gradual_regression():
    gradual = builtin_scenarios()[0]
    mc = monte_carlo_paths(gradual.market0, gradual.path1, 1000, seed=42)
    assert mc.spread > 0
    assert mc == monte_carlo_paths(gradual.market0, gradual.path1, 1000, seed=42)
    # only the set of trades preceding the liquidity addition matters: 2**3 outcomes
    assert len(mc.distinct) == 8
    assert Counter(mc.final_probs)[mc.max] > 0
    assert monte_carlo_paths(gradual.market0, gradual.path1, 1000, seed=43).final_probs != mc.final_probs


def test_monte_carlo_counts_rejected_orderings():
    # a huge YES trade followed by removal is still valid; an empty multiset path is trivially valid
    mc = monte_carlo_paths(SYM, [], 3, seed=0)
    assert mc.final_probs == (Fraction(1, 2),) * 3
    broken = MarketPool(Pool(Fraction(0), Fraction(5)))
    mc = monte_carlo_paths(broken, [Swap(YES, 1)], 4, seed=0)
    assert mc.rejected == 4 and mc.final_probs == () and mc.mean is None


def test_monte_carlo_validation():
    with pytest.raises(PoolError):
        monte_carlo_paths(SYM, SHARP1, 0, seed=1)
    with pytest.raises(PoolError):
        monte_carlo_paths(SYM, SHARP1, 1, seed=2**64)


def test_builtin_scenarios_as_published():
    gradual, osc, sharp = builtin_scenarios()
    assert [s.name for s in (gradual, osc, sharp)] == ["Gradual", "Oscillating", "SharpShock"]
    assert Counter(sharp.path1) == Counter(sharp.path2)
    assert sharp.reference_path2 == Fraction("69.2")


def test_scenario_results_and_discrepancies():
    results = {r.scenario.name: r for r in map(run_scenario, builtin_scenarios())}
    sharp = results["SharpShock"]
    assert sharp.final_path2 == Fraction(9, 13)
    assert abs(100 * sharp.final_path2 - Fraction("69.2")) <= Fraction(5, 100)
    flags = {f["quantity"] for f in discrepancies(sharp)}
    assert "path1" in flags and "path2" not in flags
    gaps = {
        (r.scenario.name, f["quantity"]): round(f["gap_pp"], 2)
        for r in results.values()
        for f in discrepancies(r)
        if f["quantity"].startswith("path")
    }
    assert gaps == {
        ("Gradual", "path1"): 4.65,
        ("Gradual", "path2"): 5.47,
        ("Oscillating", "path1"): 0.38,
        ("Oscillating", "path2"): 1.07,
        ("SharpShock", "path1"): 0.6,
    }
    expected = {"Gradual": ("65.95", "67.77"), "Oscillating": ("58.48", "59.87"), "SharpShock": ("64.00", "69.23")}
    for name, (e1, e2) in expected.items():
        r = results[name]
        assert f"{float(100 * r.final_path1):.2f}" == e1
        assert f"{float(100 * r.final_path2):.2f}" == e2


def test_scenario_divergence_by_alpha_monotone():
    for r in map(run_scenario, builtin_scenarios()):
        values = [d for _, d in r.divergence]
        assert all(u < v for u, v in zip(values, values[1:])), r.scenario.name


def test_liquidity_only_scenario_zero_divergence():
    s = Scenario("flat", (AddLiquidity("0.2"), RemoveLiquidity("0.5")), (RemoveLiquidity("0.5"), AddLiquidity("0.2")))
    r = run_scenario(s)
    assert r.divergence_pp == 0
    assert all(d == 0 for _, d in r.divergence)


def test_non_permutation_paths_rejected():
    with pytest.raises(ScenarioError):
        Scenario("bad", (Swap(NO, 1),), (Swap(NO, 2),))


def test_scenario_json_round_trip(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(dump_scenarios(builtin_scenarios()))
    assert load_scenarios(path) == builtin_scenarios()


@pytest.mark.parametrize(
    "doc",
    [
        {"scenarios": [{"name": "x", "path1": [{"op": "swap", "token_in": "MAYBE", "amount": "1"}], "path2": []}]},
        {"scenarios": [{"name": "x", "path1": [{"op": "teleport"}], "path2": [{"op": "teleport"}]}]},
        {"scenarios": [{"name": "x", "path1": [{"op": "add_liquidity"}], "path2": []}]},
        {"scenarios": [{"path1": [], "path2": []}]},
        {"scenarios": "nope"},
    ],
)
def test_malformed_scenarios(tmp_path, doc):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ScenarioError):
        load_scenarios(path)
