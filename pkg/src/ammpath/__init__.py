"""Path dependence in constant-product market makers: exact pool engine,
ordering analysis, prediction-market simulation, statistics and event scanning."""

from ammpath.market import (
    MarketPool,
    closed_form_prob_path1,
    closed_form_prob_path2,
    divergence_table,
    implied_probability,
    monte_carlo_paths,
    run_scenario_path,
)
from ammpath.paths import (
    HeatmapCell,
    PathComparison,
    apply_sequence,
    closed_form_x_diff,
    closed_form_y_states,
    commute_compare,
    heatmap_grid,
    price_impact_pct,
)
from ammpath.pool import (
    AddLiquidity,
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
)

__version__ = "0.1.0"
