"""CSV and JSON renderings of module outputs.  Headers and keys here are stable."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from fractions import Fraction
from typing import Any, Iterable, Sequence

from ammpath.ingest.events import OpportunityWindow
from ammpath.market import MonteCarloSummary
from ammpath.paths import HeatmapCell
from ammpath.pool import to_decimal_str, to_significant_str
from ammpath.scenarios import ScenarioResult, discrepancies, op_to_dict

HEATMAP_HEADER = ("alpha", "swap_amount", "price_impact_pct")
OPPORTUNITY_HEADER = (
    "window_start",
    "swap_usd",
    "liquidity_usd",
    "alpha",
    "price_impact_pct",
    "price_case1",
    "price_case2",
)
SIMULATION_HEADER = ("scenario", "path", "final_prob")


def _csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def fmt_float(v: float) -> str:
    return format(v, ".10g")


def prob_str(p: Fraction) -> str:
    return to_significant_str(p, 4)


def pp_str(pp: Fraction) -> str:
    return to_decimal_str(pp, 1)


def heatmap_csv(cells: Sequence[HeatmapCell]) -> str:
    return _csv(
        HEATMAP_HEADER,
        ((to_significant_str(c.alpha), to_significant_str(c.swap_amount), to_significant_str(c.price_impact_pct)) for c in cells),
    )


def heatmap_json(cells: Sequence[HeatmapCell]) -> str:
    rows = [dict(zip(HEATMAP_HEADER, (to_significant_str(c.alpha), to_significant_str(c.swap_amount), to_significant_str(c.price_impact_pct)))) for c in cells]
    return json.dumps({"schema_version": 1, "cells": rows}, indent=2) + "\n"


def opportunity_row(o: OpportunityWindow) -> list[str]:
    return [
        str(o.window_start),
        fmt_float(o.swap_usd),
        fmt_float(o.liquidity_usd),
        fmt_float(o.alpha_est),
        fmt_float(o.price_impact_pct),
        fmt_float(o.price_case1),
        fmt_float(o.price_case2),
    ]


def opportunities_csv(opps: Sequence[OpportunityWindow]) -> str:
    return _csv(OPPORTUNITY_HEADER, (opportunity_row(o) for o in opps))


def opportunities_json(opps: Sequence[OpportunityWindow]) -> list[dict[str, Any]]:
    return [asdict(o) for o in opps]


def simulation_csv(results: Sequence[ScenarioResult]) -> str:
    rows = []
    for r in results:
        rows.append((r.scenario.name, "path1", prob_str(r.final_path1)))
        rows.append((r.scenario.name, "path2", prob_str(r.final_path2)))
    return _csv(SIMULATION_HEADER, rows)


def monte_carlo_json(mc: MonteCarloSummary) -> dict[str, Any]:
    def opt(q):
        return None if q is None else str(q)

    return {
        "n_paths": mc.n_paths,
        "seed": mc.seed,
        "rejected": mc.rejected,
        "min": opt(mc.min),
        "max": opt(mc.max),
        "mean": opt(mc.mean),
        "mean_display": None if mc.mean is None else prob_str(mc.mean),
        "stddev": mc.stddev,
        "spread": str(mc.spread),
        "spread_pp": pp_str(mc.spread_pp),
        "distinct_final_probs": [prob_str(p) for p in mc.distinct],
    }


def simulation_json(results: Sequence[ScenarioResult], monte_carlo: dict[str, MonteCarloSummary] | None = None) -> str:
    out = []
    for r in results:
        entry: dict[str, Any] = {
            "scenario": r.scenario.name,
            "initial": {"yes": str(r.scenario.yes0), "no": str(r.scenario.no0)},
            "path1": {"ops": [op_to_dict(o) for o in r.scenario.path1], "final_prob": str(r.final_path1), "display": prob_str(r.final_path1)},
            "path2": {"ops": [op_to_dict(o) for o in r.scenario.path2], "final_prob": str(r.final_path2), "display": prob_str(r.final_path2)},
            "divergence_pp": pp_str(r.divergence_pp),
            "divergence_by_alpha": [{"alpha": to_significant_str(a), "divergence_pp": pp_str(d)} for a, d in r.divergence],
            "discrepancies": discrepancies(r),
        }
        if monte_carlo and r.scenario.name in monte_carlo:
            entry["monte_carlo"] = monte_carlo_json(monte_carlo[r.scenario.name])
        out.append(entry)
    return json.dumps({"schema_version": 1, "scenarios": out}, indent=2) + "\n"
