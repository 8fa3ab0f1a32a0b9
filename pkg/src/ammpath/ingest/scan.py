"""End-to-end opportunity scan: fetch, normalize, window, detect, enrich, summarise."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any

from ammpath import stats
from ammpath.ingest.events import (
    EventKind,
    HourlyTvl,
    OpportunityWindow,
    PoolEvent,
    PoolMetadata,
    detect_opportunities,
    filter_events,
    price_deviation,
    window_events,
)
from ammpath.ingest.oracle import OracleBatch, OracleClient
from ammpath.ingest.subgraph import MAX_PAGE, SubgraphClient

log = logging.getLogger(__name__)

FALLBACK_RESERVES = (100.0, 200_000.0)


@dataclass
class ScanResult:
    metadata: PoolMetadata
    events: list[PoolEvent]
    windows: list[tuple[int, list[PoolEvent]]]
    opportunities: list[OpportunityWindow]
    reserves: tuple[float, float]
    oracle: OracleBatch = field(default_factory=OracleBatch)
    deviations: list[dict[str, Any]] = field(default_factory=list)

    def stats_report(self) -> dict[str, Any]:
        opps = self.opportunities
        return stats.significance_report(
            [o.price_impact_pct for o in opps],
            companions={
                "swap_usd": [o.swap_usd for o in opps],
                "liquidity_usd": [o.liquidity_usd for o in opps],
                "alpha": [o.alpha_est for o in opps],
            },
        )

    def summary(self) -> dict[str, Any]:
        return {
            "schema_version": 1,
            "pool": asdict(self.metadata),
            "events": {k.value: sum(e.kind is k for e in self.events) for k in EventKind},
            "windows": len(self.windows),
            "n_opportunities": len(self.opportunities),
            "reserve_estimate": list(self.reserves),
            "oracle": {
                "deviations": self.deviations,
                "errors": [{"block": b, "error": msg} for b, msg in self.oracle.errors],
            },
            "stats": self.stats_report(),
        }


def estimate_reserves(metadata: PoolMetadata, events: list[PoolEvent]) -> tuple[float, float]:
    """Split metadata TVL evenly between the sides at the mean swap price."""
    prices = [e.price for e in events if e.price]
    if not metadata.tvl_usd or not prices:
        return FALLBACK_RESERVES
    price = math.fsum(prices) / len(prices)
    half = metadata.tvl_usd / 2
    return half / price, half


def scan(
    subgraph: SubgraphClient,
    pool_id: str,
    oracle: OracleClient | None = None,
    min_timestamp: int = 0,
    limit: int = MAX_PAGE,
    width: int = 60,
    min_usd: float = 1.0,
    reserves: tuple[float, float] | None = None,
    use_hourly: bool = True,
) -> ScanResult:
    meta = subgraph.fetch_pool_metadata(pool_id)
    events = subgraph.fetch_events(pool_id, EventKind.SWAP, min_timestamp, limit, meta)
    # liquidity events are gathered over the span the swaps cover
    since = events[0].timestamp if events else min_timestamp
    for kind in (EventKind.MINT, EventKind.BURN):
        events.extend(subgraph.fetch_events(pool_id, kind, since, limit, meta))
    events = filter_events(events, min_usd)
    events.sort(key=lambda e: (e.timestamp, e.kind.value, e.event_id))
    hourly = HourlyTvl(subgraph.fetch_hourly_tvl(pool_id, min_timestamp)) if use_hourly else None
    res = reserves or estimate_reserves(meta, events)
    windows = window_events(events, width)
    opps = detect_opportunities(windows, meta, res, hourly)

    result = ScanResult(meta, events, windows, opps, res)
    if oracle is not None and opps:
        by_start = {start: evs for start, evs in windows}
        targets = []
        for o in opps:
            blocks = [e.block_number for e in by_start[o.window_start] if e.kind is EventKind.SWAP and e.block_number]
            if blocks:
                targets.append((o, max(blocks)))
        result.oracle = oracle.fetch_oracle_prices([b for _, b in targets])
        points = {p.block_number: p for p in result.oracle.points}
        for o, block in targets:
            p = points.get(block)
            if p is None:
                continue
            result.deviations.append(
                {
                    "window_start": o.window_start,
                    "block": block,
                    "amm_price": o.mean_price,
                    "oracle_price": p.eth_usd,
                    "deviation": price_deviation(o.mean_price, p.eth_usd),
                }
            )
    return result
