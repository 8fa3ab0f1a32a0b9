"""GraphQL client for a Uniswap-v3-style subgraph."""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from ammpath.ingest.events import EventKind, PoolEvent, PoolMetadata, price_from_sqrt_x96
from ammpath.ingest.transport import IngestError, NetworkError, NotFoundError, ParseError, Transport

DEFAULT_SUBGRAPH_URL = "https://api.thegraph.com/subgraphs/name/uniswap/uniswap-v3"
DEFAULT_POOL_ID = "0x88e6a0c2ddd26feeb64f039a2c41296fcb3f5640"
MAX_PAGE = 1000
# Upper bound for the descending timestamp cursor on the first page.
CURSOR_START = 2**32 - 1

POOL_QUERY = """query pool($id: ID!) {
  pool(id: $id) {
    id feeTier totalValueLockedUSD
    token0 { id symbol decimals }
    token1 { id symbol decimals }
  }
}"""

_EVENT_FIELDS = {
    EventKind.SWAP: "id timestamp amount0 amount1 amountUSD sqrtPriceX96 transaction { id blockNumber }",
    EventKind.MINT: "id timestamp amount0 amount1 amountUSD transaction { id blockNumber }",
    EventKind.BURN: "id timestamp amount0 amount1 amountUSD transaction { id blockNumber }",
}

_ENTITY = {EventKind.SWAP: "swaps", EventKind.MINT: "mints", EventKind.BURN: "burns"}

HOURLY_QUERY = """query hours($pool: String!, $since: Int!, $first: Int!) {
  poolHourDatas(first: $first, orderBy: periodStartUnix, orderDirection: asc,
                where: {pool: $pool, periodStartUnix_gte: $since}) {
    periodStartUnix tvlUSD token0Price token1Price
  }
}"""


def event_query(kind: EventKind) -> str:
    entity = _ENTITY[kind]
    return (
        f"query {entity}($pool: String!, $since: BigInt!, $until: BigInt!, $first: Int!) {{\n"
        f"  {entity}(first: $first, orderBy: timestamp, orderDirection: desc,\n"
        f"    where: {{pool: $pool, timestamp_gte: $since, timestamp_lte: $until}}) {{\n"
        f"    {_EVENT_FIELDS[kind]}\n"
        f"  }}\n"
        f"}}"
    )


def tie_query(kind: EventKind) -> str:
    """Events sharing one timestamp, paged by id."""
    entity = _ENTITY[kind]
    return (
        f"query {entity}AtTimestamp($pool: String!, $ts: BigInt!, $after: String!, $first: Int!) {{\n"
        f"  {entity}(first: $first, orderBy: id, orderDirection: asc,\n"
        f"    where: {{pool: $pool, timestamp: $ts, id_gt: $after}}) {{\n"
        f"    {_EVENT_FIELDS[kind]}\n"
        f"  }}\n"
        f"}}"
    )


class PartialFetchError(IngestError):
    """Pagination failed after some pages were retrieved."""

    def __init__(self, events: list[PoolEvent], cause: Exception):
        super().__init__(f"fetch aborted after {len(events)} events: {cause}")
        self.events = events
        self.retrieved = len(events)
        self.cause = cause


def _field(obj: dict[str, Any], name: str, where: str) -> Any:
    try:
        value = obj[name]
    except (KeyError, TypeError):
        raise ParseError(f"missing field in {where}", field=name) from None
    if value is None:
        raise ParseError(f"null field in {where}", field=name)
    return value


def _number(obj: dict[str, Any], name: str, where: str, kind=Fraction):
    raw = _field(obj, name, where)
    try:
        return kind(raw)
    except (ValueError, TypeError, ZeroDivisionError):
        raise ParseError(f"bad number {raw!r} in {where}", field=name) from None


class SubgraphClient:
    def __init__(self, transport: Transport, url: str = DEFAULT_SUBGRAPH_URL, page_size: int = MAX_PAGE):
        if not 1 <= page_size <= MAX_PAGE:
            raise ValueError(f"page size must be in [1, {MAX_PAGE}]")
        self.transport = transport
        self.url = url
        self.page_size = page_size

    def query(self, document: str, variables: dict[str, Any]) -> dict[str, Any]:
        reply = self.transport.post(self.url, {"query": document, "variables": variables})
        if not isinstance(reply, dict):
            raise ParseError("GraphQL reply is not an object")
        if reply.get("errors"):
            raise NetworkError(f"GraphQL errors: {reply['errors']}")
        data = reply.get("data")
        if not isinstance(data, dict):
            raise ParseError("GraphQL reply has no data", field="data")
        return data

    def fetch_pool_metadata(self, pool_id: str = DEFAULT_POOL_ID) -> PoolMetadata:
        pool_id = pool_id.lower()
        data = self.query(POOL_QUERY, {"id": pool_id})
        pool = data.get("pool")
        if pool is None:
            raise NotFoundError(f"pool {pool_id} not found")
        t0 = _field(pool, "token0", "pool")
        t1 = _field(pool, "token1", "pool")
        tvl = pool.get("totalValueLockedUSD")
        try:
            return PoolMetadata(
                pool_id=str(_field(pool, "id", "pool")),
                token0_decimals=_number(t0, "decimals", "token0", int),
                token1_decimals=_number(t1, "decimals", "token1", int),
                fee_tier=_number(pool, "feeTier", "pool", int),
                tvl_usd=None if tvl is None else _number(pool, "totalValueLockedUSD", "pool", float),
                token0_symbol=str(t0.get("symbol", "")),
                token1_symbol=str(t1.get("symbol", "")),
            )
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), field="decimals") from exc

    def _parse_event(self, kind: EventKind, raw: dict[str, Any], meta: PoolMetadata | None) -> PoolEvent:
        where = _ENTITY[kind][:-1]
        tx = _field(raw, "transaction", where)
        price = None
        if kind is EventKind.SWAP and meta is not None and raw.get("sqrtPriceX96") not in (None, "0"):
            sqrt_p = _number(raw, "sqrtPriceX96", where, int)
            price = float(price_from_sqrt_x96(sqrt_p, meta.token0_decimals, meta.token1_decimals))
        block = tx.get("blockNumber")
        ts = _number(raw, "timestamp", where, int)
        if ts <= 0:
            raise ParseError(f"nonpositive timestamp in {where}", field="timestamp")
        return PoolEvent(
            kind=kind,
            tx_id=str(_field(tx, "id", f"{where}.transaction")),
            timestamp=ts,
            amount0=_number(raw, "amount0", where),
            amount1=_number(raw, "amount1", where),
            amount_usd=_number(raw, "amountUSD", where, float),
            price=price,
            block_number=None if block is None else int(block),
            event_id=str(_field(raw, "id", where)),
        )

    def fetch_events(
        self,
        pool_id: str,
        kind: EventKind,
        min_timestamp: int = 0,
        limit: int = MAX_PAGE,
        metadata: PoolMetadata | None = None,
    ) -> list[PoolEvent]:
        """The ``limit`` most recent events at or after ``min_timestamp``, oldest first.

        Pages walk backwards in time with an inclusive timestamp cursor;
        events seen on an earlier page are dropped by id.
        """
        kind = EventKind(kind)
        if limit <= 0:
            return []
        pool_id = pool_id.lower()
        seen: dict[str, PoolEvent] = {}
        until = CURSOR_START
        try:
            while until >= min_timestamp:
                variables = {"pool": pool_id, "since": str(min_timestamp), "until": str(until), "first": self.page_size}
                page = self._page(kind, event_query(kind), variables, metadata)
                for e in page:
                    seen.setdefault(e.event_id, e)
                if len(page) < self.page_size:
                    break
                # everything newer than the oldest timestamp on a full page is complete
                oldest = min(e.timestamp for e in page)
                if sum(e.timestamp > oldest for e in seen.values()) >= limit:
                    break
                if oldest == max(e.timestamp for e in page):
                    self._sweep_ties(kind, pool_id, oldest, metadata, seen)
                    until = oldest - 1
                else:
                    until = oldest
        except IngestError as exc:
            if seen:
                raise PartialFetchError(_sorted(seen.values()), exc) from exc
            raise
        return _sorted(seen.values())[-limit:]

    def _page(self, kind: EventKind, doc: str, variables: dict[str, Any], metadata: PoolMetadata | None) -> list[PoolEvent]:
        entity = _ENTITY[kind]
        rows = self.query(doc, variables).get(entity)
        if not isinstance(rows, list):
            raise ParseError(f"reply has no {entity} list", field=entity)
        return [self._parse_event(kind, r, metadata) for r in rows]

    def _sweep_ties(self, kind, pool_id, ts, metadata, seen: dict[str, PoolEvent]) -> None:
        # more events share ``ts`` than fit on one page; walk them by id
        after = ""
        while True:
            variables = {"pool": pool_id, "ts": str(ts), "after": after, "first": self.page_size}
            page = self._page(kind, tie_query(kind), variables, metadata)
            for e in page:
                seen.setdefault(e.event_id, e)
            if len(page) < self.page_size:
                return
            after = max(e.event_id for e in page)

    def fetch_hourly_tvl(self, pool_id: str, since: int = 0) -> list[tuple[int, float]]:
        data = self.query(HOURLY_QUERY, {"pool": pool_id.lower(), "since": since, "first": MAX_PAGE})
        rows = data.get("poolHourDatas")
        if not isinstance(rows, list):
            raise ParseError("reply has no poolHourDatas list", field="poolHourDatas")
        return [
            (_number(r, "periodStartUnix", "poolHourData", int), _number(r, "tvlUSD", "poolHourData", float))
            for r in rows
        ]


def _sorted(events) -> list[PoolEvent]:
    return sorted(events, key=lambda e: (e.timestamp, e.event_id))
