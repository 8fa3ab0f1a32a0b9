"""Pool event ingestion from a subgraph and a price oracle, with offline replay."""

from ammpath.ingest.events import (
    EventKind,
    HourlyTvl,
    OpportunityWindow,
    OraclePoint,
    PoolEvent,
    PoolMetadata,
    adjust_amount,
    detect_opportunities,
    filter_events,
    price_deviation,
    price_from_sqrt_x96,
    to_raw_amount,
    window_events,
)
from ammpath.ingest.oracle import OracleBatch, OracleClient
from ammpath.ingest.scan import ScanResult, scan
from ammpath.ingest.subgraph import DEFAULT_POOL_ID, PartialFetchError, SubgraphClient
from ammpath.ingest.transport import (
    FixtureMissingError,
    IngestError,
    LiveTransport,
    NetworkError,
    NotFoundError,
    ParseError,
    RecordingTransport,
    ReplayTransport,
    make_transport,
)

__all__ = [name for name in dir() if not name.startswith("_")]
