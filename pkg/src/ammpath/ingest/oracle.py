"""Chainlink aggregator reads over JSON-RPC ``eth_call``."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from ammpath.ingest.events import OraclePoint, adjust_amount
from ammpath.ingest.transport import IngestError, ParseError, Transport

DEFAULT_RPC_URL = "https://eth.llamarpc.com"
ETH_USD_AGGREGATOR = "0x5f4eC3Df9cbd43714FE2740f5E3616155c5b8419"
LATEST_ROUND_DATA = "0xfeaf968c"
ANSWER_DECIMALS = 8


def eth_call_body(to: str, data: str, block: int) -> dict:
    return {
        "jsonrpc": "2.0",
        "id": 1,
        "method": "eth_call",
        "params": [{"to": to, "data": data}, hex(block)],
    }


def decode_round_data(result: str) -> tuple[int, int]:
    """``(answer, updatedAt)`` from an ABI-encoded ``latestRoundData`` return."""
    if not isinstance(result, str) or not result.startswith("0x"):
        raise ParseError("eth_call result is not hex", field="result")
    payload = result[2:]
    if len(payload) < 64 * 5:
        raise ParseError(f"latestRoundData result too short ({len(payload) // 2} bytes)", field="result")
    try:
        words = [int(payload[i : i + 64], 16) for i in range(0, 64 * 5, 64)]
    except ValueError:
        raise ParseError("eth_call result is not hex", field="result") from None
    answer = words[1] - (1 << 256) if words[1] >> 255 else words[1]
    return answer, words[3]


@dataclass
class OracleBatch:
    points: list[OraclePoint] = field(default_factory=list)
    errors: list[tuple[int, str]] = field(default_factory=list)


class OracleClient:
    def __init__(
        self,
        transport: Transport,
        url: str = DEFAULT_RPC_URL,
        aggregator: str = ETH_USD_AGGREGATOR,
        max_parallel: int = 4,
    ):
        self.transport = transport
        self.url = url
        self.aggregator = aggregator
        self.max_parallel = max(1, max_parallel)

    def price_at(self, block: int) -> OraclePoint:
        reply = self.transport.post(self.url, eth_call_body(self.aggregator, LATEST_ROUND_DATA, block))
        if not isinstance(reply, dict):
            raise ParseError("JSON-RPC reply is not an object")
        if "error" in reply:
            raise IngestError(f"eth_call failed at block {block}: {reply['error']}")
        answer, updated_at = decode_round_data(reply.get("result"))
        if answer <= 0:
            raise ParseError(f"nonpositive oracle answer {answer} at block {block}", field="answer")
        return OraclePoint(block, updated_at, float(adjust_amount(answer, ANSWER_DECIMALS)))

    def fetch_oracle_prices(self, blocks: Sequence[int]) -> OracleBatch:
        """One point per block, in request order; failures are collected, not raised."""
        batch = OracleBatch()
        if not blocks:
            return batch

        def one(block: int):
            try:
                return self.price_at(block)
            except IngestError as exc:
                return exc

        with ThreadPoolExecutor(max_workers=self.max_parallel) as pool:
            results = list(pool.map(one, blocks))
        for block, res in zip(blocks, results):
            if isinstance(res, OraclePoint):
                batch.points.append(res)
            else:
                batch.errors.append((block, str(res)))
        return batch
