"""JSON-over-HTTP POST transports with record/replay fixtures.

Every network call in :mod:`ammpath.ingest` goes through a transport.  The
replay transport answers from a fixture directory holding one JSON file per
request, named by the SHA-256 of the canonical request body; the URL is not
part of the key so that credentials embedded in endpoint URLs never reach
the fixtures.
"""

from __future__ import annotations

import hashlib
import json
import logging
import time
from pathlib import Path
from typing import Any, Protocol

import httpx

log = logging.getLogger(__name__)


class IngestError(Exception):
    """Base class for data-acquisition failures."""


class NetworkError(IngestError):
    pass


class ParseError(IngestError):
    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{message} (field {field!r})")
        self.field = field


class NotFoundError(IngestError):
    pass


class FixtureMissingError(IngestError):
    pass


def request_key(body: Any) -> str:
    canonical = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class Transport(Protocol):
    def post(self, url: str, body: dict[str, Any]) -> Any: ...


class LiveTransport:
    """POST JSON with a per-request timeout and retries on transient failures."""

    def __init__(
        self,
        timeout: float = 30.0,
        retries: int = 2,
        backoff: float = 0.5,
        client: httpx.Client | None = None,
    ):
        self.retries = retries
        self.backoff = backoff
        self._client = client or httpx.Client(timeout=timeout)

    def post(self, url: str, body: dict[str, Any]) -> Any:
        last: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * attempt)
            try:
                resp = self._client.post(url, json=body)
            except httpx.HTTPError as exc:
                last = exc
                log.warning("request to %s failed (attempt %d): %s", url, attempt + 1, exc)
                continue
            if resp.status_code >= 500 or resp.status_code == 429:
                last = NetworkError(f"HTTP {resp.status_code} from {url}")
                continue
            if resp.status_code >= 400:
                raise NetworkError(f"HTTP {resp.status_code} from {url}: {resp.text[:200]}")
            try:
                return resp.json()
            except ValueError as exc:
                raise ParseError(f"non-JSON response from {url}") from exc
        raise NetworkError(f"giving up on {url} after {self.retries + 1} attempts: {last}")


class ReplayTransport:
    def __init__(self, fixture_dir: str | Path):
        self.fixture_dir = Path(fixture_dir)
        if not self.fixture_dir.is_dir():
            raise FixtureMissingError(f"fixture directory {self.fixture_dir} does not exist")

    def post(self, url: str, body: dict[str, Any]) -> Any:
        path = self.fixture_dir / f"{request_key(body)}.json"
        try:
            record = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise FixtureMissingError(f"no fixture for request {json.dumps(body, sort_keys=True)[:160]}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"corrupt fixture {path.name}: {exc.msg}") from exc
        return record["response"]


class RecordingTransport:
    """Forward to ``inner`` and write each request/response pair to ``fixture_dir``."""

    def __init__(self, inner: Transport, fixture_dir: str | Path):
        self.inner = inner
        self.fixture_dir = Path(fixture_dir)
        self.fixture_dir.mkdir(parents=True, exist_ok=True)

    def post(self, url: str, body: dict[str, Any]) -> Any:
        response = self.inner.post(url, body)
        record = {"request": body, "response": response}
        path = self.fixture_dir / f"{request_key(body)}.json"
        path.write_text(json.dumps(record, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        return response


def make_transport(mode: str, fixture_dir: str | Path | None = None, **live_kwargs: Any) -> Transport:
    if mode == "replay":
        if fixture_dir is None:
            raise FixtureMissingError("replay mode needs a fixture directory")
        return ReplayTransport(fixture_dir)
    live = LiveTransport(**live_kwargs)
    if mode == "live":
        return live
    if mode == "record":
        if fixture_dir is None:
            raise ValueError("record mode needs a fixture directory")
        return RecordingTransport(live, fixture_dir)
    raise ValueError(f"unknown transport mode {mode!r}")
