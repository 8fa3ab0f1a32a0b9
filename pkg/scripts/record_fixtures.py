"""Regenerate the committed replay fixtures from the synthetic chain.

    python scripts/record_fixtures.py [fixture_dir]
"""

import shutil
import sys
from pathlib import Path

import httpx

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from fake_chain import FakeChain  # noqa: E402

from ammpath.cli import DEFAULT_FIXTURE_DIR, Config, run_scan  # noqa: E402
from ammpath.ingest import LiveTransport, RecordingTransport  # noqa: E402


def record(fixture_dir: Path, chain: FakeChain | None = None) -> None:
    chain = chain or FakeChain()
    if fixture_dir.exists():
        shutil.rmtree(fixture_dir)
    live = LiveTransport(client=httpx.Client(transport=chain.transport()), retries=0)
    cfg = Config(mode="record", fixture_dir=str(fixture_dir))
    run_scan(cfg, transport=RecordingTransport(live, fixture_dir))


if __name__ == "__main__":
    record(Path(sys.argv[1]) if len(sys.argv) > 1 else DEFAULT_FIXTURE_DIR)
