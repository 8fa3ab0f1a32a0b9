"""Command-line front end: ``ammpath demo | heatmap | simulate | scan | stats``.

Exit codes: 0 success, 1 validation or usage error, 2 I/O or network error,
3 the demo disagrees with the published worked example or its closed forms.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from ammpath import report
from ammpath.ingest import (
    DEFAULT_POOL_ID,
    IngestError,
    OracleClient,
    SubgraphClient,
    make_transport,
    scan,
)
from ammpath.ingest.oracle import DEFAULT_RPC_URL
from ammpath.ingest.subgraph import DEFAULT_SUBGRAPH_URL
from ammpath.market import monte_carlo_paths
from ammpath.paths import (
    closed_form_x_diff,
    closed_form_y_states,
    commute_compare,
    frange,
    heatmap_grid,
)
from ammpath.pool import (
    AddLiquidity,
    PoolError,
    Swap,
    Token,
    new_pool,
    swap_exact_in,
    to_decimal_str,
    to_fraction,
)
from ammpath.scenarios import ScenarioError, builtin_scenarios, load_scenarios, run_scenario
from ammpath.stats import InsufficientDataError, significance_report

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_MISMATCH = 0, 1, 2, 3

DEFAULT_FIXTURE_DIR = Path(__file__).parent / "data" / "fixtures"

ENV_PREFIX = "AMMPATH_"

log = logging.getLogger("ammpath")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    subgraph_url: str = DEFAULT_SUBGRAPH_URL
    rpc_url: str = DEFAULT_RPC_URL
    pool_id: str = DEFAULT_POOL_ID
    fixture_dir: str = str(DEFAULT_FIXTURE_DIR)
    mode: str = "replay"
    output_format: str = "csv"
    seed: int = 42
    min_timestamp: int = 0
    limit: int = 1000
    page_size: int = 1000
    window: int = 60
    min_usd: float = 1.0
    max_parallel: int = 4
    oracle: bool = True

    def validate(self) -> "Config":
        if self.mode not in ("live", "replay", "record"):
            raise UsageError(f"mode must be live, replay or record, got {self.mode!r}")
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.output_format!r}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be an unsigned 64-bit integer")
        if self.mode == "replay" and not Path(self.fixture_dir).is_dir():
            raise UsageError(f"replay mode needs an existing fixture directory, {self.fixture_dir} missing")
        if self.mode == "record" and not (self.subgraph_url and self.rpc_url):
            raise UsageError("record mode needs subgraph and RPC URLs")
        return self


def _coerce(name: str, value: Any) -> Any:
    kind = {f.name: f.type for f in fields(Config)}[name]
    try:
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        if kind == "bool":
            return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes")
        return str(value)
    except ValueError as exc:
        raise UsageError(f"bad value for {name}: {value!r}") from exc


def load_config(path: str | None, environ: dict[str, str] | None = None, **overrides: Any) -> Config:
    """Defaults, then the JSON file at ``path``, then ``AMMPATH_*`` variables, then ``overrides``."""
    environ = os.environ if environ is None else environ
    values: dict[str, Any] = {}
    names = {f.name for f in fields(Config)}
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {path}: invalid JSON at line {exc.lineno}") from exc
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    for name in names:
        env = environ.get(ENV_PREFIX + name.upper())
        if env is not None:
            values[name] = env
    values.update({k: v for k, v in overrides.items() if v is not None})
    return Config(**{k: _coerce(k, v) for k, v in values.items()}).validate()


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _amount(q: Fraction) -> str:
    s = to_decimal_str(q, 2)
    return s.rstrip("0").rstrip(".") if "." in s else s


# Published worked example: 100 ETH / 200,000 USDC, alpha 0.1, swap 10 ETH.
WORKED_EXAMPLE = {
    "x0": Fraction(100),
    "y0": Fraction(200_000),
    "alpha": Fraction(1, 10),
    "swap": Fraction(10),
    "case1": (Fraction(120), Fraction(24_200_000, 120)),
    "case2": (Fraction(121), Fraction(200_000)),
    "delta": (Fraction(1), Fraction(5000, 3)),
}


def cmd_demo(args) -> int:
    x0, y0, alpha, dx = (to_fraction(v) for v in (args.x0, args.y0, args.alpha, args.swap))
    pool = new_pool(x0, y0)
    swap = Swap(Token.X, dx)
    if alpha < 0:
        raise UsageError("alpha must be nonnegative")
    if alpha == 0:
        after = swap_exact_in(pool, Token.X, dx)[0]
        case1 = case2 = (after.reserve_x, after.reserve_y)
        delta_x = delta_y = impact = Fraction(0)
    else:
        cmp = commute_compare(pool, AddLiquidity(alpha), swap)
        case1 = (cmp.final_ab.reserve_x, cmp.final_ab.reserve_y)
        case2 = (cmp.final_ba.reserve_x, cmp.final_ba.reserve_y)
        delta_x, delta_y, impact = cmp.delta_x, cmp.delta_y, cmp.price_impact_pct

    y2, y2p = closed_form_y_states(x0, y0, alpha, dx)
    ok = delta_x == closed_form_x_diff(dx, alpha) and (case1[1], case2[1]) == (y2, y2p)
    is_worked = (x0, y0, alpha, dx) == tuple(WORKED_EXAMPLE[k] for k in ("x0", "y0", "alpha", "swap"))
    if is_worked:
        ok = ok and case1 == WORKED_EXAMPLE["case1"] and case2 == WORKED_EXAMPLE["case2"]
        ok = ok and (delta_x, delta_y) == WORKED_EXAMPLE["delta"]

    if args.format == "json":
        doc = {
            "schema_version": 1,
            "initial": {"x": str(x0), "y": str(y0)},
            "alpha": str(alpha),
            "swap": str(dx),
            "case1": {"order": "liquidity-then-swap", "x": str(case1[0]), "y": str(case1[1])},
            "case2": {"order": "swap-then-liquidity", "x": str(case2[0]), "y": str(case2[1])},
            "delta_x": str(delta_x),
            "delta_y": str(delta_y),
            "price_impact_pct": str(impact),
            "checked_against": "published example" if is_worked else "closed forms",
            "match": ok,
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.output)
    else:
        lines = [
            f"Case 1: {_amount(case1[0])} ETH / {_amount(case1[1])} USDC; "
            f"Case 2: {_amount(case2[0])} ETH / {_amount(case2[1])} USDC; "
            f"Δ = {_amount(delta_x)} ETH, {_amount(delta_y)} USDC",
            f"  case 1 (liquidity then swap): x = {case1[0]}, y = {case1[1]}",
            f"  case 2 (swap then liquidity): x = {case2[0]}, y = {case2[1]}",
            f"  price impact (swap-first vs liquidity-first): {to_decimal_str(impact, 4)}%",
            f"  {'published example' if is_worked else 'closed forms'}: {'match' if ok else 'MISMATCH'}",
        ]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_heatmap(args) -> int:
    cfg = load_config(args.config, output_format=args.format)
    try:
        alphas = frange(args.alpha_start, args.alpha_stop, args.alpha_step)
        swaps = frange(args.swap_start, args.swap_stop, args.swap_step)
        cells = heatmap_grid(new_pool(args.x0, args.y0), alphas, swaps)
    except PoolError as exc:
        raise UsageError(str(exc)) from exc
    text = report.heatmap_csv(cells) if cfg.output_format == "csv" else report.heatmap_json(cells)
    _emit(text, args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, output_format=args.format, seed=args.seed)
    scenarios = load_scenarios(args.scenario_file) if args.scenario_file else builtin_scenarios()
    if args.scenario:
        scenarios = [s for s in scenarios if s.name in args.scenario]
        if not scenarios:
            raise UsageError(f"no scenario named {args.scenario}")
    results = [run_scenario(s) for s in scenarios]
    mc = {}
    if args.monte_carlo:
        for s in scenarios:
            mc[s.name] = monte_carlo_paths(s.market0, s.path1, args.monte_carlo, cfg.seed)
    if cfg.output_format == "csv":
        text = report.simulation_csv(results)
    else:
        text = report.simulation_json(results, mc)
    _emit(text, args.output)
    for r in results:
        for flag in report.discrepancies(r):
            log.warning(
                "%s %s: computed %.1f vs published %.1f (gap %.1f pp)",
                r.scenario.name, flag["quantity"], flag["computed"], flag["published"], flag["gap_pp"],
            )
    return EXIT_OK


def _parse_reserves(text: str | None) -> tuple[float, float] | None:
    if not text:
        return None
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"--reserves expects X,Y, got {text!r}") from exc
    if not (x > 0 and y > 0):
        raise UsageError("reserves must be positive")
    return x, y


def run_scan(cfg: Config, reserves: tuple[float, float] | None = None, transport=None):
    transport = transport or make_transport(cfg.mode, cfg.fixture_dir)
    subgraph = SubgraphClient(transport, cfg.subgraph_url, cfg.page_size)
    oracle = OracleClient(transport, cfg.rpc_url, max_parallel=cfg.max_parallel) if cfg.oracle else None
    return scan(
        subgraph,
        cfg.pool_id,
        oracle=oracle,
        min_timestamp=cfg.min_timestamp,
        limit=cfg.limit,
        width=cfg.window,
        min_usd=cfg.min_usd,
        reserves=reserves,
    )


def cmd_scan(args) -> int:
    cfg = load_config(
        args.config,
        mode=args.mode,
        fixture_dir=args.fixture_dir,
        output_format=args.format,
        pool_id=args.pool_id,
        oracle=False if args.no_oracle else None,
    )
    result = run_scan(cfg, _parse_reserves(args.reserves))
    if cfg.output_format == "csv":
        _emit(report.opportunities_csv(result.opportunities), args.output)
    else:
        doc = {**result.summary(), "opportunities": report.opportunities_json(result.opportunities)}
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.output)
    if args.report:
        Path(args.report).write_text(json.dumps(result.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


def read_columns(path: str) -> dict[str, list[float]]:
    """Numeric columns of a headed CSV file, or a JSON array as column ``value``."""
    p = Path(path)
    text = p.read_text(encoding="utf-8")
    if text.lstrip().startswith("["):
        try:
            values = json.loads(text)
            return {"value": [float(v) for v in values]}
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise UsageError(f"{path}: not a JSON array of numbers: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise UsageError(f"{path}: empty input")
    header = [h.strip() for h in rows[0]]
    if header and all(_is_number(h) for h in header):
        header = [f"col{i}" for i in range(len(rows[0]))]
        body = list(enumerate(rows, start=1))
    else:
        body = list(enumerate(rows[1:], start=2))
    cols: dict[str, list[float]] = {h: [] for h in header}
    for lineno, row in body:
        if not row:
            continue
        if len(row) != len(header):
            raise UsageError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}")
        for h, cell in zip(header, row):
            try:
                cols[h].append(float(cell))
            except ValueError:
                raise UsageError(f"{path}: line {lineno}: {cell!r} in column {h!r} is not a number") from None
    return cols


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def cmd_stats(args) -> int:
    cols = read_columns(args.input)
    if not cols:
        raise UsageError(f"{args.input}: no columns")
    name = args.column or ("price_impact_pct" if "price_impact_pct" in cols else next(iter(cols)))
    if name not in cols:
        raise UsageError(f"column {name!r} not in {sorted(cols)}")
    impacts = cols[name]
    if len(impacts) < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {len(impacts)}")
    companions = {k: v for k, v in cols.items() if k != name}
    if args.with_self:
        companions[name] = impacts
    doc = significance_report(impacts, mu0=args.mu0, companions=companions)
    _emit(json.dumps(doc, indent=2) + "\n", args.output)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--output", "-o", help="write output here instead of stdout")
    common.add_argument("--verbose", "-v", action="store_true")

    p = _Parser(prog="ammpath", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("demo", parents=[common], help="worked example of both operation orders")
    d.add_argument("--alpha", default="0.1")
    d.add_argument("--swap", default="10")
    d.add_argument("--x0", default="100")
    d.add_argument("--y0", default="200000")
    d.add_argument("--format", choices=("text", "json"), default="text")
    d.set_defaults(func=cmd_demo)

    h = sub.add_parser("heatmap", parents=[common], help="price impact over an alpha x swap grid")
    h.add_argument("--alpha-start", default="0.01")
    h.add_argument("--alpha-stop", default="0.50")
    h.add_argument("--alpha-step", default="0.01")
    h.add_argument("--swap-start", default="1")
    h.add_argument("--swap-stop", default="20")
    h.add_argument("--swap-step", default="1")
    h.add_argument("--x0", default="100")
    h.add_argument("--y0", default="200000")
    h.add_argument("--format", choices=("csv", "json"))
    h.set_defaults(func=cmd_heatmap)

    s = sub.add_parser("simulate", parents=[common], help="prediction-market scenarios")
    s.add_argument("scenario_file", nargs="?", help="JSON scenario definitions (default: built-ins)")
    s.add_argument("--scenario", action="append", help="run only the named scenario(s)")
    s.add_argument("--monte-carlo", type=int, metavar="N", default=0)
    s.add_argument("--seed", type=int)
    s.add_argument("--format", choices=("csv", "json"))
    s.set_defaults(func=cmd_simulate)

    sc = sub.add_parser("scan", parents=[common], help="detect reorderable windows in pool events")
    sc.add_argument("--mode", choices=("live", "replay", "record"))
    sc.add_argument("--fixture-dir")
    sc.add_argument("--pool-id")
    sc.add_argument("--reserves", help="reserve estimate X,Y (default: from pool TVL)")
    sc.add_argument("--no-oracle", action="store_true")
    sc.add_argument("--report", help="also write the JSON stats report here")
    sc.add_argument("--format", choices=("csv", "json"))
    sc.set_defaults(func=cmd_scan)

    st = sub.add_parser("stats", parents=[common], help="significance report for an impact sample")
    st.add_argument("input", help="CSV with a header row, or a JSON array")
    st.add_argument("--column")
    st.add_argument("--mu0", type=float, default=0.0)
    st.add_argument("--with-self", action="store_true", help="include the sample's correlation with itself")
    st.set_defaults(func=cmd_stats)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, PoolError, ScenarioError, InsufficientDataError, ValueError) as exc:
        print(f"ammpath: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, OSError) as exc:
        print(f"ammpath: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
