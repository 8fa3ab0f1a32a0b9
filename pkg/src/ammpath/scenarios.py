"""Scenario definitions: built-in operation sequences and their JSON form."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from ammpath.market import NO, YES, MarketPool, run_scenario_path
from ammpath.pool import AddLiquidity, Operation, PoolError, RemoveLiquidity, Swap, Token, to_fraction, to_significant_str

DIVERGENCE_ALPHAS = tuple(to_fraction(a) for a in ("0.1", "0.2", "0.5", "0.75", "1.0"))
DISCREPANCY_TOLERANCE_PP = Fraction(1, 10)

_TOKEN_NAMES = {"YES": YES, "NO": NO, "X": Token.X, "Y": Token.Y}


class ScenarioError(PoolError):
    """Malformed scenario definition."""


@dataclass(frozen=True)
class Scenario:
    name: str
    path1: tuple[Operation, ...]
    path2: tuple[Operation, ...]
    yes0: Fraction = Fraction(1000)
    no0: Fraction = Fraction(1000)
    # Published reference values, percent / percentage points keyed by alpha.
    reference_path1: Fraction | None = None
    reference_path2: Fraction | None = None
    reference_divergence: dict[Fraction, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if Counter(self.path1) != Counter(self.path2):
            raise ScenarioError(f"scenario {self.name!r}: paths are not permutations of each other")

    @property
    def market0(self) -> MarketPool:
        return MarketPool.create(self.yes0, self.no0)

    def with_alpha(self, alpha: Fraction) -> "Scenario":
        """Copy with every liquidity addition resized to ``alpha``."""

        def swap_alpha(ops):
            return tuple(AddLiquidity(alpha) if isinstance(op, AddLiquidity) else op for op in ops)

        return replace(self, path1=swap_alpha(self.path1), path2=swap_alpha(self.path2))


def _f(s: str) -> Fraction:
    return to_fraction(s)


def builtin_scenarios() -> list[Scenario]:
    """The three scenarios exactly as published, with their printed results."""
    gradual = Scenario(
        "Gradual",
        (Swap(NO, 100), AddLiquidity("0.2"), Swap(NO, 150), Swap(NO, 200)),
        (Swap(NO, 100), Swap(NO, 150), Swap(NO, 200), AddLiquidity("0.2")),
        reference_path1=_f("61.3"),
        reference_path2=_f("62.3"),
        reference_divergence=dict(zip(DIVERGENCE_ALPHAS, map(_f, ("0.5", "1.0", "2.2", "3.1", "3.9")))),
    )
    oscillating = Scenario(
        "Oscillating",
        (Swap(NO, 200), Swap(YES, 100), AddLiquidity("0.3"), Swap(NO, 150)),
        (Swap(NO, 200), Swap(YES, 100), Swap(NO, 150), AddLiquidity("0.3")),
        reference_path1=_f("58.1"),
        reference_path2=_f("58.8"),
        reference_divergence=dict(zip(DIVERGENCE_ALPHAS, map(_f, ("0.4", "0.7", "1.5", "2.2", "2.8")))),
    )
    sharp = Scenario(
        "SharpShock",
        (AddLiquidity("0.5"), Swap(NO, 500)),
        (Swap(NO, 500), AddLiquidity("0.5")),
        reference_path1=_f("63.4"),
        reference_path2=_f("69.2"),
        reference_divergence=dict(zip(DIVERGENCE_ALPHAS, map(_f, ("3.2", "5.8", "5.8", "8.3", "10.8")))),
    )
    return [gradual, oscillating, sharp]


def op_to_dict(op: Operation) -> dict[str, str]:
    if isinstance(op, Swap):
        name = {YES: "YES", NO: "NO"}[op.token_in]
        return {"op": "swap", "token_in": name, "amount": str(op.amount_in)}
    if isinstance(op, AddLiquidity):
        return {"op": "add_liquidity", "alpha": str(op.alpha)}
    return {"op": "remove_liquidity", "alpha": str(op.alpha)}


def op_from_dict(d: dict[str, Any]) -> Operation:
    kind = d.get("op")
    try:
        if kind == "swap":
            token = str(d["token_in"]).upper()
            if token not in _TOKEN_NAMES:
                raise ScenarioError(f"unknown token {d['token_in']!r}")
            return Swap(_TOKEN_NAMES[token], to_fraction(str(d["amount"])))
        if kind == "add_liquidity":
            return AddLiquidity(to_fraction(str(d["alpha"])))
        if kind == "remove_liquidity":
            return RemoveLiquidity(to_fraction(str(d["alpha"])))
    except KeyError as exc:
        raise ScenarioError(f"operation {d!r} missing field {exc}") from exc
    raise ScenarioError(f"unknown operation kind {kind!r}")


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    out: dict[str, Any] = {
        "name": s.name,
        "initial": {"yes": str(s.yes0), "no": str(s.no0)},
        "path1": [op_to_dict(op) for op in s.path1],
        "path2": [op_to_dict(op) for op in s.path2],
    }
    if s.reference_path1 is not None or s.reference_divergence:
        out["reference"] = {
            "path1_pct": None if s.reference_path1 is None else to_significant_str(s.reference_path1),
            "path2_pct": None if s.reference_path2 is None else to_significant_str(s.reference_path2),
            "divergence_pp": {to_significant_str(a): to_significant_str(v) for a, v in s.reference_divergence.items()},
        }
    return out


_SCENARIO_KEYS = {"name", "initial", "path1", "path2", "reference"}


def scenario_from_dict(d: dict[str, Any]) -> Scenario:
    try:
        name = str(d["name"])
        unknown = set(d) - _SCENARIO_KEYS
        if unknown:
            raise ScenarioError(f"scenario {name!r}: unknown keys {sorted(unknown)}")
        initial = d.get("initial", {})
        if set(initial) - {"yes", "no"}:
            raise ScenarioError(f"scenario {name!r}: initial takes only 'yes' and 'no'")
        path1 = tuple(op_from_dict(o) for o in d["path1"])
        path2 = tuple(op_from_dict(o) for o in d["path2"])
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"malformed scenario: {exc}") from exc
    ref = d.get("reference") or {}

    def opt(key):
        v = ref.get(key)
        return None if v is None else to_fraction(str(v))

    return Scenario(
        name=name,
        path1=path1,
        path2=path2,
        yes0=to_fraction(str(initial.get("yes", 1000))),
        no0=to_fraction(str(initial.get("no", 1000))),
        reference_path1=opt("path1_pct"),
        reference_path2=opt("path2_pct"),
        reference_divergence={
            to_fraction(str(a)): to_fraction(str(v)) for a, v in (ref.get("divergence_pp") or {}).items()
        },
    )


def load_scenarios(path: str | Path) -> list[Scenario]:
    """Read a JSON file holding ``{"scenarios": [...]}`` or a bare list."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    items = data.get("scenarios") if isinstance(data, dict) else data
    if not isinstance(items, list):
        raise ScenarioError(f"{path}: expected a list of scenarios")
    return [scenario_from_dict(item) for item in items]


def dump_scenarios(scenarios: Sequence[Scenario]) -> str:
    return json.dumps({"scenarios": [scenario_to_dict(s) for s in scenarios]}, indent=2)


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    final_path1: Fraction
    final_path2: Fraction
    divergence: list[tuple[Fraction, Fraction]]

    @property
    def divergence_pp(self) -> Fraction:
        return 100 * (self.final_path2 - self.final_path1)


def run_scenario(s: Scenario, alphas: Sequence[Fraction] = DIVERGENCE_ALPHAS) -> ScenarioResult:
    p1 = run_scenario_path(s.market0, s.path1)[1]
    p2 = run_scenario_path(s.market0, s.path2)[1]
    rows = []
    has_liquidity = any(isinstance(op, AddLiquidity) for op in s.path1)
    for a in alphas:
        if has_liquidity:
            resized = s.with_alpha(a)
            d = run_scenario_path(s.market0, resized.path2)[1] - run_scenario_path(s.market0, resized.path1)[1]
        else:
            d = p2 - p1
        rows.append((a, 100 * d))
    return ScenarioResult(s, p1, p2, rows)


def discrepancies(result: ScenarioResult, tolerance_pp: Fraction = DISCREPANCY_TOLERANCE_PP) -> list[dict[str, Any]]:
    """Computed-versus-published comparisons whose gap exceeds ``tolerance_pp``."""
    s = result.scenario
    flags = []
    checks = [
        ("path1", s.reference_path1, 100 * result.final_path1),
        ("path2", s.reference_path2, 100 * result.final_path2),
    ]
    checks += [(f"divergence@{to_significant_str(a)}", s.reference_divergence.get(a), d) for a, d in result.divergence]
    for label, ref, got in checks:
        if ref is None:
            continue
        gap = got - ref
        if abs(gap) > tolerance_pp:
            flags.append({"quantity": label, "published": float(ref), "computed": float(got), "gap_pp": float(gap)})
    return flags
