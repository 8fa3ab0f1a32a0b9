"""Summary statistics, one-sample t-test, correlation and simple regression.

Everything here works on 64-bit floats; exact rationals are converted at the
boundary.  Student-t probabilities come from :mod:`scipy.stats`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any, Iterable, Sequence

from scipy import stats as _sps

DEFAULT_THRESHOLDS = (0.01, 0.05, 0.1, 0.5, 1.0)


class InsufficientDataError(ValueError):
    """Too few observations, or no variance, for the requested statistic."""


@dataclass(frozen=True)
class SampleSummary:
    n: int
    mean: float
    stddev: float
    min: float
    max: float


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    p_value: float
    cohens_d: float
    ci_low: float
    ci_high: float
    confidence: float
    df: int
    significant: bool


@dataclass(frozen=True)
class OlsResult:
    slope: float
    intercept: float
    slope_p_value: float
    r_squared: float
    adj_r_squared: float
    n: int


def _floats(values: Iterable[Any]) -> list[float]:
    return [float(v) for v in values]


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _sample_sd(xs: Sequence[float], mean: float) -> float:
    return math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / (len(xs) - 1))


def summarize(samples: Iterable[Any]) -> SampleSummary:
    xs = _floats(samples)
    if not xs:
        raise InsufficientDataError("no observations")
    m = _mean(xs)
    sd = _sample_sd(xs, m) if len(xs) > 1 else 0.0
    # fsum mean of identical values can drift one ulp outside [min, max]
    lo, hi = min(xs), max(xs)
    return SampleSummary(len(xs), min(max(m, lo), hi), sd, lo, hi)


def one_sample_t(samples: Iterable[Any], mu0: float = 0.0, confidence: float = 0.95) -> TTestResult:
    xs = _floats(samples)
    n = len(xs)
    if n < 2:
        raise InsufficientDataError(f"t-test needs at least 2 observations, got {n}")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    m = _mean(xs)
    s = _sample_sd(xs, m)
    if s == 0:
        raise InsufficientDataError("sample variance is zero")
    df = n - 1
    se = s / math.sqrt(n)
    t = (m - mu0) / se
    p = float(min(1.0, 2.0 * _sps.t.sf(abs(t), df)))
    t_crit = float(_sps.t.ppf(0.5 + confidence / 2, df))
    return TTestResult(
        t_statistic=t,
        p_value=p,
        cohens_d=(m - mu0) / s,
        ci_low=m - t_crit * se,
        ci_high=m + t_crit * se,
        confidence=confidence,
        df=df,
        significant=p < 0.05,
    )


def cohens_d(samples: Iterable[Any], mu0: float = 0.0) -> float:
    return one_sample_t(samples, mu0).cohens_d


def pearson(xs: Iterable[Any], ys: Iterable[Any]) -> float:
    a, b = _floats(xs), _floats(ys)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise InsufficientDataError("correlation needs at least 2 pairs")
    ma, mb = _mean(a), _mean(b)
    da = [v - ma for v in a]
    db = [v - mb for v in b]
    sxx = math.fsum(v * v for v in da)
    syy = math.fsum(v * v for v in db)
    if sxx == 0 or syy == 0:
        raise InsufficientDataError("correlation undefined for a constant input")
    r = math.fsum(u * v for u, v in zip(da, db)) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def ols_simple(xs: Iterable[Any], ys: Iterable[Any]) -> OlsResult:
    """Least-squares fit ``y = intercept + slope * x``."""
    a, b = _floats(xs), _floats(ys)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 3:
        raise InsufficientDataError(f"regression needs at least 3 points, got {n}")
    ma, mb = _mean(a), _mean(b)
    sxx = math.fsum((v - ma) ** 2 for v in a)
    if sxx == 0:
        raise InsufficientDataError("predictor has zero variance")
    sxy = math.fsum((u - ma) * (v - mb) for u, v in zip(a, b))
    slope = sxy / sxx
    intercept = mb - slope * ma
    sst = math.fsum((v - mb) ** 2 for v in b)
    sse = math.fsum((v - intercept - slope * u) ** 2 for u, v in zip(a, b))
    df = n - 2
    if sst == 0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - sse / sst))
    adj = 1.0 - (1.0 - r2) * (n - 1) / df
    if sse == 0:
        p = 0.0
    else:
        se_slope = math.sqrt(sse / df / sxx)
        p = float(min(1.0, 2.0 * _sps.t.sf(abs(slope / se_slope), df)))
    return OlsResult(slope, intercept, p, r2, min(adj, r2), n)


def threshold_shares(samples: Iterable[Any], thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> list[tuple[float, float]]:
    """Fraction of samples whose absolute value strictly exceeds each threshold."""
    xs = _floats(samples)
    if not xs:
        raise InsufficientDataError("no observations")
    return [(float(t), sum(abs(v) > t for v in xs) / len(xs)) for t in thresholds]


def significance_report(
    impacts: Sequence[Any],
    mu0: float = 0.0,
    companions: dict[str, Sequence[Any]] | None = None,
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
) -> dict[str, Any]:
    """Impact-sample report: summary, t-test, threshold shares and correlations.

    ``companions`` maps a column name (``swap_usd``, ``alpha``, ...) to values
    paired with ``impacts``; each yields a correlation, and ``alpha`` also
    yields a regression.  Sections that cannot be computed carry an
    ``"error"`` entry instead of numbers.
    """
    report: dict[str, Any] = {"schema_version": 1, "metric": "price_impact_pct"}
    xs = _floats(impacts)
    try:
        report["summary"] = asdict(summarize(xs))
    except InsufficientDataError as exc:
        report["summary"] = {"n": 0, "error": str(exc)}
    try:
        report["t_test"] = {"mu0": mu0, **asdict(one_sample_t(xs, mu0))}
    except InsufficientDataError as exc:
        report["t_test"] = {"error": str(exc)}
    report["insufficient_data"] = "error" in report["t_test"]
    report["threshold_shares"] = (
        [{"threshold": t, "share": s} for t, s in threshold_shares(xs, thresholds)] if xs else []
    )
    correlations: dict[str, Any] = {}
    regression: dict[str, Any] | None = None
    for name, col in (companions or {}).items():
        try:
            correlations[name] = pearson(col, xs)
        except (InsufficientDataError, ValueError) as exc:
            correlations[name] = {"error": str(exc)}
        if name == "alpha":
            try:
                regression = asdict(ols_simple(col, xs))
            except (InsufficientDataError, ValueError) as exc:
                regression = {"error": str(exc)}
    report["correlations"] = correlations
    if regression is not None:
        report["regression_on_alpha"] = regression
    return report
