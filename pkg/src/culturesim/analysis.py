"""Time-series metrics and discounting analyses (NPV, TTT, PIV).

Everything here is a pure function of recorded run data; re-running an
analysis never touches simulation state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

HIST_BINS = 10
SEGREGATION_LOW = 0.1
SEGREGATION_HIGH = 0.9


@dataclass
class RunSeries:
    """Per-iteration record of one run."""

    mean_fitness: List[float]
    diversity: List[int]
    p_create_hist: Optional[List[Tuple[int, ...]]]
    config_digest: str
    run_index: int

    def __len__(self) -> int:
        return len(self.mean_fitness)


def npv(series: Sequence[float], r: float) -> float:
    """Net present value: sum of r^(t-1) * b_t."""
    if not (0.0 < r <= 1.0):
        raise ValueError(f"discount rate must be in (0, 1], got {r}")
    return sum((r ** t) * b for t, b in enumerate(series))


def discount_rate(interest_percent: float) -> float:
    """r = ((100 + i) / 100)^-1 for an interest rate of i percent."""
    return 100.0 / (100.0 + interest_percent)


def time_to_threshold(series: Sequence[float], tau: float) -> int:
    """Smallest 1-based t with series[t] >= tau; horizon+1 when censored."""
    for t, value in enumerate(series, start=1):
        if value >= tau:
            return t
    return len(series) + 1


def is_censored(ttt: int, horizon: int) -> bool:
    return ttt > horizon


def piv(series: Sequence[float], baseline: Sequence[float]) -> float:
    """Present innovation value against the no-interaction baseline.

    Iterations where the baseline is zero are undefined and skipped, with
    the horizon reduced accordingly.
    """
    if len(series) != len(baseline):
        raise ValueError(
            f"series length {len(series)} != baseline length {len(baseline)}"
        )
    total = 0.0
    n_used = 0
    for s, b in zip(series, baseline):
        if b == 0:
            continue
        total += s / b
        n_used += 1
    return total - n_used


def p_create_histogram(values: Sequence[float]) -> Tuple[int, ...]:
    """10-bin histogram over [0, 1]; the top bin includes 1.0 exactly."""
    counts = [0] * HIST_BINS
    for v in values:
        idx = min(int(v * HIST_BINS), HIST_BINS - 1)
        counts[idx] += 1
    return tuple(counts)


def segregation_stats(hist: Sequence[int]) -> Tuple[float, float, float]:
    """(frac_low, frac_high, frac_mid) from a 10-bin p(C) histogram.

    Low is p(C) in [0, 0.1] (bottom bin), high is [0.9, 1] (top bin).
    """
    total = sum(hist)
    if total == 0:
        raise ValueError("empty histogram")
    frac_low = hist[0] / total
    frac_high = hist[-1] / total
    return frac_low, frac_high, 1.0 - frac_low - frac_high


@dataclass
class CellSummary:
    c: float
    p: float
    runs: int
    mean_ttt: float
    mean_ttt_log10: float
    censored_count: int
    mean_piv: float


def summarize_cell(
    c: float,
    p: float,
    ttts: Sequence[int],
    pivs: Sequence[float],
    horizon: int,
) -> CellSummary:
    """Average per-run metrics for one (C, p) grid cell.

    Censored TTT values are excluded from log-scale averaging but included
    (at the sentinel horizon+1) in the raw mean used for ranking.
    """
    uncensored = [t for t in ttts if not is_censored(t, horizon)]
    censored = len(ttts) - len(uncensored)
    mean_log = (
        sum(math.log10(t) for t in uncensored) / len(uncensored)
        if uncensored
        else float("nan")
    )
    return CellSummary(
        c=c,
        p=p,
        runs=len(ttts),
        mean_ttt=sum(ttts) / len(ttts),
        mean_ttt_log10=mean_log,
        censored_count=censored,
        mean_piv=sum(pivs) / len(pivs),
    )


def average_series(runs: Sequence[RunSeries]) -> Dict[str, List[float]]:
    """Arithmetic per-iteration mean across runs of fitness, diversity, and
    segregation fractions."""
    if not runs:
        raise ValueError("no runs to average")
    horizon = len(runs[0])
    if any(len(r) != horizon for r in runs):
        raise ValueError("runs have differing horizons")
    n = len(runs)
    mean_fitness = [
        sum(r.mean_fitness[t] for r in runs) / n for t in range(horizon)
    ]
    diversity = [sum(r.diversity[t] for r in runs) / n for t in range(horizon)]
    frac_low = []
    frac_mid = []
    frac_high = []
    for t in range(horizon):
        lows, mids, highs = [], [], []
        for r in runs:
            if r.p_create_hist is None:
                continue
            lo, hi, mid = segregation_stats(r.p_create_hist[t])
            lows.append(lo)
            mids.append(mid)
            highs.append(hi)
        frac_low.append(sum(lows) / len(lows) if lows else 0.0)
        frac_mid.append(sum(mids) / len(mids) if mids else 0.0)
        frac_high.append(sum(highs) / len(highs) if highs else 0.0)
    return {
        "mean_fitness": mean_fitness,
        "diversity": diversity,
        "frac_low": frac_low,
        "frac_mid": frac_mid,
        "frac_high": frac_high,
    }
