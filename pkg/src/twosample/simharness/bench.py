"""Wall-clock and memory measurements for the test routine."""

from __future__ import annotations

import csv
import io
import math
import time
import tracemalloc
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from ..ecdf import StatKind, statistic
from ..resampling import ResamplePlan, two_sample_test


@dataclass(frozen=True)
class BenchRow:
    n: int
    mean_seconds: float
    lo95: float
    hi95: float
    reps: int


def _band(times: np.ndarray) -> tuple[float, float]:
    """95% predictive interval for a single further run."""
    if times.size < 2:
        return float(times[0]), float(times[0])
    half = stats.t.ppf(0.975, times.size - 1) * times.std(ddof=1) * math.sqrt(1 + 1 / times.size)
    mean = times.mean()
    return max(0.0, float(mean - half)), float(mean + half)


def _normal_pair(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    n_a = n // 2
    return rng.standard_normal(n_a), rng.standard_normal(n - n_a)


def bench_runtime(n_grid: Sequence[int], plan: ResamplePlan | None = None, reps: int = 5,
                  kind: StatKind | str = StatKind.DTS) -> list[BenchRow]:
    """Time the full resampling test at each pooled size n (n_a = n_b)."""
    if reps < 1:
        raise ValueError("reps must be at least 1")
    plan = (plan or ResamplePlan()).resolved()
    rows = []
    for n in n_grid:
        if n < 2:
            raise ValueError(f"pooled size must be at least 2, got {n}")
        a, b = _normal_pair(n, plan.seed)
        times = np.empty(reps)
        for r in range(reps):
            t0 = time.perf_counter()
            two_sample_test(a, b, kind, plan)
            times[r] = time.perf_counter() - t0
        lo, hi = _band(times)
        rows.append(BenchRow(int(n), float(times.mean()), lo, hi, reps))
    return rows


def bench_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "mean_seconds", "lo95", "hi95"])
    for r in rows:
        w.writerow([r.n, f"{r.mean_seconds:.6g}", f"{r.lo95:.6g}", f"{r.hi95:.6g}"])
    return buf.getvalue()


def time_statistic(n: int, reps: int = 31, kind: StatKind | str = StatKind.DTS, seed: int = 0) -> float:
    """Best-of-reps seconds for one statistic evaluation (sort + pass) at pooled size n.

    The minimum is the least noisy estimate of the cost itself; slower runs
    only add interference from the rest of the machine.
    """
    a, b = _normal_pair(n, seed)
    statistic(kind, a, b)
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        statistic(kind, a, b)
        times.append(time.perf_counter() - t0)
    return float(min(times))


def peak_memory(n: int, kind: StatKind | str = StatKind.DTS, seed: int = 0) -> int:
    """Peak bytes allocated while evaluating one statistic at pooled size n."""
    a, b = _normal_pair(n, seed)
    tracemalloc.start()
    try:
        tracemalloc.reset_peak()
        base = tracemalloc.get_traced_memory()[0]
        statistic(kind, a, b)
        return tracemalloc.get_traced_memory()[1] - base
    finally:
        tracemalloc.stop()
