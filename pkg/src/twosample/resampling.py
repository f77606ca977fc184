"""Resampling p-values for the ECDF statistics.

Under the null both samples are exchangeable, so re-partitioning the pooled
sample into groups of the original sizes draws from the statistic's null
distribution. The p-value is the fraction of resampled statistics at least
as large as the observed one, floored at 1/(2R) when none are.

Random streams
--------------
Resamples are generated in fixed-size chunks. Chunk ``c`` draws its
uniforms from a PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(0, c))``
and hands them to the compiled kernel. Workers only decide who evaluates a
chunk, never what it contains, so results are bit-identical for any worker
count.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels
from .ecdf import ALL_KINDS, InvalidSampleError, StatKind, as_sample

DEFAULT_RESAMPLES = 2000
CHUNK_SIZE = 100
DEFAULT_MAX_K = 10_000
# resampled statistics within this relative distance of the observed one are
# ties, and ties count as extreme
TIE_RTOL = 1e-12

_COLUMN = {StatKind(name): i for i, name in enumerate(_kernels.KIND_ORDER)}

_CHUNK_KEY = 0
_REFERENCE_KEY = 1


class InvalidPlanError(ValueError):
    pass


class NoFeasibleReplicationError(ValueError):
    """No integer k <= max_k turns the weights into near-integer counts."""


class ResampleMode(str, enum.Enum):
    PERMUTATION = "permutation"
    BOOTSTRAP = "bootstrap"


def fresh_seed() -> int:
    return int(np.random.SeedSequence().entropy % 2**64)


@dataclass(frozen=True)
class ResamplePlan:
    n_resamples: int = DEFAULT_RESAMPLES
    seed: int | None = None
    mode: ResampleMode = ResampleMode.PERMUTATION
    workers: int = 1

    def __post_init__(self):
        if not isinstance(self.n_resamples, (int, np.integer)) or self.n_resamples < 1:
            raise InvalidPlanError(f"n_resamples must be a positive integer, got {self.n_resamples!r}")
        if self.workers < 1:
            raise InvalidPlanError(f"workers must be positive, got {self.workers!r}")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise InvalidPlanError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "mode", ResampleMode(self.mode))

    def resolved(self) -> "ResamplePlan":
        """Copy with a concrete seed, drawing fresh entropy if none was given."""
        if self.seed is not None:
            return self
        return ResamplePlan(self.n_resamples, fresh_seed(), self.mode, self.workers)


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n_resamples: int
    exceed_count: int
    method: StatKind
    seed: int
    mode: ResampleMode = ResampleMode.PERMUTATION

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        d["mode"] = self.mode.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TestResult":
        return cls(
            statistic=float(d["statistic"]),
            p_value=float(d["p_value"]),
            n_resamples=int(d["n_resamples"]),
            exceed_count=int(d["exceed_count"]),
            method=StatKind.parse(d["method"]),
            seed=int(d["seed"]),
            mode=ResampleMode(d.get("mode", "permutation")),
        )


def p_value_from_count(exceed_count: int, n_resamples: int) -> float:
    if exceed_count > 0:
        return exceed_count / n_resamples
    return 1.0 / (2 * n_resamples)


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    """Stream for resample chunk ``chunk``, a pure function of (seed, chunk)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_CHUNK_KEY, chunk))))


def resample_once(joint, n_a: int, n_b: int, mode: ResampleMode | str, rng: np.random.Generator):
    """Draw one resampled pair (A, B) from the pooled values ``joint``.

    PERMUTATION splits a random shuffle of ``joint`` into sizes n_a and n_b.
    BOOTSTRAP draws n_a and n_b values independently with replacement.
    """
    joint = np.asarray(joint, dtype=float)
    if n_a < 1 or n_b < 1 or n_a + n_b != joint.size:
        raise ValueError(f"sizes {n_a} + {n_b} do not partition a pooled sample of {joint.size}")
    mode = ResampleMode(mode)
    if mode is ResampleMode.PERMUTATION:
        shuffled = rng.permutation(joint)
        return shuffled[:n_a], shuffled[n_a:]
    idx = rng.integers(0, joint.size, size=n_a + n_b)
    return joint[idx[:n_a]], joint[idx[n_a:]]


class _Pooled:
    """Pooled sample collapsed into sorted tie groups, shared by every chunk."""

    def __init__(self, a, b):
        a = as_sample(a, "sample a")
        b = as_sample(b, "sample b")
        self.n_a, self.n_b = a.size, b.size
        pooled = np.concatenate([a, b])
        order = np.argsort(pooled)
        self.values, self.group_of, self.group_size = np.unique(
            pooled[order], return_inverse=True, return_counts=True)
        self.group_of = self.group_of.astype(np.int64)
        self.group_size = self.group_size.astype(np.int64)
        self.count_a = np.bincount(self.group_of[order < self.n_a], minlength=self.values.size)

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    def observed(self, kinds) -> dict[StatKind, float]:
        row = _kernels.observed_stats(self.values, self.count_a, self.group_size, self.n_a, self.n_b)
        return {k: float(row[_COLUMN[k]]) for k in kinds}

    def chunk_statistics(self, rng: np.random.Generator, size: int, mode: ResampleMode) -> np.ndarray:
        out = np.empty((size, len(_kernels.KIND_ORDER)))
        if mode is ResampleMode.PERMUTATION:
            uniforms = rng.random((size, min(self.n_a, self.n_b)))
            _kernels.permutation_chunk(self.values, self.group_of, self.group_size,
                                       self.n_a, self.n_b, uniforms, out)
        else:
            uniforms = rng.random((size, self.n))
            _kernels.bootstrap_chunk(self.values, self.group_of, self.n_a, self.n_b, uniforms, out)
        return out


def _exceed_counts(pooled: _Pooled, observed, kinds, plan: ResamplePlan) -> dict[StatKind, int]:
    n_chunks = math.ceil(plan.n_resamples / CHUNK_SIZE)
    thresholds = {k: observed[k] - TIE_RTOL * abs(observed[k]) for k in kinds}

    def run(chunk: int) -> dict[StatKind, int]:
        size = min(CHUNK_SIZE, plan.n_resamples - chunk * CHUNK_SIZE)
        stats = pooled.chunk_statistics(chunk_rng(plan.seed, chunk), size, plan.mode)
        return {k: int(np.count_nonzero(stats[:, _COLUMN[k]] >= thresholds[k])) for k in kinds}

    if plan.workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            per_chunk = list(pool.map(run, range(n_chunks)))
    else:
        per_chunk = [run(c) for c in range(n_chunks)]
    return {k: sum(counts[k] for counts in per_chunk) for k in kinds}


def multi_test(a, b, kinds: Sequence[StatKind | str] = ALL_KINDS,
               plan: ResamplePlan | None = None) -> dict[StatKind, TestResult]:
    """Resampling tests for several statistics sharing one set of resamples.

    Each entry equals what :func:`two_sample_test` returns for that kind
    under the same plan.
    """
    plan = (plan or ResamplePlan()).resolved()
    kinds = list(dict.fromkeys(StatKind.parse(k) for k in kinds))
    pooled = _Pooled(a, b)
    observed = pooled.observed(kinds)
    counts = _exceed_counts(pooled, observed, kinds, plan)
    return {
        k: TestResult(
            statistic=observed[k],
            p_value=p_value_from_count(counts[k], plan.n_resamples),
            n_resamples=plan.n_resamples,
            exceed_count=counts[k],
            method=k,
            seed=plan.seed,
            mode=plan.mode,
        )
        for k in kinds
    }


def two_sample_test(a, b, kind: StatKind | str = StatKind.DTS,
                    plan: ResamplePlan | None = None) -> TestResult:
    """Right-tailed resampling test of H0: a and b share one distribution.

    Examples
    --------
    >>> r = two_sample_test([0, 1], [2, 3], "dts", ResamplePlan(n_resamples=1, seed=1))
    >>> round(r.statistic, 6)
    9.333333
    """
    kind = StatKind.parse(kind)
    return multi_test(a, b, [kind], plan)[kind]


def combine_parallel_pvalues(shard_results: Sequence[TestResult], n_cores: int | None = None,
                             weighted: bool = False) -> float:
    """Merge independent runs of the same test into one p-value.

    Floored shard p-values are read as 0 (their exceed count), the shards are
    averaged, and a zero average is moved back up to 1/(2 * total resamples).
    With equal per-shard resample counts this is the plain mean; shards of
    different sizes need ``weighted=True`` (weights proportional to each
    shard's resample count).
    """
    shards = list(shard_results)
    if not shards:
        raise ValueError("no shard results to combine")
    if n_cores is not None and n_cores != len(shards):
        raise ValueError(f"n_cores={n_cores} but {len(shards)} shard results given")
    sizes = {s.n_resamples for s in shards}
    if len(sizes) > 1 and not weighted:
        raise ValueError("shards used different resample counts; pass weighted=True")
    total_exceed = sum(s.exceed_count for s in shards)
    total_resamples = sum(s.n_resamples for s in shards)
    # mean of exceed_i / R equals sum(exceed_i) / (n_cores * R); use the exact form
    return p_value_from_count(total_exceed, total_resamples)


@dataclass
class WeightedSample:
    values: np.ndarray
    weights: np.ndarray
    k: int | None = field(default=None)

    def __post_init__(self):
        self.values = as_sample(self.values, "weighted values")
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if self.weights.shape != self.values.shape:
            raise InvalidSampleError("values and weights differ in length")
        if not np.all(np.isfinite(self.weights)) or np.any(self.weights <= 0):
            raise InvalidSampleError("weights must be finite and positive")


def find_replication_k(weights, max_k: int = DEFAULT_MAX_K, tol: float = 0.1) -> int:
    """Smallest k <= max_k with every k * w strictly within ``tol`` of a positive integer."""
    w = np.asarray(weights, dtype=float)
    for k in range(1, max_k + 1):
        scaled = k * w
        counts = np.rint(scaled)
        if np.all(counts >= 1) and np.all(np.abs(scaled - counts) < tol):
            return k
    raise NoFeasibleReplicationError(f"no replication factor k <= {max_k} makes the weights near-integer")


def expand_weights(ws: WeightedSample, max_k: int = DEFAULT_MAX_K) -> np.ndarray:
    """Replicate each value round(k * weight) times for the smallest workable k.

    Sets ``ws.k`` to the factor found.

    >>> expand_weights(WeightedSample([7, 8], [0.3, 0.7])).tolist() == [7.0] * 3 + [8.0] * 7
    True
    """
    k = find_replication_k(ws.weights, max_k)
    ws.k = k
    return np.repeat(ws.values, np.rint(k * ws.weights).astype(np.int64))


def expand_weight_pair(wa: WeightedSample, wb: WeightedSample,
                       max_k: int = DEFAULT_MAX_K) -> tuple[np.ndarray, np.ndarray]:
    """Expand both samples with one shared k so relative weights carry across groups."""
    k = find_replication_k(np.concatenate([wa.weights, wb.weights]), max_k)
    wa.k = wb.k = k
    return (np.repeat(wa.values, np.rint(k * wa.weights).astype(np.int64)),
            np.repeat(wb.values, np.rint(k * wb.weights).astype(np.int64)))


Sampler = Callable[[np.random.Generator, int], np.ndarray]


def one_sample_test(a, reference_sampler: Sampler, k: int = 10,
                    kind: StatKind | str = StatKind.DTS,
                    plan: ResamplePlan | None = None) -> TestResult:
    """Test ``a`` against a known distribution through a large reference draw.

    ``reference_sampler(rng, size)`` must return ``size`` draws from the
    reference distribution. The reference sample has k * len(a) values; the
    comparison is then an ordinary two-sample test.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    a = as_sample(a, "sample a")
    plan = (plan or ResamplePlan()).resolved()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(plan.seed, spawn_key=(_REFERENCE_KEY,))))
    b = np.asarray(reference_sampler(rng, int(k) * a.size), dtype=float)
    return two_sample_test(a, b, kind, plan)


def reference_mixture_share(k: int) -> float:
    """Share of the tested sample's own distribution in the pooled reference.

    With n_b = k * n_a the pooled sample is a/(1+k) from the tested
    distribution; k=10 gives about 9%, k=100 about 0.99%.
    """
    return 1.0 / (1 + k)
