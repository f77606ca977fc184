"""ECDF-based two-sample statistics.

All six statistics come from sorting each sample and one linear merge pass
over the two. Heights are right-continuous ECDF values evaluated after a
whole tie group has been absorbed, so tied points always share identical
heights.

:func:`statistics` runs the compiled merge pass. :func:`batch_statistics` is
a vectorised numpy evaluation for many labelings of one sorted pooled
sample at once; it shares no code with the compiled pass.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels


class InvalidSampleError(ValueError):
    """A sample is empty or contains non-finite values."""


class StatKind(str, enum.Enum):
    KS = "ks"
    KUIPER = "kuiper"
    CVM = "cvm"
    AD = "ad"
    WASS = "wass"
    DTS = "dts"

    @classmethod
    def parse(cls, name: "str | StatKind") -> "StatKind":
        if isinstance(name, StatKind):
            return name
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown statistic {name!r} (expected one of {valid})") from None


ALL_KINDS: tuple[StatKind, ...] = tuple(StatKind)


def as_sample(values: Iterable[float], name: str = "sample") -> np.ndarray:
    """Validate ``values`` and return them as a 1-d float array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise InvalidSampleError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidSampleError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class JointMerge:
    """Pooled, sorted sample with per-point ECDF heights.

    ``gap[i]`` is the distance from ``points[i]`` to the next *distinct*
    pooled value (0 for the maximum).
    """

    points: np.ndarray
    e_height: np.ndarray
    f_height: np.ndarray
    d_height: np.ndarray
    gap: np.ndarray
    n_a: int
    n_b: int

    @property
    def n(self) -> int:
        return self.n_a + self.n_b


def _group_ends(sorted_values: np.ndarray) -> np.ndarray | None:
    """Index of the last member of each point's tie group, along the last axis.

    Returns None when there are no ties at all (the common case), so callers
    can skip the gather.
    """
    n = sorted_values.shape[-1]
    is_last = np.empty(sorted_values.shape, dtype=bool)
    np.not_equal(sorted_values[..., 1:], sorted_values[..., :-1], out=is_last[..., :-1])
    is_last[..., -1] = True
    if is_last.all():
        return None
    idx = np.broadcast_to(np.arange(n), sorted_values.shape)
    marked = np.where(is_last, idx, n)
    # running minimum from the right gives the next group end at or after i
    return np.minimum.accumulate(marked[..., ::-1], axis=-1)[..., ::-1]


def build_joint_merge(a: Iterable[float], b: Iterable[float]) -> JointMerge:
    a = as_sample(a, "sample a")
    b = as_sample(b, "sample b")
    n_a, n_b = a.size, b.size
    pooled = np.concatenate([a, b])
    order = np.argsort(pooled)
    points = pooled[order]
    in_a = order < n_a

    cum_a = np.cumsum(in_a)
    cum_all = np.arange(1, points.size + 1)
    ends = _group_ends(points)
    if ends is not None:
        cum_a = cum_a[ends]
        cum_all = cum_all[ends]
    cum_b = cum_all - cum_a

    gap = np.zeros_like(points)
    last_idx = np.arange(points.size) if ends is None else ends
    inner = last_idx < points.size - 1
    gap[inner] = points[last_idx[inner] + 1] - points[inner]

    return JointMerge(
        points=points,
        e_height=cum_a / n_a,
        f_height=cum_b / n_b,
        d_height=cum_all / points.size,
        gap=gap,
        n_a=n_a,
        n_b=n_b,
    )


def batch_statistics(
    sorted_values: np.ndarray,
    in_a: np.ndarray,
    n_a: int,
    kinds: Sequence[StatKind] = ALL_KINDS,
    ends: np.ndarray | None | bool = True,
) -> dict[StatKind, np.ndarray]:
    """Evaluate statistics for many labelings of a sorted pooled sample.

    Parameters
    ----------
    sorted_values : array, shape (n,) or (r, n)
        Pooled values in ascending order. A 1-d array is shared by all rows.
    in_a : bool array, shape (r, n)
        True where the point belongs to sample A.
    n_a : int
        Size of sample A; every row of ``in_a`` must contain exactly n_a
        True entries.
    kinds : sequence of StatKind
    ends : array, None or True
        Precomputed tie-group ends for a shared 1-d ``sorted_values``
        (None meaning tie-free). True means compute them here.

    Returns
    -------
    dict mapping each kind to an array of shape (r,).
    """
    in_a = np.atleast_2d(in_a)
    n = in_a.shape[1]
    n_b = n - n_a
    if ends is True:
        ends = _group_ends(sorted_values)

    cum_a = np.cumsum(in_a, axis=1, dtype=np.int64)
    cum_all = np.arange(1, n + 1, dtype=np.int64)
    if ends is not None:
        if ends.ndim == 1:
            cum_a = cum_a[:, ends]
            cum_all = cum_all[ends]
        else:
            cum_a = np.take_along_axis(cum_a, ends, axis=1)
            cum_all = ends + 1
    cum_b = cum_all - cum_a

    # F - E, sample B's ECDF minus sample A's
    signed = cum_b / n_b - cum_a / n_a
    absdiff = np.abs(signed)
    out: dict[StatKind, np.ndarray] = {}
    kinds = [StatKind.parse(k) for k in kinds]

    if StatKind.KS in kinds:
        out[StatKind.KS] = absdiff.max(axis=1)
    if StatKind.KUIPER in kinds:
        out[StatKind.KUIPER] = signed.max(axis=1) - signed.min(axis=1)
    if StatKind.CVM in kinds:
        out[StatKind.CVM] = absdiff.sum(axis=1)

    if not {StatKind.AD, StatKind.WASS, StatKind.DTS}.intersection(kinds):
        return out

    d = cum_all / n
    var = d * (1.0 - d)
    # var == 0 only once every point is absorbed, where F == E == 1
    inv_var = np.zeros_like(var)
    np.divide(1.0, var, out=inv_var, where=var > 0)
    gap = np.zeros(np.shape(sorted_values), dtype=float)
    gap[..., :-1] = np.diff(sorted_values, axis=-1)
    # within a tie group the consecutive gap is 0, so summing over every
    # point equals summing over distinct points
    weights = {StatKind.AD: inv_var, StatKind.WASS: gap, StatKind.DTS: inv_var * gap}
    for kind in (StatKind.AD, StatKind.WASS, StatKind.DTS):
        if kind not in kinds:
            continue
        w = weights[kind]
        if w.ndim == 1:
            out[kind] = absdiff @ w
        else:
            out[kind] = np.einsum("ij,ij->i", absdiff, w)
    return out


def statistics(a, b, kinds: Sequence[StatKind | str] = ALL_KINDS) -> dict[StatKind, float]:
    """All requested statistics for the pair (a, b) from one merge pass."""
    a = as_sample(a, "sample a")
    b = as_sample(b, "sample b")
    out = np.empty(len(_kernels.KIND_ORDER))
    _kernels.merge_pass(np.sort(a), np.sort(b), out)
    return {k: float(out[_kernels.KIND_ORDER.index(k.value)]) for k in map(StatKind.parse, kinds)}


def statistic(kind: StatKind | str, a, b) -> float:
    kind = StatKind.parse(kind)
    return statistics(a, b, [kind])[kind]


def ks_stat(a, b) -> float:
    """Largest absolute gap between the two ECDFs."""
    return statistic(StatKind.KS, a, b)


def kuiper_stat(a, b) -> float:
    """Largest upward plus largest downward deviation, max(F-E) - min(F-E)."""
    return statistic(StatKind.KUIPER, a, b)


def cvm_stat(a, b) -> float:
    """Sum of |F - E| over every pooled observation, ties counted with multiplicity."""
    return statistic(StatKind.CVM, a, b)


def ad_stat(a, b) -> float:
    """Sum of |F - E| / (D(1 - D)) over every pooled observation.

    D is the pooled ECDF. Terms where D(1 - D) = 0 are 0.
    """
    return statistic(StatKind.AD, a, b)


def wass_stat(a, b) -> float:
    """Area between the two ECDFs."""
    return statistic(StatKind.WASS, a, b)


def dts_stat(a, b) -> float:
    """Area between the two ECDFs, weighted by 1 / (D(1 - D)).

    On each interval between consecutive distinct pooled values the weight is
    taken from the pooled ECDF at the interval's left end, where it is
    constant.
    """
    return statistic(StatKind.DTS, a, b)


STAT_FUNCTIONS = {
    StatKind.KS: ks_stat,
    StatKind.KUIPER: kuiper_stat,
    StatKind.CVM: cvm_stat,
    StatKind.AD: ad_stat,
    StatKind.WASS: wass_stat,
    StatKind.DTS: dts_stat,
}
