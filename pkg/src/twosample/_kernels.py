"""Compiled single-pass kernels for single evaluations and the resampling loop.

The pooled sample is sorted once and collapsed into tie groups (distinct
values). A resample is then fully described by how many members of each
group land in sample A and how many are present at all, so each resample
costs O(n) with no re-sorting. Output columns follow ``KIND_ORDER``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# column order of the stats matrix
KIND_ORDER = ("ks", "kuiper", "cvm", "ad", "wass", "dts")


# Running state of a pass over tie groups:
# (ks, hi, lo, cvm, ad, wass, dts, prev_x, prev_abs, prev_w, cum_a, cum_all)
_START = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, 0)


@njit(inline="always")
def _group_step(state, x, m_a, m, n_a, n_b):
    """Absorb one tie group: value x with m members, m_a of them from sample A."""
    ks, hi, lo, cvm, ad, wass, dts, prev_x, prev_abs, prev_w, cum_a, cum_all = state
    if cum_all > 0:
        width = x - prev_x
        wass += prev_abs * width
        dts += prev_abs * prev_w * width
    cum_a += m_a
    cum_all += m
    # integer numerator: equal ECDF heights give exactly zero
    signed = ((cum_all - cum_a) * n_a - cum_a * n_b) / (n_a * n_b)
    a = abs(signed)
    ks = max(ks, a)
    hi = max(hi, signed)
    lo = min(lo, signed)
    cvm += a * m
    d = cum_all / (n_a + n_b)
    v = d * (1.0 - d)
    w = 1.0 / v if v > 0.0 else 0.0
    ad += a * w * m
    return (ks, hi, lo, cvm, ad, wass, dts, x, a, w, cum_a, cum_all)


@njit(inline="always")
def _finish(state, out):
    out[0] = state[0]
    out[1] = state[1] - state[2]
    out[2] = state[3]
    out[3] = state[4]
    out[4] = state[5]
    out[5] = state[6]


@njit(cache=True)
def group_pass(values, count_a, count_all, n_a, n_b, out):
    """One linear pass over the distinct values present in a resample.

    ``count_a[g]`` / ``count_all[g]`` are the sample-A and pooled
    multiplicities of distinct value ``values[g]``; groups with
    ``count_all[g] == 0`` are absent from this resample.
    """
    state = _START
    for g in range(values.shape[0]):
        if count_all[g] > 0:
            state = _group_step(state, values[g], count_a[g], count_all[g], n_a, n_b)
    _finish(state, out)


@njit(cache=True)
def merge_pass(sorted_a, sorted_b, out):
    """Statistics of two individually sorted samples via one two-pointer merge.

    Streams over the tie groups without building the pooled sample.
    """
    n_a = sorted_a.shape[0]
    n_b = sorted_b.shape[0]
    state = _START
    i = 0
    j = 0
    while i < n_a or j < n_b:
        if j == n_b or (i < n_a and sorted_a[i] <= sorted_b[j]):
            x = sorted_a[i]
        else:
            x = sorted_b[j]
        start_a = i
        while i < n_a and sorted_a[i] == x:
            i += 1
        start_b = j
        while j < n_b and sorted_b[j] == x:
            j += 1
        state = _group_step(state, x, i - start_a, i - start_a + j - start_b, n_a, n_b)
    _finish(state, out)


@njit(cache=True)
def fixed_weights(values, group_size, n):
    """Per-group weights that stay fixed when only labels move.

    Returns (cum_all, cvm_w, ad_w, wass_w, dts_w) where the CVM/AD weights
    carry the group multiplicity and the Wasserstein/DTS weights the width
    to the next distinct value.
    """
    n_groups = values.shape[0]
    cum_all = np.cumsum(group_size)
    cvm_w = group_size.astype(np.float64)
    ad_w = np.zeros(n_groups)
    wass_w = np.zeros(n_groups)
    dts_w = np.zeros(n_groups)
    for g in range(n_groups):
        d = cum_all[g] / n
        v = d * (1.0 - d)
        w = 1.0 / v if v > 0.0 else 0.0
        ad_w[g] = w * group_size[g]
        if g + 1 < n_groups:
            wass_w[g] = values[g + 1] - values[g]
            dts_w[g] = w * wass_w[g]
    return cum_all, cvm_w, ad_w, wass_w, dts_w


@njit(cache=True)
def fixed_pass(count_a, cum_all, cvm_w, ad_w, wass_w, dts_w, n_a, n_b, out):
    """Single pass for a relabelling of the original pooled sample."""
    inv_ab = 1.0 / (n_a * n_b)
    cum_a = 0
    ks = 0.0
    hi = 0.0
    lo = 0.0
    cvm = 0.0
    ad = 0.0
    wass = 0.0
    dts = 0.0
    for g in range(count_a.shape[0]):
        cum_a += count_a[g]
        signed = ((cum_all[g] - cum_a) * n_a - cum_a * n_b) * inv_ab
        a = abs(signed)
        ks = max(ks, a)
        hi = max(hi, signed)
        lo = min(lo, signed)
        cvm += a * cvm_w[g]
        ad += a * ad_w[g]
        wass += a * wass_w[g]
        dts += a * dts_w[g]
    out[0] = ks
    out[1] = hi - lo
    out[2] = cvm
    out[3] = ad
    out[4] = wass
    out[5] = dts


@njit(cache=True, nogil=True)
def permutation_chunk(values, group_of, group_size, n_a, n_b, uniforms, out):
    """Permutation resamples, one per row of ``uniforms``; fills out[r, :].

    Row r of ``uniforms`` drives a partial Fisher-Yates shuffle that picks
    the smaller group's positions (offset floor(u * (n - i)) at step i).
    Starting from any arrangement this yields a uniform random subset, so
    the index array is never reset between resamples.
    """
    n = n_a + n_b
    cum_all, cvm_w, ad_w, wass_w, dts_w = fixed_weights(values, group_size, n)
    pick_a = n_a <= n_b
    k = uniforms.shape[1]
    perm = np.arange(n)
    n_groups = values.shape[0]
    count_pick = np.zeros(n_groups, dtype=np.int64)
    count_a = np.zeros(n_groups, dtype=np.int64)
    for r in range(uniforms.shape[0]):
        count_pick[:] = 0
        for i in range(k):
            j = i + int(uniforms[r, i] * (n - i))
            t = perm[i]
            perm[i] = perm[j]
            perm[j] = t
            count_pick[group_of[perm[i]]] += 1
        if pick_a:
            count_a[:] = count_pick
        else:
            for g in range(n_groups):
                count_a[g] = group_size[g] - count_pick[g]
        fixed_pass(count_a, cum_all, cvm_w, ad_w, wass_w, dts_w, n_a, n_b, out[r])


@njit(cache=True, nogil=True)
def bootstrap_chunk(values, group_of, n_a, n_b, uniforms, out):
    """With-replacement resamples of sizes n_a and n_b, one per row of ``uniforms``.

    Draw i of row r takes pooled position floor(u * n); the first n_a draws
    form sample A.
    """
    n = n_a + n_b
    n_groups = values.shape[0]
    count_a = np.zeros(n_groups, dtype=np.int64)
    count_all = np.zeros(n_groups, dtype=np.int64)
    for r in range(uniforms.shape[0]):
        count_a[:] = 0
        count_all[:] = 0
        for i in range(n):
            g = group_of[int(uniforms[r, i] * n)]
            count_all[g] += 1
            if i < n_a:
                count_a[g] += 1
        group_pass(values, count_a, count_all, n_a, n_b, out[r])


def observed_stats(values, count_a, group_size, n_a, n_b) -> np.ndarray:
    """Statistics of the original labelling, with the permutation pass's arithmetic."""
    out = np.empty(6)
    weights = fixed_weights(values, group_size, n_a + n_b)
    fixed_pass(count_a, *weights, n_a, n_b, out)
    return out
