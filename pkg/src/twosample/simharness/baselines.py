"""Parametric reference tests used as power baselines.

Both use their usual reference distributions; no resampling.
"""

from __future__ import annotations

import numpy as np
from scipy import stats

from ..ecdf import InvalidSampleError, as_sample


def _check(a, b):
    a = as_sample(a, "sample a")
    b = as_sample(b, "sample b")
    if a.size < 2 or b.size < 2:
        raise InvalidSampleError("parametric baselines need at least 2 observations per sample")
    return a, b


def t_test(a, b) -> float:
    """Two-sided Welch (unequal variance) t-test p-value."""
    a, b = _check(a, b)
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if va == 0 and vb == 0:
        raise InvalidSampleError("both samples have zero variance")
    return float(stats.ttest_ind(a, b, equal_var=False).pvalue)


def f_test(a, b) -> float:
    """Two-sided variance-ratio F-test p-value."""
    a, b = _check(a, b)
    va, vb = a.var(ddof=1), b.var(ddof=1)
    if va == 0 or vb == 0:
        raise InvalidSampleError("F-test needs nonzero variance in both samples")
    ratio = va / vb
    dist = stats.f(a.size - 1, b.size - 1)
    return float(min(1.0, 2.0 * min(dist.cdf(ratio), dist.sf(ratio))))


BASELINES = {"ttest": t_test, "ftest": f_test}
