"""Two-sample ECDF tests (KS, Kuiper, CVM, AD, Wasserstein, DTS) with resampling p-values."""

__version__ = "0.1.0"

from .ecdf import (
    ALL_KINDS,
    InvalidSampleError,
    JointMerge,
    StatKind,
    ad_stat,
    build_joint_merge,
    cvm_stat,
    dts_stat,
    ks_stat,
    kuiper_stat,
    statistic,
    statistics,
    wass_stat,
)
from .resampling import (
    NoFeasibleReplicationError,
    ResampleMode,
    ResamplePlan,
    TestResult,
    WeightedSample,
    combine_parallel_pvalues,
    expand_weight_pair,
    expand_weights,
    multi_test,
    one_sample_test,
    resample_once,
    two_sample_test,
)
