from .baselines import f_test, t_test
from .bench import BenchRow, bench_csv, bench_runtime, peak_memory, time_statistic
from .dgp import DgpFamily, DgpSpec, NormalMixture, draw_dgp
from .power import (
    ALL_TESTS,
    ECDF_TESTS,
    MEAN_SHIFT_GRID,
    VAR_RATIO_GRID,
    PowerCurve,
    default_tests,
    log_n_grid,
    run_power_sweep,
)

__all__ = [
    "ALL_TESTS", "BenchRow", "DgpFamily", "DgpSpec", "ECDF_TESTS", "MEAN_SHIFT_GRID",
    "NormalMixture", "PowerCurve", "VAR_RATIO_GRID", "bench_csv", "bench_runtime",
    "default_tests", "draw_dgp", "f_test", "log_n_grid", "peak_memory", "run_power_sweep",
    "t_test", "time_statistic",
]
