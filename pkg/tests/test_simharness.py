import math

import numpy as np
import pytest
from scipy import stats

from twosample.ecdf import InvalidSampleError
from twosample.resampling import ResamplePlan
from twosample.simharness import (
    ECDF_TESTS,
    MEAN_SHIFT_GRID,
    VAR_RATIO_GRID,
    DgpFamily,
    DgpSpec,
    NormalMixture,
    PowerCurve,
    bench_csv,
    bench_runtime,
    default_tests,
    draw_dgp,
    f_test,
    log_n_grid,
    run_power_sweep,
    t_test,
)
from twosample.simharness.dgp import MIXTURES
from twosample.simharness.power import parse_tests


def draws(family, n=1_000_000, seed=0):
    return MIXTURES[DgpFamily(family)].sample(np.random.default_rng(seed), n)


class TestDgp:
    def test_mix_mean_is_centred(self):
        assert abs(draws("mix-mean").mean()) < 3e-3

    def test_mix_var_has_unit_variance(self):
        assert abs(draws("mix-var").var() - 1) < 6e-3

    def test_mix_both_prescaling_variance(self):
        raw = NormalMixture((0.2, 0.8), (0.8, -0.2), (4.0, 1.0))
        mean, var = raw.raw_moments()
        assert mean == pytest.approx(0, abs=1e-15)
        assert var == pytest.approx(1.76, abs=1e-12)

    @pytest.mark.parametrize("family", ["mix-mean", "mix-var", "mix-both"])
    def test_mixtures_standardized_within_3_se(self, family):
        x = draws(family, seed=1)
        n = x.size
        assert abs(x.mean()) < 3 * x.std() / math.sqrt(n)
        # SE of the sample variance from the fourth central moment
        m4 = np.mean((x - x.mean()) ** 4)
        assert abs(x.var() - 1) < 3 * math.sqrt((m4 - x.var() ** 2) / n)

    @pytest.mark.parametrize("family", ["mix-mean", "mix-var", "mix-both"])
    def test_analytic_moments(self, family):
        mean, var = MIXTURES[DgpFamily(family)].moments()
        assert mean == pytest.approx(0, abs=1e-12)
        assert var == pytest.approx(1, abs=5e-4)

    def test_families_draw_requested_sizes(self):
        rng = np.random.default_rng(2)
        for family in DgpFamily:
            a, b = draw_dgp(DgpSpec(family, 7, 11), rng)
            assert a.shape == (7,) and b.shape == (11,)

    def test_mean_and_var(self):
        b = DgpSpec("mean-and-var", 2, 400_000).distribution_b().sample(np.random.default_rng(3), 400_000)
        assert b.mean() == pytest.approx(0.5, abs=0.01)
        assert b.var() == pytest.approx(2.25, abs=0.02)

    def test_parameters(self):
        assert DgpSpec("mean-shift", 5, 5).param == 1.0
        assert DgpSpec("var-inflate", 5, 5, 2).distribution_b().variances == (2.0,)
        with pytest.raises(ValueError):
            DgpSpec("var-inflate", 5, 5, 0)

    def test_unknown_family(self):
        with pytest.raises(ValueError, match="unknown DGP family"):
            DgpSpec("cauchy", 5, 5)

    def test_bad_sizes(self):
        with pytest.raises(ValueError):
            DgpSpec("null", 0, 5)


class TestBaselines:
    def test_t_identical(self):
        assert t_test([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)

    def test_f_identical(self):
        assert f_test([1, 2, 4], [1, 2, 4]) == pytest.approx(1.0)

    def test_degenerate(self):
        with pytest.raises(InvalidSampleError):
            t_test([1, 1], [1, 1])
        with pytest.raises(InvalidSampleError):
            f_test([1, 2], [3, 3])
        with pytest.raises(InvalidSampleError):
            t_test([1], [1, 2])

    def test_t_power_matches_noncentral_t(self):
        df, nc = 98, 1 / math.sqrt(2 / 50)
        crit = stats.t.ppf(0.975, df)
        analytic = stats.nct.sf(crit, df, nc) + stats.nct.cdf(-crit, df, nc)
        assert analytic == pytest.approx(0.999, abs=5e-4)
        rng = np.random.default_rng(4)
        hits = sum(t_test(rng.normal(size=50), rng.normal(1, 1, size=50)) <= 0.05 for _ in range(4000))
        assert hits / 4000 == pytest.approx(analytic, abs=4 * math.sqrt(analytic * (1 - analytic) / 4000) + 1e-3)

    @pytest.mark.parametrize("test", [t_test, f_test])
    def test_calibration(self, test):
        rng = np.random.default_rng(5)
        rate = np.mean([test(rng.normal(size=200), rng.normal(size=200)) <= 0.05 for _ in range(4000)])
        assert 0.05 - 4 * 0.0035 < rate < 0.05 + 4 * 0.0035

    def test_f_two_sided_symmetric(self):
        rng = np.random.default_rng(6)
        a, b = rng.normal(size=30), rng.normal(0, 2, size=40)
        assert f_test(a, b) == pytest.approx(f_test(b, a), rel=1e-12)


def test_f_test_beats_ecdf_tests_at_ratio_four():
    curve = run_power_sweep([DgpSpec("var-inflate", 50, 50, 4.0)], default_tests("var-inflate"),
                            n_sims=300, plan=ResamplePlan(400, seed=7))
    assert curve.rate("ftest") > 0.97
    for t in ECDF_TESTS:
        assert curve.rate("ftest") >= curve.rate(t)


class TestPowerSweep:
    def test_reproducible(self):
        specs = [DgpSpec("mean-shift", 20, 20, mu) for mu in (0.0, 0.5)]
        plan = ResamplePlan(200, seed=8)
        one = run_power_sweep(specs, n_sims=40, plan=plan)
        two = run_power_sweep(specs, n_sims=40, plan=ResamplePlan(200, seed=8, workers=3))
        assert one == two

    def test_zero_shift_equals_null(self):
        plan = ResamplePlan(200, seed=9)
        shift = run_power_sweep([DgpSpec("mean-shift", 25, 25, 0.0)], n_sims=60, plan=plan)
        null = run_power_sweep([DgpSpec("null", 25, 25)], n_sims=60, plan=plan)
        assert shift.counts == null.counts

    def test_null_rates(self):
        curve = run_power_sweep([DgpSpec("null", 50, 50)], n_sims=600, plan=ResamplePlan(500, seed=10))
        for t in curve.tests:
            assert abs(curve.rate(t) - 0.05) < 4 * math.sqrt(0.05 * 0.95 / 600)

    def test_mean_shift_monotone_and_t_dominates(self):
        curve = run_power_sweep([DgpSpec("mean-shift", 50, 50, mu) for mu in MEAN_SHIFT_GRID],
                                n_sims=400, plan=ResamplePlan(400, seed=11))
        assert curve.sweep_name == "mu" and len(curve.sweep_values) == 16
        for t in curve.tests:
            for i in range(15):
                se = math.hypot(curve.se(t, i), curve.se(t, i + 1))
                assert curve.rate(t, i + 1) >= curve.rate(t, i) - 2 * se
        for t in ECDF_TESTS:
            for i in range(16):
                assert curve.rate("ttest", i) >= curve.rate(t, i) - 2 * math.hypot(curve.se("ttest", i), curve.se(t, i))

    def test_curve_fields(self):
        curve = run_power_sweep([DgpSpec("mix-both", n, n) for n in (10, 20)], ["dts", "ttest"],
                                n_sims=30, plan=ResamplePlan(100, seed=12))
        assert curve.sweep_name == "n" and curve.sweep_values == [10.0, 20.0]
        for t in curve.tests:
            for i in range(2):
                r = curve.rate(t, i)
                assert 0 <= r <= 1
                assert curve.se(t, i) == pytest.approx(math.sqrt(r * (1 - r) / 30))
        assert PowerCurve.from_dict(curve.to_dict()) == curve
        lines = curve.to_csv().splitlines()
        assert lines[0] == "sweep_value,test,rate,se,n_sims"
        assert len(lines) == 1 + 2 * 2

    def test_ordered_tests(self):
        curve = PowerCurve("n", [1, 2], ["a", "b", "c"], {"a": [1, 2], "b": [5, 5], "c": [2, 1]}, 10, 0.05)
        assert curve.ordered_tests() == ["b", "a", "c"]

    def test_invalid_arguments(self):
        spec = [DgpSpec("null", 5, 5)]
        with pytest.raises(ValueError):
            run_power_sweep(spec, n_sims=0)
        with pytest.raises(ValueError):
            run_power_sweep(spec, alpha=1.5)
        with pytest.raises(ValueError):
            run_power_sweep([])
        with pytest.raises(ValueError, match="unknown test"):
            parse_tests(["chisq"])

    def test_grids(self):
        assert MEAN_SHIFT_GRID[0] == 0 and MEAN_SHIFT_GRID[-1] == 1.5 and len(MEAN_SHIFT_GRID) == 16
        assert VAR_RATIO_GRID == tuple(1 + 0.5 * i for i in range(11))
        grid = log_n_grid(100, 800, 4)
        assert grid == [100, 200, 400, 800]
        assert default_tests("var-inflate")[-1] == "ftest"
        assert default_tests("mix-var")[-1] == "ttest"


class TestBench:
    def test_reps_must_be_positive(self):
        with pytest.raises(ValueError):
            bench_runtime([100], reps=0)

    def test_n_must_be_at_least_two(self):
        with pytest.raises(ValueError):
            bench_runtime([1], reps=1)

    def test_rows(self):
        rows = bench_runtime([100, 200, 400], ResamplePlan(50, seed=1), reps=3)
        assert [r.n for r in rows] == [100, 200, 400]
        for r in rows:
            assert 0 <= r.lo95 <= r.mean_seconds <= r.hi95
        assert len(bench_csv(rows).splitlines()) == 4

    def test_doubling_resamples_doubles_time(self):
        def best(r):
            return min(bench_runtime([4000], ResamplePlan(r, seed=2), reps=5)[0].mean_seconds for _ in range(3))

        ratio = best(4000) / best(2000)
        assert 0.8 * 2 <= ratio <= 1.2 * 2
