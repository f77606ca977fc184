"""Monte Carlo power sweeps.

Every simulation at grid point ``g`` and index ``s`` draws its data and its
resampling seed from ``SeedSequence(master_seed, spawn_key=(g, s))``, so a
sweep is reproducible and independent of the worker count. All ECDF tests
in one simulation share the same resamples.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..ecdf import StatKind
from ..resampling import ResamplePlan, multi_test
from .baselines import BASELINES
from .dgp import DgpFamily, DgpSpec, draw_dgp

log = logging.getLogger(__name__)

ECDF_TESTS = tuple(k.value for k in StatKind)
ALL_TESTS = ECDF_TESTS + tuple(BASELINES)

MEAN_SHIFT_GRID = tuple(round(0.1 * i, 10) for i in range(16))
VAR_RATIO_GRID = tuple(1.0 + 0.5 * i for i in range(11))


def default_tests(family: DgpFamily | str) -> list[str]:
    """The six ECDF tests plus the parametric baseline that suits the family."""
    family = DgpFamily.parse(family)
    baseline = "ftest" if family is DgpFamily.VAR_INFLATE else "ttest"
    return list(ECDF_TESTS) + [baseline]


def log_n_grid(lo: int, hi: int, points: int) -> list[int]:
    """Roughly log-spaced integer sample sizes from lo to hi."""
    grid = np.unique(np.rint(np.geomspace(lo, hi, points)).astype(int))
    return [int(n) for n in grid]


def parse_tests(tests: Sequence[str]) -> list[str]:
    out = []
    for t in tests:
        key = t.strip().lower()
        if key in ("t", "t-test"):
            key = "ttest"
        elif key in ("f", "f-test"):
            key = "ftest"
        if key not in ALL_TESTS:
            raise ValueError(f"unknown test {t!r} (expected one of {', '.join(ALL_TESTS)})")
        out.append(key)
    return list(dict.fromkeys(out))


@dataclass
class PowerCurve:
    sweep_name: str
    sweep_values: list[float]
    tests: list[str]
    counts: dict[str, list[int]]
    n_sims: int
    alpha: float
    family: str = ""
    seed: int | None = None
    n_resamples: int | None = None

    @property
    def rates(self) -> dict[str, list[float]]:
        return {t: [c / self.n_sims for c in cs] for t, cs in self.counts.items()}

    def rate(self, test: str, index: int = -1) -> float:
        return self.counts[test][index] / self.n_sims

    def se(self, test: str, index: int = -1) -> float:
        r = self.rate(test, index)
        return math.sqrt(r * (1 - r) / self.n_sims)

    def mean_power(self, test: str) -> float:
        return float(np.mean(self.rates[test]))

    def ordered_tests(self) -> list[str]:
        """Tests by mean power over the sweep, best first."""
        return sorted(self.tests, key=lambda t: (-self.mean_power(t), self.tests.index(t)))

    def rows(self) -> list[dict]:
        rows = []
        for i, value in enumerate(self.sweep_values):
            for t in self.tests:
                rows.append({
                    "sweep_value": value,
                    "test": t,
                    "rate": self.rate(t, i),
                    "se": self.se(t, i),
                    "n_sims": self.n_sims,
                })
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["sweep_value", "test", "rate", "se", "n_sims"],
                                lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({**row, "rate": repr(row["rate"]), "se": repr(row["se"])})
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "sweep_name": self.sweep_name,
            "sweep_values": list(self.sweep_values),
            "tests": list(self.tests),
            "alpha": self.alpha,
            "n_sims": self.n_sims,
            "n_resamples": self.n_resamples,
            "seed": self.seed,
            "counts": self.counts,
            "rows": self.rows(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "PowerCurve":
        return cls(
            sweep_name=d["sweep_name"],
            sweep_values=list(d["sweep_values"]),
            tests=list(d["tests"]),
            counts={t: list(map(int, c)) for t, c in d["counts"].items()},
            n_sims=int(d["n_sims"]),
            alpha=float(d["alpha"]),
            family=d.get("family", ""),
            seed=d.get("seed"),
            n_resamples=d.get("n_resamples"),
        )


def _sweep_axis(specs: Sequence[DgpSpec]) -> tuple[str, list[float]]:
    params = [s.param for s in specs]
    if specs[0].family.has_param and len(set(params)) > 1:
        name = "mu" if specs[0].family is DgpFamily.MEAN_SHIFT else "sigma2"
        return name, [float(p) for p in params]
    return "n", [float(s.n_a) for s in specs]


def simulate_once(spec: DgpSpec, tests: Sequence[str], alpha: float, plan: ResamplePlan,
                  master_seed: int, grid_index: int, sim_index: int) -> dict[str, bool]:
    """Run every test on one simulated pair; True where the test rejects."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(grid_index, sim_index))
    data_ss, resample_ss = ss.spawn(2)
    a, b = draw_dgp(spec, np.random.Generator(np.random.PCG64(data_ss)))
    kinds = [StatKind(t) for t in tests if t in ECDF_TESTS]
    rejected = {}
    if kinds:
        sim_plan = ResamplePlan(plan.n_resamples, int(resample_ss.generate_state(1, np.uint64)[0]),
                                plan.mode, 1)
        for kind, res in multi_test(a, b, kinds, sim_plan).items():
            rejected[kind.value] = res.p_value <= alpha
    for t in tests:
        if t in BASELINES:
            rejected[t] = BASELINES[t](a, b) <= alpha
    return rejected


def run_power_sweep(spec_grid: Sequence[DgpSpec], tests: Sequence[str] | None = None,
                    alpha: float = 0.05, n_sims: int = 2000, plan: ResamplePlan | None = None,
                    sweep_name: str | None = None,
                    sweep_values: Sequence[float] | None = None) -> PowerCurve:
    """Estimate each test's rejection rate at every grid point.

    The sweep axis defaults to the family parameter when it varies across
    the grid and to n_a otherwise.
    """
    if n_sims < 1:
        raise ValueError("n_sims must be at least 1")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    specs = list(spec_grid)
    if not specs:
        raise ValueError("empty DGP grid")
    plan = (plan or ResamplePlan()).resolved()
    tests = parse_tests(tests or default_tests(specs[0].family))
    name, values = _sweep_axis(specs)
    if sweep_name is not None:
        name = sweep_name
    if sweep_values is not None:
        values = [float(v) for v in sweep_values]

    counts = {t: [] for t in tests}
    for g, spec in enumerate(specs):
        def one(s, spec=spec, g=g):
            return simulate_once(spec, tests, alpha, plan, plan.seed, g, s)

        if plan.workers > 1:
            with ThreadPoolExecutor(max_workers=plan.workers) as pool:
                outcomes = list(pool.map(one, range(n_sims)))
        else:
            outcomes = [one(s) for s in range(n_sims)]
        for t in tests:
            counts[t].append(sum(o[t] for o in outcomes))
        log.info("grid point %d/%d (%s=%s): %s", g + 1, len(specs), name, values[g],
                 {t: counts[t][-1] / n_sims for t in tests})

    return PowerCurve(name, values, tests, counts, n_sims, alpha,
                      family=specs[0].family.value, seed=plan.seed, n_resamples=plan.n_resamples)
