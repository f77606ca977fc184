"""Command-line front end.

Exit codes
----------
0  success
1  unexpected internal error
2  usage error, unreadable input file or unparseable value
3  input parsed but unusable (empty sample, non-finite value, weights that
   cannot be expanded)
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .ecdf import ALL_KINDS, InvalidSampleError, StatKind
from .resampling import (
    InvalidPlanError,
    NoFeasibleReplicationError,
    ResampleMode,
    ResamplePlan,
    TestResult,
    WeightedSample,
    expand_weight_pair,
    fresh_seed,
    multi_test,
    one_sample_test,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARSE = 2
EXIT_INVALID = 3

SEED_ENV = "TWOSAMPLE_SEED"

log = logging.getLogger("twosample")


class DataParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise DataParseError(f"{self.prog}: {message}")


def read_values(path: str | Path, col: str | None = None) -> np.ndarray:
    """Read one number per line, or one column of a CSV file when ``col`` is set.

    Blank lines and lines starting with ``#`` are skipped. With ``col`` a
    column name, the first remaining row is the header.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataParseError(f"cannot read {path}: {exc}") from None
    rows = [(i, line) for i, line in enumerate(text.splitlines(), 1)
            if line.strip() and not line.lstrip().startswith("#")]
    index = None
    if col is not None:
        if col.isdigit():
            index = int(col)
        else:
            if not rows:
                raise DataParseError(f"{path}: no header row for column {col!r}")
            header = next(csv.reader([rows[0][1]]))
            try:
                index = [h.strip() for h in header].index(col)
            except ValueError:
                raise DataParseError(f"{path}: no column named {col!r}") from None
            rows = rows[1:]
    values = []
    for lineno, line in rows:
        token = line.strip()
        if index is not None:
            fields = next(csv.reader([line]))
            if index >= len(fields):
                raise DataParseError(f"{path}:{lineno}: missing column {col}")
            token = fields[index].strip()
        try:
            values.append(float(token))
        except ValueError:
            raise DataParseError(f"{path}:{lineno}: not a number: {token!r}") from None
    return np.array(values, dtype=float)


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise DataParseError(f"{SEED_ENV}={env!r} is not an integer") from None
    return fresh_seed()


def parse_grid(text: str) -> list[float]:
    """``LO:HI:STEP`` to the inclusive list of grid values."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise DataParseError(f"grid must look like LO:HI:STEP, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise DataParseError(f"invalid grid {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 10) for i in range(count)]


def parse_int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DataParseError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise DataParseError("empty list")
    return values


def parse_reference(text: str):
    """``normal:MU,SIGMA`` or ``uniform:LO,HI`` to a sampler(rng, size)."""
    try:
        name, args = text.split(":", 1)
        p, q = (float(x) for x in args.split(","))
    except ValueError:
        raise DataParseError(f"reference must look like normal:MU,SIGMA or uniform:LO,HI, got {text!r}") from None
    name = name.strip().lower()
    if name == "normal" and q > 0:
        return lambda rng, size: rng.normal(p, q, size)
    if name == "uniform" and q > p:
        return lambda rng, size: rng.uniform(p, q, size)
    raise DataParseError(f"invalid reference distribution {text!r}")


def format_results(results: Sequence[TestResult], fmt: str, single: bool) -> str:
    if fmt == "json":
        payload = results[0].to_dict() if single else [r.to_dict() for r in results]
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        fields = ["method", "statistic", "p_value", "n_resamples", "exceed_count", "seed", "mode"]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in results:
            d = r.to_dict()
            w.writerow({**d, "statistic": repr(d["statistic"]), "p_value": repr(d["p_value"])})
        return buf.getvalue()
    lines = [f"{r.method.value:<7} statistic={r.statistic:.6g}  p={r.p_value:.6g}  "
             f"({r.exceed_count}/{r.n_resamples} resamples >= observed, seed={r.seed})" for r in results]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _plan(args) -> ResamplePlan:
    return ResamplePlan(args.resamples, resolve_seed(args.seed), ResampleMode(args.mode), args.workers)


def _kinds(method: str) -> list[StatKind]:
    return list(ALL_KINDS) if method == "all" else [StatKind.parse(method)]


def cmd_test(args) -> int:
    a = read_values(args.a, args.col)
    b = read_values(args.b, args.col)
    if args.weights_a or args.weights_b:
        wa = read_values(args.weights_a) if args.weights_a else np.ones(a.size)
        wb = read_values(args.weights_b) if args.weights_b else np.ones(b.size)
        sa, sb = WeightedSample(a, wa), WeightedSample(b, wb)
        a, b = expand_weight_pair(sa, sb, args.max_k)
        log.info("weights expanded with k=%d to sizes %d and %d", sa.k, a.size, b.size)
    results = multi_test(a, b, _kinds(args.method), _plan(args))
    _emit(format_results(list(results.values()), args.format, args.method != "all"), args.out)
    return EXIT_OK


def cmd_one_sample(args) -> int:
    a = read_values(args.a, args.col)
    sampler = parse_reference(args.ref)
    plan = _plan(args)
    results = [one_sample_test(a, sampler, args.k, kind, plan) for kind in _kinds(args.method)]
    _emit(format_results(results, args.format, args.method != "all"), args.out)
    return EXIT_OK


def _sweep_specs(args):
    from .simharness import MEAN_SHIFT_GRID, VAR_RATIO_GRID, DgpFamily, DgpSpec, log_n_grid

    family = DgpFamily.parse(args.dgp)
    if args.n_grid is not None:
        ns = parse_int_list(args.n_grid)
        if min(ns) < 2:
            raise DataParseError("sample sizes must be at least 2")
        return [DgpSpec(family, n, n, args.param) for n in ns]
    if family.has_param:
        if args.grid is not None:
            grid = parse_grid(args.grid)
        else:
            grid = list(MEAN_SHIFT_GRID if family is DgpFamily.MEAN_SHIFT else VAR_RATIO_GRID)
        if family is DgpFamily.VAR_INFLATE and min(grid) <= 0:
            raise DataParseError("variance grid must be positive")
        n = args.n or 50
        return [DgpSpec(family, n, n, v) for v in grid]
    if args.grid is not None:
        raise DataParseError(f"--grid applies to mean-shift and var-inflate; use --n-grid for {family.value}")
    if args.n is not None:
        return [DgpSpec(family, args.n, args.n)]
    # default n ranges cover each family's rise in power
    defaults = {
        DgpFamily.NULL: [50],
        DgpFamily.MEAN_AND_VAR: log_n_grid(10, 200, 8),
        DgpFamily.MIX_BOTH: log_n_grid(100, 1600, 5),
        DgpFamily.MIX_MEAN: log_n_grid(1600, 25600, 5),
        DgpFamily.MIX_VAR: log_n_grid(1600, 25600, 5),
    }
    ns = defaults[family]
    return [DgpSpec(family, n, n) for n in ns]


def cmd_power_sweep(args) -> int:
    from .simharness import run_power_sweep
    from .simharness.power import parse_tests

    specs = _sweep_specs(args)
    tests = parse_tests(args.tests.split(",")) if args.tests else None
    if not 0 < args.alpha < 1:
        raise DataParseError("--alpha must lie in (0, 1)")
    if args.sims < 1:
        raise DataParseError("--sims must be at least 1")
    curve = run_power_sweep(specs, tests, args.alpha, args.sims, _plan(args))
    _emit(curve.to_json() + "\n" if args.format == "json" else curve.to_csv(), args.out)
    if args.plot:
        from .plotting import plot_power_curve

        plot_power_curve(curve, args.plot)
    return EXIT_OK


def cmd_bench(args) -> int:
    from .simharness import bench_csv, bench_runtime

    ns = parse_int_list(args.ns)
    if min(ns) < 2:
        raise DataParseError("every n must be at least 2")
    if args.reps < 1:
        raise DataParseError("--reps must be at least 1")
    rows = bench_runtime(ns, _plan(args), args.reps, args.method)
    _emit(bench_csv(rows), args.out)
    if args.plot:
        from .plotting import plot_bench

        plot_bench(rows, args.plot)
    return EXIT_OK


def _resampling_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--resamples", type=int, default=2000, help="resamples per test (default 2000)")
    p.add_argument("--seed", type=int, default=None, help=f"master seed (falls back to ${SEED_ENV})")
    p.add_argument("--mode", choices=[m.value for m in ResampleMode], default="permutation")
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    methods = [k.value for k in StatKind] + ["all"]
    parser = _Parser(prog="twosample", description="ECDF two-sample tests with resampling p-values.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="compare two data files")
    p.add_argument("--method", choices=methods, default="dts")
    p.add_argument("--a", required=True, metavar="FILE")
    p.add_argument("--b", required=True, metavar="FILE")
    p.add_argument("--col", default=None, help="CSV column (index or header name)")
    p.add_argument("--weights-a", metavar="FILE")
    p.add_argument("--weights-b", metavar="FILE")
    p.add_argument("--max-k", type=int, default=10_000)
    _resampling_flags(p)
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("one-sample", help="compare a data file with a known distribution")
    p.add_argument("--method", choices=methods, default="dts")
    p.add_argument("--a", required=True, metavar="FILE")
    p.add_argument("--col", default=None)
    p.add_argument("--ref", required=True, help="normal:MU,SIGMA or uniform:LO,HI")
    p.add_argument("--k", type=int, choices=[10, 100], default=10)
    _resampling_flags(p)
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_one_sample)

    from .simharness.dgp import DgpFamily

    p = sub.add_parser("power-sweep", help="Monte Carlo rejection rates over a DGP grid")
    p.add_argument("--dgp", required=True, choices=[f.value for f in DgpFamily])
    p.add_argument("--grid", help="parameter grid LO:HI:STEP (mean-shift, var-inflate)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, help="size of each sample")
    g.add_argument("--n-grid", help="comma-separated sizes of each sample")
    p.add_argument("--param", type=float, help="fixed mu or sigma^2 when sweeping n")
    p.add_argument("--tests", help="comma-separated tests (default: all six plus the family's baseline)")
    p.add_argument("--sims", type=int, default=2000)
    p.add_argument("--alpha", type=float, default=0.05)
    _resampling_flags(p)
    p.add_argument("--format", choices=["json", "csv"], default="csv")
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--plot", metavar="FILE", help="figure path; format from extension (.svg, .png, .pdf)")
    p.set_defaults(func=cmd_power_sweep)

    p = sub.add_parser("bench", help="runtime of the DTS test as n grows")
    p.add_argument("--ns", required=True, help="comma-separated pooled sizes n = n_a + n_b")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--method", choices=[k.value for k in StatKind], default="dts")
    _resampling_flags(p)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--plot", metavar="FILE")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except DataParseError as exc:
        print(exc, file=sys.stderr)
        return EXIT_PARSE
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DataParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidSampleError, NoFeasibleReplicationError, InvalidPlanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:  # pragma: no cover
        log.exception("unexpected failure")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
