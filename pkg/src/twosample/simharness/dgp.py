"""Data-generating processes for the power studies.

Sample A is always standard normal. Sample B is a normal or a two-component
normal mixture; the mixtures are standardized to mean 0 and variance 1 so
that only their higher moments differ from sample A.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class DgpFamily(str, enum.Enum):
    NULL = "null"
    MEAN_SHIFT = "mean-shift"
    VAR_INFLATE = "var-inflate"
    MEAN_AND_VAR = "mean-and-var"
    MIX_MEAN = "mix-mean"
    MIX_VAR = "mix-var"
    MIX_BOTH = "mix-both"

    @classmethod
    def parse(cls, name: "str | DgpFamily") -> "DgpFamily":
        if isinstance(name, DgpFamily):
            return name
        key = name.strip().lower().replace("_", "-")
        try:
            return cls(key)
        except ValueError:
            valid = ", ".join(f.value for f in cls)
            raise ValueError(f"unknown DGP family {name!r} (expected one of {valid})") from None

    @property
    def has_param(self) -> bool:
        return self in (DgpFamily.MEAN_SHIFT, DgpFamily.VAR_INFLATE)


@dataclass(frozen=True)
class NormalMixture:
    """Mixture of normals, transformed as (x - center) * scale."""

    probs: tuple[float, ...]
    means: tuple[float, ...]
    variances: tuple[float, ...]
    center: float = 0.0
    scale: float = 1.0

    @classmethod
    def normal(cls, mean: float = 0.0, variance: float = 1.0) -> "NormalMixture":
        return cls((1.0,), (mean,), (variance,))

    def raw_moments(self) -> tuple[float, float]:
        p, m, v = map(np.asarray, (self.probs, self.means, self.variances))
        mean = float(p @ m)
        return mean, float(p @ (v + m**2) - mean**2)

    def moments(self) -> tuple[float, float]:
        mean, var = self.raw_moments()
        return (mean - self.center) * self.scale, var * self.scale**2

    def standardized(self) -> "NormalMixture":
        mean, var = self.raw_moments()
        return NormalMixture(self.probs, self.means, self.variances, mean, 1.0 / math.sqrt(var))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        sds = np.sqrt(self.variances)
        if len(self.probs) == 1:
            x = self.means[0] + sds[0] * rng.standard_normal(size)
        else:
            u = rng.random(size)
            comp = np.searchsorted(np.cumsum(self.probs)[:-1], u, side="right")
            x = np.asarray(self.means)[comp] + sds[comp] * rng.standard_normal(size)
        if self.center or self.scale != 1.0:
            x = (x - self.center) * self.scale
        return x


_MIX_BOTH_DIV = 1.7607

MIXTURES = {
    DgpFamily.MIX_MEAN: NormalMixture((0.2, 0.8), (0.8, -0.2), (1.0, 1.0)).standardized(),
    DgpFamily.MIX_VAR: NormalMixture((0.2, 0.8), (0.0, 0.0), (0.625, 2.5)).standardized(),
    # fixed constants: the mixture variance before division is 1.76, so the result is near unit variance
    DgpFamily.MIX_BOTH: NormalMixture(
        (0.2, 0.8),
        (0.8 / math.sqrt(_MIX_BOTH_DIV), -0.2 / math.sqrt(_MIX_BOTH_DIV)),
        (4.0 / _MIX_BOTH_DIV, 1.0 / _MIX_BOTH_DIV),
    ),
}

DEFAULT_PARAM = {DgpFamily.MEAN_SHIFT: 1.0, DgpFamily.VAR_INFLATE: 4.0}


@dataclass(frozen=True)
class DgpSpec:
    family: DgpFamily
    n_a: int
    n_b: int
    param: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", DgpFamily.parse(self.family))
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError("sample sizes must be positive")
        if self.family.has_param:
            param = DEFAULT_PARAM[self.family] if self.param is None else float(self.param)
            if self.family is DgpFamily.VAR_INFLATE and param <= 0:
                raise ValueError("variance must be positive")
            object.__setattr__(self, "param", param)

    def distribution_b(self) -> NormalMixture:
        fam = self.family
        if fam is DgpFamily.NULL:
            return NormalMixture.normal()
        if fam is DgpFamily.MEAN_SHIFT:
            return NormalMixture.normal(self.param, 1.0)
        if fam is DgpFamily.VAR_INFLATE:
            return NormalMixture.normal(0.0, self.param)
        if fam is DgpFamily.MEAN_AND_VAR:
            return NormalMixture.normal(0.5, 2.25)
        return MIXTURES[fam]


def draw_dgp(spec: DgpSpec, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw sample A from N(0, 1) and sample B from the spec's second distribution."""
    a = rng.standard_normal(spec.n_a)
    b = spec.distribution_b().sample(rng, spec.n_b)
    return a, b
