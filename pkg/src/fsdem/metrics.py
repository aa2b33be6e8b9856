"""FSDEM score, its stability score, and the comparison metrics.

Everything here is a pure function of its inputs. Curves are piecewise-linear
interpolants of (k, M(k)) observations; integrals use the trapezoidal rule and
derivatives use finite differences on the integer grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import (
    DegenerateSelectionError,
    InvalidInputError,
    InvalidRangeError,
    UndefinedIndexError,
)

__all__ = [
    "ObservationCurve",
    "MetricRange",
    "FitnessWeights",
    "MetricReport",
    "build_curve",
    "trapezoid_integral",
    "fsdem_score",
    "finite_differences",
    "stability_score",
    "subsample_observations",
    "nogueira_stability",
    "consistency_index",
    "kuncheva_stability",
    "penalty",
    "fitness",
    "bfi",
]


@dataclass(frozen=True)
class ObservationCurve:
    """Sorted (k, value) observations, read as a piecewise-linear function.

    ``bounds`` are the bounds of the underlying measure; FSDEM inherits them.
    """

    ks: tuple[int, ...]
    values: tuple[float, ...]
    bounds: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if len(self.ks) != len(self.values):
            raise InvalidInputError("ks and values differ in length")
        if len(self.ks) < 2:
            raise InvalidInputError("a curve needs at least 2 observations")
        if any(b <= a for a, b in zip(self.ks, self.ks[1:])):
            raise InvalidInputError("curve ks must be strictly increasing")
        lo, hi = self.bounds
        if lo > hi:
            raise InvalidInputError(f"bad measure bounds {self.bounds}")
        for v in self.values:
            if not (lo <= v <= hi):
                raise InvalidInputError(f"value {v} outside measure bounds {self.bounds}")

    @property
    def points(self) -> list[tuple[int, float]]:
        return list(zip(self.ks, self.values))

    @property
    def support(self) -> tuple[int, int]:
        return self.ks[0], self.ks[-1]

    def __call__(self, x):
        """Linear interpolant at ``x`` (scalar or array)."""
        lo, hi = self.support
        xs = np.asarray(x, dtype=float)
        if np.any(xs < lo) or np.any(xs > hi):
            raise InvalidRangeError(f"query {x} outside curve support [{lo}, {hi}]")
        out = np.interp(xs, self.ks, self.values)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MetricRange:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise InvalidRangeError(f"range bounds must be positive, got [{self.a}, {self.b}]")
        if self.a >= self.b:
            raise InvalidRangeError(f"range needs a < b, got [{self.a}, {self.b}]")

    def grid(self) -> list[int]:
        return list(range(self.a, self.b + 1))


@dataclass(frozen=True)
class FitnessWeights:
    k_c: float = 0.9
    k_p: float = 0.1

    def __post_init__(self):
        if self.k_c < 0 or self.k_p < 0 or self.k_c + self.k_p <= 0:
            raise InvalidInputError(f"fitness weights must be nonnegative with positive sum: {self}")


@dataclass(frozen=True)
class MetricReport:
    fsdem: float
    stability: float
    range: MetricRange
    measure_id: str
    selector_id: str
    dataset_id: str
    observation_count: int


def build_curve(observations: Iterable[tuple[int, float]], bounds=(0.0, 1.0)) -> ObservationCurve:
    obs = list(observations)
    if len(obs) < 2:
        raise InvalidInputError(f"need at least 2 observations, got {len(obs)}")
    ks = [int(k) for k, _ in obs]
    if len(set(ks)) != len(ks):
        raise InvalidInputError("duplicate k in observations")
    obs.sort(key=lambda p: p[0])
    return ObservationCurve(
        tuple(int(k) for k, _ in obs), tuple(float(v) for _, v in obs), tuple(bounds)
    )


def _check_range(curve: ObservationCurve, rng: MetricRange) -> None:
    lo, hi = curve.support
    if rng.a < lo or rng.b > hi:
        raise InvalidRangeError(f"range [{rng.a}, {rng.b}] outside curve support [{lo}, {hi}]")


def trapezoid_integral(curve: ObservationCurve, rng: MetricRange) -> float:
    """Integral of the interpolant over [a, b].

    Nodes strictly inside (a, b) are used as-is; the endpoints are interpolated
    when they fall between nodes, so the result is exact for the interpolant.
    """
    _check_range(curve, rng)
    xs = [float(rng.a)] + [float(k) for k in curve.ks if rng.a < k < rng.b] + [float(rng.b)]
    ys = [curve(x) for x in xs]
    return math.fsum((x1 - x0) * (y0 + y1) / 2.0 for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:]))


def fsdem_score(curve: ObservationCurve, rng: MetricRange) -> float:
    return trapezoid_integral(curve, rng) / (rng.b - rng.a)


def finite_differences(curve: ObservationCurve, rng: MetricRange) -> list[tuple[int, float]]:
    """First derivative of the interpolant at every integer in [a, b].

    Central differences inside, forward at ``a``, backward at ``b``.
    """
    _check_range(curve, rng)
    grid = rng.grid()
    g = {x: curve(x) for x in grid}
    out = []
    for x in grid:
        if x == rng.a:
            slope = g[x + 1] - g[x]
        elif x == rng.b:
            slope = g[x] - g[x - 1]
        else:
            slope = (g[x + 1] - g[x - 1]) / 2.0
        out.append((x, slope))
    return out


def stability_score(curve: ObservationCurve, rng: MetricRange) -> float:
    slopes = [s for _, s in finite_differences(curve, rng)]
    return math.fsum(slopes) / ((rng.b - rng.a) + 1)


def subsample_observations(ks: Sequence[int], stride: int) -> list[int]:
    """Every ``stride``-th k, always keeping the first and last one."""
    ks = list(ks)
    if not ks:
        raise InvalidInputError("empty ks")
    if stride < 1:
        raise InvalidInputError(f"stride must be >= 1, got {stride}")
    kept = ks[::stride]
    if kept[-1] != ks[-1]:
        kept.append(ks[-1])
    return kept


def nogueira_stability(selections) -> float:
    """Nogueira's Phi-hat over a K x d binary selection matrix.

    Uses the unbiased (K - 1) column variance.
    """
    z = np.asarray(selections, dtype=float)
    if z.ndim != 2:
        raise InvalidInputError(f"selection matrix must be 2-D, got shape {z.shape}")
    n_runs, d = z.shape
    if n_runs < 2:
        raise InvalidInputError("need at least 2 runs")
    if not np.all((z == 0) | (z == 1)):
        raise InvalidInputError("selection matrix must be binary")
    if np.any(z.sum(axis=1) == 0):
        raise InvalidInputError("every run must select at least one feature")
    k_bar = z.sum(axis=1).mean()
    p = k_bar / d
    denom = p * (1.0 - p)
    if denom == 0:
        raise DegenerateSelectionError("all runs select every feature; Phi-hat undefined")
    s2 = z.var(axis=0, ddof=1)
    return float(1.0 - s2.mean() / denom)


def consistency_index(s1, s2, d: int) -> float:
    """Kuncheva's consistency index (r*d - k^2) / (k*(d - k))."""
    a, b = set(s1), set(s2)
    if len(a) != len(b):
        raise InvalidInputError(f"subsets differ in size: {len(a)} vs {len(b)}")
    k = len(a)
    if k == 0 or k >= d:
        raise UndefinedIndexError(f"consistency index undefined for k={k}, d={d}")
    r = len(a & b)
    return (r * d - k * k) / (k * (d - k))


def kuncheva_stability(family: Sequence[Sequence[int]], k: int, d: int) -> float:
    """Mean pairwise consistency index of the k-prefixes of each sequence."""
    seqs = [list(s) for s in family]
    if len(seqs) < 2:
        raise InvalidInputError("need at least 2 sequences")
    for s in seqs:
        if len(s) < k:
            raise InvalidInputError(f"sequence shorter than k={k}")
        if len(set(s)) != len(s):
            raise InvalidInputError("duplicate index within a sequence")
        if any(i < 0 or i >= d for i in s):
            raise InvalidInputError(f"feature index outside [0, {d})")
    prefixes = [s[:k] for s in seqs]
    vals = [consistency_index(p, q, d) for p, q in itertools.combinations(prefixes, 2)]
    return math.fsum(vals) / len(vals)


def penalty(ratio: float) -> float:
    # normalized exponential: 0 at 0, 1 at 1, convex
    return math.expm1(ratio) / (math.e - 1.0)


def fitness(measure_value: float, selected_count: int, d: int, w: FitnessWeights = FitnessWeights()) -> float:
    if not (0 < selected_count <= d):
        raise InvalidInputError(f"selected_count must be in (0, {d}], got {selected_count}")
    return w.k_c * measure_value - w.k_p * penalty(selected_count / d)


def bfi(fitness_selected: float, fitness_baseline: float) -> float:
    return fitness_selected - fitness_baseline
