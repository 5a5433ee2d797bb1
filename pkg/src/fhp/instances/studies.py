"""Integrality-gap demonstration and the random-model margin study."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List

import numpy as np

from ..core import PointSet
from ..errors import InputError
from ..exact import sample_unit_vector, seed_stream, solve_exact_bfs
from .generators import gaussian_raw, gen_circle

# Frozen from scripts/calibrate_random_model.py (held-out seeds 10_000..10_199, n=20, d=10).
C_LOW = 8.8
C_HIGH = 1.8


@dataclass(frozen=True)
class GapReport:
    n: int
    d: int
    sdp_feasible_value: float
    integral_theta: float
    ratio: float

    def to_report(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "sdp_feasible_value": self.sdp_feasible_value,
            "integral_theta": self.integral_theta,
            "ratio": self.ratio,
        }


def orthogonal_sdp_solution(d: int) -> np.ndarray:
    """Vectors ``W^j = e_j / sqrt(d)`` (rows), the input-independent feasible point."""
    return np.eye(d) / math.sqrt(d)


def sdp_constraints_hold(ps: PointSet, W: np.ndarray, value: float, tol: float = 1e-12) -> bool:
    """Check ``sum_j ||W^j||^2 = 1`` and ``||sum_j x_j W^j||^2 >= value`` for every point."""
    if abs(float(np.sum(W * W)) - 1.0) > tol:
        return False
    combos = ps.points @ W
    return bool(np.all(np.einsum("ij,ij->i", combos, combos) >= value - tol))


def sdp_gap_demo(n: int, seed: int = 0) -> GapReport:
    """Relaxation value ``1/d`` against the true squared margin on the ``n``-gon (``d = 2``)."""
    if n < 4 or n % 2:
        raise InputError("gap demo needs an even n >= 4")
    ps = gen_circle(n)
    value = 1.0 / ps.d
    if not sdp_constraints_hold(ps, orthogonal_sdp_solution(ps.d), value):
        raise AssertionError("orthogonal solution is not feasible")
    theta = solve_exact_bfs(ps, seed=seed).margin
    return GapReport(n, ps.d, value, theta, value / theta**2)


@dataclass(frozen=True)
class RandomModelReport:
    n: int
    d: int
    trials: int
    seed: int
    c_low: float
    c_high: float
    lower: List[float] = field(repr=False)
    upper: List[float] = field(repr=False)
    inside: List[bool] = field(repr=False)

    @property
    def band(self) -> tuple:
        return (1.0 / (self.c_low * self.n * math.sqrt(self.d)), self.c_high / math.sqrt(self.d))

    @property
    def frequency(self) -> float:
        return sum(self.inside) / self.trials

    def to_report(self) -> dict:
        lo, hi = self.band
        return {
            "n": self.n,
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "c_low": self.c_low,
            "c_high": self.c_high,
            "band": [lo, hi],
            "frequency": self.frequency,
            "lower": list(self.lower),
            "upper": list(self.upper),
            "inside": list(self.inside),
        }


def margin_interval(raw: np.ndarray, rng: np.random.Generator) -> tuple:
    """Certified ``(lower, upper)`` bracket on the margin of raw points.

    Lower: margin of one uniformly random normal. Upper: for the optimal
    labeling, ``theta * n <= ||X y|| <= sqrt(n) ||X||_2``; also no margin
    exceeds the smallest point norm.
    """
    n, d = raw.shape
    w = sample_unit_vector(rng, d)
    lower = float(np.min(np.abs(raw @ w)))
    spectral = float(np.linalg.norm(raw, 2)) / math.sqrt(n)
    upper = min(spectral, float(np.min(np.linalg.norm(raw, axis=1))))
    return lower, upper


def random_margin_study(
    n: int, d: int, trials: int, seed: int, c_low: float = C_LOW, c_high: float = C_HIGH
) -> RandomModelReport:
    """How often the certified bracket of a Gaussian instance sits inside ``[1/(c_low n sqrt d), c_high/sqrt d]``."""
    if n < 1 or d < 1 or trials < 1:
        raise InputError("n, d and trials must be positive")
    lo_band = 1.0 / (c_low * n * math.sqrt(d))
    hi_band = c_high / math.sqrt(d)
    lower, upper, inside = [], [], []
    for k in range(trials):
        raw = gaussian_raw(n, d, seed * 1_000_003 + k)
        lo, hi = margin_interval(raw, seed_stream(seed, k))
        lower.append(lo)
        upper.append(hi)
        inside.append(bool(lo >= lo_band and hi <= hi_band))
    return RandomModelReport(n, d, trials, seed, c_low, c_high, lower, upper, inside)
