"""Maximum Margin Clustering by pairwise-midpoint reduction to FHP.

An optimal affine separator has two equidistant points on opposite sides, so
it passes through their midpoint; solving FHP around every midpoint and
keeping the best candidate gives the MMC optimum.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .core import PointSet, normalize_instance
from .errors import DegenerateInstanceError, InputError
from .exact import SolveResult, solve_exact_bfs

__all__ = ["AffineSeparation", "solve_mmc", "affine_margin"]


@dataclass(frozen=True, eq=False)
class AffineSeparation:
    normal: np.ndarray
    offset: float
    margin: float
    center: np.ndarray
    pair: tuple

    def side(self, points) -> np.ndarray:
        return np.asarray(points) @ self.normal + self.offset

    def to_report(self) -> dict:
        return {
            "solver": "mmc",
            "pair": list(self.pair),
            "center": self.center.tolist(),
            "normal": self.normal.tolist(),
            "offset": self.offset,
            "margin": self.margin,
        }


def affine_margin(normal, offset, points) -> float:
    return float(np.min(np.abs(np.asarray(points) @ normal + offset)))


def solve_mmc(
    ps,
    inner_solver: Callable[[PointSet], SolveResult] = solve_exact_bfs,
    tol_feas: float = 1e-9,
) -> AffineSeparation:
    """Best two-cluster affine separation of ``ps``.

    ``ps`` may be a :class:`PointSet` or a raw ``n x d`` array; the result is in
    the same coordinates. Every candidate is re-scored on the original points.
    """
    pts = ps.points if isinstance(ps, PointSet) else np.array(ps, dtype=float)
    if pts.ndim != 2:
        raise InputError("expected an n x d array of points")
    n = pts.shape[0]
    if n < 2:
        raise InputError("clustering needs at least two points")
    best: Optional[AffineSeparation] = None
    for i, j in combinations(range(n), 2):
        center = (pts[i] + pts[j]) / 2.0
        shifted = pts - center
        if np.linalg.norm(shifted, axis=1).max() == 0.0:
            continue
        local = normalize_instance(shifted)
        try:
            res = inner_solver(local)
        except DegenerateInstanceError:
            # a point sits on the midpoint: no separator through it has positive margin
            continue
        w = np.array(res.normal, dtype=float)
        b = -float(w @ center)
        dist = pts @ w + b
        if not (np.any(dist > 0) and np.any(dist < 0)):
            continue
        margin = float(np.min(np.abs(dist)))
        if margin <= tol_feas:
            continue
        cand = AffineSeparation(w, b, margin, center, (i, j))
        # the pair loop runs in lexicographic order, so strict > keeps the first pair on ties
        if best is None or margin > best.margin:
            best = cand
    if best is None:
        raise DegenerateInstanceError("no pair midpoint admits a separation with both clusters nonempty")
    return best
