"""Geometric instance families."""
from __future__ import annotations

import numpy as np

from ..core import PointSet, normalize_instance
from ..errors import InputError


def gaussian_raw(n: int, d: int, seed: int) -> np.ndarray:
    """``n x d`` matrix of independent N(0, 1/sqrt(d)) coordinates (expected squared norm 1)."""
    if n < 1 or d < 1:
        raise InputError("n and d must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(int(seed) % 2**64))
    return rng.normal(0.0, 1.0 / np.sqrt(d), size=(n, d))


def gen_gaussian(n: int, d: int, seed: int) -> PointSet:
    """Isotropic Gaussian points, rescaled so the largest norm is one."""
    return normalize_instance(gaussian_raw(n, d, seed))


def gen_circle(n: int) -> PointSet:
    """``n`` equally spaced points on the unit circle, starting at (1, 0)."""
    if n < 2:
        raise InputError("circle instance needs n >= 2")
    ang = 2.0 * np.pi * np.arange(n) / n
    return PointSet(np.stack([np.cos(ang), np.sin(ang)], axis=1))
