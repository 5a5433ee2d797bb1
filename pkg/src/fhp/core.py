"""Geometric primitives: point sets, hyperplanes through the origin, labelings.

The labeled sub-problem (hard-margin separation through the origin) is solved
as a minimum-norm-point problem over ``conv{y_i x_i}``: the distance from the
origin to that hull is the best margin for the labeling, and the normalized
closest point is the optimal normal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DegenerateInstanceError, InputError, NormalizationError

__all__ = [
    "Tolerances",
    "DEFAULT_TOL",
    "PointSet",
    "Hyperplane",
    "Labeling",
    "margin_of",
    "labeling_of",
    "solve_labeled",
    "normalize_instance",
    "min_norm_point",
    "signs_of",
]


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-9
    unit: float = 1e-12
    feas: float = 1e-9
    mnp: float = 1e-10


DEFAULT_TOL = Tolerances()


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PointSet:
    """``n`` points in ``R^d`` with Euclidean norms at most one.

    ``scale`` is the factor the raw input was divided by, so a margin ``m``
    on this set corresponds to ``m * scale`` in raw units.
    """

    points: np.ndarray
    scale: float = 1.0
    tol_norm: float = field(default=DEFAULT_TOL.norm, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InputError(f"point set must be a non-empty n x d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InputError("point set contains non-finite coordinates")
        norms = np.linalg.norm(pts, axis=1)
        worst = int(np.argmax(norms))
        if norms[worst] > 1.0 + self.tol_norm:
            raise InputError(
                f"point {worst} has norm {norms[worst]:.17g} > 1; use normalize_instance"
            )
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise InputError(f"scale must be positive, got {self.scale}")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def has_zero_point(self, tol: float = 0.0) -> bool:
        return bool(np.any(np.linalg.norm(self.points, axis=1) <= tol))

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return self.scale == other.scale and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.points.tobytes(), self.points.shape, self.scale))


@dataclass(frozen=True, eq=False)
class Hyperplane:
    normal: np.ndarray
    achieved_margin: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _frozen(np.array(self.normal, dtype=float)))
        object.__setattr__(self, "achieved_margin", float(self.achieved_margin))

    def __eq__(self, other):
        if not isinstance(other, Hyperplane):
            return NotImplemented
        return self.achieved_margin == other.achieved_margin and np.array_equal(
            self.normal, other.normal
        )


@dataclass(frozen=True)
class Labeling:
    labels: tuple
    feasible: bool
    solved_margin: float
    witness: Optional[Hyperplane] = None
    # (lower, upper) margin bounds from the last sub-solver iterate
    bounds: tuple = field(default=(0.0, 0.0), compare=False, repr=False)

    @property
    def signature(self) -> str:
        return "".join("+" if y > 0 else "-" for y in self.labels)

    def negated(self) -> tuple:
        return tuple(-y for y in self.labels)


def _check_unit(w, tol: Tolerances) -> np.ndarray:
    w = np.asarray(w, dtype=float).ravel()
    nrm = np.linalg.norm(w)
    if abs(nrm - 1.0) > tol.unit:
        raise NormalizationError(f"normal has norm {nrm:.17g}, expected 1 within {tol.unit:g}")
    return w


def margin_of(w, ps: PointSet, tol: Tolerances = DEFAULT_TOL) -> float:
    """Smallest distance from any point of ``ps`` to the hyperplane with unit normal ``w``."""
    w = _check_unit(w, tol)
    if w.shape[0] != ps.d:
        raise InputError(f"normal has dimension {w.shape[0]}, point set has d={ps.d}")
    return float(np.min(np.abs(ps.points @ w)))


def signs_of(products: np.ndarray) -> np.ndarray:
    """Sign with the tie ``0 -> +1``; works on any array shape."""
    return np.where(products >= 0, 1, -1).astype(np.int8)


def labeling_of(w, ps: PointSet, tol: Tolerances = DEFAULT_TOL) -> Labeling:
    """Labeling induced by ``w``, resolved (and possibly infeasible) via :func:`solve_labeled`."""
    w = _check_unit(w, tol)
    margin_of(w, ps, tol)
    labels = signs_of(ps.points @ w)
    return solve_labeled(labels, ps, tol)


def _affine_minimizer(B: np.ndarray) -> np.ndarray:
    """Coefficients ``mu`` (summing to one) of the min-norm point of the affine hull of rows of B."""
    k = B.shape[0]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = B @ B.T
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    mu = sol[:k]
    return mu / mu.sum()


def min_norm_point(A: np.ndarray, *, tol_mnp: float, tol_zero: float, max_iter: int):
    """Wolfe's minimum-norm-point method over the convex hull of the rows of ``A``.

    Returns ``(x, lower, upper, iterations)`` where ``upper = ||x||`` bounds the
    true distance from above and ``lower = max(0, min_i <x, a_i>) / ||x||`` is the
    margin actually achieved by the direction ``x / ||x||``.
    Stops when ``upper - lower <= tol_mnp``, when ``upper <= tol_zero`` (the hull
    reaches the origin), or when no vertex improves on the current corral.
    """
    A = np.asarray(A, dtype=float)
    norms2 = np.einsum("ij,ij->i", A, A)
    eps = 0.0
    i0 = int(np.argmin(norms2))
    S = [i0]
    lam = np.array([1.0])
    x = A[i0].copy()
    lower = upper = 0.0
    for it in range(1, max_iter + 1):
        xx = float(x @ x)
        upper = np.sqrt(xx)
        if upper <= tol_zero:
            return x, 0.0, upper, it
        proj = A @ x
        j = int(np.argmin(proj))
        lower = max(float(proj[j]), 0.0) / upper
        if upper - lower <= tol_mnp:
            return x, lower, upper, it
        if xx - proj[j] <= 1e-13 * xx or j in S:
            # the corral is optimal up to rounding
            return x, lower, upper, it
        prev = (list(S), lam.copy(), x.copy())
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            mu = _affine_minimizer(A[S])
            if np.all(mu > eps):
                lam = mu
                x = mu @ A[S]
                break
            neg = mu <= eps
            steps = lam[neg] / (lam[neg] - mu[neg])
            k = int(np.argmin(steps))
            step = min(1.0, float(steps[k]))
            lam = step * mu + (1.0 - step) * lam
            lam[np.flatnonzero(neg)[k]] = 0.0
            keep = lam > eps
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ A[S]
            if len(S) == 1:
                break
        if float(x @ x) >= xx:
            # no strict decrease: rounding has taken over, keep the previous corral
            S, lam, x = prev
            return x, lower, upper, it
    raise ConvergenceError(
        f"minimum-norm-point iteration cap {max_iter} reached with gap {upper - lower:.3g}",
        lower=lower,
        upper=upper,
    )


def solve_labeled(
    labels: Sequence[int],
    ps: PointSet,
    tol: Tolerances = DEFAULT_TOL,
    max_iter: Optional[int] = None,
) -> Labeling:
    """Best through-origin margin for a fixed labeling.

    Infeasible labelings (the signed hull reaches the origin within ``tol.feas``)
    come back with ``feasible=False`` and ``solved_margin=0``.
    """
    y = np.asarray(labels)
    if y.shape != (ps.n,):
        raise InputError(f"expected {ps.n} labels, got shape {y.shape}")
    if not np.all(np.abs(y) == 1):
        raise InputError("labels must be +1 or -1")
    y = y.astype(np.int8)
    cap = max_iter if max_iter is not None else 100 * ps.n * ps.d
    signed = ps.points * y[:, None]
    x, lower, upper, _ = min_norm_point(signed, tol_mnp=tol.mnp, tol_zero=tol.feas, max_iter=cap)
    key = tuple(int(v) for v in y)
    if lower <= tol.feas:
        return Labeling(key, False, 0.0, None, bounds=(lower, upper))
    normal = x / np.linalg.norm(x)
    witness = Hyperplane(normal, float(np.min(np.abs(ps.points @ normal))))
    return Labeling(key, True, float(lower), witness, bounds=(lower, upper))


def normalize_instance(raw) -> PointSet:
    """Divide raw points by their largest norm, recording that factor as ``scale``."""
    pts = np.array(raw, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.size == 0:
        raise InputError(f"expected an n x d array of points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise InputError("point set contains non-finite coordinates")
    big = float(np.abs(pts).max())
    if big == 0.0:
        raise DegenerateInstanceError("all points are zero; no hyperplane has positive margin")
    if float(np.linalg.norm(pts, axis=1).max()) == 1.0:
        return PointSet(pts, 1.0)
    # pre-divide by the largest coordinate so tiny or huge inputs neither underflow nor overflow
    pre = pts / big
    s = float(np.linalg.norm(pre, axis=1).max())
    return PointSet(pre / s, big * s)
