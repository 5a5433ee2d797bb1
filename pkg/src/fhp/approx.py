"""Adaptive-reweighting approximation for FHP.

Points are repeatedly reweighted by how close they are to the previous top
singular direction; the collected directions are then mixed with Gaussian
coefficients. One mixture is, with constant probability, at distance at least
``alpha * theta`` from all but a ``5 * alpha`` fraction of the points.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import Hyperplane, PointSet, margin_of
from .errors import ConvergenceError, DegenerateInstanceError, InputError
from .exact import seed_stream

__all__ = [
    "ApproxParams",
    "ReweightTrace",
    "Candidate",
    "ApproxResult",
    "top_direction",
    "reweight_directions",
    "combine_gaussian",
    "coverage_level",
    "coverage_count",
    "approx_solve",
]


@dataclass(frozen=True)
class ApproxParams:
    alpha: float = 0.1
    trials: int = 32
    seed: int = 0
    power_iter_tol: float = 1e-10
    power_iter_cap: int = 10_000
    max_rounds: int = 1_000_000

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.trials < 1:
            raise InputError("trials must be at least 1")

    @property
    def coverage_target(self):
        """Fraction ``1 - 5 alpha`` of points the guarantee speaks about."""
        return 1.0 - 5.0 * self.alpha


@dataclass(frozen=True, eq=False)
class ReweightTrace:
    """Log-weights ``log tau_1..log tau_{t+1}`` (rows), margins ``sigma_1..sigma_t`` and directions ``w^(1..t)``.

    Weights are kept as logarithms: a point hit with ``sigma = 1`` halves every
    round and would underflow to zero after ~1000 rounds on small-margin inputs.
    """

    log_weights: np.ndarray
    margins: np.ndarray
    directions: np.ndarray
    power_iterations: np.ndarray = field(repr=False)

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    @property
    def t(self) -> int:
        return self.directions.shape[0]

    def sigma_sq_sums(self) -> np.ndarray:
        return np.sum(self.margins**2, axis=0)


def top_direction(G: np.ndarray, rng: np.random.Generator, tol: float, cap: int):
    """Top eigenvector of a PSD matrix by power iteration.

    Every few steps the iterated operator is squared, so later steps apply
    ``G^(2^k)``; convergence is always judged by the Rayleigh residual
    ``||G v - rho v|| <= tol * rho`` on the original ``G``.
    Returns ``(v, steps)``.
    """
    d = G.shape[0]
    v = rng.standard_normal(d)
    v /= math.sqrt(v @ v)
    top = math.sqrt(float(np.sum(G * G)))
    if top == 0:
        raise DegenerateInstanceError("weighted Gram matrix is zero")
    M = G / top
    residual = math.inf
    for step in range(1, cap + 1):
        u = M @ v
        nrm = math.sqrt(u @ u)
        if nrm == 0:
            # start vector fell in the null space of the squared operator
            u = G @ rng.standard_normal(d)
            nrm = math.sqrt(u @ u)
        v = u / nrm
        Gv = G @ v
        rho = float(v @ Gv)
        r = Gv - rho * v
        residual = math.sqrt(r @ r)
        if residual <= tol * rho:
            return v, step
        if step % 8 == 0:
            M = M @ M
            M /= np.linalg.norm(M)
    raise ConvergenceError(
        f"power iteration did not reach relative residual {tol:g} in {cap} steps",
        residual=residual,
    )


def reweight_directions(ps: PointSet, params: ApproxParams = ApproxParams()) -> ReweightTrace:
    """Main reweighting loop: runs while the total weight is at least ``1/n``."""
    P = ps.points
    n = ps.n
    if ps.has_zero_point():
        raise DegenerateInstanceError("a zero point never loses weight; the loop cannot end")
    rng = seed_stream(params.seed, 0)
    log_tau = np.zeros(n)
    log_weights = [log_tau]
    margins, directions, steps = [], [], []
    threshold = -math.log(n)
    while True:
        # rescaling by the largest weight leaves the top direction unchanged
        top = log_tau.max()
        tau = np.exp(log_tau - top)
        if top + math.log(tau.sum()) < threshold:
            break
        if len(directions) >= params.max_rounds:
            raise ConvergenceError(f"reweighting exceeded {params.max_rounds} rounds")
        G = (P * tau[:, None]).T @ P
        w, k = top_direction(G, rng, params.power_iter_tol, params.power_iter_cap)
        sigma = np.clip(np.abs(P @ w), 0.0, 1.0)
        log_tau = log_tau + np.log1p(-(sigma**2) / 2.0)
        directions.append(w)
        margins.append(sigma)
        log_weights.append(log_tau)
        steps.append(k)
    return ReweightTrace(
        np.array(log_weights), np.array(margins), np.array(directions), np.array(steps)
    )


def combine_gaussian(trace: ReweightTrace, rng: np.random.Generator):
    """Random Gaussian mixture of the trace directions.

    Returns ``(w, norm, g)``: the unit vector, ``||w'||`` before normalizing
    and the coefficients used.
    """
    if trace.t < 1:
        raise InputError("trace has no directions")
    for _ in range(2):
        g = rng.standard_normal(trace.t)
        raw = g @ trace.directions
        nrm = float(np.linalg.norm(raw))
        if nrm >= 1e-12:
            return raw / nrm, nrm, g
    raise ConvergenceError("Gaussian combination vanished twice in a row")


def coverage_count(w, ps: PointSet, level: float) -> int:
    """Number of points strictly farther than ``level`` from the hyperplane."""
    return int(np.sum(np.abs(ps.points @ w) > level))


def coverage_level(w, ps: PointSet, m: int) -> float:
    """Largest ``v`` with at least ``m`` points satisfying ``|<w, x>| >= v``."""
    dist = np.sort(np.abs(ps.points @ np.asarray(w)))[::-1]
    return float(dist[m - 1])


@dataclass(frozen=True, eq=False)
class Candidate:
    trial: int
    normal: np.ndarray
    raw_norm: float
    level: float
    coefficients: np.ndarray = field(repr=False)


@dataclass(frozen=True, eq=False)
class ApproxResult:
    hyperplane: Hyperplane
    level: float
    m: int
    params: ApproxParams
    trace: ReweightTrace
    candidates: List[Candidate]
    best_trial: int

    def coverage_rows(self, ps: Optional[PointSet] = None) -> list:
        rows = []
        for c in self.candidates:
            row = {"trial": c.trial, "raw_norm": c.raw_norm, "level": c.level}
            if ps is not None:
                row["distances"] = np.sort(np.abs(ps.points @ c.normal)).tolist()
            rows.append(row)
        return rows

    def to_report(self, ps: Optional[PointSet] = None) -> dict:
        return {
            "solver": "approx",
            "alpha": self.params.alpha,
            "trials": self.params.trials,
            "seed": self.params.seed,
            "m": self.m,
            "coverage_level": self.level,
            "margin": self.hyperplane.achieved_margin,
            "normal": self.hyperplane.normal.tolist(),
            "iterations": self.trace.t,
            "best_trial": self.best_trial,
            "candidates": self.coverage_rows(ps),
        }


def approx_solve(ps: PointSet, params: ApproxParams = ApproxParams()) -> ApproxResult:
    """Run the reweighting once, draw ``params.trials`` mixtures, keep the best-covering one.

    Candidates are scored by :func:`coverage_level` at ``m = ceil((1 - 5 alpha) n)``
    (at least one point), which needs no knowledge of the optimal margin.
    """
    trace = reweight_directions(ps, params)
    m = max(1, math.ceil(params.coverage_target * ps.n - 1e-12))
    cands = []
    for k in range(params.trials):
        w, nrm, g = combine_gaussian(trace, seed_stream(params.seed, k + 1))
        cands.append(Candidate(k, w, nrm, coverage_level(w, ps, m), g))
    best = max(cands, key=lambda c: (c.level, -c.trial))
    hp = Hyperplane(best.normal, margin_of(best.normal, ps))
    return ApproxResult(hp, best.level, m, params, trace, cands, best.trial)
