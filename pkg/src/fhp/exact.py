"""Exact FHP solvers: labeling BFS, epsilon-net search, random-hyperplane sampling.

All three reduce to solving the labeled problem (:func:`fhp.core.solve_labeled`)
on a finite set of candidate labelings and keeping the best one.
"""
from __future__ import annotations

import math
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional

import numpy as np
from scipy.special import betainc

from .core import DEFAULT_TOL, Labeling, PointSet, Tolerances, signs_of, solve_labeled
from .errors import DegeneracyError, DegenerateInstanceError, InputError

__all__ = [
    "C_RH",
    "SolveResult",
    "SampleBudget",
    "enumerate_feasible_labelings",
    "solve_exact_bfs",
    "solve_eps_net",
    "solve_random_hyperplane",
    "sample_unit_vector",
    "sample_unit_vectors",
    "seed_stream",
    "worker_count",
    "perturb_points",
    "single_draw_success_bound",
]

# Exponent constant in the n^(c/theta^2) sampling budget; see scripts/calibrate_random_hyperplane.py.
C_RH = 4.0
PERTURBATION = 1e-6
CHUNK = 1 << 15


def worker_count(workers: Optional[int] = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    try:
        return max(1, int(os.environ.get("FHP_THREADS", "1")))
    except ValueError:
        return 1


def seed_stream(seed: int, index: int) -> np.random.Generator:
    """Generator for sub-stream ``index`` of master ``seed``; independent of worker count."""
    return np.random.default_rng(np.random.SeedSequence(int(seed) % 2**64, spawn_key=(index,)))


def sample_unit_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    """Uniform draw from the unit sphere in ``R^d`` (normalized standard Gaussian)."""
    if d < 1:
        raise InputError("dimension must be at least 1")
    while True:
        z = rng.standard_normal(d)
        nrm = np.linalg.norm(z)
        if nrm > 0:
            return z / nrm


def sample_unit_vectors(rng: np.random.Generator, k: int, d: int) -> np.ndarray:
    z = rng.standard_normal((k, d))
    nrm = np.linalg.norm(z, axis=1)
    bad = nrm == 0
    while np.any(bad):
        z[bad] = rng.standard_normal((int(bad.sum()), d))
        nrm = np.linalg.norm(z, axis=1)
        bad = nrm == 0
    return z / nrm[:, None]


@dataclass(frozen=True)
class SolveResult:
    solver: str
    best: Labeling
    margin: float
    labelings_explored: int
    certified: bool = True
    seed: Optional[int] = None
    samples: int = 0
    elapsed: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if not self.best.feasible or self.margin != self.best.solved_margin or self.margin <= 0:
            raise ValueError("SolveResult requires a feasible best labeling with positive margin")

    @property
    def normal(self) -> np.ndarray:
        return self.best.witness.normal

    def to_report(self) -> dict:
        return {
            "solver": self.solver,
            "margin": self.margin,
            "normal": self.normal.tolist(),
            "labeling": self.best.signature,
            "labelings_explored": self.labelings_explored,
            "samples": self.samples,
            "certified": self.certified,
            "seed": self.seed,
        }


def _key(lab: Labeling):
    return (lab.solved_margin, lab.labels)


def _best(labs: Iterable[Labeling]) -> Optional[Labeling]:
    feas = [lab for lab in labs if lab.feasible]
    return max(feas, key=_key) if feas else None


def _require_solvable(ps: PointSet) -> None:
    if ps.has_zero_point():
        raise DegenerateInstanceError(
            "point set contains a zero point; every labeling is infeasible"
        )


# --------------------------------------------------------------------- BFS


def _has_parallel_pair(ps: PointSet, sin_tol: float = 1e-7) -> bool:
    if ps.d < 2 or ps.n < 2:
        return False
    u = ps.points / np.linalg.norm(ps.points, axis=1)[:, None]
    c = np.abs(u @ u.T)
    np.fill_diagonal(c, 0.0)
    return bool(np.any(c >= np.sqrt(1.0 - sin_tol**2)))


def perturb_points(ps: PointSet, seed: int, magnitude: float = PERTURBATION) -> PointSet:
    """Deterministic coordinate jitter in ``[-magnitude, magnitude]``, keeping norms at most one."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) % 2**64, 0x9E3779B9]))
    pts = ps.points + rng.uniform(-magnitude, magnitude, size=ps.points.shape)
    over = np.linalg.norm(pts, axis=1).max()
    if over > 1.0:
        pts = pts / over
    return PointSet(pts, ps.scale)


def _bfs(ps: PointSet, start_w: np.ndarray, tol: Tolerances, limit: int):
    n = ps.n
    start = solve_labeled(signs_of(ps.points @ start_w), ps, tol)
    if not start.feasible:
        return {}, 1
    found: Dict[tuple, Labeling] = {start.labels: start}
    tried = {start.labels}
    queue = deque([start.labels])
    while queue:
        y = queue.popleft()
        # single-label flips, plus the global negation (always feasible alongside y)
        nbrs = [y[:i] + (-y[i],) + y[i + 1 :] for i in range(n)]
        nbrs.append(tuple(-v for v in y))
        for z in nbrs:
            if z in tried:
                continue
            tried.add(z)
            lab = solve_labeled(z, ps, tol)
            if lab.feasible:
                found[z] = lab
                queue.append(z)
                if len(found) > limit:
                    raise DegeneracyError(
                        f"found more than {limit} feasible labelings; "
                        "the instance is not in general position, enable perturbation"
                    )
    return found, len(tried)


def _enumerate(ps, seed, tol, perturb):
    _require_solvable(ps)
    n, d = ps.n, ps.d
    limit = 2 * n ** (d + 1)
    rng = seed_stream(seed, 0)
    for _ in range(16):
        w = sample_unit_vector(rng, d)
        if np.min(np.abs(ps.points @ w)) > tol.feas:
            break
    auto = perturb == "auto"
    if auto:
        perturb = _has_parallel_pair(ps)
    if not perturb:
        try:
            return _bfs(ps, w, tol, limit)
        except DegeneracyError:
            if not auto:
                raise
    # perturbed pass: thin cells created by the jitter need a much smaller feasibility cutoff
    jittered = perturb_points(ps, seed)
    fine = Tolerances(norm=tol.norm, unit=tol.unit, feas=PERTURBATION * 1e-4, mnp=PERTURBATION * 1e-6)
    cand, explored = _bfs(jittered, w, fine, limit)
    found = {}
    for y in sorted(cand):
        lab = solve_labeled(y, ps, tol)
        if lab.feasible:
            found[y] = lab
    return found, explored + len(cand)


def enumerate_feasible_labelings(
    ps: PointSet,
    seed: int = 0,
    tol: Tolerances = DEFAULT_TOL,
    perturb="auto",
) -> List[Labeling]:
    """All feasible labelings, by BFS over single-label flips.

    The start node is the labeling of a seeded random unit vector. With
    ``perturb="auto"`` instances containing (anti)parallel point pairs, where
    the flip graph can be disconnected, are enumerated on a jittered copy and
    every candidate is re-solved on the original points.
    """
    found, _ = _enumerate(ps, seed, tol, perturb)
    return [found[y] for y in sorted(found)]


def solve_exact_bfs(
    ps: PointSet, seed: int = 0, tol: Tolerances = DEFAULT_TOL, perturb="auto"
) -> SolveResult:
    t0 = time.perf_counter()
    found, explored = _enumerate(ps, seed, tol, perturb)
    best = _best(found.values())
    if best is None:
        raise DegenerateInstanceError("no feasible labeling found")
    return SolveResult(
        "bfs", best, best.solved_margin, explored, True, seed, 0, time.perf_counter() - t0
    )


# --------------------------------------------------------------- epsilon net


def _net_faces(d: int, K: int):
    """Yield the boundary points of the grid ``{-1 + 2k/K}^d`` face by face (no duplicates)."""
    full = -1.0 + 2.0 * np.arange(K + 1) / K
    inner = full[1:-1]
    for i in range(d):
        axes = [inner if j < i else full for j in range(d) if j != i]
        if any(len(a) == 0 for a in axes):
            continue
        grids = np.meshgrid(*axes, indexing="ij") if axes else []
        rest = np.stack([g.ravel() for g in grids], axis=1) if axes else np.zeros((1, 0))
        for s in (1.0, -1.0):
            pts = np.insert(rest, i, s, axis=1)
            yield pts


def net_size(d: int, eps: float) -> int:
    K = math.ceil(2.0 * math.sqrt(d) / eps)
    return sum(
        2 * math.prod((K - 1) if j < i else (K + 1) for j in range(d) if j != i) for i in range(d)
    )


def _packed_signatures(W: np.ndarray, P: np.ndarray) -> np.ndarray:
    bits = (W @ P.T) >= 0
    return np.unique(np.packbits(bits, axis=1), axis=0)


def _unpack(sig: np.ndarray, n: int) -> tuple:
    bits = np.unpackbits(sig)[:n]
    return tuple(int(v) for v in np.where(bits == 1, 1, -1))


def solve_eps_net(
    ps: PointSet,
    tol: Tolerances = DEFAULT_TOL,
    max_net_points: int = 4_000_000,
    min_guess: float = 1e-9,
) -> SolveResult:
    """Guess-halving epsilon-net search.

    For ``theta_g = 1, 1/2, ...`` every labeling induced by a net of mesh
    ``theta_g / 2`` is solved; the first round whose best margin reaches
    ``theta_g`` is certified optimal. If the next net would exceed
    ``max_net_points`` the best labeling so far is returned uncertified.
    """
    t0 = time.perf_counter()
    _require_solvable(ps)
    n, d = ps.n, ps.d
    P = ps.points
    cache: Dict[bytes, Labeling] = {}
    best: Optional[Labeling] = None
    guess = 1.0
    certified = False
    while guess >= min_guess:
        eps = guess / 2.0
        if net_size(d, eps) > max_net_points:
            break
        K = math.ceil(2.0 * math.sqrt(d) / eps)
        for face in _net_faces(d, K):
            for start in range(0, len(face), CHUNK):
                W = face[start : start + CHUNK]
                W = W / np.linalg.norm(W, axis=1)[:, None]
                for sig in _packed_signatures(W, P):
                    key = sig.tobytes()
                    if key not in cache:
                        cache[key] = solve_labeled(_unpack(sig, n), ps, tol)
        best = _best(cache.values())
        if best is not None and best.solved_margin >= guess:
            certified = True
            break
        guess /= 2.0
    if best is None:
        raise DegenerateInstanceError("net budget exhausted before any feasible labeling was found")
    return SolveResult(
        "net", best, best.solved_margin, len(cache), certified, None, 0, time.perf_counter() - t0
    )


# --------------------------------------------------------- random hyperplane


def single_draw_success_bound(theta: float, d: int) -> float:
    """Probability that one uniform normal lands within distance ``theta`` of ``+-w*``.

    Every such normal induces the optimal labeling (or its negation), so this
    lower-bounds the per-draw success probability.
    """
    if d == 1:
        return 1.0
    c = 1.0 - theta * theta / 2.0
    if c <= 0:
        return 1.0
    return float(betainc((d - 1) / 2.0, 0.5, 1.0 - c * c))  # = 2 * P[<w, w*> > c]


@dataclass(frozen=True)
class SampleBudget:
    """Number of random normals to draw.

    ``from_theta`` sizes the budget from a margin lower bound: the smaller of
    ``n^(c_rh / theta^2)`` and the count that makes the cap-measure success bound
    fail with probability at most ``failure``.
    """

    samples: int
    theta_lower: Optional[float] = None
    seed: int = 0
    adaptive: bool = False
    capped: bool = False

    def __post_init__(self):
        if int(self.samples) < 1:
            raise InputError("budget must allow at least one sample")
        if self.theta_lower is not None and not (0 < self.theta_lower <= 1):
            raise InputError("theta_lower must lie in (0, 1]")

    @staticmethod
    def worst_case_samples_log(n: int, theta: float, c_rh: float = C_RH) -> float:
        """Natural log of ``n^(c_rh / theta^2)``."""
        return c_rh / theta**2 * math.log(max(n, 1))

    @classmethod
    def from_theta(
        cls,
        n: int,
        d: int,
        theta_lower: float,
        seed: int = 0,
        c_rh: float = C_RH,
        failure: float = 1e-6,
        max_samples: int = 10**8,
    ) -> "SampleBudget":
        if not (0 < theta_lower <= 1):
            raise InputError("theta_lower must lie in (0, 1]")
        log_worst = cls.worst_case_samples_log(n, theta_lower, c_rh)
        worst = math.inf if log_worst > 700 else math.ceil(math.exp(log_worst))
        p = single_draw_success_bound(theta_lower, d)
        cap = 1 if p >= 1.0 else math.ceil(math.log(1.0 / failure) / -math.log1p(-p))
        want = max(1, min(worst, cap))
        return cls(int(min(want, max_samples)), theta_lower, seed, False, want > max_samples)


def _chunk_signatures(seed: int, index: int, size: int, P: np.ndarray) -> np.ndarray:
    W = sample_unit_vectors(seed_stream(seed, index + 1), size, P.shape[1])
    return _packed_signatures(W, P)


def _draw_signatures(seed, first_chunk, samples, P, workers):
    sizes = []
    left = samples
    while left > 0:
        sizes.append(min(CHUNK, left))
        left -= sizes[-1]
    jobs = [(seed, first_chunk + k, s, P) for k, s in enumerate(sizes)]
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _chunk_signatures(*a), jobs))
    else:
        parts = [_chunk_signatures(*a) for a in jobs]
    return parts, len(sizes)


def solve_random_hyperplane(
    ps: PointSet,
    budget: SampleBudget,
    tol: Tolerances = DEFAULT_TOL,
    workers: Optional[int] = None,
    patience: int = 3,
) -> SolveResult:
    """Best labeling among those induced by ``budget.samples`` uniform random normals.

    Each distinct labeling is solved once. With ``budget.adaptive`` (and no
    ``theta_lower``) the sample count doubles until the best labeling survives
    ``patience`` consecutive rounds; that result is flagged uncertified.
    """
    t0 = time.perf_counter()
    _require_solvable(ps)
    n = ps.n
    P = ps.points
    workers = worker_count(workers)
    cache: Dict[bytes, Labeling] = {}

    def absorb(parts):
        for part in parts:
            for sig in part:
                key = sig.tobytes()
                if key not in cache:
                    cache[key] = None
        for key in sorted(k for k, v in cache.items() if v is None):
            cache[key] = solve_labeled(_unpack(np.frombuffer(key, np.uint8), n), ps, tol)

    parts, chunks = _draw_signatures(budget.seed, 0, int(budget.samples), P, workers)
    absorb(parts)
    drawn = int(budget.samples)
    best = _best(cache.values())
    certified = budget.theta_lower is not None and not budget.capped
    if budget.adaptive and budget.theta_lower is None:
        certified = False
        stable = 0
        batch = drawn
        while stable < patience:
            parts, used = _draw_signatures(budget.seed, chunks, batch, P, workers)
            chunks += used
            drawn += batch
            absorb(parts)
            new = _best(cache.values())
            stable = stable + 1 if (best is not None and new.labels == best.labels) else 0
            best = new
            batch *= 2
    if best is None:
        raise DegenerateInstanceError("no sampled normal induced a feasible labeling")
    return SolveResult(
        "random",
        best,
        best.solved_margin,
        len(cache),
        certified,
        budget.seed,
        drawn,
        time.perf_counter() - t0,
    )
