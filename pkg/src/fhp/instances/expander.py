"""Random regular graphs with a certified spectral expansion bound."""
from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from ..errors import GenerationError, InputError

DEGREE = 14


@dataclass(frozen=True, eq=False)
class ExpanderGraph:
    m: int
    degree: int
    edges: np.ndarray
    lambda2: float
    attempts: int = 1

    @property
    def expansion_lb(self) -> float:
        """Cheeger-type lower bound ``(degree - lambda2) / 2`` on the edge expansion."""
        return (self.degree - self.lambda2) / 2.0

    def adjacency(self) -> np.ndarray:
        return adjacency(self.m, self.edges)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "degree": self.degree,
            "edges": self.edges.tolist(),
            "lambda2": self.lambda2,
            "attempts": self.attempts,
        }


def adjacency(m: int, edges) -> np.ndarray:
    A = np.zeros((m, m))
    for i, j in np.asarray(edges, dtype=int).reshape(-1, 2):
        A[i, j] += 1
        A[j, i] += 1
    return A


def second_eigenvalue(A: np.ndarray) -> float:
    """Largest absolute adjacency eigenvalue after the top one."""
    ev = np.linalg.eigvalsh(A)
    return float(max(abs(ev[0]), abs(ev[-2])))


def certificate(m: int, degree: int, edges) -> dict:
    """Recompute every property the reduction relies on, straight from the edge list."""
    E = np.asarray(edges, dtype=int).reshape(-1, 2)
    A = adjacency(m, E)
    simple = bool(np.all(np.diag(A) == 0) and A.max() <= 1)
    regular = bool(np.all(A.sum(axis=1) == degree))
    lam = second_eigenvalue(A)
    lb = (degree - lam) / 2.0
    return {
        "simple": simple,
        "regular": regular,
        "lambda2": lam,
        "expansion_lb": lb,
        "expanding": bool(lb > degree / 5.0),
        "connected": bool(lam < degree - 1e-9),
    }


def build_expander(m: int, seed: int, degree: int = DEGREE, max_attempts: int = 100) -> ExpanderGraph:
    """Random ``degree``-regular simple graph whose spectrum certifies expansion above ``degree/5``."""
    if m <= degree or (m * degree) % 2:
        raise InputError(f"need m > {degree} and m*{degree} even, got m={m}")
    for attempt in range(max_attempts):
        sub = np.random.SeedSequence([int(seed) % 2**64, attempt]).generate_state(1)[0]
        G = nx.random_regular_graph(degree, m, seed=int(sub))
        edges = np.array(sorted(tuple(sorted(e)) for e in G.edges()), dtype=int)
        cert = certificate(m, degree, edges)
        if cert["simple"] and cert["regular"] and cert["expanding"]:
            return ExpanderGraph(m, degree, edges, cert["lambda2"], attempt + 1)
    raise GenerationError(f"no certified expander on {m} vertices after {max_attempts} attempts")
