"""3SAT(13) -> SYM(30) -> point-set reduction, plus DIMACS I/O and certificate checks.

Literals are signed 1-based variable indices, as in DIMACS. In a SymFormula
the base variables keep indices ``1..num_base`` and the per-clause switch
variable ``z_i`` gets index ``num_base + i`` (``i`` 1-based).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..core import Hyperplane, PointSet, margin_of
from ..errors import InputError
from .expander import DEGREE, ExpanderGraph, build_expander

SQRT12 = math.sqrt(12.0)
MAX_OCC_3SAT = 13
MAX_OCC_SYM = 30


def _occurrences(num_vars: int, clauses) -> np.ndarray:
    occ = np.zeros(num_vars + 1, dtype=int)
    for c in clauses:
        for v in {abs(lit) for lit in c}:
            occ[v] += 1
    return occ[1:]


def _clause_values(clauses, assignment) -> np.ndarray:
    a = np.asarray(assignment, dtype=bool)
    return np.array([any(a[abs(l) - 1] == (l > 0) for l in c) for c in clauses], dtype=bool)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        cl = tuple(tuple(int(l) for l in c) for c in self.clauses)
        for c in cl:
            if not c:
                raise InputError("empty clause")
            bad = [l for l in c if l == 0 or abs(l) > self.num_vars]
            if bad:
                raise InputError(f"literal {bad[0]} out of range for {self.num_vars} variables")
        object.__setattr__(self, "clauses", cl)

    @property
    def m(self) -> int:
        return len(self.clauses)

    def occurrences(self) -> np.ndarray:
        """Number of clauses each variable (1..num_vars) occurs in."""
        return _occurrences(self.num_vars, self.clauses)

    def check_3sat13(self, max_occ: int = MAX_OCC_3SAT) -> None:
        """Raise unless every clause has 3 distinct variables and no variable is in more than ``max_occ`` clauses."""
        for i, c in enumerate(self.clauses):
            if len(c) != 3 or len({abs(l) for l in c}) != 3:
                raise InputError(f"clause {i} {c} does not have exactly 3 distinct variables")
        occ = self.occurrences()
        if occ.size and occ.max() > max_occ:
            v = int(np.argmax(occ)) + 1
            raise InputError(f"variable {v} occurs in {occ[v - 1]} clauses (limit {max_occ})")

    def satisfied_count(self, assignment) -> int:
        return int(_clause_values(self.clauses, assignment).sum())


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = num_clauses = None
    clauses, cur = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"bad problem line: {line!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise InputError("clause before 'p cnf' line")
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise InputError(f"bad clause line: {line!r}") from None
        for lit in lits:
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if num_vars is None:
        raise InputError("missing 'p cnf' line")
    if cur:
        raise InputError("last clause is not terminated by 0")
    if len(clauses) != num_clauses:
        raise InputError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(num_vars, tuple(clauses))


def format_dimacs(num_vars: int, clauses, comments: Sequence[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {num_vars} {len(clauses)}")
    lines.extend(" ".join(str(l) for l in c) + " 0" for c in clauses)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SymFormula:
    """Clauses of arity 2 or 4 that come in fully negated pairs.

    ``pairs`` lists clause-index pairs ``(A_i, A'_i)`` (the first ``m`` from
    clauses of the source formula, the rest from expander edges); ``edges`` are
    the expander edges over 0-based clause indices.
    """

    num_base: int
    num_pair: int
    clauses: tuple
    pairs: tuple
    edges: tuple = ()
    lambda2: Optional[float] = field(default=None, compare=False)

    @property
    def num_vars(self) -> int:
        return self.num_base + self.num_pair

    @property
    def M(self) -> int:
        return len(self.clauses)

    def occurrences(self) -> np.ndarray:
        return _occurrences(self.num_vars, self.clauses)

    def satisfied_count(self, assignment) -> int:
        return int(_clause_values(self.clauses, assignment).sum())

    def satisfied_mask(self, assignment) -> np.ndarray:
        return _clause_values(self.clauses, assignment)

    def structure_problems(self, max_occ: int = MAX_OCC_SYM) -> list:
        """Human-readable list of violated structural properties (empty when valid)."""
        problems = []
        for i, c in enumerate(self.clauses):
            if len(c) not in (2, 4) or len({abs(l) for l in c}) != len(c):
                problems.append(f"clause {i} has arity {len(c)} or repeated variables")
        seen = set()
        for a, b in self.pairs:
            if sorted(self.clauses[a]) != sorted(-l for l in self.clauses[b]):
                problems.append(f"clauses {a},{b} are not negations of each other")
            seen.update((a, b))
        if seen != set(range(self.M)):
            problems.append("some clauses are not covered by exactly one negation pair")
        occ = self.occurrences()
        if occ.size and occ.max() > max_occ:
            problems.append(f"variable {int(np.argmax(occ)) + 1} occurs {occ.max()} times")
        return problems

    def sidecar(self) -> dict:
        return {
            "num_base": self.num_base,
            "num_pair": self.num_pair,
            "pairs": [list(p) for p in self.pairs],
            "edges": [list(e) for e in self.edges],
            "lambda2": self.lambda2,
            "degree": DEGREE,
        }

    @classmethod
    def from_dimacs(cls, cnf: CnfFormula, side: dict) -> "SymFormula":
        if cnf.num_vars != side["num_base"] + side["num_pair"]:
            raise InputError("sidecar variable counts do not match the DIMACS header")
        return cls(
            side["num_base"],
            side["num_pair"],
            cnf.clauses,
            tuple(tuple(p) for p in side["pairs"]),
            tuple(tuple(e) for e in side["edges"]),
            side.get("lambda2"),
        )


def sym_from_3sat(
    phi: CnfFormula, g: Optional[ExpanderGraph] = None, seed: int = 0
) -> SymFormula:
    """Symmetrize a 3SAT(13) formula with per-clause switch variables tied by expander edges.

    Clause ``C_i`` becomes ``(C_i or not z_i)`` and ``(not C_i or z_i)`` (all
    literals of ``C_i`` negated); every edge ``(i, j)`` adds ``(z_i or not z_j)``
    and ``(not z_i or z_j)``. A graph is built from ``seed`` when ``g`` is None.
    """
    phi.check_3sat13()
    m, nb = phi.m, phi.num_vars
    if g is None:
        g = build_expander(m, seed)
    if g.m != m:
        raise InputError(f"expander has {g.m} vertices but the formula has {m} clauses")
    clauses, pairs = [], []
    for i, c in enumerate(phi.clauses):
        z = nb + i + 1
        clauses.append(tuple(c) + (-z,))
        clauses.append(tuple(-l for l in c) + (z,))
        pairs.append((2 * i, 2 * i + 1))
    for i, j in np.asarray(g.edges, dtype=int):
        zi, zj = nb + int(i) + 1, nb + int(j) + 1
        k = len(clauses)
        clauses.append((zi, -zj))
        clauses.append((-zi, zj))
        pairs.append((k, k + 1))
    edges = tuple((int(i), int(j)) for i, j in np.asarray(g.edges, dtype=int))
    return SymFormula(nb, m, tuple(clauses), tuple(pairs), edges, g.lambda2)


def clause_point(clause, D: int) -> np.ndarray:
    """Unscaled point of a 2- or 4-literal clause (integer coordinates)."""
    lits = sorted(clause, key=abs)
    x = np.zeros(D)
    signs = [1 if l > 0 else -1 for l in lits]
    idx = [abs(l) - 1 for l in lits]
    if len(lits) == 2:
        x[idx[0]] = signs[0]
        x[idx[1]] = -signs[1]
    elif len(lits) == 4:
        x[idx[0]] = 3 * signs[0]
        for r in (1, 2, 3):
            x[idx[r]] = -signs[r]
    else:
        raise InputError(f"clause {clause} has arity {len(lits)}; only 2 or 4 are embeddable")
    return x


def points_from_sym(psi: SymFormula) -> PointSet:
    """One point per clause, then the ``D`` unit vectors, all shrunk by sqrt(12)."""
    D = psi.num_vars
    rows = [clause_point(c, D) for c in psi.clauses]
    raw = np.vstack(rows + [np.eye(D)])
    return PointSet(raw / SQRT12, SQRT12)


def assignment_to_hyperplane(assignment, D: int, ps: Optional[PointSet] = None) -> Hyperplane:
    """Normal with coordinates ``+-1/sqrt(D)`` following the truth values."""
    a = np.asarray(assignment, dtype=bool)
    if a.shape != (D,):
        raise InputError(f"assignment must cover all {D} variables")
    w = np.where(a, 1.0, -1.0) / math.sqrt(D)
    return Hyperplane(w, margin_of(w, ps) if ps is not None else float("nan"))


def hyperplane_to_assignment(w) -> tuple:
    return tuple(bool(v >= 0) for v in np.asarray(w, dtype=float))


def completeness_margin(D: int) -> float:
    """Margin a satisfying assignment's hyperplane achieves on the scaled points."""
    return 1.0 / math.sqrt(12.0 * D)


def extend_assignment(phi_assignment, m: int) -> tuple:
    """Base assignment followed by ``z_1..z_m = True``."""
    return tuple(bool(v) for v in phi_assignment) + (True,) * m


def soundness_report(psi: SymFormula, ps: PointSet, w) -> dict:
    """Decode ``w`` and compare the satisfied fraction against the counting bound.

    With unscaled margin ``(1 - eps)/sqrt(D)``, at most ``10 eps D`` coordinates
    are far from ``+-1/sqrt(D)``, each touching at most ``t`` clauses.
    """
    D = psi.num_vars
    w = np.asarray(w, dtype=float)
    margin = margin_of(w, ps)
    eps = 1.0 - margin * ps.scale * math.sqrt(D)
    bad = np.abs(np.abs(w) - 1.0 / math.sqrt(D)) >= 0.1 / math.sqrt(D)
    assignment = hyperplane_to_assignment(w)
    sat = psi.satisfied_count(assignment)
    t = int(psi.occurrences().max())
    unsat_bound = 10.0 * max(eps, 0.0) * D * t / psi.M
    unsat = 1.0 - sat / psi.M
    return {
        "margin": margin,
        "eps": eps,
        "bad_variables": int(bad.sum()),
        "bad_bound": 10.0 * max(eps, 0.0) * D,
        "satisfied": sat,
        "unsatisfied_fraction": unsat,
        "unsatisfied_bound": unsat_bound,
        "coarse_bound": 10.0 * max(eps, 0.0) * MAX_OCC_SYM,
        "holds": bool(bad.sum() <= 10.0 * max(eps, 0.0) * D + 1e-9 and unsat <= unsat_bound + 1e-12),
    }


def brute_force_sat(phi: CnfFormula, max_vars: int = 22) -> Optional[tuple]:
    """First satisfying assignment in binary order, or None."""
    n = phi.num_vars
    if n > max_vars:
        raise InputError(f"brute force limited to {max_vars} variables")
    lits = [(np.array([abs(l) - 1 for l in c]), np.array([l > 0 for l in c])) for c in phi.clauses]
    step = 1 << min(n, 16)
    for start in range(0, 1 << n, step):
        codes = np.arange(start, min(start + step, 1 << n))
        bits = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
        ok = np.ones(len(codes), dtype=bool)
        for idx, pos in lits:
            ok &= np.any(bits[:, idx] == pos, axis=1)
        hit = np.flatnonzero(ok)
        if hit.size:
            return tuple(bool(b) for b in bits[hit[0]])
    return None


def random_3sat13(
    num_vars: int, num_clauses: int, seed: int, planted: bool = True
) -> tuple:
    """Random 3SAT(13) formula; with ``planted`` a hidden assignment satisfies every clause.

    Returns ``(formula, planted_assignment or None)``.
    """
    if 3 * num_clauses > MAX_OCC_3SAT * num_vars or num_vars < 3:
        raise InputError("too many clauses for the occurrence limit")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) % 2**64, 13]))
    hidden = rng.random(num_vars) < 0.5
    occ = np.zeros(num_vars, dtype=int)
    clauses = []
    while len(clauses) < num_clauses:
        free = np.flatnonzero(occ < MAX_OCC_3SAT)
        if free.size < 3:
            raise InputError("occurrence limit left fewer than 3 usable variables")
        # prefer the least used variables so the limit is never hit in a dead end
        weights = (MAX_OCC_3SAT - occ[free]).astype(float)
        vs = rng.choice(free, size=3, replace=False, p=weights / weights.sum())
        signs = rng.random(3) < 0.5
        if planted and not np.any(signs == hidden[vs]):
            signs[rng.integers(3)] ^= True
        clauses.append(tuple(int(v + 1) if s else -int(v + 1) for v, s in zip(vs, signs)))
        occ[vs] += 1
    phi = CnfFormula(num_vars, tuple(clauses))
    return phi, (tuple(bool(h) for h in hidden) if planted else None)
