"""Check the random-hyperplane constant c_rh against measured single-draw success rates.

For seeded Gaussian instances with margin at least ``--min-theta`` the script
draws ``--draws`` uniform normals, solves each distinct induced labeling once,
and records how often a draw reaches the optimal margin. A constant ``c`` is
consistent when every instance has ``rate >= n^(-c / theta^2)``. Prints the
smallest consistent value from ``--grid`` next to the library default.
"""
import argparse

import numpy as np

from fhp.core import solve_labeled
from fhp.exact import C_RH, sample_unit_vectors, seed_stream, solve_exact_bfs
from fhp.instances.generators import gen_gaussian


def success_rate(ps, theta, draws, seed):
    W = sample_unit_vectors(seed_stream(seed, 1), draws, ps.d)
    signs = np.where(W @ ps.points.T >= 0, 1, -1)
    patterns, inverse = np.unique(signs, axis=0, return_inverse=True)
    good = np.array([solve_labeled(tuple(p), ps).solved_margin >= theta - 1e-9 for p in patterns])
    return float(good[inverse.ravel()].mean())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=40)
    ap.add_argument("--draws", type=int, default=20_000)
    ap.add_argument("--min-theta", type=float, default=0.3)
    ap.add_argument("--grid", type=float, nargs="+", default=[0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0])
    args = ap.parse_args()

    rows = []
    seed = 0
    while len(rows) < args.instances:
        seed += 1
        rng = np.random.default_rng(seed)
        ps = gen_gaussian(int(rng.integers(3, 11)), int(rng.integers(2, 4)), seed)
        theta = solve_exact_bfs(ps).margin
        if theta < args.min_theta:
            continue
        rows.append((seed, ps.n, ps.d, theta, success_rate(ps, theta, args.draws, seed)))

    print("seed  n  d  theta   rate")
    for seed, n, d, theta, rate in rows:
        print(f"{seed:4d} {n:2d} {d:2d}  {theta:.3f}  {rate:.4f}")
    consistent = [c for c in args.grid if all(r >= n ** (-c / t**2) for _, n, _, t, r in rows)]
    print(f"smallest consistent c_rh on grid: {min(consistent) if consistent else 'none'}")
    print(f"library default: {C_RH}")


if __name__ == "__main__":
    main()
