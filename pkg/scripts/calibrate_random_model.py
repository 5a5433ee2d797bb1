"""Calibrate the random-model band constants c_low, c_high on held-out seeds.

Each held-out seed contributes one Gaussian instance. c_high is the 95th
percentile of ``upper * sqrt(d)``; c_low the 90th percentile of
``1 / (lower * n * sqrt(d))``; both rounded up to one decimal. Paste the
printed values into ``fhp.instances.studies``.
"""
import argparse
import math

import numpy as np

from fhp.exact import seed_stream
from fhp.instances.generators import gaussian_raw
from fhp.instances.studies import margin_interval


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--d", type=int, default=10)
    ap.add_argument("--first-seed", type=int, default=10_000)
    ap.add_argument("--count", type=int, default=200)
    args = ap.parse_args()

    lo, hi = [], []
    for s in range(args.first_seed, args.first_seed + args.count):
        a, b = margin_interval(gaussian_raw(args.n, args.d, s), seed_stream(s, 0))
        lo.append(a)
        hi.append(b)
    lo, hi = np.array(lo), np.array(hi)
    root_d = math.sqrt(args.d)
    c_high = math.ceil(np.quantile(hi * root_d, 0.95) * 10) / 10
    c_low = math.ceil(np.quantile(1.0 / (lo * args.n * root_d), 0.90) * 10) / 10
    inside = (lo >= 1 / (c_low * args.n * root_d)) & (hi <= c_high / root_d)
    print(f"c_low = {c_low}")
    print(f"c_high = {c_high}")
    print(f"held-out frequency inside band: {inside.mean():.3f}")


if __name__ == "__main__":
    main()
