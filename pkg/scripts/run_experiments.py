"""Run the small experiment set and print a summary table.

Writes one JSON report per experiment into ``--out-dir`` through the command
line entry point, so every file can be checked with ``fhp verify --replay``.
"""
import argparse
import json
from pathlib import Path

from fhp.cli import main as fhp


def run(argv):
    code = fhp(argv)
    if code != 0:
        raise SystemExit(f"fhp {' '.join(argv)} exited with {code}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="runs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    s = str(args.seed)

    run(["gap-demo", "--n", "8", "--n", "16", "--n", "32", "--out", str(out / "gap.json")])
    run(["study", "random-margin", "--n", "20", "--d", "10", "--trials", "60", "--seed", s,
         "--out", str(out / "random_margin.json")])
    inst = str(out / "gauss.fhp")
    run(["gen", "gaussian", "--n", "30", "--d", "3", "--seed", s, "--out", inst,
         "--report", str(out / "gen.json")])
    for solver in ("bfs", "net", "random", "approx"):
        run(["solve", solver, "--in", inst, "--seed", s, "--out", str(out / f"solve_{solver}.json")])
    # clustering runs one exact solve per point pair, so it gets a smaller instance
    small = str(out / "gauss_small.fhp")
    run(["gen", "gaussian", "--n", "10", "--d", "2", "--seed", s, "--out", small,
         "--report", str(out / "gen_small.json")])
    run(["solve", "mmc", "--in", small, "--seed", s, "--out", str(out / "solve_mmc.json")])

    gap = json.loads((out / "gap.json").read_text())["result"]
    study = json.loads((out / "random_margin.json").read_text())["result"]
    for row in gap["rows"]:
        print(f"gap demo n={row['n']:3d}  theta={row['integral_theta']:.6f}  ratio={row['ratio']:.3f}")
    print(f"random model: inside band {study['frequency']:.3f}, band {study['band']}")
    print("solver   margin")
    for solver in ("bfs", "net", "random", "approx", "mmc"):
        res = json.loads((out / f"solve_{solver}.json").read_text())["result"]
        print(f"{solver:7s}  {res['margin']:.6f}")


if __name__ == "__main__":
    main()
