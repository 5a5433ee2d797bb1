"""Command-line front end.

    fhp gen {gaussian|circle} --n N [--d D] [--seed S] --out FILE
    fhp reduce --cnf FILE.dimacs [--seed S] --out FILE.fhp
    fhp solve {bfs|net|random|approx|mmc} --in FILE.fhp [--out REPORT]
    fhp study random-margin --n N --d D --trials T [--seed S]
    fhp gap-demo [--n 8 --n 16 ...]
    fhp verify PATH [--replay]

Reports are JSON with sorted keys and embed the full run configuration, so
``fhp verify --replay REPORT`` can regenerate them and compare bytes.
Exit codes: 0 ok, 2 input error, 3 convergence error, 4 invariant violation.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import io
from .approx import ApproxParams, approx_solve, coverage_level
from .core import DEFAULT_TOL, PointSet, Tolerances, margin_of, signs_of
from .errors import (
    ConvergenceError,
    DegeneracyError,
    GenerationError,
    InputError,
)
from .exact import (
    SampleBudget,
    solve_eps_net,
    solve_exact_bfs,
    solve_random_hyperplane,
)
from .instances import expander as expander_mod
from .instances.generators import gen_circle, gen_gaussian
from .instances.sat import (
    MAX_OCC_SYM,
    SQRT12,
    SymFormula,
    brute_force_sat,
    completeness_margin,
    extend_assignment,
    format_dimacs,
    parse_dimacs,
    points_from_sym,
    sym_from_3sat,
)
from .instances.studies import C_HIGH, C_LOW, random_margin_study, sdp_gap_demo
from .mmc import solve_mmc

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_INVARIANT = 0, 2, 3, 4
REPORT_VERSION = 1

COMMANDS = {
    "gen": ("gaussian", "circle"),
    "reduce": (None,),
    "solve": ("bfs", "net", "random", "approx", "mmc"),
    "study": ("random-margin",),
    "gap-demo": (None,),
}


@dataclass
class RunConfig:
    command: str
    target: Optional[str] = None
    inputs: List[str] = field(default_factory=list)
    seed: int = 0
    n: List[int] = field(default_factory=list)
    d: Optional[int] = None
    alpha: float = 0.1
    trials: Optional[int] = None
    budget: Optional[int] = None
    theta_lower: Optional[float] = None
    tol: Dict[str, float] = field(default_factory=dict)
    out: Optional[str] = None
    report: Optional[str] = None
    timing: bool = False

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.target not in COMMANDS[self.command]:
            raise InputError(f"unknown target {self.target!r} for {self.command}")
        bad = set(self.tol) - {f.name for f in dataclasses.fields(Tolerances)}
        if bad:
            raise InputError(f"unknown tolerance(s): {sorted(bad)}")
        if any(not (v > 0) for v in self.tol.values()):
            raise InputError("tolerances must be positive")
        if not (0 < self.alpha < 1):
            raise InputError("--alpha must lie in (0, 1)")
        if self.trials is not None and self.trials < 1:
            raise InputError("--trials must be positive")
        if self.budget is not None and self.budget < 1:
            raise InputError("--budget must be positive")
        if self.theta_lower is not None and not (0 < self.theta_lower <= 1):
            raise InputError("--theta-lower must lie in (0, 1]")
        if any(k < 1 for k in self.n) or (self.d is not None and self.d < 1):
            raise InputError("--n and --d must be positive")
        need_in = self.command in ("reduce", "solve")
        if need_in and len(self.inputs) != 1:
            raise InputError(f"{self.command} needs exactly one input file")
        if self.command == "gen":
            if len(self.n) != 1 or self.out is None:
                raise InputError("gen needs --n and --out")
            if self.target == "gaussian" and self.d is None:
                raise InputError("gen gaussian needs --d")
        if self.command == "reduce" and self.out is None:
            raise InputError("reduce needs --out")
        if self.command == "study" and (len(self.n) != 1 or self.d is None):
            raise InputError("study random-margin needs --n and --d")
        return self

    def tolerances(self) -> Tolerances:
        return dataclasses.replace(DEFAULT_TOL, **self.tol)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config key(s): {sorted(unknown)}")
        return cls(**data).validate()


# ------------------------------------------------------------------ checks


def _pointset_checks(ps: PointSet, tol: Tolerances) -> dict:
    norms = np.linalg.norm(ps.points, axis=1)
    return {"norms_at_most_one": bool(norms.max() <= 1 + tol.norm)}


def witness_checks(ps: PointSet, normal, margin: float, signature: Optional[str], tol: Tolerances) -> dict:
    w = np.asarray(normal, dtype=float)
    unit = bool(w.shape == (ps.d,) and abs(np.linalg.norm(w) - 1.0) <= tol.unit)
    checks = {"witness_unit": unit}
    if not unit:
        checks["witness_margin"] = False
        if signature is not None:
            checks["witness_labeling"] = False
        return checks
    dots = ps.points @ w
    checks["witness_margin"] = bool(float(np.min(np.abs(dots))) >= margin - tol.feas)
    if signature is not None:
        want = np.array([1 if c == "+" else -1 for c in signature])
        clear = np.abs(dots) > tol.feas
        checks["witness_labeling"] = bool(
            len(signature) == ps.n and np.all(signs_of(dots)[clear] == want[clear])
        )
    return checks


def reduction_checks(psi: SymFormula, ps: PointSet, m_source: int, assignment, tol_abs: float = 1e-12) -> dict:
    D = psi.num_vars
    norms = np.linalg.norm(ps.points, axis=1)
    tail = ps.points[-D:] * ps.scale if ps.n >= D else np.zeros((0, D))
    raw = ps.points[: psi.M] * SQRT12
    arity = np.array([len(c) for c in psi.clauses])
    raw_norms = np.linalg.norm(raw, axis=1) if raw.size else np.zeros(0)
    cert = expander_mod.certificate(psi.num_pair, expander_mod.DEGREE, psi.edges)
    checks = {
        "clause_count_16m": bool(psi.M == 16 * m_source),
        "occurrences_at_most_30": bool(psi.occurrences().max() <= MAX_OCC_SYM),
        "sym_structure": not psi.structure_problems(),
        "point_count": bool(ps.n == psi.M + D and ps.d == D),
        "norm_range": bool(
            norms.min() >= 1 / SQRT12 - tol_abs and norms.max() <= 1 + tol_abs
        ),
        "unit_vectors_appended": bool(tail.shape == (D, D) and np.allclose(tail, np.eye(D), atol=1e-12)),
        "clause_point_norms": bool(
            raw.shape[0] == psi.M
            and np.allclose(raw_norms[arity == 4], SQRT12, atol=1e-12)
            and np.allclose(raw_norms[arity == 2], math.sqrt(2), atol=1e-12)
        ),
        "expander_regular_simple": cert["regular"] and cert["simple"],
        "expander_certificate": cert["expanding"],
    }
    if assignment is not None:
        w = np.where(np.asarray(assignment, dtype=bool), 1.0, -1.0) / math.sqrt(D)
        checks["completeness_margin"] = bool(
            margin_of(w, ps) >= completeness_margin(D) - tol_abs
        )
    return checks


# --------------------------------------------------------------- execution


def _load_instance(path: str) -> PointSet:
    return io.read_pointset(path)


def _input_block(path: str) -> dict:
    return {"path": path, "sha256": io.file_digest(path)}


def _sidecar_paths(out: str) -> Tuple[str, str]:
    return out + ".sym.cnf", out + ".sym.json"


def _solve(cfg: RunConfig, tol: Tolerances):
    ps = _load_instance(cfg.inputs[0])
    name = cfg.target
    checks = _pointset_checks(ps, tol)
    if name == "bfs":
        res = solve_exact_bfs(ps, seed=cfg.seed, tol=tol)
    elif name == "net":
        res = solve_eps_net(ps, tol=tol)
    elif name == "random":
        if cfg.theta_lower is not None:
            budget = SampleBudget.from_theta(ps.n, ps.d, cfg.theta_lower, seed=cfg.seed)
            if cfg.budget is not None:
                budget = dataclasses.replace(budget, samples=max(budget.samples, cfg.budget))
        else:
            budget = SampleBudget(cfg.budget or 10_000, None, cfg.seed, adaptive=cfg.budget is None)
        res = solve_random_hyperplane(ps, budget, tol=tol)
    elif name == "approx":
        params = ApproxParams(alpha=cfg.alpha, trials=cfg.trials or 32, seed=cfg.seed)
        res = approx_solve(ps, params)
        result = res.to_report()
        result["raw_margin"] = res.hyperplane.achieved_margin * ps.scale
        checks.update(witness_checks(ps, res.hyperplane.normal, res.hyperplane.achieved_margin, None, tol))
        checks["coverage_level"] = bool(
            coverage_level(res.hyperplane.normal, ps, res.m) == res.level
        )
        if ps.n >= 2:
            checks["sigma_sq_at_least_log2n"] = bool(
                np.all(res.trace.sigma_sq_sums() >= math.log2(ps.n) - 1e-9)
            )
        return ps, result, checks
    else:
        sep = solve_mmc(ps, lambda local: solve_exact_bfs(local, seed=cfg.seed, tol=tol), tol.feas)
        result = sep.to_report()
        side = sep.side(ps.points)
        checks["clusters_nonempty"] = bool(np.any(side > 0) and np.any(side < 0))
        checks["mmc_margin"] = bool(abs(float(np.min(np.abs(side))) - sep.margin) <= tol.feas)
        return ps, result, checks
    result = res.to_report()
    result["raw_margin"] = res.margin * ps.scale
    checks.update(witness_checks(ps, res.normal, res.margin, res.best.signature, tol))
    if name == "net":
        checks["net_certified"] = bool(res.certified)
    return ps, result, checks


def execute(cfg: RunConfig) -> Tuple[dict, Dict[str, str]]:
    """Run one configuration; returns the report and the files it would write."""
    cfg.validate()
    tol = cfg.tolerances()
    t0 = time.perf_counter()
    artifacts: Dict[str, str] = {}
    report = {"kind": cfg.command, "version": REPORT_VERSION, "config": cfg.to_dict()}
    if cfg.command == "gen":
        n = cfg.n[0]
        ps = gen_gaussian(n, cfg.d, cfg.seed) if cfg.target == "gaussian" else gen_circle(n)
        artifacts[cfg.out] = io.format_pointset(ps)
        report["result"] = {"n": ps.n, "d": ps.d, "scale": ps.scale, "sha256": _sha(artifacts[cfg.out])}
        report["checks"] = _pointset_checks(ps, tol)
    elif cfg.command == "reduce":
        path = cfg.inputs[0]
        try:
            phi = parse_dimacs(Path(path).read_text())
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
        psi = sym_from_3sat(phi, seed=cfg.seed)
        ps = points_from_sym(psi)
        base = brute_force_sat(phi) if phi.num_vars <= 22 else None
        assignment = extend_assignment(base, phi.m) if base is not None else None
        side = psi.sidecar()
        side["source_clauses"] = phi.m
        side["certificate"] = None if assignment is None else [int(v) for v in assignment]
        cnf_path, side_path = _sidecar_paths(cfg.out)
        artifacts[cfg.out] = io.format_pointset(ps)
        artifacts[cnf_path] = format_dimacs(psi.num_vars, psi.clauses, ["SYM formula"])
        artifacts[side_path] = io.dumps_report({"kind": "sym-sidecar", **side})
        report["input"] = _input_block(path)
        report["result"] = {
            "source_vars": phi.num_vars,
            "source_clauses": phi.m,
            "sym_clauses": psi.M,
            "dimension": psi.num_vars,
            "points": ps.n,
            "lambda2": psi.lambda2,
            "expansion_lb": (expander_mod.DEGREE - psi.lambda2) / 2,
            "satisfiable": None if phi.num_vars > 22 else base is not None,
            "completeness_margin": completeness_margin(psi.num_vars),
            "sha256": _sha(artifacts[cfg.out]),
        }
        report["checks"] = reduction_checks(psi, ps, phi.m, assignment)
    elif cfg.command == "solve":
        report["input"] = _input_block(cfg.inputs[0])
        _, result, checks = _solve(cfg, tol)
        report["result"] = result
        report["checks"] = checks
    elif cfg.command == "study":
        rep = random_margin_study(cfg.n[0], cfg.d, cfg.trials or 60, cfg.seed, C_LOW, C_HIGH)
        report["result"] = rep.to_report()
        report["checks"] = {
            "frequency_in_unit_interval": 0.0 <= rep.frequency <= 1.0,
            "bracket_ordered": all(lo <= hi for lo, hi in zip(rep.lower, rep.upper)),
        }
    else:
        ns = cfg.n or [8, 16, 32]
        reps = [sdp_gap_demo(k, seed=cfg.seed) for k in ns]
        ratios = [r.ratio for r in reps]
        report["result"] = {"rows": [r.to_report() for r in reps]}
        report["checks"] = {
            "sdp_value_is_one_over_d": all(r.sdp_feasible_value == 1.0 / r.d for r in reps),
            "ratio_increasing": all(a < b for a, b in zip(ratios, ratios[1:])),
        }
    if cfg.timing:
        report["timing"] = {"elapsed_s": time.perf_counter() - t0}
    return report, artifacts


def _sha(text: str) -> str:
    import hashlib

    return hashlib.sha256(text.encode()).hexdigest()


def run(cfg: RunConfig, stdout=None) -> Tuple[int, Optional[dict]]:
    """Execute, write artifacts and the report, map failures to exit codes."""
    stdout = stdout or sys.stdout
    try:
        report, artifacts = execute(cfg)
    except (InputError, DegeneracyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except (ConvergenceError, GenerationError) as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE, None
    for path, text in artifacts.items():
        Path(path).write_text(text)
    text = io.dumps_report(report)
    dest = cfg.report if cfg.command in ("gen", "reduce") else (cfg.report or cfg.out)
    if dest:
        Path(dest).write_text(text)
    else:
        stdout.write(text)
    failed = [k for k, v in report.get("checks", {}).items() if not v]
    if failed:
        print(f"invariant violation: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT, report
    return EXIT_OK, report


# ----------------------------------------------------------------- verify


def _resolve(path: str, base: Path) -> str:
    p = Path(path)
    if p.exists() or p.is_absolute():
        return str(p)
    return str(base / p)


def verify_instance(path: str, tol: Tolerances = DEFAULT_TOL) -> Dict[str, bool]:
    ps = _load_instance(path)
    checks = {"parses": True, **_pointset_checks(ps, tol)}
    cnf_path, side_path = _sidecar_paths(path)
    if Path(cnf_path).exists() and Path(side_path).exists():
        side = io.loads_report(Path(side_path).read_text())
        psi = SymFormula.from_dimacs(parse_dimacs(Path(cnf_path).read_text()), side)
        checks.update(reduction_checks(psi, ps, side["source_clauses"], side.get("certificate")))
    return checks


def verify_report(path: str) -> Dict[str, bool]:
    """Re-derive every checkable invariant of a report from its artifacts."""
    base = Path(path).parent
    report = io.loads_report(Path(path).read_text())
    cfg = RunConfig.from_dict(report["config"])
    tol = cfg.tolerances()
    kind = report["kind"]
    res = report.get("result", {})
    checks: Dict[str, bool] = {}
    if "input" in report:
        src = _resolve(report["input"]["path"], base)
        checks["input_digest"] = bool(
            Path(src).exists() and io.file_digest(src) == report["input"]["sha256"]
        )
    if kind == "solve":
        ps = _load_instance(src)
        checks.update(_pointset_checks(ps, tol))
        if cfg.target == "mmc":
            w = np.asarray(res["normal"], dtype=float)
            side = ps.points @ w + res["offset"]
            checks["witness_unit"] = bool(abs(np.linalg.norm(w) - 1) <= tol.unit)
            checks["clusters_nonempty"] = bool(np.any(side > 0) and np.any(side < 0))
            checks["mmc_margin"] = bool(abs(float(np.min(np.abs(side))) - res["margin"]) <= tol.feas)
        else:
            sig = res.get("labeling")
            checks.update(witness_checks(ps, res["normal"], res["margin"], sig, tol))
            if cfg.target == "approx" and checks["witness_unit"]:
                checks["coverage_level"] = bool(
                    coverage_level(np.asarray(res["normal"]), ps, res["m"]) == res["coverage_level"]
                )
    elif kind == "gen":
        out = _resolve(cfg.out, base)
        checks.update(verify_instance(out, tol))
        checks["output_digest"] = bool(io.file_digest(out) == res["sha256"])
    elif kind == "reduce":
        out = _resolve(cfg.out, base)
        checks.update(verify_instance(out, tol))
        checks["output_digest"] = bool(io.file_digest(out) == res["sha256"])
    elif kind == "study":
        lo, hi = res["band"]
        inside = [a >= lo and b <= hi for a, b in zip(res["lower"], res["upper"])]
        checks["inside_flags"] = inside == res["inside"]
        checks["frequency"] = math.isclose(sum(inside) / res["trials"], res["frequency"])
        checks["bracket_ordered"] = all(a <= b for a, b in zip(res["lower"], res["upper"]))
    elif kind == "gap-demo":
        rows = res["rows"]
        checks["sdp_value_is_one_over_d"] = all(r["sdp_feasible_value"] == 1 / r["d"] for r in rows)
        checks["ratio_matches_theta"] = all(
            math.isclose(r["ratio"], r["sdp_feasible_value"] / r["integral_theta"] ** 2) for r in rows
        )
        checks["ratio_increasing"] = all(a["ratio"] < b["ratio"] for a, b in zip(rows, rows[1:]))
    else:
        raise InputError(f"unknown report kind {kind!r}")
    return checks


def replay_report(path: str) -> Dict[str, bool]:
    """Regenerate a report from its embedded config and compare bytes."""
    text = Path(path).read_text()
    report = io.loads_report(text)
    cfg = RunConfig.from_dict(report["config"])
    fresh, artifacts = execute(cfg)
    if "timing" in report:
        report.pop("timing")
        fresh.pop("timing", None)
        text = io.dumps_report(report)
    checks = {"report_bytes_identical": io.dumps_report(fresh) == text}
    for out, body in artifacts.items():
        p = Path(out)
        checks[f"artifact_identical:{out}"] = p.exists() and p.read_text() == body
    return checks


def verify(path: str, replay: bool = False) -> Dict[str, bool]:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {path}")
    head = p.read_text()[:16]
    if head.startswith("fhp v1"):
        return verify_instance(path)
    checks = verify_report(path)
    if replay:
        checks.update(replay_report(path))
    return checks


# ------------------------------------------------------------------ argv


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--report", help="report path (default: stdout, or --out for solve/study)")
    p.add_argument("--timing", action="store_true", help="record wall time in the report")
    for name in ("norm", "unit", "feas", "mnp"):
        p.add_argument(f"--tol-{name}", type=float, dest=f"tol_{name}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fhp", description="Furthest hyperplane / max-margin clustering toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance")
    g.add_argument("target", choices=COMMANDS["gen"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int)
    _add_common(g)

    r = sub.add_parser("reduce", help="3SAT(13) DIMACS -> SYM(30) -> point set")
    r.add_argument("--cnf", required=True)
    _add_common(r)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("target", nargs="?", choices=COMMANDS["solve"])
    s.add_argument("--solver", choices=COMMANDS["solve"], help="same as the positional solver name")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--alpha", type=float, default=0.1)
    s.add_argument("--trials", type=int)
    s.add_argument("--budget", type=int)
    s.add_argument("--theta-lower", type=float)
    _add_common(s)

    st = sub.add_parser("study", help="random-model margin study")
    st.add_argument("target", choices=COMMANDS["study"])
    st.add_argument("--n", type=int, required=True)
    st.add_argument("--d", type=int, required=True)
    st.add_argument("--trials", type=int, default=60)
    _add_common(st)

    gd = sub.add_parser("gap-demo", help="SDP integrality-gap demonstration on n-gons")
    gd.add_argument("--n", type=int, action="append")
    _add_common(gd)

    v = sub.add_parser("verify", help="replay invariants of a report or instance")
    v.add_argument("path", nargs="?")
    v.add_argument("--in", dest="inp")
    v.add_argument("--replay", action="store_true", help="also regenerate the report and compare bytes")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    tol = {k: getattr(ns, f"tol_{k}") for k in ("norm", "unit", "feas", "mnp") if getattr(ns, f"tol_{k}", None) is not None}
    inputs = []
    if getattr(ns, "inp", None):
        inputs = [ns.inp]
    if getattr(ns, "cnf", None):
        inputs = [ns.cnf]
    n = getattr(ns, "n", None)
    target = getattr(ns, "target", None)
    solver = getattr(ns, "solver", None)
    if target and solver and target != solver:
        raise InputError(f"conflicting solvers {target!r} and {solver!r}")
    return RunConfig(
        command=ns.command,
        target=target or solver,
        inputs=inputs,
        seed=ns.seed,
        n=[] if n is None else (list(n) if isinstance(n, list) else [n]),
        d=getattr(ns, "d", None),
        alpha=getattr(ns, "alpha", 0.1),
        trials=getattr(ns, "trials", None),
        budget=getattr(ns, "budget", None),
        theta_lower=getattr(ns, "theta_lower", None),
        tol=tol,
        out=ns.out,
        report=ns.report,
        timing=ns.timing,
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.command == "verify":
        path = ns.path or ns.inp
        if not path:
            print("verify needs a path", file=sys.stderr)
            return EXIT_INPUT
        try:
            checks = verify(path, ns.replay)
        except (InputError, KeyError, json.JSONDecodeError) as exc:
            print(f"input error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        for name, ok in checks.items():
            print(f"{'PASS' if ok else 'FAIL'} {name}")
        return EXIT_OK if all(checks.values()) else EXIT_INVARIANT
    try:
        cfg = config_from_args(ns).validate()
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    code, _ = run(cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
