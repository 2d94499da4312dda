"""Command-line front end: one executable, JSON configs, CSV outputs.

    filtered-spectra <command> [--config cfg.json] [flags]

Commands: moments, density, solve, simulate, eliminate, verify,
crosscheck, walkcheck.  Kernel/filter inputs are JSON documents (inline
or a path); every run writes its outputs plus a manifest.json recording
the command, a config hash, the seed, library versions, wall time, and
a sha256 per output file — identical config and seed reproduce
identical hashes for the deterministic commands.

Flag precedence: command line > config file > defaults; FS_THREADS
overrides --threads.  Floats are written with 17 significant digits so
CSV round-trips are lossless.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
import scipy

from . import __version__
from .kernel import read_color_document, as_kernel, validate_kernel, Filter
from .moments import theoretical_moments
from .combinat import moments_by_enumeration
from .colorsolve import solve_color_fixed_point, density_profile
from .algebra import (BivariatePolynomial, rank_one_eliminate, verify_curve,
                      random_walk_recursion_check)
from .matrixlab import (SampleConfig, sample_filtered_wigner,
                        sample_colored_gaussian, esd_statistics)

FMT = "%.17g"


def _jsonable(obj):
    """Coerce numpy scalars (and anything float-like) for json.dump."""
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return str(obj)


@dataclass
class RunManifest:
    command: str
    config_hash: str
    seed: int | None
    versions: dict
    wall_time_s: float
    outputs: list = field(default_factory=list)  # [{"path":..., "sha256":...}]


class _Run:
    """Output directory plus the bookkeeping every command shares."""

    def __init__(self, command: str, cfg: dict, outdir: str):
        self.command = command
        self.cfg = cfg
        self.outdir = outdir
        self.t0 = time.time()
        self.paths: list[str] = []
        os.makedirs(outdir, exist_ok=True)

    def path(self, name: str) -> str:
        p = os.path.join(self.outdir, name)
        self.paths.append(p)
        return p

    def write_csv(self, name: str, header, rows) -> str:
        p = self.path(name)
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in rows:
                w.writerow([FMT % v if isinstance(v, float) else v
                            for v in row])
        return p

    def write_json(self, name: str, payload) -> str:
        p = self.path(name)
        with open(p, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True,
                      default=_jsonable)
            fh.write("\n")
        return p

    def finish(self) -> None:
        digest = hashlib.sha256(
            json.dumps(self.cfg, sort_keys=True, default=str).encode()
        ).hexdigest()
        outputs = []
        for p in self.paths:
            with open(p, "rb") as fh:
                outputs.append({"path": os.path.basename(p),
                                "sha256": hashlib.sha256(fh.read()).hexdigest()})
        man = RunManifest(command=self.command, config_hash=digest,
                          seed=self.cfg.get("seed"),
                          versions={"filtered-spectra": __version__,
                                    "numpy": np.__version__,
                                    "scipy": scipy.__version__,
                                    "python": sys.version.split()[0]},
                          wall_time_s=time.time() - self.t0,
                          outputs=outputs)
        with open(os.path.join(self.outdir, "manifest.json"), "w") as fh:
            json.dump(asdict(man), fh, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------

def _load_cfg(ns: argparse.Namespace) -> dict:
    cfg = {}
    if ns.config:
        with open(ns.config) as fh:
            cfg = json.load(fh)
    for key, val in vars(ns).items():
        if key in ("config", "func") or val is None:
            continue
        cfg[key] = val
    env_threads = os.environ.get("FS_THREADS")
    if env_threads:
        cfg["threads"] = int(env_threads)
    cfg.setdefault("threads", os.cpu_count() or 1)
    cfg.setdefault("seed", 42)
    cfg.setdefault("out", "fs-out")
    return cfg


def _document(value):
    """A JSON document given inline, as a dict, or as a path."""
    if isinstance(value, dict):
        return value
    text = str(value)
    if text.lstrip().startswith("{"):
        return json.loads(text)
    with open(text) as fh:
        return json.load(fh)


def _get_filter(cfg: dict) -> Filter:
    if "filter" not in cfg:
        raise SystemExit("this command needs --filter (or a config entry)")
    obj = read_color_document(cfg["filter"])
    if not isinstance(obj, Filter):
        raise SystemExit("--filter must name a filter document")
    return obj


def _get_kernel(cfg: dict):
    if "kernel" in cfg:
        return as_kernel(read_color_document(cfg["kernel"]))
    if "filter" in cfg:
        return as_kernel(_get_filter(cfg))
    raise SystemExit("this command needs --kernel or --filter")


def _parse_complex(text: str) -> complex:
    re_s, _, im_s = text.partition(",")
    return complex(float(re_s), float(im_s) if im_s else 0.0)


def _curve_from_doc(doc) -> BivariatePolynomial:
    if not isinstance(doc, dict) or "coeffs" not in doc:
        raise SystemExit(
            'curve/relation documents need a "coeffs" list: '
            '{"coeffs": [[i, j, "value"], ...]}')
    return BivariatePolynomial.from_entries(doc["coeffs"])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_moments(cfg: dict) -> int:
    kern = _get_kernel(cfg)
    kmax = int(cfg.get("kmax", 8))
    run = _Run("moments", cfg, cfg["out"])
    try:
        ms = [float(v) for v in theoretical_moments(kern, kmax, exact=True)]
        mode = "exact"
    except ValueError:
        ms = [float(v) for v in theoretical_moments(kern, kmax)]
        mode = "float"
    rows = [[k + 1, ms[k]] for k in range(kmax)]
    header = ["k", "moment"]
    status = 0
    worst = 0.0
    if cfg.get("oracle"):
        cap = min(kmax, 12)
        oracle = [float(v) for v in moments_by_enumeration(kern, cap)]
        for k in range(kmax):
            rows[k].append(oracle[k] if k < cap else "")
        worst = max(abs(ms[k] - oracle[k]) for k in range(cap))
        header.append("enumeration")
        if worst > 1e-9:
            status = 2
    run.write_csv("moments.csv", header, rows)
    run.write_json("report.json", {"mode": mode, "kmax": kmax,
                                   "moments": ms,
                                   "oracle_max_abs_diff": worst
                                   if cfg.get("oracle") else None,
                                   "pass": status == 0})
    run.finish()
    print(f"moments 1..{kmax} written ({mode} mode)"
          + (f"; oracle max diff {worst:.3e}" if cfg.get("oracle") else ""))
    return status


def cmd_density(cfg: dict) -> int:
    kern = _get_kernel(cfg)
    xmin = float(cfg.get("xmin", -3.0))
    xmax = float(cfg.get("xmax", 3.0))
    n = int(cfg.get("n", 241))
    eps1 = float(cfg.get("eps1", 1e-2))
    eps2 = float(cfg.get("eps2", 5e-3))
    run = _Run("density", cfg, cfg["out"])
    grid = density_profile(kern, np.linspace(xmin, xmax, n),
                           eps_pair=(eps1, eps2))
    rows = [[x, d, 0 if f else 1]
            for x, d, f in zip(grid.xs, grid.density, grid.flags)]
    run.write_csv("density.csv", ["x", "density", "residual_flag"], rows)
    lo, hi = grid.support_estimate
    run.write_json("report.json", {
        "support_estimate": [lo, hi], "eps_pair": [eps1, eps2],
        "failed_points": int(sum(not f for f in grid.flags))})
    run.finish()
    print(f"density on [{xmin}, {xmax}] ({n} pts); "
          f"support approx [{lo:.4f}, {hi:.4f}]")
    return 0 if all(grid.flags) else 1


def cmd_solve(cfg: dict) -> int:
    kern = _get_kernel(cfg)
    lam = _parse_complex(str(cfg.get("lam", cfg.get("lambda", "4,1"))))
    run = _Run("solve", cfg, cfg["out"])
    sol = solve_color_fixed_point(kern, lam)
    run.write_csv("solve.csv", ["re_lambda", "im_lambda", "re_S", "im_S",
                                "residual"],
                  [[lam.real, lam.imag, sol.stieltjes.real,
                    sol.stieltjes.imag, sol.residual]])
    run.write_json("report.json", {
        "lambda": [lam.real, lam.imag],
        "S": [sol.stieltjes.real, sol.stieltjes.imag],
        "residual": sol.residual})
    run.finish()
    print(f"S({lam}) = {sol.stieltjes} (residual {sol.residual:.2e})")
    return 0


def cmd_simulate(cfg: dict) -> int:
    model = cfg.get("model", "filtered")
    seed = int(cfg["seed"])
    trials = int(cfg.get("trials", 5))
    kmax = int(cfg.get("kmax", 6))
    threads = max(1, int(cfg["threads"]))
    run = _Run("simulate", cfg, cfg["out"])
    if model == "filtered":
        h = _get_filter(cfg)
        N = int(cfg.get("N", 1000))
        scfg = SampleConfig(N=N, seed=seed,
                            entry_law=cfg.get("entry_law", "gaussian"),
                            trials=trials)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mats = list(pool.map(
                lambda t: sample_filtered_wigner(scfg, h, trial=t),
                range(trials)))
    elif model == "colored":
        kern = _get_kernel(cfg)
        N = int(cfg.get("N", 40))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mats = list(pool.map(
                lambda t: sample_colored_gaussian(kern, N, seed, trial=t),
                range(trials)))
    else:
        raise SystemExit(f"unknown model {model!r}")
    summary = esd_statistics(mats, kmax=kmax, bins=cfg.get("bins"))
    run.write_csv("moments.csv", ["k", "mean", "stderr"],
                  [[k + 1, summary.moment_mean[k], summary.moment_stderr[k]]
                   for k in range(kmax)])
    run.write_csv("hist.csv", ["bin_lo", "bin_hi", "mass"],
                  [[summary.hist_edges[i], summary.hist_edges[i + 1],
                    summary.hist_mass[i]]
                   for i in range(len(summary.hist_mass))])
    run.write_json("report.json", {
        "model": model, "N": N, "trials": trials,
        "moment_mean": summary.moment_mean,
        "moment_stderr": summary.moment_stderr})
    run.finish()
    pairs = ", ".join(f"m{k + 1}={summary.moment_mean[k]:.4f}"
                      for k in range(kmax))
    print(f"{model} model, N={N}, {trials} trials: {pairs}")
    return 0


def cmd_eliminate(cfg: dict) -> int:
    if "relation" not in cfg:
        raise SystemExit("eliminate needs --relation (JSON curve document)")
    rel = _curve_from_doc(_document(cfg["relation"]))
    kern = _get_kernel(cfg)
    run = _Run("eliminate", cfg, cfg["out"])
    curve = rank_one_eliminate(rel, kern)
    run.write_json("curve.json", {"coeffs": curve.to_entries()})
    samples = [complex(10.0 * math.cos(a), 10.0 * math.sin(a))
               for a in (math.pi * (2 * k + 1) / 24 for k in range(12))]
    resid = verify_curve(curve, kern, samples)
    run.write_json("report.json", {"curve": curve.pretty("X", "Y"),
                                   "verify_residual": resid})
    run.finish()
    print(f"curve: {curve.pretty('X', 'Y')}  (verify residual {resid:.2e})")
    return 0


def cmd_verify(cfg: dict) -> int:
    if "curve" not in cfg:
        raise SystemExit("verify needs --curve (JSON curve document)")
    curve = _curve_from_doc(_document(cfg["curve"]))
    kern = _get_kernel(cfg)
    count = int(cfg.get("samples", 20))
    radius = float(cfg.get("radius", max(10.0, 2.5 * kern.amplitude())))
    tol = float(cfg.get("tol", 1e-8))
    run = _Run("verify", cfg, cfg["out"])
    lams = [complex(radius * math.cos(a), radius * math.sin(a))
            for a in (math.pi * (2 * k + 1) / (2 * count) for k in range(count))]
    resid = verify_curve(curve, kern, lams)
    ok = resid < tol
    run.write_json("report.json", {"residual": resid, "tolerance": tol,
                                   "samples": count, "radius": radius,
                                   "pass": ok})
    run.finish()
    print(f"max residual {resid:.3e} at {count} points |lambda|={radius:g}: "
          + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_walkcheck(cfg: dict) -> int:
    ell = int(cfg.get("ell", 1))
    t_max = int(cfg.get("tmax", 60))
    tol = float(cfg.get("tol", 1e-10))
    if "z" in cfg:
        raw = cfg["z"]
        if isinstance(raw, str):
            z = [_parse_complex(part) for part in raw.split(";")]
        else:
            z = [complex(v[0], v[1]) if isinstance(v, list) else complex(v)
                 for v in raw]
    else:
        z = [0.1] * (2 * ell + 1)
    run = _Run("walkcheck", cfg, cfg["out"])
    resid = random_walk_recursion_check(z, ell, t_max=t_max)
    ok = resid < tol
    run.write_json("report.json", {
        "ell": ell, "t_max": t_max, "tolerance": tol,
        "z": [[v.real, v.imag] for v in map(complex, z)],
        "residual": resid, "pass": ok})
    run.finish()
    print(f"walk recursion residual {resid:.3e} (ell={ell}): "
          + ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def _density_moments(kern, kmax: int, cfg: dict):
    """Moments integrated against the solver density on an even grid."""
    A = kern.amplitude()
    half = A + 0.25
    n = int(cfg.get("grid_n", 481))
    xs = np.linspace(-half, half, n)
    grid = density_profile(kern, xs,
                           eps_pair=(float(cfg.get("eps1", 1e-2)),
                                     float(cfg.get("eps2", 5e-3))))
    dens = np.array(grid.density)
    ok = all(grid.flags)
    return [float(np.trapezoid(dens * xs ** (k + 1), xs))
            for k in range(kmax)], ok


def cmd_crosscheck(cfg: dict) -> int:
    kern = _get_kernel(cfg)
    kmax = int(cfg.get("kmax", 6))
    seed = int(cfg["seed"])
    trials = int(cfg.get("trials", 4))
    run = _Run("crosscheck", cfg, cfg["out"])

    report = validate_kernel(kern)
    if not report.ok:
        run.write_json("report.json", {"kernel_valid": False,
                                       "failures": report.messages})
        run.finish()
        print("kernel failed validation:", "; ".join(report.messages))
        return 1

    exact = [float(v) for v in theoretical_moments(kern, kmax)]
    solver, solver_ok = _density_moments(kern, kmax, cfg)

    if "filter" in cfg:
        h = _get_filter(cfg)
        N = int(cfg.get("N", 400))
        scfg = SampleConfig(N=N, seed=seed, trials=trials)
        mats = [sample_filtered_wigner(scfg, h, trial=t)
                for t in range(trials)]
    else:
        N = int(cfg.get("N", 24))
        mats = [sample_colored_gaussian(kern, N, seed, trial=t)
                for t in range(trials)]
    summary = esd_statistics(mats, kmax=kmax)

    rows, all_ok = [], solver_ok
    for k in range(kmax):
        tol_solver = 1e-3 * max(1.0, abs(exact[k]))
        d_solver = abs(solver[k] - exact[k])
        se = summary.moment_stderr[k]
        d_sim = abs(summary.moment_mean[k] - exact[k])
        ok_solver = d_solver <= tol_solver
        ok_sim = d_sim <= 3.0 * se + 1e-12
        all_ok &= ok_solver and ok_sim
        rows.append({"k": k + 1, "exact": exact[k], "solver": solver[k],
                     "simulation": summary.moment_mean[k], "sim_stderr": se,
                     "solver_ok": ok_solver, "sim_ok": ok_sim})
    run.write_csv("crosscheck.csv",
                  ["k", "exact", "solver", "simulation", "sim_stderr",
                   "solver_ok", "sim_ok"],
                  [[r["k"], r["exact"], r["solver"], r["simulation"],
                    r["sim_stderr"], int(r["solver_ok"]), int(r["sim_ok"])]
                   for r in rows])
    run.write_json("report.json", {"kernel_valid": True, "rows": rows,
                                   "pass": bool(all_ok)})
    run.finish()
    for r in rows:
        flag = "" if r["solver_ok"] and r["sim_ok"] else "   <-- MISMATCH"
        print(f"  m{r['k']}: exact={r['exact']:+.6f}  "
              f"solver={r['solver']:+.6f}  "
              f"sim={r['simulation']:+.6f} (se {r['sim_stderr']:.1e}){flag}")
    print("crosscheck:", "PASS" if all_ok else "FAIL")
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)
    common.add_argument("--out", help="output directory (default fs-out)")
    common.add_argument("--kernel", help="kernel JSON (path or inline)")
    common.add_argument("--filter", help="filter JSON (path or inline)")

    top = argparse.ArgumentParser(
        prog="filtered-spectra",
        description="limit spectra of finite-range-correlated random "
                    "matrices: exact moments, fixed-point densities, "
                    "simulation, and curve certification")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common],
                       help="limit moments via the recursion")
    p.add_argument("--kmax", type=int)
    p.add_argument("--oracle", action="store_true", default=None,
                   help="cross-check against partition enumeration")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("density", parents=[common],
                       help="spectral density on a grid")
    for flag, typ in (("--xmin", float), ("--xmax", float), ("--n", int),
                      ("--eps1", float), ("--eps2", float)):
        p.add_argument(flag, type=typ)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("solve", parents=[common],
                       help="Stieltjes transform at one point")
    p.add_argument("--lambda", dest="lam", help="complex as re,im")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", parents=[common],
                       help="sample matrices and empirical moments")
    p.add_argument("--model", choices=["filtered", "colored"])
    p.add_argument("--N", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--kmax", type=int)
    p.add_argument("--entry-law", dest="entry_law",
                   choices=["gaussian", "rademacher"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eliminate", parents=[common],
                       help="eliminate w from a rank-one relation")
    p.add_argument("--relation", help="relation JSON (path or inline)")
    p.set_defaults(func=cmd_eliminate)

    p = sub.add_parser("verify", parents=[common],
                       help="check a curve against the solver")
    p.add_argument("--curve", help="curve JSON (path or inline)")
    p.add_argument("--samples", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("crosscheck", parents=[common],
                       help="three-way moment consistency table")
    p.add_argument("--kmax", type=int)
    p.add_argument("--N", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.set_defaults(func=cmd_crosscheck)

    p = sub.add_parser("walkcheck", parents=[common],
                       help="walk-recursion identity check")
    p.add_argument("--ell", type=int)
    p.add_argument("--tmax", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--z", help="semicolon-separated complex steps re,im;...")
    p.set_defaults(func=cmd_walkcheck)

    return top


def main(argv=None) -> int:
    ns = _build_parser().parse_args(argv)
    cfg = _load_cfg(ns)
    try:
        return ns.func(cfg)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
