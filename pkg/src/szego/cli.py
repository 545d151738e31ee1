"""Command-line drivers: simulate, verify, stability, minimize, spectrum.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dynamics import NumericalFailure, SimulationConfig, simulate, symbol_from_spec
from .functionals import conserved_quantities
from .hankel import build_hankel, spectral_report, spectrum_Au, takagi_values
from .hardy import FrequencyGrid, GridMismatchError, write_field
from .manifest import ConfigError, ExperimentManifest, OutputWriter, build_dataclass, load_config
from .variational import (
    MINIMIZE_GRID,
    CylinderSpec,
    cylinder_distance,
    minimize_momentum,
    random_smooth_init,
    stability_experiment,
)
from .verify import VerifyConfig, as_dicts, checks_table, run_checks

log = logging.getLogger("szego")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


# simulate -------------------------------------------------------------------

@dataclass
class SimulateConfig:
    simulation: dict = field(default_factory=dict)
    write_snapshots: bool = True


def cmd_simulate(manifest: ExperimentManifest, out: OutputWriter, workers: int) -> int:
    cfg = build_dataclass(SimulateConfig, manifest.config)
    sim = build_dataclass(SimulationConfig, dict(cfg.simulation), "simulation.")
    try:
        rec = simulate(sim)
    except NumericalFailure as exc:
        out.json("summary.json", {"status": "numerical failure", "diagnostic": str(exc)})
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out.csv("conservation.csv", ["t", "Q", "M", "E"], zip(rec.log_t, rec.log_Q, rec.log_M, rec.log_E))
    header = ["t"]
    cols = [rec.times]
    if rec.deviation:
        header.append("dev_L2"), cols.append(rec.deviation)
    if rec.cylinder:
        header += ["dist_cyl", "theta_opt", "x0_opt"]
        cols += [list(c) for c in zip(*rec.cylinder)]
    if rec.singular_values:
        sv = np.array(rec.singular_values)
        header += [f"sv{k + 1}" for k in range(sv.shape[1])]
        cols += list(sv.T)
    out.csv("snapshots.csv", header, zip(*cols))
    q0 = rec.log_Q[0] if rec.log_Q and rec.log_Q[0] else 1.0
    out.dat("drift_Q.dat", ("t", "rel_drift_Q"), rec.log_t, [abs(q - rec.log_Q[0]) / q0 for q in rec.log_Q])
    if cfg.write_snapshots:
        for t, u in zip(rec.times, rec.snapshots):
            path = out.root / "fields" / f"t{t:012.6f}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            write_field(u, path, [f"manifest={manifest.hash} version={manifest.version} t={float(t)!r}"])
    summary = {"status": "blow-up" if rec.blowup else "ok", "config": sim.to_dict(), **rec.summary()}
    out.json("summary.json", summary)
    if rec.blowup:
        print(rec.diagnostic, file=sys.stderr)
        return EXIT_NUMERIC
    print(f"simulate: drifts Q={summary['drift_Q']:.3e} M={summary['drift_M']:.3e} E={summary['drift_E']:.3e}")
    return EXIT_OK


# verify ---------------------------------------------------------------------

def cmd_verify(manifest: ExperimentManifest, out: OutputWriter, workers: int) -> int:
    cfg = build_dataclass(VerifyConfig, manifest.config)
    checks = run_checks(cfg, seed=manifest.seed)
    if not checks:
        out.json("verify.json", {"status": "no checks run", "checks": []})
        print("verify: no checks run", file=sys.stderr)
        return EXIT_CHECK
    table = checks_table(checks)
    n_fail = sum(not c.passed for c in checks)
    out.text("verify.txt", table)
    out.json("verify.json", {"status": "pass" if n_fail == 0 else "fail", "failed": n_fail,
                             "checks": as_dicts(checks)})
    sys.stdout.write(table)
    print(f"verify: {len(checks) - n_fail}/{len(checks)} checks pass")
    return EXIT_OK if n_fail == 0 else EXIT_CHECK


# stability ------------------------------------------------------------------

@dataclass
class StabilityConfig:
    a: float = 1.0
    r: float = 1.0
    perturbation: dict = field(default_factory=lambda: {
        "kind": "rational", "poles": [[0.0, -2.0]], "coeffs": [[[0.0, 0.0], [1.0, 0.0]]]})
    deltas: list = field(default_factory=lambda: [1e-3, 1e-2, 1e-1])
    T: float = 100.0
    dt: float = 1e-3
    L: float = 256.0
    N: int = 4096
    snapshot_every: float = 1.0
    bound_factor: float = 10.0


def _stability_job(args):
    cfg, delta = args
    spec = CylinderSpec(cfg.a, cfg.r)
    g = symbol_from_spec(cfg.perturbation)
    stride = max(1, int(round(cfg.snapshot_every / cfg.dt)))
    return stability_experiment(spec, g, delta, cfg.T, FrequencyGrid(cfg.L, cfg.N), cfg.dt, stride)


def cmd_stability(manifest: ExperimentManifest, out: OutputWriter, workers: int) -> int:
    cfg = build_dataclass(StabilityConfig, manifest.config)
    symbol_from_spec(cfg.perturbation)  # validate before spawning workers
    jobs = [(cfg, float(d)) for d in cfg.deltas]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_stability_job, jobs))
    else:
        reports = [_stability_job(j) for j in jobs]
    combined = []
    status = EXIT_OK
    for rep in reports:
        tag = f"{rep.delta:.0e}"
        out.csv(f"distance_delta{tag}.csv", ["t", "dist", "theta_opt", "x0_opt"],
                zip(rep.times, rep.distances, rep.thetas, rep.x0s))
        out.dat(f"distance_delta{tag}.dat", ("t", "dist"), rep.times, rep.distances)
        out.json(f"stability_delta{tag}.json", rep.to_dict())
        within = rep.delta == 0 or rep.sup <= cfg.bound_factor * rep.delta
        combined.append({"delta": rep.delta, "sup": rep.sup, "verdict": rep.verdict,
                         "within_bound": bool(within)})
        if rep.verdict == "failed":
            status = EXIT_NUMERIC
        elif (rep.verdict != "bounded" or not within) and status == EXIT_OK:
            status = EXIT_CHECK
        print(f"stability: delta={rep.delta:g} sup={rep.sup:.4e} verdict={rep.verdict}")
    out.json("stability_summary.json", {"a": cfg.a, "r": cfg.r, "T": cfg.T, "bound_factor": cfg.bound_factor,
                                        "runs": combined})
    return status


# minimize ---------------------------------------------------------------------

@dataclass
class MinimizeConfig:
    Q: float = float(np.pi)
    E: float = float(np.pi / 2)
    n_init: int = 5
    L: float = MINIMIZE_GRID.L
    N: int = MINIMIZE_GRID.N
    grad_tol: float = 1e-8
    max_iter: int = 100_000
    distance_tol: float = 1e-3
    M_tol: float = 1e-5


def _minimize_job(args):
    cfg, seed = args
    grid = FrequencyGrid(cfg.L, cfg.N)
    res = minimize_momentum(cfg.Q, cfg.E, random_smooth_init(seed, grid), cfg.grad_tol, cfg.max_iter)
    spec = CylinderSpec.from_targets(cfg.Q, cfg.E)
    fit = cylinder_distance(res.field, spec)
    inv = conserved_quantities(res.field, "line")
    return seed, res, fit, inv


def cmd_minimize(manifest: ExperimentManifest, out: OutputWriter, workers: int) -> int:
    cfg = build_dataclass(MinimizeConfig, manifest.config)
    spec = CylinderSpec.from_targets(cfg.Q, cfg.E)
    m_star = np.pi * cfg.E / cfg.Q
    seeds = [manifest.seed + k for k in range(cfg.n_init)]
    jobs = [(cfg, s) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_minimize_job, jobs))
    else:
        results = [_minimize_job(j) for j in jobs]
    runs, ok = [], True
    for seed, res, fit, inv in results:
        good = fit.distance <= cfg.distance_tol and abs(inv.M - m_star) <= cfg.M_tol
        ok &= good
        runs.append({"seed": seed, "converged": res.converged, "reason": res.reason, "iterations": res.iterations,
                     "final_grad_norm": res.grad_norm[-1], "M_final": inv.M, "Q_final": inv.Q, "E_final": inv.E,
                     "cylinder_distance": fit.distance, "theta": fit.theta, "x0": fit.x0,
                     "final_domain_length": res.field.grid.L, "within_tolerance": bool(good)})
        out.json(f"history_seed{seed}.json", {"seed": seed, **res.history()})
        out.dat(f"M_gap_seed{seed}.dat", ("iteration", "M_minus_m"), range(len(res.M)), [m - m_star for m in res.M])
        print(f"minimize: seed={seed} distance={fit.distance:.3e} M-m={inv.M - m_star:.3e} ({res.reason})")
    out.json("minimize_summary.json", {"targets": {"Q": cfg.Q, "E": cfg.E}, "cylinder": asdict(spec),
                                       "m_expected": m_star, "runs": runs, "all_within_tolerance": bool(ok)})
    return EXIT_OK if ok else EXIT_CHECK


# spectrum ---------------------------------------------------------------------

@dataclass
class SpectrumConfig:
    source: dict = field(default_factory=lambda: {"kind": "soliton", "C": [1.0, 0.0], "p": [0.0, -1.0]})
    c: float | None = None
    cutoff: float = 40.0
    size: int = 2048
    top_k: int = 8


def cmd_spectrum(manifest: ExperimentManifest, out: OutputWriter, workers: int) -> int:
    cfg = build_dataclass(SpectrumConfig, manifest.config)
    sym = symbol_from_spec(cfg.source)
    c = cfg.c if cfg.c is not None else sym.Q() / (2 * np.pi)
    spec = spectrum_Au(sym, c, cfg.cutoff, cfg.size)
    sv = takagi_values(build_hankel(sym, cfg.cutoff, cfg.size), top=cfg.top_k)
    out.dat("Au_eigenvalues.dat", ("index", "eigenvalue"), range(spec.eigenvalues.size), spec.eigenvalues)
    out.dat("takagi_values.dat", ("index", "value"), range(1, sv.size + 1), sv)
    report = json.loads(spectral_report(sv))
    out.json("spectrum.json", {"c": c, "lowest_eigenvalue": spec.lowest, "negative_count": spec.n_negative,
                               "overlap_with_u": spec.overlap, "max_positive_gap": spec.max_positive_gap,
                               "takagi": report, "cutoff": cfg.cutoff, "size": cfg.size})
    print(f"spectrum: lowest={spec.lowest:.6f} negatives={spec.n_negative} overlap={spec.overlap:.6f}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "stability": cmd_stability,
    "minimize": cmd_minimize,
    "spectrum": cmd_spectrum,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="szego", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"szego {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file (schema_version 1)")
        p.add_argument("--out", default=f"runs/{name}", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                       help="dotted key, JSON value; repeatable")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    try:
        cfg = load_config(args.config, args.override)
        manifest = ExperimentManifest(args.command, cfg, args.seed, args.config, str(Path(args.out)))
        out = OutputWriter(manifest)
        code = COMMANDS[args.command](manifest, out, args.workers)
    except (ConfigError, GridMismatchError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyError as exc:
        print(f"config error: missing key {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.timing(time.perf_counter() - start)
    return code


if __name__ == "__main__":
    sys.exit(main())
