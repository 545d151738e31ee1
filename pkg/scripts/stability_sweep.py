"""Distance of a perturbed soliton to its cylinder over time, for several perturbation sizes."""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from szego.hardy import FrequencyGrid
from szego.rational import RationalSymbol
from szego.variational import CylinderSpec, stability_experiment


def run(args):
    delta, a, r, T, L, N, dt, every = args
    pert = RationalSymbol.from_terms([(-2j * r, 2, 1.0)])
    return stability_experiment(CylinderSpec(a, r), pert, delta, T, FrequencyGrid(L, N), dt,
                                stride=max(1, int(round(every / dt))))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--deltas", type=float, nargs="+", default=[0.0, 1e-3, 1e-2, 1e-1])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--r", type=float, default=1.0)
    ap.add_argument("--T", type=float, default=20.0)
    ap.add_argument("--L", type=float, default=256.0)
    ap.add_argument("--N", type=int, default=4096)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--every", type=float, default=1.0, help="time between distance samples")
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--json", help="write all distance series here")
    args = ap.parse_args()
    jobs = [(d, args.a, args.r, args.T, args.L, args.N, args.dt, args.every) for d in args.deltas]
    with ProcessPoolExecutor(max_workers=args.workers) as pool:
        reports = list(pool.map(run, jobs))
    print(f"{'delta':>8} {'sup dist':>12} {'sup/delta':>10} {'verdict':>9}")
    for rep in reports:
        ratio = f"{rep.sup / rep.delta:10.3f}" if rep.delta else f"{'-':>10}"
        print(f"{rep.delta:8.1e} {rep.sup:12.4e} {ratio} {rep.verdict:>9}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
