# How far the periodic window's copy of 1/(x+i) sits from the true function.
# The tail of C/(x-p) decays like 1/|x|, so the sampled copy carries an
# offset of order r/L; this prints it together with the torus-quadrature
# error of Q and the periodic correction to the soliton speed.

import argparse
import sys

import numpy as np

from szego.functionals import conserved_quantities
from szego.hardy import FrequencyGrid, synth_rational
from szego.solitons import SolitonParams


def main():
    ap = argparse.ArgumentParser(description="periodization error of a synthesized soliton")
    ap.add_argument("--lengths", type=float, nargs="+", default=[64, 128, 256, 512, 1024])
    ap.add_argument("--per-length", type=int, default=16)
    args = ap.parse_args()
    s = SolitonParams(1.0, -1j)
    print(f"{'L':>6} {'sup err':>10} {'L*sup err':>10} {'torus Q err':>12} {'c_per - c':>11}")
    for L in args.lengths:
        g = FrequencyGrid(L, int(args.per_length * L))
        u = synth_rational(s.symbol(), g)
        err = np.max(np.abs(u.physical - s.symbol()(g.x)))
        q = abs(conserved_quantities(u, "torus").Q - s.Q) / s.Q
        c_per, _ = s.periodic_speeds(g)
        print(f"{L:6.0f} {err:10.4e} {L * err:10.4f} {q:12.4e} {c_per - s.c:11.4e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
