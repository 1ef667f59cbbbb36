"""Intersection-angle sweep for two curves: pi/2, pi/4, pi/6, pi/8.

Performance degrades as the incidence angle shrinks; the smallest angle
is expected to fail most of the time.

Usage: python scripts/run_angle_sweep.py [--trials 100] [--n 1500] [--seed 7]
"""

import argparse
import math
import sys

from mmcluster.datasets import DatasetSpec
from mmcluster.evaluation import MethodConfig, angle_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--n", type=int, default=1500, help="points per curve")
    ap.add_argument("--tau", type=float, default=0.0)
    ap.add_argument("--r", type=float, default=0.02)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args(argv)

    angles = [math.pi / 2, math.pi / 4, math.pi / 6, math.pi / 8]
    spec = DatasetSpec("two_curves_angle", n_per_cluster=args.n, tau=args.tau,
                       angle=math.pi / 2, seed=args.seed)
    cfg = MethodConfig(method="alg4", r=args.r, k=2, d=1)
    sweep = angle_sweep(angles, spec, cfg, args.trials, base_seed=args.seed)

    print(f"{'angle':>8s} {'r':>6s} {'r/R':>6s} {'median':>8s} {'<5%':>6s} {'<10%':>6s} {'<15%':>6s}")
    names = {math.pi / 2: "pi/2", math.pi / 4: "pi/4",
             math.pi / 6: "pi/6", math.pi / 8: "pi/8"}
    for a in angles:
        st = sweep[a]
        print(f"{names[a]:>8s} {st.r_used:>6.3f} {st.r_over_R:>6.3f} "
              f"{100 * st.median:>7.2f}% "
              f"{st.count_below[0.05]:>6d} {st.count_below[0.10]:>6d} "
              f"{st.count_below[0.15]:>6d}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
