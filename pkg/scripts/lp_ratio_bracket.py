"""Spread of the Carleson-to-norm ratio at p=2 as the dimension and sample count vary.

    python3 scripts/lp_ratio_bracket.py --dims 1 2 3 --samples 1000 4000
"""

import argparse

import numpy as np

from dvlab import volterra
from dvlab.experiments import random_smooth_series
from dvlab.measures import AdmissibleMeasure


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--samples", type=int, nargs="+", default=[1000, 4000])
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    mu = AdmissibleMeasure.mu_alpha(args.alpha)
    print("d,n_samples,r_lo,r_hi,max_rel_std_error")
    for d in args.dims:
        for n in args.samples:
            rng = np.random.default_rng(args.seed)
            ratios, rel = [], []
            for i in range(args.pairs):
                f = random_smooth_series(d, 2, 4, rng)
                g = random_smooth_series(d, 2, 4, rng)
                if g.terms()[0].max() < 2:
                    continue
                r = volterra.carleson_quantity_p2(f, g, mu, d, n, seed=args.seed * 1000 + i)
                ratios.append(r.ratio)
                rel.append(r.std_error / r.estimate)
            print(f"{d},{n},{min(ratios):.5f},{max(ratios):.5f},{max(rel):.4f}")


if __name__ == "__main__":
    main()
