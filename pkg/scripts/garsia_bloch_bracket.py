"""Empirical bracket between the Garsia-type norm and the polydisc Bloch seminorm.

    python3 scripts/garsia_bloch_bracket.py --dims 1 2 3 --polys 20
"""

import argparse

import numpy as np

from dvlab import polydisc


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--dims", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--polys", type=int, default=20)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--centers", type=int, default=40)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    print("d,ratio_min,ratio_median,ratio_max")
    for d in args.dims:
        rng = np.random.default_rng(args.seed)
        centers = polydisc.sample_centers(d, args.centers, seed=args.seed)
        grid = polydisc.PolydiscGrid(n_radial=32, n_angle=32, n_torus=8)
        ratios = []
        for _ in range(args.polys):
            F = polydisc.random_polynomial(d, args.degree, rng)
            b = polydisc.polydisc_bloch_seminorm(F, grid)
            if b > 0:
                ratios.append(polydisc.garsia_norm(F, centers) / b)
        print(f"{d},{min(ratios):.4f},{np.median(ratios):.4f},{max(ratios):.4f}")


if __name__ == "__main__":
    main()
