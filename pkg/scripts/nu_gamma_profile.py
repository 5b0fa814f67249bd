"""Classical and power-law Bloch seminorms of f_gamma over shrinking strips, for several gamma.

    python3 scripts/nu_gamma_profile.py --gammas 1.5 2 3 --N 100000
"""

import argparse

from dvlab import norms
from dvlab.experiments import f_gamma, f_gamma_tail


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--gammas", type=float, nargs="+", default=[1.5, 2.0, 3.0])
    p.add_argument("--N", type=int, default=100_000)
    p.add_argument("--j-min", type=int, default=4)
    p.add_argument("--j-max", type=int, default=12)
    args = p.parse_args()
    print("gamma,j,sigma_min,classical,power_law")
    for gamma in args.gammas:
        f = f_gamma(gamma, args.N)
        tail = f_gamma_tail(gamma, args.N)
        for j in range(args.j_min, args.j_max + 1):
            grid = norms.StripGrid(sigma_min=2.0**-j, n_sigma=64, n_t=1)
            c = norms.bloch_seminorm(f, norms.BlochWeight.classical(), grid, tail=tail).value
            w = norms.bloch_seminorm(f, norms.BlochWeight.power_law(gamma), grid, tail=tail).value
            print(f"{gamma:g},{j},{2.0**-j:.6g},{c:.6g},{w:.6g}")


if __name__ == "__main__":
    main()
