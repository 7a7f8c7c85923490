"""Print D(x) and the attained-dimension density for weight-2 new and min spaces."""

import argparse

from cuspdims.distribution import FordConstants, density_trend
from cuspdims.spectrum import build_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=6, help="grid is 12 * 10^j, j = 3..max-exp")
    ap.add_argument("--ford-D", type=float, default=None)
    args = ap.parse_args()

    grid = [12 * 10**j for j in range(3, args.max_exp + 1)]
    ford = FordConstants(D=args.ford_D) if args.ford_D is not None else None
    for space in ("new", "min"):
        vs = build_spectrum(space, 2, grid[-1] // 12)
        rep = density_trend(vs, grid, ford)
        print(f"{space}: missing values up to {vs.max_certified}: {vs.missing().size}")
        for row in rep.rows:
            extra = f"  D/(x rho)={row['D_over_x_rho']:.4g}" if "D_over_x_rho" in row else ""
            print(f"  x={row['x']:>10}  D={row['D']:>8}  density={row['density']:.6f}{extra}")


if __name__ == "__main__":
    main()
