"""A Cantor-set accept region: rejected points next to every accepted one.

Prints the box-counting estimate and the dense-rejection witnesses around a
few accepted points, then compares two offset copies.

    python scripts/fractal_accept.py --depth 12
"""

import argparse
import math
from fractions import Fraction

from chaoslab import fractal, learning
from chaoslab.output import rational_text


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--scales", type=int, default=10)
    p.add_argument("--grid-depth", type=int, default=10)
    p.add_argument("--offset", default="1/9")
    args = p.parse_args()

    fs = fractal.FunctionSystem.cantor()
    cover = fractal.ifs_cover(fs, args.depth)
    est = fractal.box_count_dimension(cover, range(1, args.scales + 1))
    print(f"depth {args.depth}: {len(cover)} intervals, length {rational_text(cover.total_length)}")
    print(f"box counts {list(est.counts)}")
    print(f"dimension {est.dimension:.5f} (log2/log3 = {math.log(2) / math.log(3):.5f})")

    eps = [Fraction(1, 3**k) for k in range(1, 7)]
    for x in (Fraction(0), Fraction(2, 3), Fraction(1, 4)):
        print(f"witnesses near accepted {rational_text(x)}:")
        for e, w in fractal.dense_rejection_probe(fractal.cantor_contains, x, eps):
            print(f"  eps {rational_text(e):>6}  ->  {rational_text(w) if w is not None else 'none'}")

    grid = learning.ProbeGrid.dyadic(args.grid_depth)
    a = fractal.ifs_cover(fs, 2)
    b = a.shifted(Fraction(args.offset))
    rep = learning.symmetric_difference_density(
        grid.mask(a.__contains__), grid.mask(b.__contains__), grid, Fraction(1, len(grid) - 1))
    print(f"offset {args.offset}: |delta| = {rep.delta_size}, |both| = {rep.intersection_size}, "
          f"density fraction {rational_text(rep.density_fraction)} of {rep.grid_size} points")


if __name__ == "__main__":
    main()
