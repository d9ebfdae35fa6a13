"""Accept sets of a learner that never settle, next to one that does.

Iterates the oscillator and constant functionals over a dyadic grid and
prints the limit sets with the churn series for each.

    python scripts/nonconvergence.py --n 64 --grid-depth 10
"""

import argparse

from chaoslab import learning
from chaoslab.output import rational_text


def show(name, n, grid, workers):
    L = learning.builtin_functional(name, {})
    _, trace = learning.trace_accept_sets(L, L.seed, n, grid, workers)
    rep = learning.limit_sets(trace)

    def runs(bits):
        return " ".join(f"[{rational_text(a)}, {rational_text(b)}]" for a, b in learning.intervals_of(bits, grid)) or "{}"

    print(f"{name}: window {rep.window}, tail from {rep.tail_start}")
    print(f"  limsup  {runs(rep.limsup)}  ({sum(rep.limsup)} points)")
    print(f"  liminf  {runs(rep.liminf)}  ({sum(rep.liminf)} points)")
    print(f"  churn   {list(rep.churn_series[:8])}{' ...' if len(rep.churn_series) > 8 else ''}")
    print(f"  converged={rep.converged} first_stable_index={rep.first_stable_index}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--grid-depth", type=int, default=10)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    grid = learning.ProbeGrid.dyadic(args.grid_depth)
    for name in ("oscillator", "constant"):
        show(name, args.n, grid, args.workers)


if __name__ == "__main__":
    main()
