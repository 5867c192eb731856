"""Gap between the torus distance and its finite curve-enumeration lower bound.

For each tau2 on a grid (tau1 = i) prints the gap at several enumeration
heights.  Pairs with long thin lattices (large |Re tau2| / Im tau2, or large
Im tau2 with a shift) need heights well beyond 50 before the gap drops
under 1e-6.
"""

import argparse

from flatteich.torus import torus_distance, torus_kerckhoff


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--heights", default="10,50,100,200")
    args = ap.parse_args(argv)
    heights = [int(h) for h in args.heights.split(",")]
    print("tau2," + ",".join(f"gap_h{h}" for h in heights))
    for a in (0, 1, 2, 5, 10):
        for b in (0.5, 1, 2, 10):
            t2 = complex(a, b)
            d = torus_distance(1j, t2)
            gaps = [d - torus_kerckhoff(1j, t2, h) for h in heights]
            print(f"{a}+{b}i," + ",".join(f"{g:.3e}" for g in gaps))


if __name__ == "__main__":
    main()
