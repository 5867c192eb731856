"""Run the thin-triangle sweep on the slit fixture and the torus control.

    python scripts/run_sweep.py --out results --n-list 4,8,16,32,64,128,256,512

Equivalent to ``flatteich sweep --torus-control``; kept as a script so the
rows can be inspected interactively.
"""

import argparse
import sys

from flatteich.cli import main


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--fixture", default="genus2_slit")
    ap.add_argument("--n-list", default="4,8,16,32,64,128,256,512")
    ap.add_argument("--grid", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    return ap.parse_args(argv)


if __name__ == "__main__":
    a = parse_args()
    sys.exit(main(["sweep", "--fixture", a.fixture, "--n-list", a.n_list, "--grid", str(a.grid),
                   "--workers", str(a.workers), "--out", a.out, "--torus-control", "--no-timing"]))
