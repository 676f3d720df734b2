"""Write points of the region boundary, one per grid point of the contention facet.

    python scripts/boundary_cloud.py --n 3 --density 41 > cloud.csv
"""
import argparse
import csv
import sys

from aloha_region.cli import facet_grid
from aloha_region.membership import boundary_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--density", type=int, default=101)
    args = ap.parse_args()
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow([f"p{i + 1}" for i in range(args.n)] + [f"x{i + 1}" for i in range(args.n)])
    for p in facet_grid(args.n, args.density):
        w.writerow([f"{v:.12g}" for v in p] + [f"{v:.12g}" for v in boundary_point(p)])


if __name__ == "__main__":
    main()
