"""Rebuild the raw and normalized volume tables and compare with the published values.

    python scripts/reproduce_tables.py --samples 1000000 --workers 4
"""
import argparse
import math

from aloha_region.cli import TABLE_ORDER, table_cells

UNIT = {2: 1e-1, 3: 1e-2, 4: 1e-3, 5: 1e-4, 6: 1e-6, 7: 1e-7}
PUBLISHED = {
    "so_star": (2.146, 3.491, 4.330, 4.328, 36.09, 24.900),
    "po": (2.500, 3.828, 4.106, 3.492, 22.75, 16.127),
    "po_and_so": (2.064, 3.132, 3.475, 3.031, 21.14, 13.600),
    "eo": (1.862, 3.044, 3.785, 3.774, 31.53, 23.800),
    "lambda": (1.667, 2.063, 1.921, 1.428, 8.821, 4.665),
    "ei": (1.618, 1.856, 1.667, 1.214, 7.720, 4.300),
    "si_star": (1.535, 1.805, 1.635, 1.183, 7.530, 3.800),
    "pi_star": (1.250, 1.463, 1.320, 0.961, 5.851, 3.061),
    "srs": (1.667, 1.111, 0.397, 0.0882, 0.134, 0.0147),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--samples", type=int, default=10 ** 6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    ns = range(2, args.n_max + 1)
    cells = table_cells(2, args.n_max, args.samples, args.seed, 0.05, args.workers, 2.0)
    print(f"{'family':<10}" + "".join(f"{'n=' + str(n):>22}" for n in ns))
    for fam in TABLE_ORDER:
        row = f"{fam:<10}"
        for n in ns:
            v, _, method = cells[fam, n]
            tag = "*" if method == "exact" else " "
            row += f"{v / UNIT[n]:>11.4f}{tag}({PUBLISHED[fam][n - 2]:>7})"
        print(row)
    print("\nvalues in units of 1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-7 for n=2..7; * marks exact cells;"
          " published value in brackets")
    print("\nnormalized (times n!):")
    for fam in TABLE_ORDER:
        print(f"{fam:<10}" + "".join(f"{cells[fam, n][0] * math.factorial(n):>12.4f}" for n in ns))


if __name__ == "__main__":
    main()
