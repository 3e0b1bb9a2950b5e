"""Which Fock state is best for a K-outcome detector, efficiency by efficiency.

    python3 scripts/koutcome_optimality_scan.py [--K 2 3 4 5]

Per-photon Fisher information is not compared here; the scan maximizes the
raw single-use value over n in K-1 .. K+10.
"""

import argparse

import numpy as np

from qdetcal import koutcome_claimed_closed_form, koutcome_optimality_scan


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--K", type=int, nargs="+", default=[2, 3, 4, 5])
    args = ap.parse_args()
    grid = np.round(np.arange(1, 10) * 0.1, 12)
    for K in args.K:
        print(f"K = {K}")
        print("  eta   best n   F(best)      F(n=K)       (K-1)/(eta(1-eta))")
        for row in koutcome_optimality_scan(K, grid):
            print(
                f"  {row.eta:.1f}   {row.best_n:>6d}   {row.values[row.best_n]:<11.6g}  "
                f"{row.values[K]:<11.6g}  {koutcome_claimed_closed_form(K, row.eta):.6g}"
            )


if __name__ == "__main__":
    main()
