"""Write the CSV data behind the four comparison figures.

    python3 scripts/reproduce_figures.py [OUTDIR]

Defaults to ./figures.  Also prints the computed homodyne crossovers.
"""

import argparse
import time
from pathlib import Path

from qdetcal import figure_curves, figure_sweep, find_crossover
from qdetcal.export import curves_to_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="figures")
    args = ap.parse_args()
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    for fig in (1, 2, 3, 4):
        t0 = time.perf_counter()
        curves = figure_sweep(fig)
        path = out / f"fig{fig}.csv"
        path.write_text(curves_to_csv(curves), encoding="utf-8", newline="\n")
        print(f"figure {fig}: {len(curves)} curves -> {path} ({time.perf_counter() - t0:.2f} s)")

    specs = {s.label: s for s in figure_curves(3)[0]}
    coherent = specs["coherent:4"]
    for label in ("4xfock:1", "2xfock:2", "fock:4"):
        res = find_crossover(specs[label], coherent, (0.3, 0.99))
        print(f"homodyne crossover {label} vs coherent:4 -> eta* = {res.eta_star}")


if __name__ == "__main__":
    main()
