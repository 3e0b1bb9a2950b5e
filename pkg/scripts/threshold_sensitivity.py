"""Heralding thresholds and how the homodyne one depends on the evaluation point.

python3 scripts/threshold_sensitivity.py
"""

import math

import numpy as np

from qdetcal import Homodyne, NoThreshold, OnOff, heralding_threshold, threshold_sensitivity


def _xi(detector, eta):
    try:
        return f"{heralding_threshold(detector, eta_eval=eta):.6f}"
    except NoThreshold:
        return "none (xi = 1 still falls short)"


def main():
    xi = heralding_threshold(OnOff(0.0))
    print(f"on/off    xi* = {xi:.10f}   (1/e = {1 / math.e:.10f})")
    s = threshold_sensitivity(Homodyne())
    print(f"homodyne  xi* = {s.xi_star:.10f} at eta = {s.eta_eval}")
    print(f"homodyne  xi* = {s.xi_star_alt:.10f} at eta = {s.eta_alt}   shift {s.shift:.2e}")
    print("\neta_eval      xi*(homodyne)")
    for eta in (0.5, 0.7, 0.9, 0.99, 0.999, 0.9999, 0.99999):
        print(f"{eta:<12g}  {_xi(Homodyne(), eta)}")
    print("\neta_eval      xi*(on/off)")
    for eta in np.round(np.arange(0.1, 1.01, 0.1), 12):
        print(f"{eta:<12g}  {_xi(OnOff(0.0), eta)}")


if __name__ == "__main__":
    main()
