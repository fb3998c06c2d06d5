#!/usr/bin/env python3
"""Sweep collapse families of a mapping torus over a dyadic grid.

Writes one CSV per admissible k (0 <= k <= d - d') for the chosen B,
showing the spectrum of the degree-1 invariant Laplacian, the trace of
C_eps^T C_eps and the frame curvature bound along the collapse.

Example:
    python scripts/collapse_sweep.py --out /tmp/sweep --jmax 12
    python scripts/collapse_sweep.py --b "0 1 0; 0 0 1; 0 0 0"
"""

import argparse
from pathlib import Path

import numpy as np

from collapse_spectra import invariants_dd, run_collapse


def parse_matrix(text: str) -> np.ndarray:
    return np.array([[float(x) for x in row.split()]
                     for row in text.split(";")])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--b", default="0 1; 0 0",
                    help="matrix B, rows separated by ';'")
    ap.add_argument("--jmax", type=int, default=10,
                    help="grid eps = 2^-1 .. 2^-jmax")
    ap.add_argument("--out", default="sweep-out")
    args = ap.parse_args()

    B = parse_matrix(args.b)
    d, d_prime = invariants_dd(B)
    grid = [2.0 ** -j for j in range(1, args.jmax + 1)]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"B is {B.shape[0]}x{B.shape[0]} with d = {d}, d' = {d_prime}")
    for k in range(0, d - d_prime + 1):
        table = run_collapse(B, k, grid)
        path = out / f"collapse_k{k}.csv"
        path.write_text(table.to_csv())
        finest = table.rows[-1]
        print(f"k = {k}: wrote {path}; at eps = {finest.eps:.5g} the "
              f"spectrum is {np.round(finest.report.eigenvalues, 8)} "
              f"(small count {finest.small_count})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
