#!/usr/bin/env python3
"""Tabulate the restricted-transform spectrum and the detectable-order curves.

Writes CSV data for two standard pictures:

* sn2_R{10,100}.csv: squared singular values s_n^2(R) next to the asymptote
  2 sqrt(R^2 - n^2);
* threshold_curves.csv: the largest detectable order N(R, P, p) as a function
  of R for p/P in {1e-1, 1e-4, 1e-8}, with the reference lines R and 1.5 R.
"""

import argparse
from pathlib import Path

import numpy as np

from farsplit import PowerBudget, picard_threshold, spectrum


def write_spectrum_table(out: Path, big_r: float) -> None:
    spec = spectrum(big_r)
    lines = ["n,s_n_squared,asymptote"]
    for n, value in enumerate(spec.values):
        asym = 2.0 * np.sqrt(big_r**2 - n * n) if n <= big_r else 0.0
        lines.append(f"{n},{float(value)!r},{float(asym)!r}")
    path = out / f"sn2_R{int(big_r)}.csv"
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def write_threshold_curves(out: Path) -> None:
    ratios = (1e-1, 1e-4, 1e-8)
    lines = ["R," + ",".join(f"N_ratio_{r:g}" for r in ratios) + ",R_line,1.5R_line"]
    for big_r in np.arange(1.0, 121.0, 1.0):
        row = [f"{big_r:g}"]
        for ratio in ratios:
            n = picard_threshold(float(big_r), PowerBudget(P=1.0, p=ratio))
            row.append(str(n if n is not None else ""))
        row.append(f"{big_r:g}")
        row.append(f"{1.5 * big_r:g}")
        lines.append(",".join(row))
    path = out / "threshold_curves.csv"
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("out_spectrum"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    write_spectrum_table(args.out, 10.0)
    write_spectrum_table(args.out, 100.0)
    write_threshold_curves(args.out)


if __name__ == "__main__":
    main()
