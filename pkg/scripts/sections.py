"""Poincare sections of the first reference case, with the predicted fixed points."""

import argparse
import csv
import sys

from resonance_atlas.dynamics import default_seeds, poincare, section_fixed_points
from resonance_atlas.params import ReducedParams

REF = ReducedParams(A=-11 / 15, B=6.0, C=0.2, Delta=-0.2)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--E", type=float, nargs="+", default=[0.024, 0.028, 0.035, 0.041])
    ap.add_argument("--seeds", type=int, default=12)
    ap.add_argument("--ncross", type=int, default=200)
    ap.add_argument("--threads", type=int, default=None)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["E", "seed_id", "crossing_index", "Q1", "P1"])
    for E in args.E:
        fps = section_fixed_points(REF, E)
        desc = ", ".join(f"{fp.family.value}({fp.Q1:+.4f},{fp.P1:+.4f})" for fp in fps)
        print(f"# E={E}: fixed points {desc}", file=sys.stderr)
        pts = poincare(REF, E, default_seeds(E, args.seeds), args.ncross, threads=args.threads)
        for i, orbit in enumerate(pts):
            for k, p in enumerate(orbit):
                out.writerow([E, i, k, repr(p.Q1), repr(p.P1)])


if __name__ == "__main__":
    main()
