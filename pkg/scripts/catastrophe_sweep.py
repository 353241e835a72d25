"""Sweep the catastrophe map and count connected regions of each family/stability label."""

import argparse

import numpy as np

from resonance_atlas.bifurcation import BOUNDARY, region_components, region_labels


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=300, help="grid points per axis")
    ap.add_argument("--extent", type=float, default=3.0, help="half-width of the square window")
    args = ap.parse_args()

    c = np.linspace(-args.extent, args.extent, args.n)
    s = np.linspace(-args.extent, args.extent, args.n)
    labels = region_labels(c, s)
    comps = region_components(c, s, labels)
    cells = {lab: int(np.sum(labels == lab)) for lab in np.unique(labels)}
    print(f"grid {args.n}x{args.n} on [-{args.extent}, {args.extent}]^2")
    print("label     components  cells")
    for lab in sorted(comps):
        print(f"{lab:9s} {comps[lab]:10d}  {cells[lab]}")
    print(f"{BOUNDARY:9s} {'-':>10s}  {cells.get(BOUNDARY, 0)}")


if __name__ == "__main__":
    main()
