"""Thresholds, bifurcation sequences, chambers and domains for the two reference cases."""

import argparse

from resonance_atlas.bifurcation import sequence, thresholds
from resonance_atlas.emmap import chambers, domains
from resonance_atlas.params import ReducedParams, classify_case

CASES = {
    "sub1": (ReducedParams(A=-11 / 15, B=6.0, C=0.2, Delta=-0.2), (0.01, 0.027, 0.03, 0.045, 0.06)),
    "sub2": (ReducedParams(A=-0.1, B=2.0, C=0.2, Delta=-0.2), (0.05, 0.09, 0.095, 0.102, 0.12, 0.2)),
}


def report(name: str, rp: ReducedParams, slices, eMax: float) -> None:
    print(f"== {name}: {rp}")
    print(f"case: {classify_case(rp).value}")
    for k, v in thresholds(rp).as_dict().items():
        print(f"  {k:4s} {v}")
    print("sequence: " + " ".join(f"{ev.label}@{ev.e:.6g}" for ev in sequence(rp, eMax)))
    for E in slices:
        ch = chambers(rp, E)
        desc = ", ".join(f"{c.torus_family.value}[{c.h_lower:.3e}, {c.h_upper:.3e}]" for c in ch)
        print(f"  E={E:<6g} {len(ch)} chambers: {desc}")
    for d in domains(rp, eMax):
        print(f"  domain E in ({d.e_lo:.6g}, {d.e_hi:.6g}): {d.lower} / {d.upper}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--emax", type=float, default=0.3)
    args = ap.parse_args()
    for name, (rp, slices) in CASES.items():
        report(name, rp, slices, args.emax)


if __name__ == "__main__":
    main()
