#!/usr/bin/env python3
"""Empirical r4 distribution over fundamental discriminants, both signs,
against the asymptotic targets.  The finite-range fractions converge only
loglog-slowly, which is exactly what this script makes visible."""

import argparse

from theta_selmer import survey


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max", type=int, default=10**6)
    args = ap.parse_args()
    for r in survey.scan_r4_density(args.max):
        frac = "n/a" if r.fraction is None else f"{100 * r.fraction:.2f}%"
        print(f"{r.population}: {frac} over {r.size} discriminants "
              f"(asymptotic {100 * r.target:.2f}%)")


if __name__ == "__main__":
    main()
