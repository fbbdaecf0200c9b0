#!/usr/bin/env python3
"""Reproduce the certification-rate measurements for the pq and r4
corollary families, printing one report per family."""

import argparse
import json

from theta_selmer import survey


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max", type=int, default=20000)
    ap.add_argument("--jobs", type=int, default=survey.default_jobs())
    args = ap.parse_args()
    for family in ("f5", "f11", "cor15", "cor16"):
        rep = survey.scan_certification(family, args.max, jobs=args.jobs)
        print(json.dumps(rep.as_dict(), sort_keys=True))


if __name__ == "__main__":
    main()
