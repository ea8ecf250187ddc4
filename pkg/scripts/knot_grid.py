"""Knot-point evidence for the series without points of local monotonicity on a grid k/m."""

from __future__ import annotations

import argparse
from fractions import Fraction

from monograph.constructions.series import SeriesEvaluator
from monograph.differentiation import SIDES, knot_report


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=21)
    ap.add_argument("--K", type=int, default=70)
    ap.add_argument("--threshold", type=int, default=10)
    ap.add_argument("--levels", type=int, default=60)
    args = ap.parse_args()
    ev = SeriesEvaluator("nomp", args.K)
    found = 0
    for k in range(1, args.m):
        rep = knot_report(ev, Fraction(k, args.m), args.threshold, args.levels)
        if rep.found:
            found += 1
            vals = " ".join(f"{s}={float(rep.extremes[s].value):+.3g} (h={float(rep.extremes[s].h):.2e})" for s in SIDES)
            print(f"{k}/{args.m}: {vals}")
        else:
            print(f"{k}/{args.m}: no evidence on {rep.failing_side}")
    print(f"evidence at {found} of {args.m - 1} points")


if __name__ == "__main__":
    main()
