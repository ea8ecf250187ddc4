"""Fraction of random points not yet inside a flat block, by depth, and oscillation gaps at the others."""

from __future__ import annotations

import argparse
from fractions import Fraction

import numpy as np

from monograph.differentiation import mzv_oscillation, mzv_point_class


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=10_000)
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--oscillations", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    xs = [Fraction(int(p), 2**40) for p in rng.integers(0, 2**40, size=args.points)]
    levels = []
    for x in xs:
        pc = mzv_point_class(x, args.depth, index=False)
        levels.append(pc.level if pc.status == "NotInB" else None)
    for d in range(1, args.depth + 1):
        frac = sum(1 for lv in levels if lv is None or lv > d) / len(levels)
        print(f"depth {d:2d}: fraction without a flat block = {frac:.4f}")
    gaps = {"right": [], "left": []}
    for x, lv in zip(xs, levels):
        if lv is None:
            continue
        for side in gaps:
            osc = mzv_oscillation(x, side=side)
            if osc is not None:
                gaps[side].append(float(osc.gap_lb))
        if len(gaps["right"]) >= args.oscillations:
            break
    for side, g in gaps.items():
        print(f"{side:5s} quotient gaps: n={len(g)} min={min(g):.4f} median={np.median(g):.4f}")


if __name__ == "__main__":
    main()
