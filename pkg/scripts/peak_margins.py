"""Certified margins of peak-sum models for N = 1..N_max, and how they react to the grid."""

from __future__ import annotations

import argparse
import time

from monograph.constructions.peaks import check_peak_model, peak_build, peak_refutation_bound


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=6)
    ap.add_argument("--grids", type=int, nargs="*", default=[40])
    args = ap.parse_args()
    for grid in args.grids:
        t = time.perf_counter()
        m = peak_build(args.N, grid)
        secs = time.perf_counter() - t
        ok = all(check_peak_model(m).values())
        print(f"grid={grid} build={secs:.2f}s invariants={'ok' if ok else 'BROKEN'}")
        print(" n  q        eps      delta    a          refutation bound")
        for n in range(1, m.N + 1):
            bound = float(peak_refutation_bound(m, n))
            print(f"{n:2d}  {str(m.q[n]):8s} {str(m.epsilon[n]):8s} {str(m.delta[n]):8s} {float(m.a[n]):.3e}  {bound:.4g}")


if __name__ == "__main__":
    main()
