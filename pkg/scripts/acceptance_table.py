"""Run the acceptance checks and print one line per criterion with its runtime."""

from __future__ import annotations

import argparse
import json

from monograph import acceptance


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)
    ap.add_argument("--only", type=int, nargs="*", help="criterion ids (default: all)")
    ap.add_argument("--verbose", action="store_true", help="also print the recorded values")
    args = ap.parse_args()
    for cid in args.only or acceptance.CHECKS:
        rec, secs = acceptance.timed(cid, args.seed)
        print(f"{cid:2d} {'PASS' if rec['passed'] else 'FAIL'} {secs:6.1f}s  {rec['name']}")
        if args.verbose:
            print(json.dumps(rec["values"], indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
