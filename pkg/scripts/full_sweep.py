"""Exhaustive sketch-scheme sweep over every connected graph of the given sizes.

Too slow for the default test run on one core (hours at n = 8), so it lives
here and reports progress as it goes:

    python3 scripts/full_sweep.py --n 6 7 8 --out sweep.json
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import small_graphs  # noqa: E402
from sweeps import Tally, by_size, sketch_exhaustive  # noqa: E402

from ftlabels.sampling import SeedPair  # noqa: E402

SEEDS = SeedPair(0x5EED_1D, 0x5EED_4)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4, 5, 6, 7, 8])
    ap.add_argument("--fmax", type=int, default=4)
    ap.add_argument("--batch", type=int, default=200, help="graphs between progress lines")
    ap.add_argument("--out")
    args = ap.parse_args()
    groups = by_size(small_graphs(max(args.n)))
    report = {}
    for n in args.n:
        total = Tally()
        gs = groups[n]
        for i in range(0, len(gs), args.batch):
            total.add(sketch_exhaustive(gs[i : i + args.batch], args.fmax, SEEDS))
            print(f"n={n} graphs {min(i + args.batch, len(gs))}/{len(gs)}: {total}", flush=True)
        report[n] = {k: v for k, v in vars(total).items()}
        if args.out:
            Path(args.out).write_text(json.dumps(report, indent=1))
    bad = sum(r["wrong"] + r["bad_paths"] for r in report.values())
    print("PASS" if bad == 0 else f"FAIL ({bad} failures)")
    return 0 if bad == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
