#!/usr/bin/env python3
"""Dump EXIT-like curves for m = 1..6 to CSV, one file per (family, m, L, w).

The leftmost point of each curve marks the decoding threshold; overlaying
the w=2/L=10 and w=3/L=20 files shows the wiggles shrinking as the
randomization window grows.
"""

import argparse
import sys

from scmn.cli import main as cli_main


def run(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", choices=("cd", "bd"), default="cd")
    ap.add_argument("--m-max", type=int, default=6)
    ap.add_argument("--chi-step", type=float, default=0.005)
    ap.add_argument("--out-prefix", default="exit_curve")
    args = ap.parse_args(argv)

    for L, w in ((10, 2), (20, 3)):
        for m in range(1, args.m_max + 1):
            path = f"{args.out_prefix}_{args.family}_m{m}_L{L}_w{w}.csv"
            print(f"tracing {path}")
            code = cli_main([
                "exit-curve", "--dl", "4", "--dr", "2", "--dg", "2",
                "-L", str(L), "-w", str(w),
                "--channel", args.family, "-m", str(m),
                "--chi-step", str(args.chi_step),
                "--out", path,
            ])
            if code:
                return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
