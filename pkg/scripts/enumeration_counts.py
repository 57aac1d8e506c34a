#!/usr/bin/env python3
"""Tabulate counts of folded core graphs by volume and subgroup rank.

Useful for sizing enumeration budgets: the per-volume counts grow
quickly with rank, which is why the decision pipeline filters to
proper free factor classes before running orbit checks.
"""

import argparse
import time

from iwipcheck.enumeration import EnumerationSpec, enumerate_core_graphs
from iwipcheck.whitehead import is_proper_free_factor


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rank", type=int, default=2)
    parser.add_argument("--max-volume", type=int, default=4)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    spec = EnumerationSpec(rank=args.rank, max_volume=args.max_volume)
    counts = {}
    factor_counts = {}
    t0 = time.perf_counter()
    for g in enumerate_core_graphs(spec, threads=args.threads):
        key = (g.volume, g.subgroup_rank)
        counts[key] = counts.get(key, 0) + 1
        if g.subgroup_rank < args.rank and is_proper_free_factor(g, args.rank):
            factor_counts[key] = factor_counts.get(key, 0) + 1
    elapsed = time.perf_counter() - t0

    print(f"ambient rank {args.rank}, volumes 1..{args.max_volume}")
    print(f"{'volume':>6} {'subgroup rank':>13} {'cores':>7} {'free factors':>13}")
    for key in sorted(counts):
        v, r = key
        print(f"{v:>6} {r:>13} {counts[key]:>7} {factor_counts.get(key, 0):>13}")
    print(f"total cores: {sum(counts.values())}; "
          f"total proper free factors: {sum(factor_counts.values())}")
    print(f"elapsed: {elapsed:.1f}s")


if __name__ == "__main__":
    main()
