#!/usr/bin/env python3
"""Sweep intersection numbers over short products of Nielsen generators.

Prints one row per distinct automorphism with its lambda, i value, the
inequality bound 2 rk^3 lambda^4, and the slice count on each side.
"""

import argparse
import itertools
import time

from iwipcheck.intersection import TreeSpec, intersection_number
from iwipcheck.words import Alphabet, Automorphism, nielsen_generators


def distinct_products(rank, max_factors):
    singles = list(nielsen_generators(rank).values())
    seen = {Automorphism.identity(rank).images: Automorphism.identity(rank)}
    for n in range(1, max_factors + 1):
        for combo in itertools.product(singles, repeat=n):
            phi = combo[0]
            for g in combo[1:]:
                phi = phi.compose(g)
            seen.setdefault(phi.images, phi)
    return [seen[k] for k in sorted(seen)]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rank", type=int, default=2)
    parser.add_argument("--max-factors", type=int, default=2,
                        help="max number of Nielsen factors (default 2)")
    parser.add_argument("--check-stability", action="store_true",
                        help="recompute each value at doubled depth and margin")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    alphabet = Alphabet.of_rank(args.rank)
    rose = TreeSpec.unit_rose(args.rank)
    auts = distinct_products(args.rank, args.max_factors)
    print(f"{len(auts)} distinct automorphisms from products of "
          f"<= {args.max_factors} Nielsen generators at rank {args.rank}")
    print(f"{'images':<28} {'lam':>3} {'i':>4} {'bound':>6} {'slices':>7}")

    t0 = time.perf_counter()
    worst = 0.0
    for phi in auts:
        rep = intersection_number(rose, rose, phi, threads=args.threads,
                                  check_stability=args.check_stability)
        bound = 2 * args.rank**3 * rep.lam**4
        worst = max(worst, rep.i_value / bound)
        images = ", ".join(alphabet.format_word(w) for w in phi.images)
        n_slices = len(rep.slices_target) + len(rep.slices_source)
        print(f"{images:<28} {rep.lam:>3} {rep.i_value:>4} {bound:>6} "
              f"{n_slices:>7}")
    print(f"worst i/bound ratio: {worst:.6f}")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
