#!/usr/bin/env python3
"""Track core volumes of a free factor class under iteration.

Reads a problem file, applies phi repeatedly to a starting subgroup,
and prints the volume at each step.  Exponential growth is typical for
irreducible automorphisms; a periodic trail certifies reducibility.
"""

import argparse
import sys
import time

from iwipcheck.decider import orbit_periodic, parse_problem
from iwipcheck.graphs import graph_from_generators
from iwipcheck.words import parse_phi


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("file", help="problem file with rank, gens, and phi")
    parser.add_argument("--subgroup", default="a",
                        help="comma-separated generator words (default 'a')")
    parser.add_argument("--steps", type=int, default=12)
    parser.add_argument("--volume-cap", type=int, default=10**6)
    args = parser.parse_args()

    spec = parse_problem(open(args.file).read())
    phi, _ = parse_phi(spec.phi_word, spec.generators, spec.rank)
    alphabet = spec.alphabet
    gens = [alphabet.parse_word(w) for w in args.subgroup.split(",")]
    graph = graph_from_generators(gens, spec.rank)

    t0 = time.perf_counter()
    result = orbit_periodic(graph, phi, args.steps,
                            orbit_volume_cap=args.volume_cap)
    print(f"subgroup <{args.subgroup}>, rank {graph.subgroup_rank}, "
          f"{len(result.volumes) - 1} steps")
    for step, vol in enumerate(result.volumes):
        print(f"  step {step:>3}: volume {vol}")
    if result.kind == "periodic":
        print(f"periodic with period {result.period}: reducibility witness")
    elif result.kind == "inconclusive":
        print(f"abandoned at the volume cap {args.volume_cap}")
    else:
        print("no repeat within the step budget")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
