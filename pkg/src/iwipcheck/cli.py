"""Command line front end.

Subcommands: decide (full pipeline on a problem file), enumerate (core
graph counts), bound (magnitude report), intersect (tree intersection
number), whitehead (volume minimization of a cyclic word).

Exit codes: 0 on a produced result, 1 on input errors, 2 when a
resource guard stops the computation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .bounds import bound_report, lambda_of_aut
from .decider import ProblemSpec, decide, parse_problem
from .enumeration import EnumerationSpec, enumerate_core_graphs, enumerate_proper_free_factors
from .errors import InputError, ResourceError
from .intersection import TreeSpec, check_intersection_bound, intersection_number
from .whitehead import is_primitive, min_volume
from .words import Alphabet, Automorphism, cyclic_canonical, parse_phi
from .graphs import cycle_graph


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as input errors (exit 1)."""

    def error(self, message):
        raise InputError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="iwipcheck",
                     description="decide reducibility of free group outer automorphisms")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide", help="run the reducibility pipeline on a problem file")
    p.add_argument("file", type=Path)
    p.add_argument("--budget", type=int, default=None,
                   help="max enumeration volume (default 4)")
    p.add_argument("--period-max", type=int, default=None,
                   help="max orbit period to test (default min(Q, 64))")
    p.add_argument("--quickcheck-len", type=int, default=None,
                   help="max cyclic length for the primitive-class screen (default 6)")
    p.add_argument("--orbit-volume-cap", type=int, default=None,
                   help="abandon an orbit when volumes pass this cap (default 10^6)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timings in JSON output")

    p = sub.add_parser("enumerate", help="count folded core graphs by volume")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--volume", type=int, required=True)
    p.add_argument("--free-factors", action="store_true",
                   help="restrict to proper free factor classes")
    p.add_argument("--dump-graphs", action="store_true",
                   help="print each graph's canonical edge list")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("bound", help="report the enumeration bound arithmetic")
    p.add_argument("file", type=Path)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("intersect", help="intersection number of the tree pair of phi")
    p.add_argument("file", type=Path)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--margin", type=int, default=None)
    p.add_argument("--check-stability", action="store_true",
                   help="recompute with doubled depth and margin")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("whitehead", help="volume-minimize a cyclic word")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--word", required=True,
                   help="whitespace-separated letters, e.g. 'a b a^-1'")
    p.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def _load_spec(path: Path) -> ProblemSpec:
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return parse_problem(text)


def _cmd_decide(args) -> int:
    spec = _load_spec(args.file)
    overrides = {name: getattr(args, name) for name in
                 ("budget", "period_max", "quickcheck_len", "orbit_volume_cap")
                 if getattr(args, name) is not None}
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    report = decide(spec, threads=args.threads)
    if args.format == "json":
        sys.stdout.write(report.canonical_json(include_timings=args.timings))
    else:
        sys.stdout.write(report.format_text())
    return 0


def _cmd_enumerate(args) -> int:
    spec = EnumerationSpec(rank=args.rank, max_volume=args.volume,
                           min_rank=1,
                           max_rank=args.rank - 1 if args.free_factors else None)
    stream = (enumerate_proper_free_factors(spec, threads=args.threads)
              if args.free_factors
              else enumerate_core_graphs(spec, threads=args.threads))
    by_volume: dict[int, int] = {}
    dumps: list[str] = []
    for g in stream:
        by_volume[g.volume] = by_volume.get(g.volume, 0) + 1
        if args.dump_graphs:
            dumps.append(" ; ".join(g.dump().splitlines()))
    total = sum(by_volume.values())
    if args.format == "json":
        out = {
            "rank": args.rank,
            "max_volume": args.volume,
            "free_factors": bool(args.free_factors),
            "counts_by_volume": {str(v): by_volume[v] for v in sorted(by_volume)},
            "total": total,
        }
        if args.dump_graphs:
            out["graphs"] = dumps
        sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    else:
        for v in sorted(by_volume):
            sys.stdout.write(f"volume {v}: {by_volume[v]}\n")
        sys.stdout.write(f"total: {total}\n")
        for d in dumps:
            sys.stdout.write(d + "\n")
    return 0


def _cmd_bound(args) -> int:
    spec = _load_spec(args.file)
    _, phi_length = parse_phi(spec.phi_word, spec.generators, spec.rank)
    gens = list(spec.generators.values()) or [Automorphism.identity(spec.rank)]
    report = bound_report(spec.rank, gens, phi_length)
    if args.format == "json":
        sys.stdout.write(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(report.format_text())
    return 0


def _cmd_intersect(args) -> int:
    spec = _load_spec(args.file)
    phi, _ = parse_phi(spec.phi_word, spec.generators, spec.rank)
    psi = phi.power(args.power)
    rose = TreeSpec.unit_rose(spec.rank)
    report = intersection_number(rose, rose, psi, depth=args.depth,
                                 margin=args.margin, threads=args.threads,
                                 check_stability=args.check_stability,
                                 _power=args.power)
    lam = lambda_of_aut(psi)
    bound = 2 * spec.rank**3 * lam**4
    if args.format == "json":
        out = report.to_json_dict()
        out["i_bound"] = bound
        out["i_bound_ok"] = report.i_value <= bound
        sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(f"i(T, T phi^{args.power}) = {report.i_value}\n")
        sys.stdout.write(f"sums: target side {report.sum_over_target}, "
                         f"source side {report.sum_over_source}\n")
        sys.stdout.write(f"lambda = {report.lam}; bound 2 rk^3 lambda^4 = {bound}; "
                         f"holds: {report.i_value <= bound}\n")
        for s in report.slices_target:
            sys.stdout.write(f"slice over {s.target_edge}: volume {s.volume}, "
                             f"diameter {s.diameter}\n")
    return 0


def _cmd_whitehead(args) -> int:
    alphabet = Alphabet.of_rank(args.rank)
    w = cyclic_canonical(alphabet.parse_word(args.word))
    if not w:
        raise InputError("word is trivial after cyclic reduction")
    graph = cycle_graph(w, args.rank)
    final, trace = min_volume(graph)
    primitive = is_primitive(w, args.rank)
    if args.format == "json":
        out = {
            "rank": args.rank,
            "word": alphabet.format_word(w),
            "min_volume": final.volume,
            "primitive": primitive,
            "trace": [{"move": label, "volume": vol} for label, vol in trace],
        }
        sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(f"word: {alphabet.format_word(w)}\n")
        for label, vol in trace:
            sys.stdout.write(f"  {label}: volume {vol}\n")
        sys.stdout.write(f"min volume: {final.volume}\n")
        sys.stdout.write(f"primitive: {primitive}\n")
    return 0


_COMMANDS = {
    "decide": _cmd_decide,
    "enumerate": _cmd_enumerate,
    "bound": _cmd_bound,
    "intersect": _cmd_intersect,
    "whitehead": _cmd_whitehead,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
