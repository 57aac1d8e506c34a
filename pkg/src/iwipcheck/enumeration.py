"""Exhaustive enumeration of core graphs up to a volume budget.

Graphs are grown one edge at a time through connected folded partial
graphs, deduplicated at every level by canonical code, so each
isomorphism class is produced exactly once.  Every connected graph
arises from a one-smaller connected subgraph (drop a non-bridge edge,
or a leaf edge with its leaf), so level-by-level extension is
exhaustive.  Emission is ascending (volume, code).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from .errors import BudgetTooLarge, RankTooSmall
from .graphs import CoreGraph
from .whitehead import is_proper_free_factor

HARD_CANDIDATE_CAP = 10**8


@dataclass(frozen=True)
class EnumerationSpec:
    rank: int
    max_volume: int
    min_rank: int = 1
    max_rank: int | None = None  # None: no cap on subgroup rank
    max_candidates: int = HARD_CANDIDATE_CAP

    def __post_init__(self):
        if self.rank < 1:
            raise RankTooSmall("alphabet rank must be at least 1")
        if self.max_volume < 1:
            raise BudgetTooLarge("volume budget must be at least 1")


def _seed_graphs(rank: int) -> list[CoreGraph]:
    seeds = []
    for l in range(1, rank + 1):
        seeds.append(CoreGraph(rank, 1, ((0, 0, l),)))
        seeds.append(CoreGraph(rank, 2, ((0, 1, l),)))
    return seeds


def _extensions(g: CoreGraph, spec: EnumerationSpec) -> list[CoreGraph]:
    """All one-edge extensions that stay folded, within the rank cap,
    and still completable to minimum degree 2 within the budget."""
    out = []
    nv = g.n_vertices
    remaining = spec.max_volume - g.volume - 1
    max_rank = spec.max_rank

    def try_edge(s, t, l, n_after):
        if l in g.adjacency[s] if s < nv else False:
            return
        # new-vertex targets have no adjacency yet
        if t < nv and -l in g.adjacency[t]:
            return
        edges = tuple(sorted(g.edges + ((s, t, l),)))
        h = CoreGraph(g.rank, n_after, edges)
        if max_rank is not None and h.subgroup_rank > max_rank:
            return
        deficient = sum(1 for v in range(n_after) if h.degree(v) <= 1)
        if (deficient + 1) // 2 > remaining:
            return
        out.append(h)

    for l in range(1, g.rank + 1):
        for s in range(nv):
            if l in g.adjacency[s]:
                continue
            for t in range(nv):
                if -l in g.adjacency[t]:
                    continue
                try_edge(s, t, l, nv)
            try_edge(s, nv, l, nv + 1)
        for t in range(nv):
            if -l in g.adjacency[t]:
                continue
            try_edge(nv, t, l, nv + 1)
    return out


def _expand_level(level: list[CoreGraph], spec: EnumerationSpec,
                  threads: int) -> dict[bytes, CoreGraph]:
    def work(chunk):
        found = {}
        for g in chunk:
            for h in _extensions(g, spec):
                found.setdefault(h.code, h)
        return found

    if threads <= 1 or len(level) < 2 * threads:
        return work(level)
    chunks = [level[i::threads] for i in range(threads)]
    merged: dict[bytes, CoreGraph] = {}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for found in pool.map(work, chunks):
            for code, h in found.items():
                merged.setdefault(code, h)
    return merged


def enumerate_core_graphs(spec: EnumerationSpec, threads: int = 1) -> Iterator[CoreGraph]:
    """Yield every connected folded core graph (minimum degree 2) with
    volume <= max_volume and subgroup rank within the filter, each
    exactly once, ascending by (volume, code)."""
    seen = 0
    level: dict[bytes, CoreGraph] = {}
    for g in _seed_graphs(spec.rank):
        level.setdefault(g.code, g)
    for vol in range(1, spec.max_volume + 1):
        seen += len(level)
        if seen > spec.max_candidates:
            raise BudgetTooLarge(
                f"candidate count passed the cap of {spec.max_candidates}")
        cores = []
        for g in level.values():
            if all(g.degree(v) >= 2 for v in range(g.n_vertices)):
                r = g.subgroup_rank
                if r >= spec.min_rank and (spec.max_rank is None or r <= spec.max_rank):
                    cores.append(g)
        cores.sort(key=lambda g: g.code)
        yield from cores
        if vol == spec.max_volume:
            break
        level = _expand_level(sorted(level.values(), key=lambda g: g.code),
                              spec, threads)


def enumerate_proper_free_factors(spec: EnumerationSpec, threads: int = 1) -> Iterator[CoreGraph]:
    """Stream the enumeration restricted to proper free factor classes
    of the ambient rank."""
    if spec.rank < 2:
        raise RankTooSmall("proper free factors need ambient rank >= 2")
    capped = EnumerationSpec(
        spec.rank, spec.max_volume, spec.min_rank,
        min(spec.rank - 1, spec.max_rank if spec.max_rank is not None else spec.rank - 1),
        spec.max_candidates)
    for g in enumerate_core_graphs(capped, threads=threads):
        if is_proper_free_factor(g, spec.rank):
            yield g
