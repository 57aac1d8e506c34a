"""Whitehead automorphisms and greedy volume minimization.

Kind I relabels: a permutation of the basis composed with letter
inversions.  Kind II is determined by a multiplier m and a set S of
signed letters with m in S, m^-1 not in S, acting on each basis letter
x != |m| by

    x -> x m        if x in S and x^-1 not in S,
    x -> m^-1 x     if x^-1 in S and x not in S,
    x -> m^-1 x m   if both are in S,
    x -> x          otherwise,  and m -> m.

Greedy descent through strictly volume-reducing moves reaches the
minimal volume in the automorphism orbit of a core graph; kind I moves
only relabel, so only kind II moves are tried.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import TrivialWord
from .graphs import CoreGraph, apply_aut, cycle_graph
from .words import Automorphism, Word, cyclic_canonical, letter_key, letter_name, signed_letters


@dataclass(frozen=True)
class WhiteheadAut:
    kind: int
    label: str
    aut: Automorphism


def kind_one_auts(rank: int) -> tuple[WhiteheadAut, ...]:
    """All relabelings: n! 2^n automorphisms, identity included."""
    out = []
    for perm in itertools.permutations(range(1, rank + 1)):
        for signs in itertools.product((1, -1), repeat=rank):
            images = tuple((signs[i] * perm[i],) for i in range(rank))
            aut = Automorphism.from_images(rank, images)
            label = "perm(" + ",".join(
                letter_name(signs[i] * perm[i]) for i in range(rank)) + ")"
            out.append(WhiteheadAut(1, label, aut))
    return tuple(out)


def kind_two_auts(rank: int) -> tuple[WhiteheadAut, ...]:
    """All non-identity kind II automorphisms, in a fixed order."""
    out = []
    letters = signed_letters(rank)
    for m in letters:
        others = [c for c in letters if abs(c) != abs(m)]
        for bits in range(1, 1 << len(others)):
            s = {m} | {others[i] for i in range(len(others)) if bits >> i & 1}
            images = []
            for x in range(1, rank + 1):
                if x == abs(m):
                    images.append((x,))
                    continue
                w: Word = (x,)
                if x in s and -x not in s:
                    w = (x, m)
                elif -x in s and x not in s:
                    w = (-m, x)
                elif x in s and -x in s:
                    w = (-m, x, m)
                images.append(w)
            aut = Automorphism.from_images(rank, images)
            label = "m=%s,S={%s}" % (
                letter_name(m),
                ",".join(letter_name(c) for c in sorted(s, key=letter_key)))
            out.append(WhiteheadAut(2, label, aut))
    return tuple(out)


def whitehead_auts(rank: int) -> tuple[WhiteheadAut, ...]:
    return kind_one_auts(rank) + kind_two_auts(rank)


def min_volume(g: CoreGraph):
    """Greedy descent: apply the first strictly volume-reducing kind II
    move until none exists.  Returns (minimal graph, trace of
    (move label, volume) pairs including the start)."""
    moves = kind_two_auts(g.rank)
    trace = [("start", g.volume)]
    while True:
        for mv in moves:
            h = apply_aut(g, mv.aut)
            if h.volume < g.volume:
                g = h
                trace.append((mv.label, g.volume))
                break
        else:
            return g, tuple(trace)


def is_primitive(w: Word, rank: int) -> bool:
    """Whether the cyclic word is part of some basis: its cycle graph
    minimizes to volume 1."""
    cw = cyclic_canonical(w)
    if not cw:
        raise TrivialWord("the trivial word is not primitive")
    if len(cw) == 1:
        return True
    g, _ = min_volume(cycle_graph(cw, rank))
    return g.volume == 1


def is_proper_free_factor(g: CoreGraph, ambient_rank: int) -> bool:
    """Whether the subgroup class is a proper free factor: rank below
    ambient and minimal graph a one-vertex subrose (volume equals
    rank, petals automatically distinct by foldedness)."""
    r = g.subgroup_rank
    if r >= ambient_rank:
        return False
    m, _ = min_volume(g)
    return m.n_vertices == 1 and m.volume == r
