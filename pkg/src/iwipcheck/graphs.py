"""Folded core graphs for finitely generated subgroups.

A graph stores each edge once with a positive letter; traversing
against the arrow reads the inverse letter.  Folded means no vertex has
two outgoing edges with the same letter nor two incoming edges with the
same letter, so walking a reduced word from a vertex is deterministic.
Volume is the edge count.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .errors import EmptyGenerators, IncompatibleSpecs, RankMismatch
from .words import (
    Word,
    concat,
    default_names,
    inverse_word,
    reduce_word,
    signed_letters,
)


@dataclass(frozen=True)
class CoreGraph:
    """Folded graph over a rank-n alphabet; optionally based.

    ``edges`` holds (source, target, letter) triples with letter > 0,
    sorted.  Vertices are 0..n_vertices-1 and the graph is connected.
    """

    rank: int
    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    basepoint: int | None = None

    @cached_property
    def adjacency(self) -> tuple[dict[int, int], ...]:
        """Per-vertex map from signed letter to neighbour."""
        adj: tuple[dict[int, int], ...] = tuple({} for _ in range(self.n_vertices))
        for s, t, l in self.edges:
            adj[s][l] = t
            adj[t][-l] = s
        return adj

    def step(self, v: int, c: int) -> int | None:
        return self.adjacency[v].get(c)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def volume(self) -> int:
        return len(self.edges)

    @property
    def subgroup_rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    @cached_property
    def code(self) -> bytes:
        """Canonical byte string; equal iff the graphs are isomorphic as
        labeled graphs (basepoint-respecting when based)."""
        starts = [self.basepoint] if self.basepoint is not None else range(self.n_vertices)
        best = None
        for s in starts:
            cand = self._code_from(s)
            if best is None or cand < best:
                best = cand
        return best

    def _numbering_from(self, start: int) -> dict[int, int]:
        # Deterministic BFS: directions explored in letter order; folded
        # graphs leave no further choice.
        order = {start: 0}
        queue = deque([start])
        letters = signed_letters(self.rank)
        while queue:
            v = queue.popleft()
            for c in letters:
                w = self.adjacency[v].get(c)
                if w is not None and w not in order:
                    order[w] = len(order)
                    queue.append(w)
        return order

    def _code_from(self, start: int) -> bytes:
        num = self._numbering_from(start)
        rows = sorted((num[s], num[t], l) for s, t, l in self.edges)
        bp = -1 if self.basepoint is None else num[self.basepoint]
        body = ";".join(f"{s},{t},{l}" for s, t, l in rows)
        return f"{self.n_vertices}|{bp}|{body}".encode()

    @cached_property
    def canonical_numbering(self) -> dict[int, int]:
        starts = [self.basepoint] if self.basepoint is not None else range(self.n_vertices)
        best = None
        for s in starts:
            cand = self._code_from(s)
            if best is None or cand < best[0]:
                best = (cand, s)
        return self._numbering_from(best[1])

    def dump(self) -> str:
        """Edge-list text block, one 'source target letter' line per
        edge, under the canonical numbering so isomorphic graphs print
        identically."""
        num = self.canonical_numbering
        names = default_names(self.rank)
        rows = sorted((num[s], num[t], l) for s, t, l in self.edges)
        return "\n".join(f"{s} {t} {names[l - 1]}" for s, t, l in rows)

    def contains(self, w: Word) -> bool:
        """Membership for based graphs: does the loop at the basepoint
        reading w exist?"""
        if self.basepoint is None:
            raise IncompatibleSpecs("membership needs a based graph")
        v = self.basepoint
        for c in reduce_word(w, self.rank):
            v = self.adjacency[v].get(c)
            if v is None:
                return False
        return v == self.basepoint

    def free_basis(self, root: int | None = None) -> tuple[Word, ...]:
        """Words of a free basis of the represented subgroup, read from
        a spanning tree rooted at ``root`` (basepoint or vertex 0)."""
        if root is None:
            root = self.basepoint if self.basepoint is not None else 0
        path: dict[int, Word] = {root: ()}
        parent_edge: dict[int, tuple[int, int, int]] = {}
        queue = deque([root])
        letters = signed_letters(self.rank)
        tree_edges: set[tuple[int, int, int]] = set()
        while queue:
            v = queue.popleft()
            for c in letters:
                w = self.adjacency[v].get(c)
                if w is not None and w not in path:
                    path[w] = path[v] + (c,)
                    tree_edges.add((v, w, c) if c > 0 else (w, v, -c))
                    queue.append(w)
        basis = []
        for s, t, l in self.edges:
            if (s, t, l) in tree_edges:
                continue
            basis.append(concat(path[s], (l,), inverse_word(path[t])))
        return tuple(basis)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)
        return min(ra, rb)


def _fold(n: int, edge_list: list[tuple[int, int, int]], uf: _UnionFind | None = None):
    """Identify edges with equal letter and a shared endpoint until no
    pair remains.  Near-linear worklist over a union-find.
    """
    uf = uf or _UnionFind(n)
    adj: list[dict[int, int]] = [dict() for _ in range(n)]
    merges = deque()

    def insert(u: int, c: int, v: int):
        u, v = uf.find(u), uf.find(v)
        cur = adj[u].get(c)
        if cur is None:
            adj[u][c] = v
        else:
            cur = uf.find(cur)
            adj[u][c] = cur
            if cur != v:
                merges.append((cur, v))

    for s, t, l in edge_list:
        insert(s, l, t)
        insert(t, -l, s)
        while merges:
            a, b = merges.popleft()
            a, b = uf.find(a), uf.find(b)
            if a == b:
                continue
            keep, gone = (a, b) if len(adj[a]) >= len(adj[b]) else (b, a)
            uf.parent[gone] = keep
            moved = adj[gone]
            adj[gone] = {}
            for c, v in moved.items():
                insert(keep, c, v)

    final: set[tuple[int, int, int]] = set()
    for u in range(n):
        if uf.find(u) != u:
            continue
        for c, v in adj[u].items():
            if c > 0:
                final.add((u, uf.find(v), c))
    return final, uf


def _trim(edges: set[tuple[int, int, int]], keep: int | None):
    """Iteratively delete degree<=1 vertices (except ``keep``)."""
    adj: dict[int, set[tuple[int, int, int]]] = {}
    for e in edges:
        adj.setdefault(e[0], set()).add(e)
        adj.setdefault(e[1], set()).add(e)

    def degree(v):
        return sum(2 if e[0] == e[1] else 1 for e in adj[v])

    queue = deque(v for v in adj if v != keep and degree(v) <= 1)
    while queue:
        v = queue.popleft()
        if v == keep or v not in adj or degree(v) > 1:
            continue
        for e in list(adj[v]):
            for endpoint in set((e[0], e[1])):
                adj[endpoint].discard(e)
                if endpoint != v and endpoint != keep and degree(endpoint) <= 1:
                    queue.append(endpoint)
        del adj[v]
    out = set()
    for v, es in adj.items():
        out.update(es)
    return out


def _renumber(rank: int, edges: set[tuple[int, int, int]], basepoint: int | None) -> CoreGraph:
    verts = sorted({v for e in edges for v in (e[0], e[1])}
                   | ({basepoint} if basepoint is not None else set()))
    idx = {v: i for i, v in enumerate(verts)}
    es = tuple(sorted((idx[s], idx[t], l) for s, t, l in edges))
    bp = idx[basepoint] if basepoint is not None else None
    return CoreGraph(rank, len(verts), es, bp)


def graph_from_generators(gens, rank: int, based: bool = False) -> CoreGraph:
    """Fold a wedge of loops labeled by the given words.

    Unbased graphs are trimmed to minimum degree 2 and represent the
    conjugacy class of the subgroup; based graphs keep the basepoint.
    """
    words = [reduce_word(w, rank) for w in gens]
    words = [w for w in words if w]
    if not words:
        raise EmptyGenerators("no nontrivial generators given")
    edges: list[tuple[int, int, int]] = []
    nv = 1
    for w in words:
        prev = 0
        for i, c in enumerate(w):
            nxt = 0 if i == len(w) - 1 else nv
            if nxt != 0:
                nv += 1
            if c > 0:
                edges.append((prev, nxt, c))
            else:
                edges.append((nxt, prev, -c))
            prev = nxt
    folded, uf = _fold(nv, edges)
    bp = uf.find(0)
    trimmed = _trim(folded, bp if based else None)
    if not based:
        if not trimmed:
            raise EmptyGenerators("generators generate the trivial group")
        return _renumber(rank, trimmed, None)
    return _renumber(rank, trimmed, bp)


def cycle_graph(w: Word, rank: int) -> CoreGraph:
    """Unbased core of the cyclic subgroup generated by w."""
    return graph_from_generators([w], rank, based=False)


def apply_aut(g: CoreGraph, phi) -> CoreGraph:
    """Core graph of the image conjugacy class under an automorphism."""
    if phi.rank != g.rank:
        raise RankMismatch("automorphism rank does not match the graph")
    return graph_from_generators([phi.apply(w) for w in g.free_basis()],
                                 g.rank, based=False)


def conjugate_into(a: CoreGraph, b: CoreGraph) -> bool:
    """Whether some conjugate of the subgroup of ``a`` lies in that of
    ``b``: search for a label-preserving graph morphism a -> b.  Folded
    sources make the morphism determined by one vertex image, so every
    seed is propagated and failing vertex pairs are memoized.
    """
    if a.rank != b.rank:
        raise RankMismatch("graphs over different alphabets")
    bad: set[tuple[int, int]] = set()
    for seed in range(b.n_vertices):
        if (0, seed) in bad:
            continue
        mapping = {0: seed}
        queue = deque([0])
        ok = True
        while queue and ok:
            u = queue.popleft()
            for c, v in a.adjacency[u].items():
                img = b.adjacency[mapping[u]].get(c)
                if img is None:
                    bad.add((u, mapping[u]))
                    ok = False
                    break
                if v in mapping:
                    if mapping[v] != img:
                        ok = False
                        break
                else:
                    if (v, img) in bad:
                        ok = False
                        break
                    mapping[v] = img
                    queue.append(v)
        if ok:
            return True
    return False


def pullback(a: CoreGraph, b: CoreGraph) -> tuple[CoreGraph, ...]:
    """Nontrivial core components of the fiber product: every
    intersection of conjugates of the two subgroups, up to conjugacy,
    sorted by (volume, code)."""
    if a.rank != b.rank:
        raise RankMismatch("graphs over different alphabets")
    pair_id = {}

    def pid(u, v):
        if (u, v) not in pair_id:
            pair_id[(u, v)] = len(pair_id)
        return pair_id[(u, v)]

    edges = []
    for (s1, t1, l1) in a.edges:
        for (s2, t2, l2) in b.edges:
            if l1 == l2:
                edges.append((pid(s1, s2), pid(t1, t2), l1))
    if not edges:
        return ()
    uf = _UnionFind(len(pair_id))
    for s, t, _ in edges:
        uf.union(s, t)
    by_comp: dict[int, list] = {}
    for e in edges:
        by_comp.setdefault(uf.find(e[0]), []).append(e)
    out = []
    for comp_edges in by_comp.values():
        trimmed = _trim(set(comp_edges), None)
        if trimmed:
            out.append(_renumber(a.rank, trimmed, None))
    out.sort(key=lambda g: (g.volume, g.code))
    return tuple(out)
