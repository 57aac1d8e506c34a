"""Intersection numbers of simplicial tree pairs via core slices.

Both trees are universal covers of folded graphs, presented by a model
(graph, root vertex, root address): tree vertices are group-element
addresses reachable from the root address by reading graph walks.  The
ambient case roots the full rose at the identity; a minimal subtree of
a subgroup roots its core graph at the end of the arc hanging off the
based Stallings graph.

For trees S and T = S twisted by an automorphism, a pair of edges
(s, t) spans a square of the product core exactly when, for each
orientation of s, boundary points of both one-sided cylinders of s map
into both one-sided cylinders of t.  The slice over t is the set of
such s; its edge count is the length-one contribution to the
intersection number, and the two ways of summing slice volumes (over
target edge orbits and over source edge orbits) must agree.

Boundary membership is semi-decided by a depth-capped ray search: a ray
whose image settles at least ``margin`` edges past the watched edge is
accepted as certifying a boundary point on that side, and a branch
locked that far on the wrong side is pruned.  Exhausting the depth cap
with an unresolved branch raises MarginExceeded rather than guessing.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

from .bounds import complexity, lambda_of_aut
from .errors import (
    CyclicSubgroup,
    IncompatibleSpecs,
    MarginExceeded,
    RankMismatch,
    UnstableComputation,
)
from .graphs import CoreGraph, _trim, graph_from_generators
from .words import (
    Automorphism,
    Word,
    concat,
    inverse_word,
    letter_name,
    word_key,
)

_DFS_NODE_CAP = 500_000
_BALL_RETRIES = 4


@dataclass(frozen=True)
class TreeSpec:
    """A free simplicial tree: the rose's universal cover, or the
    minimal subtree of a noncyclic subgroup given by its core graph."""

    rank: int
    core: CoreGraph | None = None  # None means the full rose

    @classmethod
    def unit_rose(cls, rank: int) -> "TreeSpec":
        return cls(rank, None)

    @classmethod
    def minimal_subtree(cls, core: CoreGraph) -> "TreeSpec":
        if core.subgroup_rank < 2:
            raise CyclicSubgroup("minimal subtrees require subgroup rank >= 2")
        return cls(core.rank, core)


@dataclass(frozen=True)
class _TreeModel:
    graph: CoreGraph
    root: int
    root_address: Word

    @classmethod
    def full_rose(cls, rank: int) -> "_TreeModel":
        edges = tuple((0, 0, l) for l in range(1, rank + 1))
        return cls(CoreGraph(rank, 1, edges), 0, ())

    @classmethod
    def from_generators(cls, gens: Iterable[Word], rank: int) -> "_TreeModel":
        """Model the minimal subtree of <gens> anchored at the vertex of
        the ambient tree nearest to the identity."""
        based = graph_from_generators(gens, rank, based=True)
        edge_set = set(based.edges)
        core_edges = _trim(edge_set, None)
        core_vertices = {v for e in core_edges for v in (e[0], e[1])}
        arc: list[int] = []
        v = based.basepoint
        prev_edge = None
        while v not in core_vertices:
            options = [(c, w) for c, w in sorted(based.adjacency[v].items())
                       if (v, w, c) != prev_edge]
            # the hanging arc is a simple path: exactly one way forward
            c, w = options[0]
            arc.append(c)
            prev_edge = (w, v, -c)
            v = w
        verts = sorted(core_vertices)
        idx = {u: i for i, u in enumerate(verts)}
        renumbered = tuple(sorted((idx[s], idx[t], l) for s, t, l in core_edges))
        graph = CoreGraph(rank, len(verts), renumbered)
        return cls(graph, idx[v], tuple(arc))

    @property
    def is_full(self) -> bool:
        return (self.graph.n_vertices == 1 and self.root_address == ()
                and self.graph.volume == self.graph.rank)

    def step(self, state: tuple[int, Word], c: int) -> tuple[int, Word] | None:
        q, addr = state
        q2 = self.graph.step(q, c)
        if q2 is None:
            return None
        if addr and addr[-1] == -c:
            return (q2, addr[:-1])
        return (q2, addr + (c,))

    def directions(self, q: int) -> tuple[int, ...]:
        return tuple(sorted(self.graph.adjacency[q], key=lambda c: (abs(c), c < 0)))

    def address_of(self) -> dict[int, tuple[int, Word]]:
        """Deterministic lift of every graph vertex: root-first BFS."""
        from collections import deque

        out = {self.root: (self.root, self.root_address)}
        queue = deque([self.root])
        while queue:
            q = queue.popleft()
            for c in self.directions(q):
                st = self.step(out[q], c)
                if st is not None and st[0] not in out:
                    out[st[0]] = st
                    queue.append(st[0])
        return out

    def project(self, point: Word) -> tuple[int, Word]:
        """Closest-point projection of an ambient vertex onto the
        subtree, as a model state."""
        if self.is_full:
            return (0, point)
        rel = concat(inverse_word(self.root_address), point)
        state = (self.root, self.root_address)
        for c in rel:
            nxt = self.step(state, c)
            if nxt is None:
                break
            state = nxt
        return state


@dataclass(frozen=True)
class MorphismMap:
    """Equivariant map between tree models: a vertex at address g goes
    to the projection of psi(g) into the target; each source edge orbit
    maps over a fixed reduced target path."""

    source: _TreeModel
    target: _TreeModel
    psi: Automorphism
    edge_paths: tuple[Word, ...]  # per source.graph.edges entry
    ell: int

    def vertex_image(self, addr: Word) -> Word:
        return self.target.project(self.psi.apply(addr))[1]

    def vertex_image_raw(self, raw: Word) -> Word:
        """Image of a vertex whose psi-word is already known."""
        return self.target.project(raw)[1]


def morphism_between(source: TreeSpec, target: TreeSpec, phi: Automorphism) -> MorphismMap:
    """Build the change-of-marking morphism between two tree specs."""
    if source.rank != target.rank or phi.rank != source.rank:
        raise RankMismatch("tree specs and automorphism must share a rank")
    src = _model_of(source)
    tgt = _model_of(target)
    return _build_morphism(src, tgt, phi)


def _model_of(spec: TreeSpec) -> _TreeModel:
    if spec.core is None:
        return _TreeModel.full_rose(spec.rank)
    return _TreeModel.from_generators(spec.core.free_basis(), spec.rank)


def _build_morphism(src: _TreeModel, tgt: _TreeModel, psi: Automorphism) -> MorphismMap:
    lifts = src.address_of()
    paths = []
    for s, t, l in src.graph.edges:
        a1 = lifts[s][1]
        st2 = src.step(lifts[s], l)
        img1 = tgt.project(psi.apply(a1))[1]
        img2 = tgt.project(psi.apply(st2[1]))[1]
        path = concat(inverse_word(img1), img2)
        if not path:
            raise IncompatibleSpecs(
                "restriction collapses an edge; no morphism between these models")
        paths.append(path)
    return MorphismMap(src, tgt, psi, tuple(paths), max(len(p) for p in paths))


@dataclass(frozen=True)
class Slice:
    """All source edges spanning core squares over one target edge."""

    target_edge: str
    edges: tuple[tuple[Word, int], ...]
    diameter: int
    preimage_count: int
    connected: bool

    @property
    def volume(self) -> int:
        return len(self.edges)

    def to_json_dict(self) -> dict:
        return {
            "target_edge": self.target_edge,
            "volume": self.volume,
            "diameter": self.diameter,
            "preimage_count": self.preimage_count,
            "connected": self.connected,
            "edges": [f"{_addr_str(a)}:{letter_name(l)}" for a, l in self.edges],
        }


def _addr_str(addr: Word) -> str:
    return ".".join(letter_name(c) for c in addr) if addr else "-"


def _crossings_of_path(start: Word, path: Word, tau: Word, c_t: int) -> int:
    """How often the path from `start` reading `path` traverses the
    target edge (tau -> tau.c_t), in either direction."""
    count = 0
    cur = list(start)
    tau_t = concat(tau, (c_t,))
    for i, c in enumerate(path):
        here = tuple(cur)
        if here == tau and c == c_t:
            count += 1
        elif here == tau_t and c == -c_t:
            count += 1
        if cur and cur[-1] == -c:
            cur.pop()
        else:
            cur.append(c)
    return count


def _candidate_edges(fwd: MorphismMap, rev: MorphismMap, tau_state: tuple[int, Word],
                     c_t: int):
    """Crossing edges of the target edge's midpoint preimage, plus the
    subtree they span.  Returns (candidates, preimage_count) where
    candidates maps (address, letter) -> source state of the edge's
    source endpoint."""
    src = fwd.source
    tau = tau_state[1]
    crossing: list[tuple[tuple[int, Word], int, int]] = []
    if src.is_full:
        psi_inv = fwd.psi.inverse()
        for z in range(1, src.graph.rank + 1):
            img = fwd.psi.images[z - 1]
            prefix: Word = ()
            for j, c in enumerate(img):
                if c == c_t:
                    u = psi_inv.apply(concat(tau, inverse_word(prefix)))
                    crossing.append(((0, u), z, 1))
                elif c == -c_t:
                    u = psi_inv.apply(concat(tau, (c_t,), inverse_word(prefix)))
                    crossing.append(((0, u), z, 1))
                prefix = concat(prefix, (c,))
    else:
        crossing = _ball_crossings(fwd, rev, tau_state, c_t)
    preimage_count = sum(n for _, _, n in crossing)
    if not crossing:
        return {}, 0
    crossing.sort(key=lambda e: (word_key(e[0][1]), e[1]))
    candidates: dict[tuple[Word, int], tuple[int, Word]] = {}
    endpoints: list[tuple[int, Word]] = []
    for st, l, _ in crossing:
        candidates[(st[1], l)] = st
        endpoints.append(st)
        endpoints.append(fwd.source.step(st, l))
    # span: geodesics from one endpoint to all others stay in the
    # subtree and cover the convex hull
    base = endpoints[0]
    for other in endpoints[1:]:
        path = concat(inverse_word(base[1]), other[1])
        state = base
        for c in path:
            nxt = src.step(state, c)
            if nxt is None:
                raise UnstableComputation("hull geodesic left the source model")
            if c > 0:
                candidates.setdefault((state[1], c), state)
            else:
                candidates.setdefault((nxt[1], -c), nxt)
            state = nxt
    return candidates, preimage_count


def _ball_crossings(fwd: MorphismMap, rev: MorphismMap, tau_state, c_t):
    """Crossing edges found by searching a ball around the pulled-back
    edge position; the radius doubles until a shell of silence
    surrounds the hits."""
    from collections import deque

    src = fwd.source
    tau = tau_state[1]
    seed = src.project(rev.psi.apply(tau))
    radius = max(2, (fwd.ell * rev.ell + 1) // 2 + 2)
    for _ in range(_BALL_RETRIES):
        hits: list[tuple[tuple[int, Word], int, int]] = []
        frontier_hit = False
        seen = {seed[1]: 0}
        tested: set[tuple[Word, int]] = set()
        queue = deque([seed])
        while queue:
            state = queue.popleft()
            d = seen[state[1]]
            for c in src.directions(state[0]):
                nxt = src.step(state, c)
                if c > 0:
                    key, key_state = (state[1], c), state
                else:
                    key, key_state = (nxt[1], -c), nxt
                if key not in tested:
                    tested.add(key)
                    img1 = fwd.vertex_image(key[0])
                    img2 = fwd.vertex_image(concat(key[0], (key[1],)))
                    n = _crossings_of_path(img1, concat(inverse_word(img1), img2),
                                           tau, c_t)
                    if n:
                        hits.append((key_state, key[1], n))
                        if d >= radius - 1:
                            frontier_hit = True
                if d < radius and nxt[1] not in seen:
                    seen[nxt[1]] = d + 1
                    queue.append(nxt)
        if not frontier_hit:
            return hits
        radius *= 2
    raise UnstableComputation("crossing-edge ball search failed to stabilize")


def _reachable_sides(fwd: MorphismMap, edge_state: tuple[int, Word], letter: int,
                     orientation: int, tau: Word, c_t: int,
                     depth: int, margin: int) -> set[str]:
    """Which sides of the target edge are limits of images of rays
    crossing the source edge with the given orientation."""
    src = fwd.source
    if orientation > 0:
        start, first = edge_state, letter
    else:
        start, first = src.step(edge_state, letter), -letter
    v1 = src.step(start, first)
    found: set[str] = set()
    capped = False
    nodes = 0
    tau_inv = inverse_word(tau)
    # stack entries: (state, raw psi-image word, last letter, depth)
    raw1 = fwd.psi.apply(v1[1])
    stack = [(v1, raw1, first, 0)]
    while stack:
        state, raw, last, d = stack.pop()
        nodes += 1
        if nodes > _DFS_NODE_CAP:
            raise MarginExceeded("ray search passed its node budget")
        img = fwd.vertex_image_raw(raw)
        rel = concat(tau_inv, img)
        if rel and rel[0] == c_t:
            side, level = "tgt", len(rel) - 1
        else:
            side, level = "src", len(rel)
        if level >= margin:
            found.add(side)
            if len(found) == 2:
                return found
            continue
        if d >= depth:
            capped = True
            continue
        for c in reversed(src.directions(state[0])):
            if c == -last:
                continue
            nxt = src.step(state, c)
            nraw = concat(raw, fwd.psi.image(c))
            stack.append((nxt, nraw, c, d + 1))
    if capped and len(found) < 2:
        raise MarginExceeded(
            "ray search hit the depth cap before the cylinder test settled")
    return found


def slice_over_edge(fwd: MorphismMap, edge_index: int, *,
                    rev: MorphismMap | None = None,
                    depth: int | None = None, margin: int | None = None) -> Slice:
    """Compute the slice of core squares over one target edge orbit.

    ``edge_index`` points into the target model's graph edges.  The
    margin defaults to twice the morphism length; the depth cap covers
    the slice-diameter bound plus working room.
    """
    if rev is None:
        rev = _build_morphism(fwd.target, fwd.source, fwd.psi.inverse())
    lam = max(fwd.ell, rev.ell)
    if margin is None:
        margin = 2 * fwd.ell
    if depth is None:
        depth = 4 * lam * lam + 2 * margin + 4
    tgt = fwd.target
    lifts = tgt.address_of()
    s, t, l = tgt.graph.edges[edge_index]
    tau_state = lifts[s]
    tau = tau_state[1]
    candidates, preimage_count = _candidate_edges(fwd, rev, tau_state, l)
    kept = []
    for (addr, el), state in sorted(candidates.items(),
                                    key=lambda kv: (word_key(kv[0][0]), kv[0][1])):
        ok = True
        for orientation in (1, -1):
            sides = _reachable_sides(fwd, state, el, orientation, tau, l,
                                     depth, margin)
            if sides != {"tgt", "src"}:
                ok = False
                break
        if ok:
            kept.append((addr, el))
    label = _edge_label(tgt, edge_index)
    return Slice(label, tuple(kept), _edge_set_diameter(kept),
                 preimage_count, _edge_set_connected(kept))


def _edge_label(model: _TreeModel, idx: int) -> str:
    s, t, l = model.graph.edges[idx]
    if model.is_full:
        return letter_name(l)
    return f"{s}-{t}:{letter_name(l)}"


def _edge_set_diameter(edges) -> int:
    pts = set()
    for addr, l in edges:
        pts.add(addr)
        pts.add(concat(addr, (l,)))
    pts = sorted(pts, key=word_key)
    best = 0
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = max(best, len(concat(inverse_word(pts[i]), pts[j])))
    return best


def _edge_set_connected(edges) -> bool:
    if not edges:
        return True
    pts = {}
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for addr, l in edges:
        a, b = addr, concat(addr, (l,))
        for p in (a, b):
            parent.setdefault(p, p)
        parent[find(a)] = find(b)
    roots = {find(p) for p in parent}
    return len(roots) == 1


@dataclass(frozen=True)
class IntersectionReport:
    rank: int
    power: int
    lam: int
    ell_forward: int
    ell_backward: int
    depth: int | None
    margin: int | None
    i_value: int
    sum_over_target: int
    sum_over_source: int
    slices_target: tuple[Slice, ...]
    slices_source: tuple[Slice, ...]
    stability_checked: bool

    def to_json_dict(self) -> dict:
        return {
            "rank": self.rank,
            "power": self.power,
            "lambda": self.lam,
            "ell_forward": self.ell_forward,
            "ell_backward": self.ell_backward,
            "depth": self.depth,
            "margin": self.margin,
            "i": self.i_value,
            "sum_over_target": self.sum_over_target,
            "sum_over_source": self.sum_over_source,
            "slices_target": [s.to_json_dict() for s in self.slices_target],
            "slices_source": [s.to_json_dict() for s in self.slices_source],
            "stability_checked": self.stability_checked,
        }


def intersection_number(source: TreeSpec, target: TreeSpec, phi: Automorphism, *,
                        depth: int | None = None, margin: int | None = None,
                        threads: int = 1, check_stability: bool = False,
                        _power: int = 1) -> IntersectionReport:
    """Intersection number of (S, S twisted by phi), with the slice
    volume sums computed over both quotient edge sets and required to
    agree."""
    if source.rank != target.rank or phi.rank != source.rank:
        raise RankMismatch("tree specs and automorphism must share a rank")
    src = _model_of(source)
    tgt = _model_of(target)
    fwd = _build_morphism(src, tgt, phi)
    rev = _build_morphism(tgt, src, phi.inverse())

    jobs = ([("t", fwd, rev, i) for i in range(len(tgt.graph.edges))]
            + [("s", rev, fwd, i) for i in range(len(src.graph.edges))])

    def run(job):
        _, f, r, i = job
        return slice_over_edge(f, i, rev=r, depth=depth, margin=margin)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]
    slices_t = tuple(r for j, r in zip(jobs, results) if j[0] == "t")
    slices_s = tuple(r for j, r in zip(jobs, results) if j[0] == "s")
    sum_t = sum(s.volume for s in slices_t)
    sum_s = sum(s.volume for s in slices_s)
    if sum_t != sum_s:
        raise UnstableComputation(
            f"slice sums disagree: target side {sum_t}, source side {sum_s}")
    report = IntersectionReport(
        source.rank, _power, max(fwd.ell, rev.ell), fwd.ell, rev.ell,
        depth, margin, sum_t, sum_t, sum_s, slices_t, slices_s,
        check_stability)
    if check_stability:
        lam = max(fwd.ell, rev.ell)
        m = margin if margin is not None else 2 * max(fwd.ell, rev.ell)
        d = depth if depth is not None else 4 * lam * lam + 2 * m + 4
        doubled = intersection_number(source, target, phi,
                                      depth=2 * d, margin=2 * m,
                                      threads=threads, _power=_power)
        same_slices = (
            [(s.target_edge, s.edges) for s in report.slices_target + report.slices_source]
            == [(s.target_edge, s.edges) for s in doubled.slices_target + doubled.slices_source])
        if doubled.i_value != report.i_value or not same_slices:
            raise UnstableComputation(
                "doubling depth and margin changed a slice")
    return report


@dataclass(frozen=True)
class IntersectionBoundCheck:
    i_value: int
    bound: int
    ok: bool
    ratio: float


def check_intersection_bound(phi: Automorphism, **opts) -> IntersectionBoundCheck:
    """Test i(T, T phi) <= 2 rank^3 lambda^4."""
    rose = TreeSpec.unit_rose(phi.rank)
    report = intersection_number(rose, rose, phi, **opts)
    lam = lambda_of_aut(phi)
    bound = 2 * phi.rank**3 * lam**4
    return IntersectionBoundCheck(report.i_value, bound,
                                  report.i_value <= bound,
                                  report.i_value / bound)


def restricted_intersection(core: CoreGraph, phi: Automorphism, power: int, *,
                            depth: int | None = None, margin: int | None = None,
                            threads: int = 1) -> IntersectionReport:
    """Intersection number of the minimal subtrees of a noncyclic
    subgroup inside (T, T phi^power)."""
    if core.subgroup_rank < 2:
        raise CyclicSubgroup("restricted intersection needs subgroup rank >= 2")
    if core.rank != phi.rank:
        raise RankMismatch("subgroup graph and automorphism rank differ")
    psi = phi.power(power)
    gens = core.free_basis()
    src = _TreeModel.from_generators(gens, core.rank)
    tgt = _TreeModel.from_generators([psi.apply(w) for w in gens], core.rank)
    fwd = _build_morphism(src, tgt, psi)
    rev = _build_morphism(tgt, src, psi.inverse())
    slices_t = tuple(slice_over_edge(fwd, i, rev=rev, depth=depth, margin=margin)
                     for i in range(len(tgt.graph.edges)))
    slices_s = tuple(slice_over_edge(rev, i, rev=fwd, depth=depth, margin=margin)
                     for i in range(len(src.graph.edges)))
    sum_t = sum(s.volume for s in slices_t)
    sum_s = sum(s.volume for s in slices_s)
    if sum_t != sum_s:
        raise UnstableComputation(
            f"restricted slice sums disagree: {sum_t} vs {sum_s}")
    return IntersectionReport(core.rank, power, max(fwd.ell, rev.ell),
                              fwd.ell, rev.ell, depth, margin,
                              sum_t, sum_t, sum_s, slices_t, slices_s, False)


@dataclass(frozen=True)
class VolumeCheck:
    found: bool
    power: int | None
    trail: tuple[tuple[int, int], ...]  # (power, i value)


def vol_lower_bound_check(phi: Automorphism, p_max: int, *,
                          depth: int | None = None, margin: int | None = None,
                          threads: int = 1) -> VolumeCheck:
    """Search 1 <= P <= p_max for cplx * i(T, T phi^P) >= rank, the
    quotient-volume lower bound that makes enumeration budgets finite."""
    rank = phi.rank
    cplx = complexity(rank)
    rose = TreeSpec.unit_rose(rank)
    trail = []
    for p in range(1, p_max + 1):
        rep = intersection_number(rose, rose, phi.power(p), depth=depth,
                                  margin=margin, threads=threads, _power=p)
        trail.append((p, rep.i_value))
        if cplx * rep.i_value >= rank:
            return VolumeCheck(True, p, tuple(trail))
    return VolumeCheck(False, None, tuple(trail))
