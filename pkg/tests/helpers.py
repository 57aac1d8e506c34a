"""Independent oracles used to freeze expected values.

Each oracle recomputes a quantity by the most naive method available
so the production implementations are checked against something that
shares no code path with them.
"""

from __future__ import annotations

from collections import deque

from iwipcheck.graphs import CoreGraph
from iwipcheck.whitehead import whitehead_auts
from iwipcheck.words import Word, cyclic_canonical


def set_partitions(items: list):
    """All set partitions, via restricted growth strings."""
    n = len(items)
    if n == 0:
        yield []
        return
    codes = [0] * n

    def rec(i: int, maxcode: int):
        if i == n:
            blocks: dict[int, list] = {}
            for item, c in zip(items, codes):
                blocks.setdefault(c, []).append(item)
            yield [blocks[c] for c in sorted(blocks)]
            return
        for c in range(maxcode + 2):
            codes[i] = c
            yield from rec(i + 1, max(maxcode, c))

    yield from rec(0, -1)


def naive_core_graphs(rank: int, volume: int) -> set[bytes]:
    """Canonical codes of all connected folded core graphs with exactly
    ``volume`` edges, by brute force: assign a letter to each edge,
    glue endpoint slots by every set partition, filter."""
    found: set[bytes] = set()
    slots = list(range(2 * volume))
    letter_choices = _letter_assignments(rank, volume)
    for blocks in set_partitions(slots):
        block_of = {}
        for b, block in enumerate(blocks):
            for s in block:
                block_of[s] = b
        n_vertices = len(blocks)
        for letters in letter_choices:
            edges = tuple(sorted(
                (block_of[2 * i], block_of[2 * i + 1], letters[i])
                for i in range(volume)))
            if _is_folded(edges) and _is_connected(n_vertices, edges) \
                    and _min_degree_two(n_vertices, edges):
                g = CoreGraph(rank, n_vertices, edges)
                found.add(g.code)
    return found


def _letter_assignments(rank: int, volume: int):
    out = [[]]
    for _ in range(volume):
        out = [xs + [l] for xs in out for l in range(1, rank + 1)]
    return [tuple(xs) for xs in out]


def _is_folded(edges) -> bool:
    seen = set()
    for s, t, l in edges:
        if (s, l, "out") in seen or (t, l, "in") in seen:
            return False
        seen.add((s, l, "out"))
        seen.add((t, l, "in"))
    return True


def _is_connected(n_vertices: int, edges) -> bool:
    if n_vertices == 0:
        return False
    adj: dict[int, set[int]] = {v: set() for v in range(n_vertices)}
    for s, t, _ in edges:
        adj[s].add(t)
        adj[t].add(s)
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == n_vertices


def _min_degree_two(n_vertices: int, edges) -> bool:
    deg = [0] * n_vertices
    for s, t, _ in edges:
        deg[s] += 1
        deg[t] += 1
    return all(d >= 2 for d in deg)


def orbit_search_primitive(w: Word, rank: int) -> bool:
    """Breadth-first Whitehead-orbit primitivity oracle: explore all
    classes reachable without increasing cyclic length; primitive iff
    a length-1 class appears."""
    start = cyclic_canonical(w)
    if not start:
        return False
    auts = [wa.aut for wa in whitehead_auts(rank)]
    seen = {start}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if len(cur) == 1:
            return True
        for aut in auts:
            nxt = cyclic_canonical(aut.apply(cur))
            if len(nxt) <= len(start) and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return False


def all_cyclic_classes(rank: int, max_len: int) -> list[Word]:
    """Every nontrivial cyclic class (up to rotation and inversion) of
    cyclic length at most max_len."""
    letters = [c for i in range(1, rank + 1) for c in (i, -i)]
    out: set[Word] = set()
    stack: list[Word] = [()]
    while stack:
        word = stack.pop()
        if word:
            canon = cyclic_canonical(word)
            if canon and len(canon) == len(word):
                out.add(canon)
        if len(word) < max_len:
            for c in letters:
                if word and word[-1] == -c:
                    continue
                stack.append(word + (c,))
    return sorted(out, key=lambda w: (len(w), w))
