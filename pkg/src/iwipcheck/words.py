"""Reduced words over a signed basis and basis-image automorphisms.

A letter is a nonzero int: ``+i`` is the i-th basis letter, ``-i`` its
inverse (1-based, so rank 2 uses {1, -1, 2, -2}).  A word is a tuple of
letters carrying no adjacent cancelling pair.  Letters are ordered
``a < a^-1 < b < b^-1 < ...``; canonical forms below always refer to
this order.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .errors import (
    NotAnAutomorphism,
    RankMismatch,
    ResourceError,
    UnknownGenerator,
    UnknownLetter,
)

Word = tuple[int, ...]

_ASCII_NAMES = "abcdefghijklmnopqrstuvwxyz"

# Cap on the breadth-first plateau search used while inverting a basis
# map.  Any honest basis at desk scale resolves in a handful of states.
_PLATEAU_CAP = 200_000


def letter_name(c: int, names: tuple[str, ...] | None = None) -> str:
    """Printable form of a signed letter, e.g. 1 -> 'a', -2 -> 'b^-1'."""
    base = names[abs(c) - 1] if names else default_names(abs(c))[abs(c) - 1]
    return base if c > 0 else base + "^-1"


def default_names(rank: int) -> tuple[str, ...]:
    if rank <= len(_ASCII_NAMES):
        return tuple(_ASCII_NAMES[:rank])
    return tuple(f"x{i}" for i in range(1, rank + 1))


def letter_key(c: int) -> tuple[int, int]:
    """Sort key realizing the order a < a^-1 < b < b^-1 < ..."""
    return (abs(c), 0 if c > 0 else 1)


def word_key(w: Word) -> tuple[tuple[int, int], ...]:
    return tuple(letter_key(c) for c in w)


def signed_letters(rank: int) -> tuple[int, ...]:
    """All signed letters in canonical order."""
    out = []
    for i in range(1, rank + 1):
        out.append(i)
        out.append(-i)
    return tuple(out)


def check_letters(seq, rank: int) -> None:
    for c in seq:
        if not isinstance(c, int) or c == 0 or abs(c) > rank:
            raise UnknownLetter(f"letter {c!r} not in a rank-{rank} basis")


def reduce_word(seq, rank: int | None = None) -> Word:
    """Freely reduce a letter sequence in one stack pass.

    >>> reduce_word([1, 2, -2, -1, 2])
    (2,)
    """
    if rank is not None:
        check_letters(seq, rank)
    out: list[int] = []
    for c in seq:
        if out and out[-1] == -c:
            out.pop()
        else:
            out.append(c)
    return tuple(out)


def inverse_word(w: Word) -> Word:
    return tuple(-c for c in reversed(w))


def concat(*ws: Word) -> Word:
    """Reduced product of already-reduced words."""
    out: list[int] = []
    for w in ws:
        for c in w:
            if out and out[-1] == -c:
                out.pop()
            else:
                out.append(c)
    return tuple(out)


def cyclic_reduce(w: Word) -> Word:
    """Strip matching conjugating letters from both ends.

    >>> cyclic_reduce((2, 1, -2))
    (1,)
    """
    w = reduce_word(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def is_cyclically_reduced(w: Word) -> bool:
    return len(w) < 2 or w[0] != -w[-1]


def cyclic_canonical(w: Word) -> Word:
    """Canonical representative of the cyclic word up to rotation and
    inversion: the lexicographically least rotation of the cyclically
    reduced word or of its inverse.

    >>> cyclic_canonical((2, 1))
    (1, 2)
    >>> cyclic_canonical((-1,))
    (1,)
    """
    w = cyclic_reduce(w)
    if not w:
        return ()
    best = None
    for cand in (w, inverse_word(w)):
        for k in range(len(cand)):
            rot = cand[k:] + cand[:k]
            key = word_key(rot)
            if best is None or key < best[0]:
                best = (key, rot)
    return best[1]


@dataclass(frozen=True)
class Alphabet:
    """Named basis letters; purely a parsing/printing aid."""

    names: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise UnknownLetter(f"duplicate basis names in {self.names}")

    @classmethod
    def of_rank(cls, rank: int) -> "Alphabet":
        return cls(default_names(rank))

    @property
    def rank(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        """Signed letter for a token such as 'a', 'b^-1' or 'a^3' is not
        handled here; this maps a bare name to its positive letter."""
        try:
            return self.names.index(name) + 1
        except ValueError:
            raise UnknownLetter(f"unknown basis letter {name!r}") from None

    def parse_word(self, text: str) -> Word:
        """Parse a whitespace-separated word; tokens allow ^exponent.

        >>> Alphabet.of_rank(2).parse_word("a b^-1 a^2")
        (1, -2, 1, 1)
        """
        letters: list[int] = []
        for tok in text.split():
            name, exp = _split_exponent(tok)
            c = self.index(name)
            letters.extend([c if exp > 0 else -c] * abs(exp))
        return reduce_word(letters)

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        return " ".join(letter_name(c, self.names) for c in w)


def _split_exponent(tok: str) -> tuple[str, int]:
    if "^" in tok:
        name, _, e = tok.partition("^")
        try:
            exp = int(e)
        except ValueError:
            raise UnknownLetter(f"bad exponent in token {tok!r}") from None
        if not name or exp == 0:
            raise UnknownLetter(f"bad token {tok!r}")
        return name, exp
    return tok, 1


@dataclass(frozen=True)
class Automorphism:
    """An automorphism given by basis images, with the inverse cached.

    Both image tuples are stored freely reduced; ``from_images`` checks
    the defining tuple really is a basis and computes the inverse.
    """

    rank: int
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]

    @classmethod
    def identity(cls, rank: int) -> "Automorphism":
        imgs = tuple((i,) for i in range(1, rank + 1))
        return cls(rank, imgs, imgs)

    @classmethod
    def from_images(cls, rank: int, images, inverse_images=None) -> "Automorphism":
        imgs = tuple(reduce_word(w, rank) for w in images)
        if len(imgs) != rank:
            raise RankMismatch(f"need {rank} images, got {len(imgs)}")
        if inverse_images is None:
            inv = _invert_images(rank, imgs)
        else:
            inv = tuple(reduce_word(w, rank) for w in inverse_images)
        aut = cls(rank, imgs, inv)
        for i in range(1, rank + 1):
            if aut.apply(aut.inverse_images[i - 1]) != (i,):
                raise NotAnAutomorphism(
                    f"claimed inverse fails on basis letter {i}"
                )
        return aut

    def image(self, c: int) -> Word:
        """Image of a signed letter."""
        w = self.images[abs(c) - 1]
        return w if c > 0 else inverse_word(w)

    def apply(self, w) -> Word:
        out: list[int] = []
        for c in w:
            for d in (self.images[c - 1] if c > 0
                      else inverse_word(self.images[-c - 1])):
                if out and out[-1] == -d:
                    out.pop()
                else:
                    out.append(d)
        return tuple(out)

    def apply_inverse(self, w) -> Word:
        return self.inverse().apply(w)

    def inverse(self) -> "Automorphism":
        return Automorphism(self.rank, self.inverse_images, self.images)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self after other: (self.compose(other))(w) = self(other(w))."""
        if self.rank != other.rank:
            raise RankMismatch("cannot compose automorphisms of different rank")
        imgs = tuple(self.apply(w) for w in other.images)
        inv = tuple(other.inverse().apply(w) for w in self.inverse_images)
        return Automorphism(self.rank, imgs, inv)

    def power(self, k: int) -> "Automorphism":
        if k < 0:
            return self.inverse().power(-k)
        out = Automorphism.identity(self.rank)
        for _ in range(k):
            out = self.compose(out)
        return out

    def is_identity(self) -> bool:
        return all(w == (i + 1,) for i, w in enumerate(self.images))

    def max_image_length(self) -> int:
        return max(max((len(w) for w in self.images), default=1), 1)


def _abelianized_det(rank: int, images) -> int:
    """Integer determinant of the exponent-sum matrix (Bareiss)."""
    m = [[0] * rank for _ in range(rank)]
    for i, w in enumerate(images):
        for c in w:
            m[i][abs(c) - 1] += 1 if c > 0 else -1
    sign = 1
    prev = 1
    for k in range(rank - 1):
        if m[k][k] == 0:
            for r in range(k + 1, rank):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, rank):
            for j in range(k + 1, rank):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[rank - 1][rank - 1]


def _nielsen_moves(n: int):
    """Deterministic order of two-element multiplications."""
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for pre in (False, True):
                for sgn in (1, -1):
                    yield i, j, pre, sgn


def _apply_move(words, i, j, pre, sgn):
    wj = words[j] if sgn > 0 else inverse_word(words[j])
    return concat(wj, words[i]) if pre else concat(words[i], wj)


def _invert_images(rank: int, images: tuple[Word, ...]) -> tuple[Word, ...]:
    """Invert a basis tuple by Nielsen rewriting.

    Maintains a mirror tuple over a second alphabet so that substituting
    the original images into mirror word i always reproduces current
    word i.  Greedy length descent, with a breadth-first sweep across
    equal-length tuples when the greedy step stalls; a generating tuple
    always ends at single distinct letters.
    """
    if any(len(w) == 0 for w in images):
        raise NotAnAutomorphism("a basis image is trivial")
    if abs(_abelianized_det(rank, images)) != 1:
        raise NotAnAutomorphism("abelianization is not invertible over Z")

    cur = tuple(images)
    mirror = tuple((i,) for i in range(1, rank + 1))

    def descend(words, mir):
        changed = True
        while changed:
            changed = False
            for i, j, pre, sgn in _nielsen_moves(rank):
                new = _apply_move(words, i, j, pre, sgn)
                if len(new) < len(words[i]):
                    words = words[:i] + (new,) + words[i + 1:]
                    mir = mir[:i] + (_apply_move(mir, i, j, pre, sgn),) + mir[i + 1:]
                    changed = True
                    break
        return words, mir

    while True:
        cur, mirror = descend(cur, mirror)
        if all(len(w) == 1 for w in cur):
            break
        # Plateau: breadth-first over equal-total-length tuples until a
        # strictly shorter tuple appears.  Exhaustion means no basis.
        found = _plateau_escape(rank, cur, mirror)
        if found is None:
            raise NotAnAutomorphism("images do not form a basis")
        cur, mirror = found

    seen = set()
    inv: list[Word | None] = [None] * rank
    for i, w in enumerate(cur):
        c = w[0]
        k = abs(c)
        if k in seen:
            raise NotAnAutomorphism("images do not form a basis")
        seen.add(k)
        inv[k - 1] = mirror[i] if c > 0 else inverse_word(mirror[i])
    return tuple(inv)  # type: ignore[arg-type]


def _plateau_escape(rank, words, mirror):
    total = sum(len(w) for w in words)
    start = (words, mirror)
    queue = deque([start])
    visited = {words}
    while queue:
        if len(visited) > _PLATEAU_CAP:
            raise ResourceError("inverse search exceeded its state budget")
        cw, cm = queue.popleft()
        for i, j, pre, sgn in _nielsen_moves(rank):
            new = _apply_move(cw, i, j, pre, sgn)
            nw = cw[:i] + (new,) + cw[i + 1:]
            nm = cm[:i] + (_apply_move(cm, i, j, pre, sgn),) + cm[i + 1:]
            if len(new) < len(cw[i]):
                return nw, nm
            if sum(len(w) for w in nw) == total and nw not in visited:
                visited.add(nw)
                queue.append((nw, nm))
        for i in range(rank):
            nw = cw[:i] + (inverse_word(cw[i]),) + cw[i + 1:]
            if nw not in visited:
                visited.add(nw)
                queue.append((nw, cm[:i] + (inverse_word(cm[i]),) + cm[i + 1:]))
    return None


def parse_phi(tokens, generators: dict[str, Automorphism], rank: int):
    """Compose a word in named generators into one automorphism.

    ``tokens`` is a sequence such as ["L", "R^-1", "S^2"].  The word acts
    by function composition read left to right applying the rightmost
    factor first, so "L R" maps w to L(R(w)).  Returns the composite and
    the word length (sum of absolute exponents).
    """
    expanded: list[Automorphism] = []
    length = 0
    for tok in tokens:
        name, exp = _split_exponent(tok)
        if name not in generators:
            raise UnknownGenerator(f"generator {name!r} was never declared")
        g = generators[name]
        if g.rank != rank:
            raise RankMismatch(f"generator {name!r} has rank {g.rank}, expected {rank}")
        step = g if exp > 0 else g.inverse()
        expanded.extend([step] * abs(exp))
        length += abs(exp)
    phi = Automorphism.identity(rank)
    for g in expanded:
        phi = phi.compose(g)
    return phi, length


def nielsen_generators(rank: int) -> dict[str, Automorphism]:
    """Standard finite generating set of the automorphism group:
    right multiplications x_i -> x_i x_j, letter inversions, and
    transpositions.  Every image and inverse image has length <= 2.
    """
    names = default_names(rank)
    gens: dict[str, Automorphism] = {}
    ident = [(i,) for i in range(1, rank + 1)]
    for i, j in itertools.permutations(range(1, rank + 1), 2):
        imgs = list(ident)
        imgs[i - 1] = (i, j)
        gens[f"R{names[i - 1]}{names[j - 1]}"] = Automorphism.from_images(rank, imgs)
    for i in range(1, rank + 1):
        imgs = list(ident)
        imgs[i - 1] = (-i,)
        gens[f"I{names[i - 1]}"] = Automorphism.from_images(rank, imgs)
    for i, j in itertools.combinations(range(1, rank + 1), 2):
        imgs = list(ident)
        imgs[i - 1] = (j,)
        imgs[j - 1] = (i,)
        gens[f"P{names[i - 1]}{names[j - 1]}"] = Automorphism.from_images(rank, imgs)
    return gens
