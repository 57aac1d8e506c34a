"""Word arithmetic and automorphism algebra."""

import pytest
from hypothesis import given, settings, strategies as st

from iwipcheck.errors import (
    NotAnAutomorphism,
    RankMismatch,
    UnknownGenerator,
    UnknownLetter,
)
from iwipcheck.words import (
    Alphabet,
    Automorphism,
    concat,
    cyclic_canonical,
    cyclic_reduce,
    inverse_word,
    nielsen_generators,
    parse_phi,
    reduce_word,
)


def letters(rank=2):
    return st.sampled_from([c for i in range(1, rank + 1) for c in (i, -i)])


def raw_words(rank=2, max_size=12):
    return st.lists(letters(rank), max_size=max_size).map(tuple)


def small_auts(rank=2, max_factors=4):
    gens = list(nielsen_generators(rank).values())
    return st.lists(st.sampled_from(gens), max_size=max_factors).map(
        lambda fs: _compose_all(rank, fs))


def _compose_all(rank, factors):
    out = Automorphism.identity(rank)
    for f in factors:
        out = out.compose(f)
    return out


def test_reduce_word_examples():
    assert reduce_word((1, -1), 2) == ()
    assert reduce_word((1, 2, -2, -1, 2), 2) == (2,)
    assert reduce_word((), 2) == ()
    with pytest.raises(UnknownLetter):
        reduce_word((3,), 2)


@given(raw_words())
def test_reduce_idempotent(w):
    r = reduce_word(w, 2)
    assert reduce_word(r, 2) == r


@given(raw_words())
def test_inverse_cancels(w):
    r = reduce_word(w, 2)
    assert concat(r, inverse_word(r)) == ()


@given(raw_words())
def test_cyclic_reduce_is_cyclically_reduced(w):
    c = cyclic_reduce(reduce_word(w, 2))
    assert not c or c[0] != -c[-1]


@given(raw_words(), st.integers(min_value=0, max_value=10))
def test_cyclic_canonical_rotation_invariant(w, k):
    c = cyclic_reduce(reduce_word(w, 2))
    if not c:
        return
    rotated = c[k % len(c):] + c[:k % len(c)]
    assert cyclic_canonical(rotated) == cyclic_canonical(c)


@given(raw_words())
def test_cyclic_canonical_inversion_invariant(w):
    r = reduce_word(w, 2)
    assert cyclic_canonical(r) == cyclic_canonical(inverse_word(r))


def test_alphabet_parse_and_format():
    ab = Alphabet.of_rank(2)
    assert ab.parse_word("a b^-1 a^2") == (1, -2, 1, 1)
    assert ab.format_word((1, -2)) == "a b^-1"
    assert ab.format_word(()) == "1"
    with pytest.raises(UnknownLetter):
        ab.parse_word("a c")


def test_inverse_of_standard_example():
    """phi: a -> ab, b -> a inverts to a -> b, b -> b^-1 a."""
    phi = Automorphism.from_images(2, ((1, 2), (1,)))
    assert phi.inverse_images == ((2,), (-2, 1))


def test_square_of_standard_example():
    phi = Automorphism.from_images(2, ((1, 2), (1,)))
    sq = phi.power(2)
    assert sq.images == ((1, 2, 1), (1, 2))


def test_rejects_non_automorphism():
    with pytest.raises(NotAnAutomorphism):
        Automorphism.from_images(2, ((1, 1), (2,)))  # a -> a^2 kills no basis
    with pytest.raises(NotAnAutomorphism):
        Automorphism.from_images(2, ((1,), (1,)))
    with pytest.raises(NotAnAutomorphism):
        Automorphism.from_images(2, ((), (2,)))


@settings(max_examples=40)
@given(small_auts())
def test_inverse_roundtrip(phi):
    assert phi.compose(phi.inverse()).is_identity()
    assert phi.inverse().compose(phi).is_identity()


@settings(max_examples=40)
@given(small_auts(), small_auts(), raw_words(max_size=8))
def test_composition_is_application_order(f, g, w):
    """(f.compose(g))(w) applies g first."""
    assert f.compose(g).apply(w) == f.apply(g.apply(w))


@settings(max_examples=40)
@given(small_auts(), raw_words(max_size=8))
def test_apply_inverse_undoes_apply(phi, w):
    r = reduce_word(w, 2)
    assert phi.apply_inverse(phi.apply(r)) == r


def test_nielsen_generators_shape():
    gens = nielsen_generators(2)
    lams = {name: max(max(len(w) for w in g.images),
                      max(len(w) for w in g.inverse_images))
            for name, g in gens.items()}
    assert max(lams.values()) == 2
    assert any(g.images == ((2,), (1,)) for g in gens.values())


def test_parse_phi_word_and_length():
    gens = nielsen_generators(2)
    phi, length = parse_phi(["Rab", "Rab^-1"], gens, 2)
    assert phi.is_identity()
    assert length == 2
    phi, length = parse_phi(["Rab^2"], gens, 2)
    assert phi.images[0] == (1, 2, 2)
    assert length == 2
    assert parse_phi([], gens, 2)[0].is_identity()
    with pytest.raises(UnknownGenerator):
        parse_phi(["nope"], gens, 2)
    with pytest.raises(RankMismatch):
        parse_phi(["Rab"], {"Rab": Automorphism.identity(3)}, 2)
