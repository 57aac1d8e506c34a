"""Folded core graphs: construction, codes, containment, pullbacks."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from iwipcheck.errors import EmptyGenerators, IncompatibleSpecs
from iwipcheck.graphs import (
    CoreGraph,
    apply_aut,
    conjugate_into,
    cycle_graph,
    graph_from_generators,
    pullback,
)
from iwipcheck.words import Automorphism, concat, nielsen_generators, reduce_word


def letters(rank=2):
    return st.sampled_from([c for i in range(1, rank + 1) for c in (i, -i)])


def gen_words(rank=2):
    return (st.lists(letters(rank), min_size=1, max_size=8).map(tuple)
            .filter(lambda w: reduce_word(w, rank) != ()))


def gen_sets(rank=2):
    return st.lists(gen_words(rank), min_size=1, max_size=4)


def test_single_loop():
    g = graph_from_generators([(1,)], 2)
    assert (g.n_vertices, g.volume, g.subgroup_rank) == (1, 1, 1)


def test_a2_b_folds_to_three_edges():
    g = graph_from_generators([(1, 1), (2,)], 2, based=True)
    assert g.volume == 3
    assert g.n_vertices == 2


def test_ab_a_is_full_rose():
    g = graph_from_generators([(1, 2), (1,)], 2)
    assert (g.n_vertices, g.volume, g.subgroup_rank) == (1, 2, 2)


def test_empty_generators_rejected():
    with pytest.raises(EmptyGenerators):
        graph_from_generators([(), (1, -1)], 2)


def test_cycle_graph_volume_is_cyclic_length():
    g = cycle_graph((2, 1, 1, -2), 2)  # conjugate of a^2
    assert g.volume == 2


@settings(max_examples=60)
@given(gen_sets(), st.randoms(use_true_random=False))
def test_folding_confluent_under_generator_order(gens, rng):
    """Same subgroup, shuffled generators, equal canonical codes."""
    shuffled = list(gens)
    rng.shuffle(shuffled)
    a = graph_from_generators(gens, 2, based=True)
    b = graph_from_generators(shuffled, 2, based=True)
    assert a.code == b.code


@settings(max_examples=60)
@given(gen_sets(), st.data())
def test_membership_of_random_products(gens, data):
    g = graph_from_generators(gens, 2, based=True)
    indices = data.draw(st.lists(
        st.tuples(st.integers(0, len(gens) - 1), st.booleans()),
        min_size=1, max_size=6))
    w = ()
    for i, inv in indices:
        piece = gens[i]
        w = concat(w, tuple(-c for c in reversed(piece)) if inv else reduce_word(piece, 2))
    assert g.contains(w)


def test_membership_negative():
    g = graph_from_generators([(1, 1), (2,)], 2, based=True)
    assert g.contains((1, 1))
    assert not g.contains((1,))
    assert not g.contains((1, 2))
    assert g.contains(())


def test_contains_requires_basepoint():
    g = graph_from_generators([(1,)], 2, based=False)
    with pytest.raises(IncompatibleSpecs):
        g.contains((1,))


def test_conjugate_into_examples():
    a = graph_from_generators([(1,)], 2)
    a2 = graph_from_generators([(1, 1)], 2)
    bab = graph_from_generators([(2, 1, -2)], 2)
    assert conjugate_into(a2, a)
    assert not conjugate_into(a, a2)
    assert conjugate_into(bab, a)


def test_pullback_examples():
    a = graph_from_generators([(1,)], 2)
    b = graph_from_generators([(2,)], 2)
    a2 = graph_from_generators([(1, 1)], 2)
    a3 = graph_from_generators([(1, 1, 1)], 2)
    assert [k.code for k in pullback(a, a)] == [a.code]
    assert pullback(a, b) == ()
    (k,) = pullback(a2, a3)
    assert k.volume == 6


@settings(max_examples=40)
@given(gen_sets(), gen_sets())
def test_pullback_reduced_rank_bound(ga, gb):
    """Components of the fiber product satisfy the subgroup
    intersection rank bound."""
    try:
        a = graph_from_generators(ga, 2)
        b = graph_from_generators(gb, 2)
    except EmptyGenerators:
        return
    ra, rb = a.subgroup_rank, b.subgroup_rank
    for k in pullback(a, b):
        assert k.subgroup_rank >= 1
        assert k.subgroup_rank - 1 <= 2 * max(ra - 1, 0) * max(rb - 1, 0) \
            or min(ra, rb) == 1 and k.subgroup_rank == 1


def test_code_invariant_under_renumbering():
    random.seed(7)
    g = graph_from_generators([(1, 2, -1), (2, 2)], 2)
    perm = list(range(g.n_vertices))
    random.shuffle(perm)
    edges = tuple(sorted((perm[s], perm[t], l) for s, t, l in g.edges))
    h = CoreGraph(g.rank, g.n_vertices, edges)
    assert h.code == g.code


def test_codes_distinguish_labels():
    assert graph_from_generators([(1,)], 2).code != graph_from_generators([(2,)], 2).code
    ab = cycle_graph((1, 2), 2)
    ba = cycle_graph((2, 1), 2)
    assert ab.code == ba.code


def test_apply_aut_examples():
    a = graph_from_generators([(1,)], 2)
    swap = Automorphism.from_images(2, ((2,), (1,)))
    fib = Automorphism.from_images(2, ((1, 2), (1,)))
    assert apply_aut(a, swap).code == graph_from_generators([(2,)], 2).code
    assert apply_aut(a, fib).code == cycle_graph((1, 2), 2).code
    assert apply_aut(a, Automorphism.identity(2)).code == a.code


@settings(max_examples=30)
@given(gen_sets(),
       st.lists(st.sampled_from(sorted(nielsen_generators(2))), max_size=3))
def test_apply_aut_is_an_action(gens, names):
    try:
        g = graph_from_generators(gens, 2)
    except EmptyGenerators:
        return
    table = nielsen_generators(2)
    auts = [table[n] for n in names]
    stepwise = g
    for aut in reversed(auts):
        stepwise = apply_aut(stepwise, aut)
    composed = Automorphism.identity(2)
    for aut in auts:
        composed = composed.compose(aut)
    assert stepwise.code == apply_aut(g, composed).code
