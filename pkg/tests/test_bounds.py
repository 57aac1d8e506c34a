"""Magnitude arithmetic for the enumeration bound."""

from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from iwipcheck.bounds import (
    bound_report,
    complexity,
    lambda_of_aut,
    lambda_of_genset,
    power_q,
)
from iwipcheck.errors import EmptyGenSet, RankTooSmall
from iwipcheck.words import Automorphism, nielsen_generators

# frozen formula evaluations: cplx(n) = 3n - 3, Q(n) = prod(3^n - 3^j)
FROZEN = {
    "cplx": {2: 3, 3: 6, 4: 9},
    "Q": {2: 48, 3: 11232, 4: 24261120},
}


@pytest.mark.parametrize("rank,expected", sorted(FROZEN["cplx"].items()))
def test_complexity(rank, expected):
    assert complexity(rank) == expected


@pytest.mark.parametrize("rank,expected", sorted(FROZEN["Q"].items()))
def test_power_q(rank, expected):
    assert power_q(rank) == expected


def test_complexity_rejects_small_rank():
    with pytest.raises(RankTooSmall):
        complexity(1)


def test_lambda_conventions():
    fib = Automorphism.from_images(2, ((1, 2), (1,)))
    assert lambda_of_aut(fib) == 2  # inverse images are b, b^-1 a
    assert lambda_of_aut(Automorphism.identity(2)) == 1
    assert lambda_of_genset(nielsen_generators(2).values()) == 2
    with pytest.raises(EmptyGenSet):
        lambda_of_genset([])


def test_rank2_nielsen_bound_headline():
    """log10 C = log10(12 * 3^5) + 7 * 48 * 3 * log10(2) = 306.903..."""
    rep = bound_report(2, nielsen_generators(2).values(), 1)
    assert rep.c_log10 == Decimal("306.903023")
    assert rep.v_log10 == rep.c_log10
    assert rep.exact_c == 12 * 3**5 * 2**(7 * 48 * 3)
    assert not rep.enumeration_attainable


def test_v_scales_with_phi_length():
    rep1 = bound_report(2, nielsen_generators(2).values(), 1)
    rep3 = bound_report(2, nielsen_generators(2).values(), 3)
    assert rep3.v_log10 == (rep1.c_log10 * 3).quantize(Decimal("0.000001"))


def test_identity_genset_gives_small_bound():
    rep = bound_report(2, [Automorphism.identity(2)], 1)
    assert rep.lam == 1
    assert rep.exact_c == 12 * 3**5
    assert rep.v_log10 < 4
    assert rep.enumeration_attainable


def test_huge_rank_omits_exact_value():
    gens = nielsen_generators(10)
    rep = bound_report(10, gens.values(), 2)
    assert rep.exact_c is None
    assert rep.v_log10 > Decimal(10) ** 10
    assert not rep.enumeration_attainable


@settings(max_examples=20)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=1, max_value=5))
def test_v_log_monotone_in_phi_length(l1, l2):
    gens = nielsen_generators(2).values()
    r1 = bound_report(2, gens, l1)
    r2 = bound_report(2, gens, l2)
    assert (l1 <= l2) == (r1.v_log10 <= r2.v_log10)


def test_json_round_trip_fields():
    rep = bound_report(2, nielsen_generators(2).values(), 1)
    d = rep.to_json_dict()
    assert d["C_log10"] == "306.903023"
    assert d["rank"] == 2 and d["Q"] == 48 and d["cplx"] == 3
    assert isinstance(d["exact_C"], int)
