from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from eisgen.arith import DomainError, ResidueRing
from eisgen.bernoulli import (IrregularPair, PoleError, bernoulli_exact, bernoulli_mod,
                              bernoulli_table, check_hypotheses, check_pplus1mk,
                              gen_bernoulli, gen_bernoulli_valuation, irregular_pairs,
                              theta_for_pair)
from eisgen.characters import omega_power

from oracles import bernoulli_from_tangent


def _mod(x: Fraction, q: int) -> int:
    return x.numerator * pow(x.denominator, -1, q) % q


def test_known_residues():
    assert bernoulli_mod(32, ResidueRing(37, 1)).value == 0
    assert bernoulli_mod(12, ResidueRing(691, 1)).value == 0
    assert bernoulli_mod(2, ResidueRing(7, 1)).value == 6


@pytest.mark.parametrize("p,B", [(37, 3), (59, 2), (101, 2), (7, 4)])
def test_table_matches_exact_values(p, B):
    q = p**B
    for k in range(2, p - 2, 2):
        assert bernoulli_mod(k, ResidueRing(p, B)).value == _mod(bernoulli_from_tangent(k // 2), q)


@pytest.mark.parametrize("p,k", [(5, 6), (7, 10), (11, 12), (13, 26), (5, 22), (7, 32)])
def test_large_index_tracked_recurrence(p, k):
    assert bernoulli_mod(k, ResidueRing(p, 2)).value == _mod(bernoulli_exact(k), p * p)


def test_pole():
    with pytest.raises(PoleError):
        bernoulli_mod(40, ResidueRing(41, 1))


def test_irregular_pairs():
    assert irregular_pairs(37) == [IrregularPair(37, 32)]
    assert irregular_pairs(157) == [IrregularPair(157, 62), IrregularPair(157, 110)]
    assert irregular_pairs(7) == []
    with pytest.raises(DomainError):
        IrregularPair(37, 31)


@pytest.mark.parametrize("p", [11, 37, 59])
def test_kummer_congruence(p):
    """B_k/k = B_{k'}/k' mod p when k = k' mod p-1 and p-1 does not divide k."""
    for k in range(2, p - 2, 2):
        k2 = k + (p - 1)
        a = bernoulli_exact(k) / k
        b = bernoulli_exact(k2) / k2
        assert _mod(a, p) == _mod(b, p)


def test_pplus1mk_for_small_pairs():
    for p in (37, 59, 67, 101, 103, 131, 149, 157):
        for pair in irregular_pairs(p):
            assert check_pplus1mk(pair)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([5, 7, 11, 13]), st.integers(1, 30))
def test_gen_bernoulli_one_matches_direct_sum(p, j):
    """B_{1,chi} = (1/f) sum_{a<f} chi(a) a for nontrivial primitive chi of conductor f = p."""
    R = ResidueRing(p, 2)
    chi = omega_power(p, j, ResidueRing(p, 6))
    if chi.is_trivial():
        return
    total = sum(chi.value(a) * a for a in range(1, p))
    if total % p:
        return  # not p-integral after dividing by f
    want = (total // p) % R.modulus
    assert gen_bernoulli(1, chi, R).value == want


def test_gen_bernoulli_trivial_character():
    R = ResidueRing(7, 2)
    one = omega_power(7, 0, R)
    assert gen_bernoulli(2, one, R).value == _mod(Fraction(1, 6), 49)


def test_gen_bernoulli_polynomial_formula():
    """B_{n,chi} = f^(n-1) sum_a chi(a) B_n(a/f), with Bernoulli polynomials in Q."""
    p, n = 37, 2
    R = ResidueRing(p, 3)
    chi = omega_power(p, 30, ResidueRing(p, 8))
    q8 = p**8
    acc = 0
    for a in range(1, p):
        x = Fraction(a, p)
        b2 = x * x - x + Fraction(1, 6)
        acc += chi.value(a) * _mod(b2 * p ** (n - 1) * p**2, q8)
    assert acc % p**2 == 0
    want = (acc // p**2) % R.modulus
    assert gen_bernoulli(2, chi, R).value == want


def test_order_exponent_for_37():
    assert gen_bernoulli_valuation(2, omega_power(37, 30, ResidueRing(37, 4)), 37) == 1


def test_hypotheses():
    rep = check_hypotheses(1, theta_for_pair(37, 32), 37)
    assert rep.all()
    rep2 = check_hypotheses(1, theta_for_pair(37, 2), 37)
    assert not rep2.d
    with pytest.raises(DomainError):
        check_hypotheses(1, omega_power(37, 3, ResidueRing(37, 3)), 37)


def test_table_prefix_consistency():
    full = bernoulli_table(101, 98, 2)
    assert bernoulli_table(101, 10, 2) == full[:11]
