from fractions import Fraction

from eisgen.arith import PadicMatrix, ResidueRing, teichmuller
from eisgen.eisenstein import hecke_matrices
from eisgen.exact import Cyclotomic, ExactSpace, cyclotomic_poly, exact_cross_check


def test_cyclotomic_polynomials():
    assert cyclotomic_poly(1) == [-1, 1]
    assert cyclotomic_poly(4) == [1, 0, 1]
    assert cyclotomic_poly(6) == [1, -1, 1]
    assert cyclotomic_poly(12) == [1, 0, -1, 0, 1]


def test_cyclotomic_field_arithmetic():
    K = Cyclotomic(9)
    z = K.zeta_pow(1)
    assert K.zeta_pow(9) == K.one
    a = K.add(K.const(Fraction(2, 3)), K.mul(z, K.zeta_pow(4)))
    assert K.mul(a, K.inv(a)) == K.one
    # embedding is a ring map: zeta_9 -> element of order 9 mod 19^2
    q = 361
    w = pow(teichmuller(2, ResidueRing(19, 2)).value, 2, q)
    b = K.sub(K.zeta_pow(7), K.const(3))
    assert K.embed(K.mul(a, b), w, q) == K.embed(a, w, q) * K.embed(b, w, q) % q


def test_trivial_character_dimensions():
    assert ExactSpace(11, 0).d == 2
    assert ExactSpace(5, 0).d == 0
    assert ExactSpace(11, 0, sign=1).d == 1


def test_cross_check_agrees_and_detects_corruption():
    for variant in ("full", "plus"):
        mats = hecke_matrices(37, 32, 2, 1, variant)
        res = exact_cross_check(37, 32, mats, variant)
        assert res["enabled"] and res["agree"] and res["compared"] > 0
    mats = hecke_matrices(37, 32, 2, 1, "full")
    e = mats["T"][1].entries.copy()
    e[0, 0] = (int(e[0, 0]) + 37) % 37**2
    bad = dict(mats, T=[mats["T"][0], PadicMatrix(e, mats["T"][1].ring)] + list(mats["T"][2:]))
    res = exact_cross_check(37, 32, bad, "full")
    assert not res["agree"] and "tr T_2" in res["mismatches"]


def test_cross_check_disabled_for_large_p():
    res = exact_cross_check(59, 44, {"T": [], "U": None})
    assert res == {"enabled": False, "reason": res["reason"], "agree": True}
