import numpy as np
import pytest

from eisgen.arith import PadicMatrix, ResidueRing, contains, membership
from eisgen.eisenstein import (VerifyOptions, algebra_span, closure_check, commutativity_check,
                               eisenstein_ideal, hecke_matrices, quotient_order, rank_check,
                               sigma_bar, up_generates, verify_pair, _choose_basis)


@pytest.fixture(scope="module")
def m37():
    return hecke_matrices(37, 32)


def _prepared(mats):
    span = algebra_span(mats["T"])
    _choose_basis(span)
    return span


def test_sigma_bar():
    R = ResidueRing(37, 2)
    assert sigma_bar(1, 37, 32, R) == 1
    # sigma(2) = 1 + omega(2)^30 * 2
    from eisgen.characters import omega_power
    w = omega_power(37, 30, R)
    assert sigma_bar(2, 37, 32, R) == (1 + 2 * w.value(2)) % R.modulus


def test_span_and_rank(m37):
    span = algebra_span(m37["T"])
    ok, r = rank_check(span, m37["dimension_formula"])
    assert ok and r == 2
    assert span.n_gen == 2
    assert closure_check(span)
    assert commutativity_check(m37["T"] + [m37["U"]])


def test_ideal_structure(m37):
    span = _prepared(m37)
    ideal = eisenstein_ideal(span, 37, 32)
    assert quotient_order(span, ideal) == 1
    assert contains(ideal.I, ideal.J)
    assert up_generates(span, ideal, m37["U"])
    # U_p - 1 lies in I, and T_i - sigma_i for every i up to the Sturm count
    q = span.ring.modulus
    one = span.identity()
    assert membership((span.coords(m37["U"]) - one) % q, ideal.I)
    for i, t in enumerate(m37["T"], start=1):
        assert membership((span.coords(t) - sigma_bar(i, 37, 32, span.ring) * one) % q, ideal.I)


def test_generator_count_does_not_matter(m37):
    span = _prepared(m37)
    a = eisenstein_ideal(span, 37, 32)
    b = eisenstein_ideal(span, 37, 32, count=len(m37["T"]))
    assert a.I == b.I and a.J == b.J


def test_ideal_agrees_with_flattened_computation(m37):
    """Coordinates in the chosen basis give the same order as spans of flattened matrices."""
    from eisgen.arith import howell_form, span_order
    span = _prepared(m37)
    ideal = eisenstein_ideal(span, 37, 32)
    R = span.ring
    q = R.modulus
    d = span.d
    eye = PadicMatrix.identity(d, R)
    gens = [eye.scale(37)] + [t - eye.scale(sigma_bar(i, 37, 32, R))
                              for i, t in enumerate(m37["T"][: span.n_gen], start=1)]
    rows = [(g @ t).entries.reshape(-1) for g in gens for t in m37["T"]]
    flat = howell_form(np.array(rows) % q, d * d, R)
    assert span_order(flat) == span_order(ideal.I)


@pytest.mark.parametrize("opts", [VerifyOptions(), VerifyOptions(variant="plus"),
                                  VerifyOptions(transpose=True), VerifyOptions(guard=0),
                                  VerifyOptions(guard=2), VerifyOptions(precision=3)])
def test_verdict_is_stable_under_options(opts):
    r = verify_pair(59, 44, opts)
    assert r.verdict == "true", r
    assert r.quotient_exponent == 1


def test_precision_three():
    r = verify_pair(37, 32, VerifyOptions(precision=3))
    assert r.verdict == "true"
    assert r.quotient_exponent == 1


def test_non_irregular_input():
    r = verify_pair(37, 30)
    assert r.verdict == "indeterminate" and r.failed_stage == "not an irregular pair"


def test_corrupted_matrix_is_rejected(m37):
    t = [m for m in m37["T"]]
    e = t[1].entries.copy()
    i, j = np.argwhere(e != 0)[0]
    e[i, j] = 0
    t[1] = PadicMatrix(e, t[1].ring)
    mats = dict(m37, T=t)
    r = verify_pair(37, 32, VerifyOptions(retry_false=False), matrices=mats)
    assert r.verdict != "true"
    assert r.failed_stage in ("rank_check", "closure_check", "commutativity_check", "containment")


def test_report_fields(m37):
    r = verify_pair(37, 32, matrices=m37)
    d = r.as_dict()
    for key in ("d", "n_gen", "p_rank_pM", "hashes", "verdict", "timings"):
        assert key in d
    assert set(d["hashes"]) == {"M", "I", "J"}
    assert r.bernoulli_exponent == 1 and r.bernoulli_check


def test_compare_variants_agree():
    r = verify_pair(59, 44, VerifyOptions(compare_variants=True))
    assert r.verdict == "true" and r.other_variant_verdict == "true"
    assert not r.anomalies


def test_false_verdict_is_rechecked(monkeypatch):
    import eisgen.eisenstein as E
    monkeypatch.setattr(E, "up_generates", lambda span, ideal, up: False)
    r = E.verify_pair(37, 32)
    assert r.verdict == "false"
    assert any("precision 3" in a for a in r.anomalies)
    assert any("exact trace check: agree" in a for a in r.anomalies)
