"""The Hecke span M mod p^2, the Eisenstein ideal image I, its square J,
and the test that U_p - 1 generates I modulo J.
"""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .arith import (HowellBasis, PadicMatrix, PrecisionError, ResidueRing, contains,
                    howell_form, matmul_mod, membership, p_rank, reduce_many,
                    span_order)
from .bernoulli import (IrregularPair, bernoulli_mod, check_hypotheses, check_pplus1mk,
                        gen_bernoulli_valuation)
from .characters import omega_power
from .modsym import build_space, cusp_form_dimension, hecke_operator, sturm_count

DEFAULT_PRECISION = 2
DEFAULT_GUARD = 1


def _flat(m: PadicMatrix) -> np.ndarray:
    return m.entries.reshape(-1)


def _inverse_mod(A: np.ndarray, ring: ResidueRing) -> np.ndarray:
    """Inverse of a square matrix that is invertible mod p, over Z/p^B."""
    p, q = ring.p, ring.modulus
    n = A.shape[0]
    aug = np.hstack([A.astype(object) % p, np.eye(n, dtype=object)])
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r, col] % p), None)
        if piv is None:
            raise PrecisionError("matrix is singular mod p")
        aug[[col, piv]] = aug[[piv, col]]
        aug[col] = aug[col] * pow(int(aug[col, col]), -1, p) % p
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % p
    X = aug[:, n:]
    Ao = A.astype(object)
    eye = np.eye(n, dtype=object)
    for _ in range(ring.B):
        X = X.dot(2 * eye - Ao.dot(X)) % q
    return ring.array(X)


class _Coordinates:
    """Coordinates in a basis of a free submodule of (Z/p^B)^n."""

    def __init__(self, basis: np.ndarray, ring: ResidueRing):
        self.ring = ring
        self.basis = basis
        H = howell_form(basis % ring.p, basis.shape[1], ResidueRing(ring.p, 1))
        self.cols = [j for j, _ in H.pivots]
        if len(self.cols) != basis.shape[0]:
            raise PrecisionError("basis is not independent mod p")
        self.inv = _inverse_mod(basis[:, self.cols], ring)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        q = self.ring.modulus
        x = np.atleast_2d(x)
        c = matmul_mod(x[:, self.cols], self.inv, q)
        if not np.array_equal(matmul_mod(c, self.basis, q), x % q):
            raise ValueError("vector is not in the span")
        return c


@dataclass
class AlgebraSpan:
    """M: the Z/p^B-span of T_1..T_s, with a basis drawn from the T_i."""

    ring: ResidueRing
    d: int
    operators: list  # PadicMatrix, T_1..T_s
    howell: HowellBasis
    n_gen: int
    basis_index: list = field(default_factory=list)
    _coords: _Coordinates | None = None
    _table: np.ndarray | None = None

    @property
    def order(self) -> int:
        return span_order(self.howell)

    def rank(self) -> int:
        return len(self.basis_index)

    def basis_matrices(self) -> list[PadicMatrix]:
        return [self.operators[i] for i in self.basis_index]

    def coords(self, m: PadicMatrix) -> np.ndarray:
        return self._coords(_flat(m))[0]

    def multiply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two elements given in basis coordinates."""
        q = self.ring.modulus
        t = matmul_mod(np.atleast_2d(x), self._table.reshape(len(x), -1), q).reshape(len(x), len(x))
        return matmul_mod(np.atleast_2d(y), t, q)[0]

    def multiply_many(self, g: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """g * y for each row y of ys."""
        q = self.ring.modulus
        r = len(g)
        t = matmul_mod(np.atleast_2d(g), self._table.reshape(r, -1), q).reshape(r, r)
        return matmul_mod(ys, t, q)

    def identity(self) -> np.ndarray:
        return self.coords(PadicMatrix.identity(self.d, self.ring))


def algebra_span(operators: list) -> AlgebraSpan:
    """Howell span of T_1..T_s and the least N with span(T_1..T_N) = M."""
    if not operators:
        raise ValueError("need at least T_1")
    ring = operators[0].ring
    d = operators[0].rows
    n = d * d
    if d == 0:
        H = howell_form([], 0, ring)
        return AlgebraSpan(ring, 0, list(operators), H, 0)
    rows = np.array([_flat(m) for m in operators])
    M = howell_form(rows, n, ring)
    target = span_order(M)
    # projecting to the pivot columns of M is injective on M, so partial
    # spans can be compared there
    cols = [j for j, _ in M.pivots]
    proj = rows[:, cols]
    cur = howell_form([], len(cols), ring)
    n_gen = 0
    for i, row in enumerate(proj):
        if span_order(cur) == target:
            break
        cur = howell_form(np.vstack([cur.rows, row.reshape(1, -1)]), len(cols), ring)
        n_gen = i + 1
    return AlgebraSpan(ring, d, list(operators), M, n_gen)


def _choose_basis(span: AlgebraSpan) -> None:
    """Pick T_i independent mod p and set up coordinates and structure constants."""
    ring = span.ring
    p = ring.p
    chosen, rows_p = [], ring.zeros((0, span.d * span.d))
    small = ResidueRing(p, 1)
    cur = 0
    for i, m in enumerate(span.operators[: max(span.n_gen, 1)]):
        cand = np.vstack([rows_p, (_flat(m) % p).reshape(1, -1)])
        H = howell_form(cand, cand.shape[1], small)
        if len(H) > cur:
            chosen.append(i)
            rows_p = cand
            cur = len(H)
    span.basis_index = chosen
    B = np.array([_flat(span.operators[i]) for i in chosen])
    span._coords = _Coordinates(B, ring)
    r = len(chosen)
    table = ring.zeros((r, r, r))
    mats = span.basis_matrices()
    for i in range(r):
        for j in range(r):
            table[i, j] = span.coords(mats[i] @ mats[j])
    span._table = table


def rank_check(span: AlgebraSpan, expected_rank: int) -> tuple[bool, int]:
    """Whether pM has p-rank equal to the rank of the Hecke algebra."""
    if span.d == 0:
        return expected_rank == 0, 0
    r = p_rank(span.howell, scale_by_p=True)
    return r == expected_rank, r


def closure_check(span: AlgebraSpan, chunk: int = 2**24) -> bool:
    """M contains the identity and is closed under multiplication.

    M is spanned by T_1..T_N, so products T_i T_j with i <= j <= N suffice
    once the operators commute (see commutativity_check).
    """
    if span.d == 0:
        return True
    q = span.ring.modulus
    gens = [t.entries for t in span.operators[: max(span.n_gen, 1)]]
    pending = [_flat(PadicMatrix.identity(span.d, span.ring))]
    per = max(1, chunk // (span.d * span.d))
    for i, a in enumerate(gens):
        for b in gens[i:]:
            pending.append(matmul_mod(a, b, q).reshape(-1))
            if len(pending) >= per:
                if np.any(reduce_many(np.array(pending), span.howell) != 0):
                    return False
                pending = []
    return not pending or not np.any(reduce_many(np.array(pending), span.howell) != 0)


def commutativity_check(operators: list, trials: int = 4, seed: int = 0) -> bool:
    """Randomized test that every pair T_i, T_j commutes: v T_i T_j = v T_j T_i."""
    if not operators or operators[0].rows == 0:
        return True
    ring = operators[0].ring
    q, d = ring.modulus, operators[0].rows
    rng = np.random.default_rng(seed)
    mats = [t.entries for t in operators]
    for _ in range(trials):
        v = ring.array(rng.integers(0, q, (1, d)))
        W = np.vstack([matmul_mod(v, m, q) for m in mats])  # row i: v T_i
        for j, m in enumerate(mats):
            left = matmul_mod(W, m, q)  # row i: v T_i T_j
            right = np.vstack([matmul_mod(W[j:j + 1], mi, q) for mi in mats])  # v T_j T_i
            if not np.array_equal(left, right):
                return False
    return True


def sigma_bar(i: int, p: int, k: int, ring: ResidueRing) -> int:
    """sum_{0 < e | i} omega(e)^(k-2) e, mod p^B."""
    chi = omega_power(p, k - 2, ring)
    return sum(chi.value(e) * e for e in range(1, i + 1) if i % e == 0) % ring.modulus


@dataclass
class EisensteinIdealImage:
    generators: np.ndarray  # coordinates, one per row
    I: HowellBasis
    J: HowellBasis
    labels: list = field(default_factory=list)


def _ideal_span(span: AlgebraSpan, gens: np.ndarray) -> HowellBasis:
    r = span.rank()
    eye = span.ring.array(np.eye(r, dtype=np.int64))
    rows = np.vstack([span.multiply_many(g, eye) for g in gens])
    return howell_form(rows, r, span.ring)


def _square_span(span: AlgebraSpan, gens: np.ndarray, I: HowellBasis) -> HowellBasis:
    r = span.rank()
    if len(I) == 0:
        return howell_form([], r, span.ring)
    rows = np.vstack([span.multiply_many(g, I.rows) for g in gens])
    return howell_form(rows, r, span.ring)


def eisenstein_ideal(span: AlgebraSpan, p: int, k: int, count: int | None = None,
                     extra: list | None = None) -> EisensteinIdealImage:
    """I and J from p and T_i - sigma_i for i <= count (default N_gen)."""
    ring = span.ring
    q = ring.modulus
    count = span.n_gen if count is None else count
    one = span.identity()
    gens = [(p * one) % q]
    labels = ["p"]
    for i in range(1, count + 1):
        s = sigma_bar(i, p, k, ring)
        gens.append((span.coords(span.operators[i - 1]) - s * one) % q)
        labels.append(f"T_{i}-sigma_{i}")
    for label, m in extra or []:
        gens.append(m)
        labels.append(label)
    G = np.array(gens).astype(ring.dtype)
    I = _ideal_span(span, G)
    J = _square_span(span, G, I)
    return EisensteinIdealImage(G, I, J, labels)


def quotient_order(span: AlgebraSpan, ideal: EisensteinIdealImage) -> int:
    """Exponent v with |M/I| = p^v."""
    return span.ring.B * span.rank() - span_order(ideal.I)


def up_generates(span: AlgebraSpan, ideal: EisensteinIdealImage, up: PadicMatrix) -> bool:
    """I == J + (U_p - 1) M."""
    r = span.rank()
    g = (span.coords(up) - span.identity()) % span.ring.modulus
    eye = span.ring.array(np.eye(r, dtype=np.int64))
    rows = np.vstack([ideal.J.rows, span.multiply_many(g, eye)])
    return howell_form(rows, r, span.ring) == ideal.I


# ---------------------------------------------------------------------------
# the full pipeline

@dataclass
class EisensteinVerification:
    p: int
    k: int
    variant: str = "full"
    precision: int = DEFAULT_PRECISION
    guard: int = DEFAULT_GUARD
    d: int = 0
    hecke_rank: int = 0
    dimension_formula: int = 0
    sturm: int = 0
    n_gen: int = 0
    p_rank_pM: int = 0
    rank_check: bool = False
    closure_check: bool = False
    commutativity_check: bool = False
    quotient_exponent: int | None = None
    order_check: bool = False
    bernoulli_exponent: int | None = None
    bernoulli_check: bool = False
    congruence_check: bool = False
    containment_check: bool = False
    robust_generators: bool = False
    up_in_ideal: bool = False
    up_generates: bool | None = None
    verdict: str = "indeterminate"
    failed_stage: str | None = None
    other_variant_verdict: str | None = None
    anomalies: list = field(default_factory=list)
    hashes: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerifyOptions:
    precision: int = DEFAULT_PRECISION
    guard: int = DEFAULT_GUARD
    variant: str = "full"
    transpose: bool = False
    check_inputs: bool = True
    retry_false: bool = True
    compare_variants: bool = False


def hecke_matrices(p: int, k: int, precision: int = DEFAULT_PRECISION,
                   guard: int = DEFAULT_GUARD, variant: str = "full") -> dict:
    """Build the space for chi = omega^(k-2) and return T_1..T_s and U_p mod p^precision."""
    work = ResidueRing(p, precision + guard)
    chi = omega_power(p, k - 2, work)
    space = build_space(p, chi, work, sign=1 if variant == "plus" else 0)
    s = sturm_count(p)
    ts = [hecke_operator(space, i).matrix.reduce(precision) for i in range(1, s + 1)]
    up = hecke_operator(space, p).matrix.reduce(precision)
    return {"space": space, "T": ts, "U": up,
            "dimension_formula": cusp_form_dimension(p, chi)}


def _hash_basis(H: HowellBasis) -> str:
    return H.digest()


def verify_from_matrices(p: int, k: int, ts: list, up: PadicMatrix, expected_rank: int,
                         result: EisensteinVerification) -> EisensteinVerification:
    """Run the ideal computations on precomputed Hecke matrices."""
    t0 = time.perf_counter()
    q = ts[0].ring.modulus if ts else p * p
    result.d = ts[0].rows if ts else 0
    result.sturm = len(ts)
    result.hecke_rank = expected_rank

    span = algebra_span(ts)
    result.n_gen = span.n_gen
    result.hashes["M"] = _hash_basis(span.howell)
    ok, r = rank_check(span, expected_rank)
    result.rank_check, result.p_rank_pM = ok, r
    result.commutativity_check = commutativity_check(ts + [up])
    result.closure_check = result.commutativity_check and closure_check(span)
    if result.d == 0:
        result.failed_stage = "empty space"
        return result
    if not ok:
        result.failed_stage = "rank_check"
        return result
    if not result.commutativity_check:
        result.failed_stage = "commutativity_check"
        return result
    if not result.closure_check:
        result.failed_stage = "closure_check"
        return result
    if p_rank(span.howell) != expected_rank:
        result.failed_stage = "rank_check"
        result.anomalies.append("M is not free of the expected rank")
        return result
    _choose_basis(span)
    result.timings["span"] = time.perf_counter() - t0

    t1 = time.perf_counter()
    ideal = eisenstein_ideal(span, p, k)
    result.hashes["I"] = _hash_basis(ideal.I)
    result.hashes["J"] = _hash_basis(ideal.J)
    v = quotient_order(span, ideal)
    result.quotient_exponent = v
    result.order_check = v == 1

    # the same ideal from every T_i up to the Sturm count, and with U_p - 1 added
    full_gens = eisenstein_ideal(span, p, k, count=len(ts))
    upm1 = (span.coords(up) - span.identity()) % q
    with_up = eisenstein_ideal(span, p, k, extra=[("U_p-1", upm1)])
    result.robust_generators = full_gens.I == ideal.I and full_gens.J == ideal.J
    if not result.robust_generators:
        result.anomalies.append("enlarging the generator list changed I or J")
    result.up_in_ideal = membership(upm1, ideal.I)
    result.congruence_check = all(
        membership((span.coords(t) - sigma_bar(i, p, k, span.ring) * span.identity()) % q, ideal.I)
        for i, t in enumerate(ts, start=1))
    r = span.rank()
    p2 = (p * p * np.eye(r, dtype=np.int64)) % q
    result.containment_check = contains(ideal.I, ideal.J) and all(
        membership(row, ideal.J) for row in span.ring.array(p2))
    if result.order_check and with_up.I != ideal.I:
        result.anomalies.append("U_p - 1 enlarges the ideal generated by p and T_i - sigma_i")
    result.timings["ideal"] = time.perf_counter() - t1

    if not result.order_check:
        result.failed_stage = "quotient_order"
        return result
    if not (result.containment_check and result.congruence_check and result.up_in_ideal):
        result.failed_stage = "containment"
        return result
    result.up_generates = up_generates(span, ideal, up)
    result.verdict = "true" if result.up_generates else "false"
    return result


def verify_pair(p: int, k: int, options: VerifyOptions | None = None,
                matrices: dict | None = None) -> EisensteinVerification:
    """Full verification that U_p - 1 generates I_2 modulo I_2^2 for (p, k)."""
    opts = options or VerifyOptions()
    res = EisensteinVerification(p, k, opts.variant, opts.precision, opts.guard)
    t0 = time.perf_counter()
    if opts.check_inputs:
        pair = IrregularPair(p, k)
        if bernoulli_mod(k, ResidueRing(p, 1)).value != 0:
            res.failed_stage = "not an irregular pair"
            return res
        if not check_pplus1mk(pair):
            res.failed_stage = "p divides B_{p+1-k}"
            return res
        hyp = check_hypotheses(1, omega_power(p, k, ResidueRing(p, 3)), p)
        if not hyp.all():
            res.failed_stage = "hypotheses"
            return res
    t1 = time.perf_counter()
    if matrices is None:
        try:
            matrices = hecke_matrices(p, k, opts.precision, opts.guard, opts.variant)
        except PrecisionError as exc:
            res.failed_stage = f"modular symbols: {exc}"
            return res
    res.timings["hecke"] = time.perf_counter() - t1
    ts, up = matrices["T"], matrices["U"]
    if opts.transpose:
        ts = [t.transpose() for t in ts]
        up = up.transpose()
    dim = matrices["dimension_formula"]
    res.dimension_formula = dim
    d = ts[0].rows
    expected = dim
    if d != (dim if opts.variant == "plus" else 2 * dim):
        res.anomalies.append(f"symbol dimension {d} disagrees with the dimension formula {dim}")
    chi = omega_power(p, k - 2, ResidueRing(p, 4))
    res.bernoulli_exponent = gen_bernoulli_valuation(2, chi, p, cap=4)
    verify_from_matrices(p, k, ts, up, expected, res)
    res.bernoulli_check = res.quotient_exponent == res.bernoulli_exponent
    if res.verdict == "true" and not res.bernoulli_check:
        res.anomalies.append("quotient order disagrees with v_p(B_{2,omega^(k-2)})")
    if res.verdict == "false" and opts.retry_false:
        # a false verdict is unexpected: redo at one more digit and, for small p,
        # against the exact cyclotomic traces before reporting it
        B3 = opts.precision + 1
        retry = verify_pair(p, k, VerifyOptions(B3, opts.guard, opts.variant, opts.transpose,
                                                False, False))
        res.anomalies.append(f"false verdict re-run at precision {B3}: {retry.verdict}")
        from .exact import EXACT_MAX_P, exact_cross_check
        if p <= EXACT_MAX_P:
            ex = exact_cross_check(p, k, hecke_matrices(p, k, B3, opts.guard, opts.variant),
                                   opts.variant)
            res.anomalies.append(f"exact trace check: {'agree' if ex['agree'] else ex['mismatches']}")
    if opts.compare_variants and res.rank_check:
        other = "plus" if opts.variant == "full" else "full"
        alt = verify_pair(p, k, VerifyOptions(opts.precision, opts.guard, other, opts.transpose,
                                              False, False))
        res.other_variant_verdict = alt.verdict
        if alt.rank_check and alt.verdict != res.verdict:
            res.anomalies.append(f"{other} variant gives verdict {alt.verdict}")
    res.timings["total"] = time.perf_counter() - t0
    return res
