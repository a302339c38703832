"""Residue arithmetic and linear algebra over Z/p^B.

Submodules of (Z/p^B)^n are handled through their Howell normal form: an
echelon form whose pivots are powers of p, augmented so that the rows with
pivot at or right of any column span every element of the module that
vanishes on the columns to its left.  That property makes membership a
single elimination pass and makes the reduced form canonical.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

_INT64_SAFE = 2**62


class DomainError(ValueError):
    """Input outside the domain of an arithmetic operation."""


class PrecisionError(ArithmeticError):
    """The working precision is too small for an exact computation."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def valuation(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if x == 0:
        raise DomainError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class ResidueRing:
    """The ring Z/p^B."""

    p: int
    B: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if self.B < 1:
            raise DomainError("precision exponent must be >= 1")

    @property
    def modulus(self) -> int:
        return self.p**self.B

    @property
    def dtype(self):
        # q^2 must fit in a signed 64-bit word for in-place elimination
        return np.int64 if self.modulus < 2**31 else object

    def __call__(self, value: int) -> "Residue":
        return Residue(int(value) % self.modulus, self)

    def valuation(self, x: int) -> int:
        """Valuation of x in Z/p^B; zero has valuation B."""
        x %= self.modulus
        return self.B if x == 0 else valuation(x, self.p)

    def inverse(self, x: int) -> int:
        x %= self.modulus
        if x % self.p == 0:
            raise ZeroDivisionError(f"{x} is not a unit mod {self.p}^{self.B}")
        return pow(x, -1, self.modulus)

    def with_precision(self, B: int) -> "ResidueRing":
        return ResidueRing(self.p, B)

    def array(self, data) -> np.ndarray:
        arr = np.array(data, dtype=object)
        arr = arr % self.modulus
        return arr.astype(self.dtype)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=self.dtype)


@dataclass(frozen=True)
class Residue:
    value: int
    ring: ResidueRing

    def __post_init__(self):
        if not 0 <= self.value < self.ring.modulus:
            raise DomainError("residue value out of range")

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.ring != self.ring:
                raise DomainError("residues from different rings")
            return other.value
        return int(other)

    def __add__(self, other):
        return self.ring(self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.ring(self.value - self._coerce(other))

    def __rsub__(self, other):
        return self.ring(self._coerce(other) - self.value)

    def __mul__(self, other):
        return self.ring(self.value * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return self.ring(-self.value)

    def __pow__(self, e: int):
        if e < 0:
            return self.ring(pow(self.ring.inverse(self.value), -e, self.ring.modulus))
        return self.ring(pow(self.value, e, self.ring.modulus))

    def inverse(self) -> "Residue":
        return self.ring(self.ring.inverse(self.value))

    def __eq__(self, other):
        if isinstance(other, Residue):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.ring.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.ring))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.ring.p}^{self.ring.B})"


def teichmuller(a: int, ring: ResidueRing) -> Residue:
    """The (p-1)-st root of unity in Z/p^B congruent to a mod p."""
    p, q = ring.p, ring.modulus
    if a % p == 0:
        raise DomainError(f"teichmuller({a}) undefined: divisible by {p}")
    x = a % q
    # each application of x -> x^p gains one p-adic digit
    for _ in range(ring.B + 1):
        y = pow(x, p, q)
        if y == x:
            break
        x = y
    return Residue(x, ring)


def matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Matrix product reduced mod q without int64 overflow."""
    inner = a.shape[-1]
    if a.dtype == object or b.dtype == object:
        return np.asarray(a.astype(object) @ b.astype(object)) % q
    if q * q * max(inner, 1) < _INT64_SAFE:
        return (a @ b) % q
    if q < 2**31 and inner < 2**15:
        shift = 1 << 16
        hi, lo = b >> 16, b & (shift - 1)
        return ((((a @ hi) % q) * shift) % q + (a @ lo) % q) % q
    return np.asarray(a.astype(object) @ b.astype(object)) % q


class PadicMatrix:
    """A rows x cols matrix over Z/p^B."""

    def __init__(self, entries, ring: ResidueRing):
        self.ring = ring
        arr = np.asarray(entries)
        if arr.ndim != 2:
            raise DomainError("PadicMatrix needs a 2-d array")
        self.entries = ring.array(arr) if arr.dtype != ring.dtype else arr % ring.modulus
        self.entries.setflags(write=False)

    @classmethod
    def identity(cls, n: int, ring: ResidueRing) -> "PadicMatrix":
        return cls(np.eye(n, dtype=ring.dtype), ring)

    @classmethod
    def zero(cls, rows: int, cols: int, ring: ResidueRing) -> "PadicMatrix":
        return cls(ring.zeros((rows, cols)), ring)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def _check(self, other: "PadicMatrix"):
        if other.ring != self.ring:
            raise DomainError("matrices over different rings")

    def __matmul__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise DomainError("dimension mismatch")
        return PadicMatrix(matmul_mod(self.entries, other.entries, self.ring.modulus), self.ring)

    def __add__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check(other)
        return PadicMatrix((self.entries + other.entries) % self.ring.modulus, self.ring)

    def __sub__(self, other: "PadicMatrix") -> "PadicMatrix":
        self._check(other)
        return PadicMatrix((self.entries - other.entries) % self.ring.modulus, self.ring)

    def __neg__(self) -> "PadicMatrix":
        return PadicMatrix((-self.entries) % self.ring.modulus, self.ring)

    def scale(self, c: int) -> "PadicMatrix":
        return PadicMatrix(self.ring.array(self.entries.astype(object) * c), self.ring)

    def transpose(self) -> "PadicMatrix":
        return PadicMatrix(self.entries.T.copy(), self.ring)

    def reduce(self, B: int) -> "PadicMatrix":
        """Truncate to a lower precision."""
        if B > self.ring.B:
            raise PrecisionError("cannot raise precision by truncation")
        ring = self.ring.with_precision(B)
        return PadicMatrix(self.entries % ring.modulus, ring)

    def flatten(self) -> np.ndarray:
        return self.entries.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, PadicMatrix):
            return NotImplemented
        return self.ring == other.ring and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.ring, self.entries.tobytes()))

    def __repr__(self):
        return f"PadicMatrix({self.rows}x{self.cols} mod {self.ring.p}^{self.ring.B})"


def _as_rows(rows, ring: ResidueRing, n: int) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        arr = rows
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, n)
    else:
        rows = list(rows)
        if not rows:
            return ring.zeros((0, n))
        arr = np.array([np.asarray(r) for r in rows], dtype=object)
        if arr.ndim != 2:
            raise DomainError("rows must all have the same length")
    if arr.shape[1] != n:
        raise DomainError(f"expected vectors of length {n}, got {arr.shape[1]}")
    return ring.array(arr)


def _valuations(col: np.ndarray, ring: ResidueRing) -> np.ndarray:
    vals = np.full(col.shape, ring.B, dtype=np.int64)
    pk = 1
    for k in range(ring.B):
        vals[(col % (pk * ring.p) != 0) & (vals == ring.B)] = k
        pk *= ring.p
    return vals


@dataclass(frozen=True)
class HowellBasis:
    """Reduced Howell form of a submodule of (Z/p^B)^n.

    ``pivots[i] = (column, e)`` means row i starts at ``column`` with entry
    p^e; entries above a pivot are reduced mod p^e.
    """

    ring: ResidueRing
    n: int
    rows: np.ndarray
    pivots: tuple = field(default=())

    def __len__(self):
        return self.rows.shape[0]

    def __eq__(self, other):
        if not isinstance(other, HowellBasis):
            return NotImplemented
        return (self.ring == other.ring and self.n == other.n
                and self.pivots == other.pivots and np.array_equal(self.rows, other.rows))

    def __hash__(self):
        return hash((self.ring, self.n, self.pivots, self.rows.tobytes()))

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.ring.p}:{self.ring.B}:{self.n}:".encode())
        for row in self.rows:
            h.update((",".join(str(int(x)) for x in row) + ";").encode())
        return h.hexdigest()


def howell_form(rows, n: int, ring: ResidueRing) -> HowellBasis:
    """Howell basis of the span of ``rows`` inside (Z/p^B)^n."""
    p, q, B = ring.p, ring.modulus, ring.B
    work = _as_rows(rows, ring, n)
    work = work[np.any(work != 0, axis=1)]
    out, pivots = [], []
    for j in range(n):
        if work.shape[0] == 0:
            break
        col = work[:, j]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        vals = _valuations(col[nz], ring)
        i = int(nz[int(np.argmin(vals))])
        e = int(vals.min())
        pe = p**e
        unit = int(col[i]) // pe
        piv = (work[i].astype(object) * ring.inverse(unit)) % q
        piv = piv.astype(ring.dtype)
        rest = np.delete(work, i, axis=0)
        if rest.shape[0]:
            factor = (rest[:, j] // pe).reshape(-1, 1)
            rest = (rest - (factor * piv) % q) % q
        if e > 0:
            extra = (piv * p ** (B - e)) % q
            if np.any(extra != 0):
                rest = np.vstack([rest, extra.reshape(1, -1)])
        work = rest[np.any(rest != 0, axis=1)] if rest.shape[0] else rest
        out.append(piv)
        pivots.append((j, e))
    # reduce entries above each pivot
    for b, (j, e) in enumerate(pivots):
        pe = p**e
        for a in range(b):
            c = int(out[a][j]) // pe
            if c:
                out[a] = (out[a] - (c * out[b]) % q) % q
    mat = np.array(out, dtype=ring.dtype).reshape(len(out), n)
    mat.setflags(write=False)
    return HowellBasis(ring, n, mat, tuple(pivots))


def reduce_vector(v, basis: HowellBasis) -> tuple[np.ndarray, list[int]]:
    """Eliminate v against the basis; returns (remainder, coefficients)."""
    ring = basis.ring
    q = ring.modulus
    v = _as_rows([v], ring, basis.n)[0].astype(object)
    coeffs = []
    for row, (j, e) in zip(basis.rows, basis.pivots):
        x = int(v[j])
        pe = ring.p**e
        c = x // pe
        coeffs.append(c)
        if c:
            v = (v - c * row.astype(object)) % q
    return v, coeffs


def membership(v, basis: HowellBasis) -> bool:
    """True iff v lies in the span of the basis."""
    rem, _ = reduce_vector(v, basis)
    return not np.any(rem != 0)


def span_order(basis: HowellBasis) -> int:
    """Exponent v with |span| = p^v."""
    return sum(basis.ring.B - e for _, e in basis.pivots)


def smith_exponents(rows, n: int, ring: ResidueRing) -> list[int]:
    """Invariant-factor exponents of the span of ``rows``.

    Returns the list of a_i (sorted ascending) with span = (+) Z/p^{a_i}.
    """
    p, q, B = ring.p, ring.modulus, ring.B
    work = _as_rows(rows, ring, n).astype(object)
    work = work[np.any(work != 0, axis=1)] if work.shape[0] else work
    exps = []
    while work.shape[0] and work.shape[1]:
        nzr, nzc = np.nonzero(work)
        if nzr.size == 0:
            break
        vals = _valuations(work[nzr, nzc], ring)
        k = int(np.argmin(vals))
        i, j, e = int(nzr[k]), int(nzc[k]), int(vals[k])
        pe = p**e
        piv = (work[i] * ring.inverse(int(work[i, j]) // pe)) % q
        rest = np.delete(work, i, axis=0)
        if rest.shape[0]:
            rest = (rest - np.outer(rest[:, j] // pe, piv)) % q
        # column operations against the pivot row touch only that row
        work = np.delete(rest, j, axis=1)
        exps.append(B - e)
        if work.shape[0]:
            work = work[np.any(work != 0, axis=1)]
    return sorted(exps)


def invariant_factors(basis: HowellBasis) -> list[int]:
    return smith_exponents(basis.rows, basis.n, basis.ring)


def p_rank(basis: HowellBasis, scale_by_p: bool = False) -> int:
    """F_p-dimension of span/p*span, or of the image of p*span in pF/p^2F.

    With ``scale_by_p`` the count is the number of free Z/p^B summands, which
    for B = 2 is the p-rank of p*span.
    """
    exps = invariant_factors(basis)
    if scale_by_p:
        return sum(1 for a in exps if a == basis.ring.B)
    return len(exps)


def contains(big: HowellBasis, small: HowellBasis) -> bool:
    return all(membership(r, big) for r in small.rows)


def span_sum(*bases: HowellBasis) -> HowellBasis:
    ring, n = bases[0].ring, bases[0].n
    rows = [r for b in bases for r in b.rows]
    return howell_form(np.array(rows, dtype=ring.dtype).reshape(len(rows), n), n, ring)


def scale_span(basis: HowellBasis, c: int) -> HowellBasis:
    rows = (basis.rows.astype(object) * c) % basis.ring.modulus
    return howell_form(rows, basis.n, basis.ring)


def left_kernel(A, ring: ResidueRing) -> HowellBasis:
    """Howell basis of {x : x A = 0} for an r x c matrix A."""
    A = ring.array(np.asarray(A, dtype=object))
    r, c = A.shape
    aug = np.hstack([A, np.eye(r, dtype=ring.dtype)])
    H = howell_form(aug, c + r, ring)
    keep = [i for i, (j, _) in enumerate(H.pivots) if j >= c]
    rows = H.rows[keep][:, c:] if keep else ring.zeros((0, r))
    return howell_form(rows, r, ring)


def free_echelon(basis: HowellBasis) -> tuple[np.ndarray, list[int]]:
    """Rows and pivot columns of a basis known to be free and saturated.

    Raises PrecisionError when some pivot is not a unit, i.e. the span is
    not a direct summand of the ambient module.
    """
    bad = [(j, e) for j, e in basis.pivots if e != 0]
    if bad:
        raise PrecisionError(f"span is not saturated: non-unit pivots {bad[:4]}")
    return np.array(basis.rows), [j for j, _ in basis.pivots]


def vectors_mod(vectors: Iterable[Sequence[int]], ring: ResidueRing) -> list[tuple[int, ...]]:
    return [tuple(int(x) % ring.modulus for x in v) for v in vectors]


def reduce_many(V: np.ndarray, basis: HowellBasis) -> np.ndarray:
    """Canonical remainders of the rows of V modulo the span (vectorized)."""
    ring = basis.ring
    q = ring.modulus
    small = q < 2**31
    V = np.array(V, dtype=np.int64 if small else object) % q
    rows = basis.rows.astype(V.dtype)
    for row, (j, e) in zip(rows, basis.pivots):
        c = V[:, j] // ring.p**e
        if small:
            V = (V - c[:, None] * row[None, :]) % q
        else:
            V = (V - np.outer(c, row)) % q
    return V
