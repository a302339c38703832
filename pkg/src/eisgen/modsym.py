"""Weight-2 modular symbols of prime level p with an even nebentypus.

The space is presented by Manin symbols [c:d], (c:d) in P^1(F_p), with the
twisted relation [(u c, u d)] = chi(u) [(c, d)], modulo the two-term and
three-term relations.  Coefficients live in Z/p^B: the character values are
Teichmuller lifts, so the construction is the reduction of the Z_p-lattice
spanned by Manin symbols.  That lattice and the boundary map onto the cusp
module are free with free cokernel, so every kernel and quotient computed
here is free; any non-unit pivot is reported as a PrecisionError.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import (DomainError, PadicMatrix, PrecisionError, ResidueRing, free_echelon,
                    howell_form, is_prime, left_kernel, matmul_mod)
from .characters import DirichletCharacter


class UnsupportedLevel(DomainError):
    pass


# ---------------------------------------------------------------------------
# P^1(F_p)

def p1_list(p: int) -> list[tuple[int, int]]:
    """Canonical points of P^1(F_p): (0:1) followed by (1:t), t = 0..p-1."""
    return [(0, 1)] + [(1, t) for t in range(p)]


def p1_normalize(c: int, d: int, p: int) -> tuple[int, int] | None:
    """(index, u) with (c, d) = u * p1_list(p)[index]; None for (0, 0)."""
    c %= p
    d %= p
    if c == 0:
        if d == 0:
            return None
        return 0, d
    return 1 + d * pow(c, -1, p) % p, c


# ---------------------------------------------------------------------------
# Heilbronn matrices

@lru_cache(maxsize=64)
def heilbronn_merel(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """Merel's matrices [[a, b], [c, d]] with a > b >= 0, d > c >= 0, ad - bc = n."""
    out = []
    for a in range(1, n + 1):
        for d in range(1, n + 2 - a):
            m = a * d - n
            if m < 0:
                continue
            if m == 0:
                # bc = 0: b = 0 and any c < d, or c = 0 and 0 < b < a
                out.extend((a, 0, c, d) for c in range(d))
                out.extend((a, b, 0, d) for b in range(1, a))
                continue
            for b in range(1, a):
                if m % b == 0:
                    c = m // b
                    if c < d:
                        out.append((a, b, c, d))
    return tuple(out)


# ---------------------------------------------------------------------------
# dimension oracle

def cusp_form_dimension(p: int, chi: DirichletCharacter) -> int:
    """dim S_2(Gamma_0(p), chi) from the Cohen-Oesterle formula (chi even, prime p)."""
    if not chi.is_even():
        return 0
    n = p - 1

    def cval(a: int) -> complex:
        return cmath.exp(2j * cmath.pi * chi.exponent(a) / n)

    s4 = sum(cval(x) for x in range(1, p) if (x * x + 1) % p == 0)
    s3 = sum(cval(x) for x in range(1, p) if (x * x + x + 1) % p == 0)
    val = Fraction(p + 1, 12) - 1
    main = float(val) - (s4.real / 4) - (s3.real / 3)
    if chi.is_trivial():
        main += 1  # dim M_0 = 1 for the trivial character
    out = round(main)
    if abs(main - out) > 1e-6:
        raise ArithmeticError("non-integral dimension")
    return out


# ---------------------------------------------------------------------------
# the space

@dataclass
class ModularSymbolSpace:
    """Cuspidal weight-2 modular symbols for Gamma_0(p) with character chi.

    ``gens_to_free`` maps each P^1 generator to its coordinates in the free
    quotient; ``cusp_basis`` (d x Q) spans the kernel of the boundary map in
    reduced echelon form with unit pivots at ``cusp_pivots``.
    """

    p: int
    chi: DirichletCharacter
    ring: ResidueRing
    sign: int
    points: list
    chi_values: list
    gens_to_free: np.ndarray
    free_gens: list
    boundary: np.ndarray
    cusp_basis: np.ndarray
    cusp_pivots: list
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def d(self) -> int:
        return self.cusp_basis.shape[0]

    @property
    def quotient_dim(self) -> int:
        return len(self.free_gens)

    @property
    def hecke_rank(self) -> int:
        """Expected Z_p-rank of the Hecke algebra on this space."""
        return self.d if self.sign else self.d // 2

    def symbol(self, c: int, d: int) -> np.ndarray | None:
        """Free-quotient coordinates of the Manin symbol [(c, d)]."""
        nz = p1_normalize(c, d, self.p)
        if nz is None:
            return None
        i, u = nz
        return (self.gens_to_free[i] * self.chi_values[u]) % self.ring.modulus

    def hecke_on_quotient(self, n: int) -> np.ndarray:
        """Q x Q matrix of T_n on the full symbol quotient (row = image of a free generator)."""
        key = ("Q", n)
        if key in self._cache:
            return self._cache[key]
        p, q = self.p, self.ring.modulus
        mats = heilbronn_merel(n)
        coef = np.zeros((len(self.free_gens), p + 1), dtype=object)
        for r, g in enumerate(self.free_gens):
            c, d = self.points[g]
            row = coef[r]
            for a, b, cc, dd in mats:
                nz = p1_normalize(c * a + d * cc, c * b + d * dd, p)
                if nz is None:
                    continue
                j, u = nz
                row[j] += self.chi_values[u]
        coef = self.ring.array(coef)
        out = matmul_mod(coef, self.gens_to_free, q)
        self._cache[key] = out
        return out

    def restrict(self, TQ: np.ndarray) -> PadicMatrix:
        """Matrix of a quotient endomorphism on the cuspidal basis."""
        q = self.ring.modulus
        image = matmul_mod(self.cusp_basis, TQ, q)
        coords = image[:, self.cusp_pivots]
        if not np.array_equal(matmul_mod(coords, self.cusp_basis, q), image):
            raise PrecisionError("cuspidal subspace is not stable under the operator")
        return PadicMatrix(coords, self.ring)

    def boundary_of(self, TQ: np.ndarray) -> np.ndarray:
        return matmul_mod(TQ, self.boundary, self.ring.modulus)


def _chi_table(chi: DirichletCharacter, p: int) -> list[int]:
    vals = chi.values()
    if len(vals) == 1:  # modulus 1
        vals = [0] + [vals[0]] * (p - 1)
    return vals


def build_space(p: int, chi: DirichletCharacter, ring: ResidueRing | None = None,
                sign: int = 0) -> ModularSymbolSpace:
    """Build the cuspidal symbol space of level p, weight 2, character chi.

    ``sign = +1`` selects the quotient by the star involution [c:d] -> [-c:d].
    An odd character yields the zero space.
    """
    if not is_prime(p) or p < 5:
        raise UnsupportedLevel(f"level {p} is not a prime >= 5")
    if chi.modulus not in (1, p):
        raise UnsupportedLevel("character modulus must be the level")
    if sign not in (0, 1):
        raise DomainError("sign must be 0 or +1")
    ring = ring or chi.ring
    if ring.p != p:
        raise DomainError("coefficients must be p-adic for the level p")
    chi = chi.with_ring(ring)
    q = ring.modulus
    pts = p1_list(p)
    cv = _chi_table(chi, p)
    npts = p + 1

    if not chi.is_even():
        empty = ring.zeros((0, 0))
        return ModularSymbolSpace(p, chi, ring, sign, pts, cv, ring.zeros((npts, 0)), [],
                                  ring.zeros((0, 2)), empty, [])

    rels = []

    def add(terms):
        row = [0] * npts
        for (c, d), s in terms:
            i, u = p1_normalize(c, d, p)
            row[i] = (row[i] + s * cv[u]) % q
        if any(row):
            rels.append(row)

    for c, d in pts:
        add([((c, d), 1), ((d, -c), 1)])
        add([((c, d), 1), ((d, -c - d), 1), ((-c - d, c), 1)])
        if sign:
            add([((c, d), 1), ((-c, d), -1)])

    H = howell_form(np.array(rels, dtype=object), npts, ring)
    if any(e for _, e in H.pivots):
        raise PrecisionError("relation module has torsion at this precision")
    pivcols = [j for j, _ in H.pivots]
    free = [j for j in range(npts) if j not in set(pivcols)]
    fidx = {g: i for i, g in enumerate(free)}
    G = ring.zeros((npts, len(free)))
    for g in free:
        G[g, fidx[g]] = 1
    for row, (j, _) in zip(H.rows, H.pivots):
        G[j] = (-row[free]) % q

    # boundary: [c:d] -> [a/c] - [b/d] for a lift [[a, b], [c, d]]; cusps over 0
    # carry chi(denominator), the cusp at infinity chi(lifted numerator)^-1
    bnd = ring.zeros((len(free), 2))  # columns: infinity, zero
    for g in free:
        c, d = pts[g]
        v = [0, 0]
        if c:
            v[1] += cv[c]
        else:
            v[0] += cv[d]
        if d:
            v[1] -= cv[d]
        else:
            v[0] -= cv[c]
        bnd[fidx[g]] = [x % q for x in v]

    K = left_kernel(bnd, ring)
    rows, piv = free_echelon(K)
    return ModularSymbolSpace(p, chi, ring, sign, pts, cv, G, free, bnd,
                              rows.reshape(len(piv), len(free)), piv)


def relation_matrix(space: ModularSymbolSpace) -> np.ndarray:
    """All Manin relations as rows over the P^1 generators (for self-checks)."""
    p, q, cv = space.p, space.ring.modulus, space.chi_values
    rels = []
    for c, d in space.points:
        for terms in ([((c, d), 1), ((d, -c), 1)],
                      [((c, d), 1), ((d, -c - d), 1), ((-c - d, c), 1)]):
            row = [0] * (p + 1)
            for (x, y), s in terms:
                i, u = p1_normalize(x, y, p)
                row[i] = (row[i] + s * cv[u]) % q
            rels.append(row)
    return space.ring.array(rels)


# ---------------------------------------------------------------------------
# Hecke operators

@dataclass(frozen=True)
class HeckeOperator:
    label: str
    n: int
    matrix: PadicMatrix


def _factor(n: int) -> dict[int, int]:
    out, f = {}, 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def hecke_operator(space: ModularSymbolSpace, n: int, direct: bool = False) -> HeckeOperator:
    """T_n (U_p when p | n) on the cuspidal basis.

    Prime indices use Heilbronn matrices; composite indices are assembled
    from prime ones by multiplicativity unless ``direct`` is set.
    """
    if n < 1:
        raise DomainError("n must be positive")
    key = ("T", n, direct)
    if key in space._cache:
        return space._cache[key]
    label = f"U_{n}" if n == space.p else f"T_{n}"
    d = space.d
    if n == 1:
        op = HeckeOperator(label, 1, PadicMatrix.identity(d, space.ring))
    elif direct or len(_factor(n)) == 1 and sum(_factor(n).values()) == 1:
        op = HeckeOperator(label, n, space.restrict(space.hecke_on_quotient(n)))
    else:
        op = HeckeOperator(label, n, _composite(space, n))
    space._cache[key] = op
    return op


def _composite(space: ModularSymbolSpace, n: int) -> PadicMatrix:
    fac = _factor(n)
    if len(fac) > 1:
        out = None
        for ell, r in fac.items():
            m = hecke_operator(space, ell**r).matrix
            out = m if out is None else out @ m
        return out
    (ell, r), = fac.items()
    t1 = hecke_operator(space, ell).matrix
    if ell == space.p:
        out = t1
        for _ in range(r - 1):
            out = out @ t1
        return out
    prev = hecke_operator(space, ell ** (r - 2)).matrix if r >= 2 else None
    cur = hecke_operator(space, ell ** (r - 1)).matrix
    scal = ell * space.chi.value(ell) % space.ring.modulus
    return t1 @ cur - prev.scale(scal)


def sturm_count(p: int) -> int:
    """Number of T_i, i <= (p+1)/6, that span the weight-2 Hecke algebra of level p."""
    if p < 5:
        raise DomainError("p must be >= 5")
    return (p + 1) // 6


def diamond_scalar(space: ModularSymbolSpace, ell: int) -> int:
    return space.chi.value(ell)
