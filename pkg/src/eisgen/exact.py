"""Exact oracle: modular symbols over the cyclotomic field Q(zeta_n).

Used by ``--exact-check`` for small p.  The space is rebuilt with exact
rational arithmetic in Q(zeta_n), n the order of the character, and the
traces of T_i, of T_i^2 and of U_p on the cuspidal subspace are mapped
into Z/p^B (zeta_n to the Teichmuller root of unity used by the character)
and compared with the traces of the matrices under test.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

from .arith import ResidueRing, teichmuller
from .characters import factorize, omega_power, primitive_root
from .modsym import heilbronn_merel, p1_list, p1_normalize, sturm_count

EXACT_MAX_P = 37


def cyclotomic_poly(n: int) -> list[int]:
    """Coefficients of Phi_n, lowest degree first."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _exact_div(num, cyclotomic_poly(d))
    return num


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1] // b[-1]
        out[i] = c
        for j, x in enumerate(b):
            a[i + j] -= c * x
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return out


class Cyclotomic:
    """Q(zeta_n); elements are tuples of Fractions in the power basis."""

    def __init__(self, n: int):
        self.n = n
        self.phi = cyclotomic_poly(n)
        self.D = len(self.phi) - 1
        self.zero = tuple(Fraction(0) for _ in range(self.D))
        self.one = self.const(1)

    def const(self, a) -> tuple:
        return (Fraction(a),) + self.zero[1:]

    def _reduce(self, c: list) -> tuple:
        D = self.D
        for k in range(len(c) - 1, D - 1, -1):
            x = c[k]
            if x:
                for i, h in enumerate(self.phi):
                    c[k - D + i] -= x * h
        return tuple(c[:D]) + self.zero[len(c[:D]):]

    def zeta_pow(self, j: int) -> tuple:
        c = [Fraction(0)] * (j % self.n + 1)
        c[-1] = Fraction(1)
        return self._reduce(c)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def mul(self, a, b):
        c = [Fraction(0)] * (2 * self.D - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        c[i + j] += x * y
        return self._reduce(c)

    def is_zero(self, a) -> bool:
        return not any(a)

    def inv(self, a):
        """Solve a * y = 1 through the multiplication matrix."""
        D = self.D
        cols = [self.mul(a, self.zeta_pow(j)) for j in range(D)]
        M = [[cols[j][i] for j in range(D)] + [Fraction(int(i == 0))] for i in range(D)]
        for c in range(D):
            r = next(r for r in range(c, D) if M[r][c])
            M[c], M[r] = M[r], M[c]
            piv = M[c][c]
            M[c] = [x / piv for x in M[c]]
            for r2 in range(D):
                if r2 != c and M[r2][c]:
                    f = M[r2][c]
                    M[r2] = [x - f * y for x, y in zip(M[r2], M[c])]
        return tuple(M[i][D] for i in range(D))

    def embed(self, a, z: int, q: int) -> int:
        """Image under zeta_n -> z in Z/q; denominators must be units."""
        total = 0
        for i, x in enumerate(a):
            total += x.numerator * pow(x.denominator, -1, q) * pow(z, i, q)
        return total % q


def rref(rows: list[list], ncols: int, K: Cyclotomic) -> tuple[list[list], list[int]]:
    rows = [list(r) for r in rows]
    pivots, r = [], 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if not K.is_zero(rows[i][c])), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = K.inv(rows[r][c])
        rows[r] = [K.mul(inv, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not K.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [K.sub(x, K.mul(f, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


class ExactSpace:
    """Cuspidal symbols of level p and character omega^j over Q(zeta_n)."""

    def __init__(self, p: int, j: int, sign: int = 0):
        self.p = p
        n = (p - 1) // gcd(j % (p - 1), p - 1)
        self.K = K = Cyclotomic(n)
        chi = omega_power(p, j, ResidueRing(p, 1))
        step = (p - 1) // n
        self.cv = [K.zero] + [K.zeta_pow(chi.exponent(a) // step) for a in range(1, p)]
        self.z_root = (n, step)
        pts = p1_list(p)
        self.points = pts
        npts = p + 1
        rels = []

        def add(terms):
            row = [K.zero] * npts
            for (c, d), s in terms:
                i, u = p1_normalize(c, d, p)
                row[i] = K.add(row[i], K.mul(K.const(s), self.cv[u]))
            rels.append(row)

        for c, d in pts:
            add([((c, d), 1), ((d, -c), 1)])
            add([((c, d), 1), ((d, -c - d), 1), ((-c - d, c), 1)])
            if sign:
                add([((c, d), 1), ((-c, d), -1)])
        R, piv = rref(rels, npts, K)
        free = [g for g in range(npts) if g not in set(piv)]
        self.free = free
        fidx = {g: i for i, g in enumerate(free)}
        G = [[K.zero] * len(free) for _ in range(npts)]
        for g in free:
            G[g][fidx[g]] = K.one
        for row, jcol in zip(R, piv):
            G[jcol] = [K.sub(K.zero, row[g]) for g in free]
        self.G = G
        bnd = []
        for g in free:
            c, d = pts[g]
            v = [K.zero, K.zero]
            if c:
                v[1] = K.add(v[1], self.cv[c])
            else:
                v[0] = K.add(v[0], self.cv[d])
            if d:
                v[1] = K.sub(v[1], self.cv[d])
            else:
                v[0] = K.sub(v[0], self.cv[c])
            bnd.append(v)
        # left kernel of bnd: null space of its transpose
        T, tp = rref([[bnd[i][c] for i in range(len(free))] for c in range(2)], len(free), K)
        basis = []
        for fcol in (c for c in range(len(free)) if c not in tp):
            v = [K.zero] * len(free)
            v[fcol] = K.one
            for row, pc in zip(T, tp):
                v[pc] = K.sub(K.zero, row[fcol])
            basis.append(v)
        self.W, self.wpiv = rref(basis, len(free), K)
        self._ops: dict = {}

    @property
    def d(self) -> int:
        return len(self.W)

    def _quotient_op(self, n: int) -> list[list]:
        K, p = self.K, self.p
        out = []
        for g in self.free:
            c, d = self.points[g]
            coef = [K.zero] * (p + 1)
            for a, b, cc, dd in heilbronn_merel(n):
                nz = p1_normalize(c * a + d * cc, c * b + d * dd, p)
                if nz is None:
                    continue
                j, u = nz
                coef[j] = K.add(coef[j], self.cv[u])
            out.append(_vecmat(coef, self.G, K))
        return out

    def operator(self, n: int) -> list[list]:
        """Matrix (rows = images of the cuspidal basis) of T_n, or U_p when n = p."""
        if n in self._ops:
            return self._ops[n]
        K = self.K
        if n == 1:
            m = [[K.one if i == j else K.zero for j in range(self.d)] for i in range(self.d)]
        elif len(factorize(n)) == 1 and sum(factorize(n).values()) == 1:
            TQ = self._quotient_op(n)
            m = []
            for w in self.W:
                img = _vecmat(w, TQ, K)
                coords = [img[c] for c in self.wpiv]
                if _vecmat(coords, self.W, K) != img:
                    raise ArithmeticError("cuspidal subspace not stable")
                m.append(coords)
        else:
            fac = factorize(n)
            if len(fac) > 1:
                m = None
                for ell, r in fac.items():
                    part = self.operator(ell**r)
                    m = part if m is None else _matmul(m, part, K)
            else:
                (ell, r), = fac.items()
                t1 = self.operator(ell)
                if ell == self.p:
                    m = _matmul(t1, self.operator(ell ** (r - 1)), K)
                else:
                    prev = self.operator(ell ** (r - 2))
                    s = K.mul(K.const(ell), self.cv[ell % self.p])
                    a = _matmul(t1, self.operator(ell ** (r - 1)), K)
                    m = [[K.sub(x, K.mul(s, y)) for x, y in zip(ra, rb)] for ra, rb in zip(a, prev)]
        self._ops[n] = m
        return m


def _vecmat(v, M, K):
    if not M:
        return []
    out = [K.zero] * len(M[0])
    for x, row in zip(v, M):
        if not K.is_zero(x):
            out = [K.add(o, K.mul(x, y)) for o, y in zip(out, row)]
    return out


def _matmul(A, B, K):
    return [_vecmat(r, B, K) for r in A]


def _trace(M, K):
    t = K.zero
    for i, row in enumerate(M):
        t = K.add(t, row[i])
    return t


def _trace_mod(m) -> int:
    q = m.ring.modulus
    return sum(int(m.entries[i, i]) for i in range(m.rows)) % q


def exact_cross_check(p: int, k: int, mats: dict, variant: str = "full") -> dict:
    """Compare traces of the cached matrices with exact cyclotomic ones."""
    if p > EXACT_MAX_P:
        return {"enabled": False, "reason": f"exact mode covers p <= {EXACT_MAX_P}", "agree": True}
    ts, up = mats["T"], mats["U"]
    ring = up.ring
    q = ring.modulus
    ex = ExactSpace(p, k - 2, sign=1 if variant == "plus" else 0)
    n, step = ex.z_root
    z = teichmuller(primitive_root(p), ring).value
    z = pow(z, step, q)
    K = ex.K
    mismatches = []
    compared = 0
    if ex.d != up.rows:
        mismatches.append(f"dimension {ex.d} != {up.rows}")
    else:
        checks = [(f"tr T_{i}", ex.operator(i), t) for i, t in enumerate(ts, start=1)]
        checks.append(("tr U_p", ex.operator(p), up))
        for label, E, m in list(checks):
            checks.append((label + "^2", _matmul(E, E, K), m @ m))
        for label, E, m in checks:
            compared += 1
            if K.embed(_trace(E, K), z, q) != _trace_mod(m):
                mismatches.append(label)
    return {"enabled": True, "field": f"Q(zeta_{n})", "dimension": ex.d,
            "sturm": sturm_count(p), "compared": compared, "mismatches": mismatches,
            "agree": not mismatches}
