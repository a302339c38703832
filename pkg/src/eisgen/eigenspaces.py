"""Eigenspace decompositions of finite Z/p^m[Delta]-modules, Delta abelian
of order prime to p.

A module is a quotient F/R of F = (Z/p^m)^n with one action matrix per
generator of Delta (row convention: delta sends v to v @ M).  Character
values live in an unramified extension S = Z/p^m[x]/(h) large enough to
contain the exponent-th roots of unity; the idempotent of a Frobenius
class of characters has coefficients in Z/p^m and acts on F directly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd, lcm

import numpy as np

from .arith import (DomainError, HowellBasis, ResidueRing, howell_form, matmul_mod,
                    reduce_many, span_order)
from .characters import factorize, primitive_root


# ---------------------------------------------------------------------------
# polynomials mod p (coefficient lists, lowest degree first)

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], h: list[int], p: int) -> list[int]:
    a = [x % p for x in a]
    _trim(a)
    inv = pow(h[-1], -1, p)
    while len(a) >= len(h):
        c = a[-1] * inv % p
        s = len(a) - len(h)
        for i, hc in enumerate(h):
            a[s + i] = (a[s + i] - c * hc) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], h: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _pmod(out, h, p)


def _ppowmod(a: list[int], e: int, h: list[int], p: int) -> list[int]:
    result, base = [1], _pmod(a, h, p)
    while e:
        if e & 1:
            result = _pmulmod(result, base, h, p)
        base = _pmulmod(base, base, h, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([x % p for x in a]), _trim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible_mod_p(h: list[int], p: int) -> bool:
    """Rabin's test for a monic polynomial h over F_p."""
    f = len(h) - 1
    if f <= 0:
        return False
    x = [0, 1]
    if _pmod(_psub(_ppowmod(x, p**f, h, p), x, p), h, p):
        return False
    for r in factorize(f):
        g = _pgcd(h, _psub(_ppowmod(x, p ** (f // r), h, p), x, p), p)
        if len(g) > 1:
            return False
    return True


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def multiplicative_order(a: int, n: int) -> int:
    if gcd(a, n) != 1:
        raise DomainError(f"{a} is not a unit mod {n}")
    k, x = 1, a % n
    while x != 1 % n:
        x = x * a % n
        k += 1
    return k


# ---------------------------------------------------------------------------
# unramified coefficient ring

class UnramifiedRing:
    """Z/p^m[x]/(h) with h monic of degree f and irreducible mod p."""

    def __init__(self, p: int, m: int, f: int):
        self.p, self.m, self.f = p, m, f
        self.base = ResidueRing(p, m)
        self.q = p**m
        self.h = self._find_modulus()

    def _find_modulus(self) -> list[int]:
        p, f = self.p, self.f
        if f == 1:
            return [0, 1]
        for tail in itertools.product(range(p), repeat=f):
            h = list(tail) + [1]
            if h[0] and is_irreducible_mod_p(h, p):
                return h
        raise DomainError("no irreducible polynomial found")

    def element(self, coeffs) -> tuple[int, ...]:
        c = [int(x) % self.q for x in coeffs] + [0] * self.f
        return tuple(c[: self.f])

    def const(self, a: int) -> tuple[int, ...]:
        return self.element([a])

    def mul(self, a, b) -> tuple[int, ...]:
        f, q = self.f, self.q
        out = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        # h is monic, so reduce from the top down without inverses
        for k in range(len(out) - 1, f - 1, -1):
            c = out[k] % q
            if c:
                for i, hc in enumerate(self.h):
                    out[k - f + i] -= c * hc
        return self.element(out[:f])

    def add(self, a, b) -> tuple[int, ...]:
        return self.element([x + y for x, y in zip(a, b)])

    def pow(self, a, e: int) -> tuple[int, ...]:
        result, base = self.const(1), a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_const(self, a) -> bool:
        return all(x == 0 for x in a[1:])

    def mult_matrix(self, a) -> np.ndarray:
        """f x f matrix of multiplication by a, row convention on the basis x^i."""
        rows = [self.mul(self.element([0] * i + [1]), a) for i in range(self.f)]
        return self.base.array(np.array(rows, dtype=object))

    def root_of_unity(self, e: int) -> tuple[int, ...]:
        """A primitive e-th root of unity (Teichmuller), e | p^f - 1."""
        p, f = self.p, self.f
        Q = p**f
        if (Q - 1) % e:
            raise DomainError(f"S has no primitive {e}-th root of unity")
        primes = list(factorize(e))
        if f == 1:
            cands = [(primitive_root(p),)]
        else:
            cands = (tuple(c) for c in itertools.product(range(p), repeat=f) if any(c))
        for c in cands:
            z = self.pow(self.element(c), Q ** (self.m - 1))  # Teichmuller lift
            z = self.pow(z, (Q - 1) // e)
            if all(self.pow(z, e // r) != self.const(1) for r in primes):
                return z
        raise DomainError("no primitive root of unity found")


# ---------------------------------------------------------------------------
# the group and its characters

@dataclass(frozen=True)
class DeltaGroup:
    """Finite abelian group prod Z/n_i, written additively on exponent tuples."""

    orders: tuple

    def __post_init__(self):
        if any(n < 1 for n in self.orders):
            raise DomainError("cyclic factor orders must be positive")

    @property
    def size(self) -> int:
        return reduce(lambda a, b: a * b, self.orders, 1)

    @property
    def exponent(self) -> int:
        return reduce(lcm, self.orders, 1)

    @cached_property
    def elements(self) -> list[tuple]:
        return list(itertools.product(*(range(n) for n in self.orders)))

    @cached_property
    def index(self) -> dict:
        return {g: i for i, g in enumerate(self.elements)}

    def mul(self, a: tuple, b: tuple) -> tuple:
        return tuple((x + y) % n for x, y, n in zip(a, b, self.orders))

    def inv(self, a: tuple) -> tuple:
        return tuple(-x % n for x, n in zip(a, self.orders))

    def generators(self) -> list[tuple]:
        k = len(self.orders)
        return [tuple(int(i == j) for j in range(k)) for i in range(k)]

    def characters(self) -> list["DeltaCharacter"]:
        return [DeltaCharacter(self, c) for c in self.elements]

    def check_prime_to(self, p: int) -> None:
        if self.size % p == 0:
            raise DomainError(f"|Delta| = {self.size} is not prime to {p}")


@dataclass(frozen=True)
class DeltaCharacter:
    """psi(g) = zeta_e^(sum_i c_i g_i e/n_i), e the exponent of the group."""

    group: DeltaGroup
    exps: tuple

    def log(self, g: tuple) -> int:
        e = self.group.exponent
        return sum(c * x * (e // n) for c, x, n in zip(self.exps, g, self.group.orders)) % e

    def __mul__(self, other: "DeltaCharacter") -> "DeltaCharacter":
        return DeltaCharacter(self.group, self.group.mul(self.exps, other.exps))

    def __pow__(self, k: int) -> "DeltaCharacter":
        return DeltaCharacter(self.group, tuple(c * k % n for c, n in zip(self.exps, self.group.orders)))

    def inverse(self) -> "DeltaCharacter":
        return self ** -1

    def is_trivial(self) -> bool:
        return not any(self.exps)

    @classmethod
    def trivial(cls, group: DeltaGroup) -> "DeltaCharacter":
        return cls(group, tuple(0 for _ in group.orders))


def residue_degree(group: DeltaGroup, p: int) -> int:
    """Degree over Z_p of the ring generated by all character values."""
    group.check_prime_to(p)
    return multiplicative_order(p, group.exponent)


def conjugacy_class(psi: DeltaCharacter, p: int) -> tuple:
    """Frobenius orbit {psi, psi^p, psi^(p^2), ...}, sorted."""
    orbit, cur = set(), psi
    while cur not in orbit:
        orbit.add(cur)
        cur = cur**p
    return tuple(sorted(orbit, key=lambda c: c.exps))


def conjugacy_classes(group: DeltaGroup, p: int) -> list[tuple]:
    """The set Sigma of Frobenius classes of characters."""
    seen, out = set(), []
    for psi in group.characters():
        if psi not in seen:
            cls = conjugacy_class(psi, p)
            seen.update(cls)
            out.append(cls)
    return out


def sigma2(phi: DeltaCharacter, p: int) -> list[tuple]:
    """Pairs ([chi], [psi]) such that phi theta^-1 lies in [psi] for some theta in [chi]."""
    classes = conjugacy_classes(phi.group, p)
    where = {c: i for i, cls in enumerate(classes) for c in cls}
    out = set()
    for i, cls in enumerate(classes):
        for theta in cls:
            out.add((i, where[phi * theta.inverse()]))
    return [(classes[i], classes[j]) for i, j in sorted(out)]


# ---------------------------------------------------------------------------
# group algebra

@dataclass(frozen=True)
class GroupAlgebraElement:
    group: DeltaGroup
    ring: ResidueRing
    coeffs: tuple  # indexed like group.elements

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        G, q = self.group, self.ring.modulus
        out = [0] * G.size
        for a, x in zip(G.elements, self.coeffs):
            if x:
                for b, y in zip(G.elements, other.coeffs):
                    if y:
                        k = G.index[G.mul(a, b)]
                        out[k] = (out[k] + x * y) % q
        return GroupAlgebraElement(G, self.ring, tuple(out))

    def __add__(self, other):
        q = self.ring.modulus
        return GroupAlgebraElement(self.group, self.ring,
                                   tuple((x + y) % q for x, y in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        q = self.ring.modulus
        return GroupAlgebraElement(self.group, self.ring,
                                   tuple((x - y) % q for x, y in zip(self.coeffs, other.coeffs)))

    @classmethod
    def one(cls, group: DeltaGroup, ring: ResidueRing):
        return cls.basis(group, ring, tuple(0 for _ in group.orders))

    @classmethod
    def zero(cls, group: DeltaGroup, ring: ResidueRing):
        return cls(group, ring, tuple(0 for _ in group.elements))

    @classmethod
    def basis(cls, group: DeltaGroup, ring: ResidueRing, g: tuple):
        c = [0] * group.size
        c[group.index[g]] = 1
        return cls(group, ring, tuple(c))


def coefficient_ring(group: DeltaGroup, ring: ResidueRing) -> tuple[UnramifiedRing, tuple]:
    """The unramified ring holding all character values, and zeta_e in it."""
    f = residue_degree(group, ring.p)
    S = UnramifiedRing(ring.p, ring.B, f)
    return S, S.root_of_unity(group.exponent)


def character_value(psi: DeltaCharacter, g: tuple, S: UnramifiedRing, zeta) -> tuple:
    return S.pow(zeta, psi.log(g))


def idempotent(psi: DeltaCharacter, ring: ResidueRing, p: int | None = None) -> GroupAlgebraElement:
    """e_[psi] = |Delta|^-1 sum_{theta in [psi]} sum_delta theta(delta^-1) delta.

    For a character with values in Z_p the class is {psi} and this is the
    usual e_psi.  The coefficients always lie in Z/p^m.
    """
    G = psi.group
    p = ring.p if p is None else p
    G.check_prime_to(p)
    S, zeta = coefficient_ring(G, ring)
    inv_n = pow(G.size, -1, ring.modulus)
    cls = conjugacy_class(psi, p)
    coeffs = []
    for g in G.elements:
        acc = S.const(0)
        for theta in cls:
            acc = S.add(acc, S.pow(zeta, theta.log(G.inv(g))))
        if not S.is_const(acc):
            raise ArithmeticError("class sum left the base ring")
        coeffs.append(acc[0] * inv_n % ring.modulus)
    return GroupAlgebraElement(G, ring, tuple(coeffs))


# ---------------------------------------------------------------------------
# modules

def quotient_invariants(R: HowellBasis) -> list[int]:
    """Exponents a_i (ascending) with F/R = (+) Z/p^{a_i}, zero factors dropped."""
    ring, n = R.ring, R.n
    B = ring.B
    base = span_order(R)
    logs = []
    for j in range(B + 1):
        scaled = np.eye(n, dtype=object) * ring.p**j % ring.modulus
        rows = np.vstack([scaled, R.rows]) if len(R) else scaled
        logs.append(span_order(howell_form(rows, n, ring)) - base)
    count_above = [logs[j] - logs[j + 1] for j in range(B)]  # factors with a > j
    out = []
    for a in range(1, B + 1):
        exact = count_above[a - 1] - (count_above[a] if a < B else 0)
        out.extend([a] * exact)
    return out


@dataclass
class DeltaModule:
    """F/R with F = (Z/p^m)^n and commuting actions of the group generators."""

    group: DeltaGroup
    ring: ResidueRing
    n: int
    relations: HowellBasis
    actions: tuple  # one n x n matrix per generator

    def __post_init__(self):
        self.group.check_prime_to(self.ring.p)
        self.actions = tuple(self.ring.array(np.asarray(a, dtype=object)).reshape(self.n, self.n)
                             for a in self.actions)
        if len(self.actions) != len(self.group.orders):
            raise DomainError("need one action matrix per generator")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_cyclic(cls, group: DeltaGroup, ring: ResidueRing, exponents, actions) -> "DeltaModule":
        """(+) Z/p^{a_i} with the given action matrices."""
        n = len(exponents)
        rows = [[ring.p**a if i == j else 0 for j in range(n)] for i, a in enumerate(exponents)]
        R = howell_form(np.array(rows, dtype=object).reshape(n, n) % ring.modulus, n, ring)
        return cls(group, ring, n, R, tuple(actions))

    @classmethod
    def regular(cls, group: DeltaGroup, ring: ResidueRing) -> "DeltaModule":
        """Z/p^m[Delta] acting on itself."""
        els = group.elements
        acts = []
        for g in group.generators():
            M = np.zeros((len(els), len(els)), dtype=object)
            for i, a in enumerate(els):
                M[i, group.index[group.mul(a, g)]] = 1
            acts.append(M)
        return cls(group, ring, len(els), howell_form([], len(els), ring), tuple(acts))

    @classmethod
    def trivial_action(cls, group: DeltaGroup, ring: ResidueRing, exponents) -> "DeltaModule":
        n = len(exponents)
        eye = np.eye(n, dtype=object)
        return cls.from_cyclic(group, ring, exponents, [eye] * len(group.orders))

    # -- structure ----------------------------------------------------
    @property
    def log_order(self) -> int:
        return self.ring.B * self.n - span_order(self.relations)

    @property
    def order(self) -> int:
        return self.ring.p**self.log_order

    def invariants(self) -> list[int]:
        return quotient_invariants(self.relations)

    def element_matrix(self, g: tuple) -> np.ndarray:
        q = self.ring.modulus
        M = self.ring.array(np.eye(self.n, dtype=object))
        for k, A in zip(g, self.actions):
            for _ in range(k):
                M = matmul_mod(M, A, q)
        return M

    def apply(self, x: GroupAlgebraElement) -> np.ndarray:
        """Matrix of a group-algebra element."""
        q = self.ring.modulus
        out = self.ring.zeros((self.n, self.n)).astype(object)
        for g, c in zip(self.group.elements, x.coeffs):
            if c:
                out = (out + c * self.element_matrix(g).astype(object)) % q
        return self.ring.array(out)

    def check(self) -> bool:
        """Actions commute, have the right orders, and preserve R."""
        q = self.ring.modulus
        eye = self.ring.array(np.eye(self.n, dtype=object))
        for A, n_i in zip(self.actions, self.group.orders):
            P = eye
            for _ in range(n_i):
                P = matmul_mod(P, A, q)
            diff = reduce_many((P.astype(object) - eye) % q, self.relations)
            if np.any(diff != 0):
                return False
            if len(self.relations):
                img = matmul_mod(self.relations.rows, A, q)
                if np.any(reduce_many(img, self.relations) != 0):
                    return False
        for A in self.actions:
            for C in self.actions:
                diff = (matmul_mod(A, C, q).astype(object) - matmul_mod(C, A, q)) % q
                if np.any(reduce_many(diff, self.relations) != 0):
                    return False
        return True

    def quotient(self, rows) -> "DeltaModule":
        rows = np.asarray(rows, dtype=object).reshape(-1, self.n)
        allrows = np.vstack([self.relations.rows.astype(object), rows]) if len(self.relations) else rows
        R = howell_form(allrows % self.ring.modulus, self.n, self.ring)
        return DeltaModule(self.group, self.ring, self.n, R, self.actions)

    def tensor(self, other: "DeltaModule") -> "DeltaModule":
        """A (x)_{Z/p^m} B with the diagonal action."""
        if other.group != self.group or other.ring != self.ring:
            raise DomainError("modules must share group and ring")
        n = self.n * other.n
        rows = []
        eyeA = np.eye(self.n, dtype=object)
        eyeB = np.eye(other.n, dtype=object)
        for r in self.relations.rows:
            rows.extend(np.kron(r.astype(object).reshape(1, -1), eyeB))
        for s in other.relations.rows:
            rows.extend(np.kron(eyeA, s.astype(object).reshape(1, -1)))
        R = howell_form(np.array(rows, dtype=object).reshape(len(rows), n) % self.ring.modulus,
                        n, self.ring)
        acts = tuple(np.kron(a.astype(object), b.astype(object)) % self.ring.modulus
                     for a, b in zip(self.actions, other.actions))
        return DeltaModule(self.group, self.ring, n, R, acts)

    def canonical_elements(self) -> np.ndarray:
        """Every element of F/R, one canonical representative per class."""
        p, B = self.ring.p, self.ring.B
        piv = dict(self.relations.pivots)
        ranges = [range(p ** piv[j]) if j in piv else range(p**B) for j in range(self.n)]
        return np.array(list(itertools.product(*ranges)), dtype=object).reshape(-1, self.n)


@dataclass
class Eigenspace:
    psi: DeltaCharacter
    image: HowellBasis  # e.F + R inside F
    module: DeltaModule  # A / (1 - e) A, isomorphic to e.A
    relations: HowellBasis  # R, the relations of the ambient module

    @property
    def log_order(self) -> int:
        return self.module.log_order

    def check(self) -> bool:
        """delta a = psi(delta) a on a spanning set (only for Z_p-valued psi)."""
        A = self.module
        S, zeta = coefficient_ring(A.group, A.ring)
        vals = [character_value(self.psi, g, S, zeta) for g in A.group.generators()]
        if not all(S.is_const(v) for v in vals):
            raise DomainError("psi is not Z_p-valued; check the class idempotent instead")
        q = A.ring.modulus
        rows = self.image.rows.astype(object)
        for M, v in zip(A.actions, vals):
            diff = (matmul_mod(rows, M, q).astype(object) - v[0] * rows) % q
            if np.any(reduce_many(diff, self.relations) != 0):
                return False
        return True


def eigenspace(A: DeltaModule, psi: DeltaCharacter) -> Eigenspace:
    """A^(psi) = e_[psi] A, also presented as the quotient A / (1 - e_[psi]) A."""
    E = A.apply(idempotent(psi, A.ring)).astype(object)
    q = A.ring.modulus
    rows = np.vstack([E, A.relations.rows.astype(object)]) if len(A.relations) else E
    image = howell_form(rows, A.n, A.ring)
    module = A.quotient((np.eye(A.n, dtype=object) - E) % q)
    return Eigenspace(psi, image, module, A.relations)


@dataclass
class TensorComparison:
    lhs_invariants: list
    rhs_invariants: list

    @property
    def isomorphic(self) -> bool:
        return self.lhs_invariants == self.rhs_invariants

    @property
    def log_order(self) -> int:
        return sum(self.lhs_invariants)


def _inverse_action(A: np.ndarray, order: int, q: int) -> np.ndarray:
    M = np.eye(A.shape[0], dtype=object)
    for _ in range(order - 1):
        M = matmul_mod(M, A, q)
    return M


def balanced_tensor(Ac: DeltaModule, Bc: DeltaModule) -> DeltaModule:
    """Ac (x) Bc modulo delta a (x) b - a (x) delta^-1 b for every generator."""
    T = Ac.tensor(Bc)
    q = Ac.ring.modulus
    rows = []
    for MA, MB, n_i in zip(Ac.actions, Bc.actions, Ac.group.orders):
        MBinv = _inverse_action(MB, n_i, q)
        D = (np.kron(MA.astype(object), np.eye(Bc.n, dtype=object))
             - np.kron(np.eye(Ac.n, dtype=object), MBinv.astype(object))) % q
        rows.append(D)
    if not rows:
        return T
    return T.quotient(np.vstack(rows))


def tensor_trivial_eigenspace(A: DeltaModule, B: DeltaModule, chi: DeltaCharacter) -> TensorComparison:
    """(A^(chi) (x) B)^(1) versus A^(chi) (x)_{R_chi} B^(chi^-1), by invariant factors."""
    one = DeltaCharacter.trivial(chi.group)
    Ac = eigenspace(A, chi).module
    lhs = eigenspace(Ac.tensor(B), one).module.invariants()
    Bc = eigenspace(B, chi.inverse()).module
    rhs = balanced_tensor(Ac, Bc).invariants()
    return TensorComparison(lhs, rhs)


def tensor_decomposition(A: DeltaModule, B: DeltaModule, phi: DeltaCharacter) -> tuple[int, int]:
    """log|(A (x) B)^(phi)| and the sum over Sigma^2_phi of log|(A^(chi) (x) B^(psi))^(phi)|."""
    p = A.ring.p
    lhs = eigenspace(A.tensor(B), phi).log_order
    rhs = 0
    for cls_a, cls_b in sigma2(phi, p):
        Ac = eigenspace(A, cls_a[0]).module
        Bc = eigenspace(B, cls_b[0]).module
        rhs += eigenspace(Ac.tensor(Bc), phi).log_order
    return lhs, rhs


def decomposition_orders(A: DeltaModule) -> list[int]:
    """log|A^(psi)| for each class in Sigma; these sum to log|A|."""
    return [eigenspace(A, cls[0]).log_order for cls in conjugacy_classes(A.group, A.ring.p)]


# ---------------------------------------------------------------------------
# random instances

def random_module(group: DeltaGroup, ring: ResidueRing, rng: np.random.Generator,
                  blocks: int = 2, relations: int = 1) -> DeltaModule:
    """A random module: a sum of character blocks, conjugated and cut down by
    Delta-stable relations."""
    S, zeta = coefficient_ring(group, ring)
    chars = group.characters()
    mats = [[] for _ in group.orders]
    for _ in range(blocks):
        psi = chars[int(rng.integers(len(chars)))]
        vals = [character_value(psi, g, S, zeta) for g in group.generators()]
        if all(S.is_const(v) for v in vals):
            for k, v in enumerate(vals):
                mats[k].append(np.array([[v[0]]], dtype=object))
        else:
            for k, v in enumerate(vals):
                mats[k].append(S.mult_matrix(v).astype(object))
    acts = []
    q = ring.modulus
    n = sum(b.shape[0] for b in mats[0]) if mats and mats[0] else 0
    P = _random_unimodular(n, ring, rng)
    Pinv = _inverse_unimodular(P, ring)
    for blist in mats:
        D = np.zeros((n, n), dtype=object)
        o = 0
        for b in blist:
            s = b.shape[0]
            D[o:o + s, o:o + s] = b
            o += s
        acts.append(matmul_mod(matmul_mod(Pinv, D, q), P, q))
    A = DeltaModule(group, ring, n, howell_form([], n, ring), tuple(acts))
    rows = []
    for _ in range(relations):
        v = rng.integers(0, q, n).astype(object) * ring.p ** int(rng.integers(0, ring.B)) % q
        for g in group.elements:
            rows.append(matmul_mod(v.reshape(1, -1), A.element_matrix(g), q)[0])
    return A.quotient(np.array(rows, dtype=object)) if rows else A


def _random_unimodular(n: int, ring: ResidueRing, rng) -> np.ndarray:
    while True:
        P = ring.array(rng.integers(0, ring.modulus, (n, n)).astype(object))
        H = howell_form(P % ring.p, n, ResidueRing(ring.p, 1))
        if len(H) == n and all(e == 0 for _, e in H.pivots):
            return P


def _inverse_unimodular(P: np.ndarray, ring: ResidueRing) -> np.ndarray:
    n = P.shape[0]
    aug = np.hstack([P.astype(object), np.eye(n, dtype=object)])
    H = howell_form(aug % ring.modulus, 2 * n, ring)
    return ring.array(H.rows[:n, n:])
