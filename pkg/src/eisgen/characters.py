"""Dirichlet characters with values realized in Z/p^B.

A character is stored as a table of exponents: chi(a) = zeta^e(a), where
zeta is the Teichmuller lift of a fixed primitive root mod p.  Only
characters whose order divides p - 1 can be realized this way, which covers
every power of the Teichmuller character.
"""
from __future__ import annotations

from functools import cached_property, lru_cache
from math import gcd

from .arith import DomainError, Residue, ResidueRing, teichmuller


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Least primitive root mod an odd prime p (or 1 for p = 2)."""
    if p == 2:
        return 1
    qs = factorize(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise DomainError(f"no primitive root mod {p}")


@lru_cache(maxsize=None)
def discrete_log_table(p: int) -> dict[int, int]:
    g = primitive_root(p)
    table, x = {}, 1
    for i in range(p - 1):
        table[x] = i
        x = x * g % p
    return table


def unit_group_generators(m: int) -> list[tuple[int, int]]:
    """Generators of (Z/m)^x as (generator, order) pairs, one per cyclic factor."""
    gens = []
    fac = factorize(m)
    for ell, a in sorted(fac.items()):
        pa = ell**a
        rest = m // pa
        local = []
        if ell == 2:
            if a >= 2:
                local.append((pa - 1, 2))
            if a >= 3:
                local.append((5, pa // 4))
        else:
            # primitive root mod ell lifts to one mod ell^a unless g^(ell-1) = 1 mod ell^2
            g = primitive_root(ell)
            if a >= 2 and pow(g, ell - 1, ell * ell) == 1:
                g += ell
            local.append((g, pa - pa // ell))
        for g, order in local:
            # CRT: g mod ell^a, 1 mod the cofactor
            x = g if rest == 1 else (g * rest * pow(rest, -1, pa) + pa * pow(pa, -1, rest)) % m
            gens.append((x % m, order))
    return gens


class DirichletCharacter:
    """A character of (Z/m)^x whose values are (p-1)-st roots of unity."""

    def __init__(self, modulus: int, ring: ResidueRing, exponents: dict[int, int]):
        self.modulus = modulus
        self.ring = ring
        self._exp = {a % modulus: e % (ring.p - 1) for a, e in exponents.items()}
        if len(self._exp) != sum(1 for a in range(modulus) if gcd(a, modulus) == 1):
            raise DomainError("exponent table must cover every unit")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_generators(cls, modulus: int, ring: ResidueRing, values: dict[int, int]):
        """Character determined by exponents on the standard generators.

        ``values`` maps each generator returned by unit_group_generators to
        an exponent e, meaning chi(g) = zeta^e.
        """
        n = ring.p - 1
        gens = unit_group_generators(modulus)
        table = {1 % modulus: 0}
        for g, order in gens:
            e = values.get(g, 0)
            if (e * order) % n:
                raise DomainError(f"chi({g}) must have order dividing {order}")
            new = {}
            for a, ea in table.items():
                x = a
                for i in range(order):
                    new[x] = (ea + i * e) % n
                    x = x * g % modulus
            table = new
        return cls(modulus, ring, table)

    @classmethod
    def trivial(cls, modulus: int, ring: ResidueRing):
        return cls(modulus, ring, {a: 0 for a in range(modulus) if gcd(a, modulus) == 1})

    # -- evaluation ---------------------------------------------------
    @cached_property
    def zeta(self) -> Residue:
        return teichmuller(primitive_root(self.ring.p), self.ring)

    @cached_property
    def _powers(self) -> list[int]:
        q, z = self.ring.modulus, self.zeta.value
        powers = [1 % q]
        for _ in range(self.ring.p - 2):
            powers.append(powers[-1] * z % q)
        return powers

    def exponent(self, a: int) -> int:
        return self._exp[a % self.modulus]

    def __call__(self, a: int) -> Residue:
        a %= self.modulus
        return Residue(self.value(a), self.ring)

    def value(self, a: int) -> int:
        e = self._exp.get(a % self.modulus)
        return 0 if e is None else self._powers[e]

    def values(self) -> list[int]:
        """chi(a) for a = 0 .. modulus-1 as plain integers."""
        return [self.value(a) for a in range(self.modulus)]

    # -- structure ----------------------------------------------------
    @property
    def order(self) -> int:
        n = self.ring.p - 1
        g = n
        for e in self._exp.values():
            g = gcd(g, e)
        return n // g

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self._exp.values())

    def is_even(self) -> bool:
        return self._exp[(-1) % self.modulus] == 0

    @property
    def conductor(self) -> int:
        for f in sorted(d for d in range(1, self.modulus + 1) if self.modulus % d == 0):
            if all(e == 0 for a, e in self._exp.items() if a % f == 1 % f):
                return f
        return self.modulus

    def primitive(self) -> "DirichletCharacter":
        f = self.conductor
        table = {}
        for a, e in self._exp.items():
            table.setdefault(a % f, e)
        if f == 1:
            table = {0: 0}
        return DirichletCharacter(f, self.ring, table)

    def with_ring(self, ring: ResidueRing) -> "DirichletCharacter":
        if ring.p != self.ring.p:
            raise DomainError("cannot move a character to a different prime")
        return DirichletCharacter(self.modulus, ring, self._exp)

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.modulus != self.modulus or other.ring.p != self.ring.p:
            raise DomainError("characters must share modulus and prime")
        return DirichletCharacter(self.modulus, self.ring,
                                  {a: e + other._exp[a] for a, e in self._exp.items()})

    def __pow__(self, e: int) -> "DirichletCharacter":
        return char_pow(self, e)

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return (self.modulus, self.ring, self._exp) == (other.modulus, other.ring, other._exp)

    def __hash__(self):
        return hash((self.modulus, self.ring, tuple(sorted(self._exp.items()))))

    def __repr__(self):
        return f"DirichletCharacter(mod {self.modulus}, order {self.order}, in Z/{self.ring.p}^{self.ring.B})"


def teichmuller_character(p: int, ring: ResidueRing) -> DirichletCharacter:
    """omega: (Z/p)^x -> Z/p^B, omega(a) = Teichmuller lift of a."""
    if ring.p != p:
        raise DomainError("ring must be a power of p")
    return DirichletCharacter(p, ring, dict(discrete_log_table(p)))


def char_pow(chi: DirichletCharacter, e: int) -> DirichletCharacter:
    return DirichletCharacter(chi.modulus, chi.ring, {a: x * e for a, x in chi._exp.items()})


def omega_power(p: int, j: int, ring: ResidueRing) -> DirichletCharacter:
    return char_pow(teichmuller_character(p, ring), j)
