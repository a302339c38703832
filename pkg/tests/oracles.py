"""Independent reference computations used only by the tests."""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def tangent_numbers(n: int) -> tuple[int, ...]:
    """T_1..T_n (tan x = sum T_k x^(2k-1)/(2k-1)!), integer-only triangle."""
    T = [0] * (n + 1)
    T[1] = 1
    for k in range(2, n + 1):
        T[k] = (k - 1) * T[k - 1]
    for k in range(2, n + 1):
        for j in range(k, n + 1):
            T[j] = (j - k) * T[j - 1] + (j - k + 2) * T[j]
    return tuple(T)


def bernoulli_from_tangent(m: int) -> Fraction:
    """B_{2m} = (-1)^(m-1) 2m T_m / (4^m (4^m - 1))."""
    T = tangent_numbers(m)[m]
    return Fraction((-1) ** (m - 1) * 2 * m * T, 4**m * (4**m - 1))


def primes_upto(n: int) -> list[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(sieve[i * i::i]))
    return [i for i in range(n + 1) if sieve[i]]


def irregular_pairs_oracle(max_p: int) -> list[tuple[int, int]]:
    kmax = max_p - 3
    bern = {k: bernoulli_from_tangent(k // 2) for k in range(2, kmax + 1, 2)}
    out = []
    for p in primes_upto(max_p):
        if p < 5:
            continue
        for k in range(2, p - 2, 2):
            if bern[k].numerator % p == 0:
                out.append((p, k))
    return out


def span_elements(gens: np.ndarray, p: int, B: int) -> set[tuple]:
    """Every element of the Z/p^B-span of the rows, by closure under addition."""
    q = p**B
    n = gens.shape[1]
    S = np.zeros((1, n), dtype=np.int64)
    for g in gens:
        g = np.asarray(g, dtype=np.int64) % q
        mult = np.array([(c * g) % q for c in range(q)])
        S = (S[:, None, :] + mult[None, :, :]).reshape(-1, n) % q
        S = np.unique(S, axis=0)
    return {tuple(int(x) for x in row) for row in S}


def all_vectors(p: int, B: int, n: int) -> np.ndarray:
    q = p**B
    return np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64).reshape(-1, n)


def x0_11_points_mod2() -> int:
    """#E(F_2) for E = X_0(11): y^2 + y = x^3 - x^2 - 10x - 20, by enumeration."""
    count = 1  # point at infinity
    for x in range(2):
        for y in range(2):
            if (y * y + y - (x**3 - x * x - 10 * x - 20)) % 2 == 0:
                count += 1
    return count
