import itertools

import numpy as np
import pytest

from eisgen.arith import DomainError, ResidueRing, reduce_many
from eisgen.eigenspaces import (DeltaCharacter, DeltaGroup, DeltaModule, GroupAlgebraElement,
                                UnramifiedRing, character_value, coefficient_ring,
                                conjugacy_classes, decomposition_orders, eigenspace,
                                idempotent, is_irreducible_mod_p, random_module, residue_degree,
                                sigma2, tensor_decomposition, tensor_trivial_eigenspace)


def brute_invariants(elements: np.ndarray, A: DeltaModule) -> list[int]:
    """Invariant factors of a subgroup given by all its elements (canonical reps)."""
    p, B = A.ring.p, A.ring.B
    sizes = []
    for j in range(B + 1):
        killed = reduce_many((elements.astype(object) * p**j) % A.ring.modulus, A.relations)
        sizes.append(int(np.sum(~np.any(killed != 0, axis=1))))
    # |X[p^j]| = p^(sum min(a_i, j))
    logs = [round(np.log(s) / np.log(p)) for s in sizes]
    out = []
    for a in range(1, B + 1):
        ge = logs[a] - logs[a - 1]  # number of factors with exponent >= a
        nxt = logs[a + 1] - logs[a] if a < B else 0
        out.extend([a] * (ge - nxt))
    return sorted(out)


def brute_fixed(A: DeltaModule, values) -> np.ndarray:
    """All x in A with x M_g = value_g x for every generator g."""
    X = A.canonical_elements()
    q = A.ring.modulus
    keep = np.ones(len(X), dtype=bool)
    for M, v in zip(A.actions, values):
        diff = (X.astype(object).dot(M.astype(object)) - v * X.astype(object)) % q
        keep &= ~np.any(reduce_many(diff, A.relations) != 0, axis=1)
    return X[keep]


def test_idempotent_example():
    G = DeltaGroup((2,))
    e = idempotent(DeltaCharacter.trivial(G), ResidueRing(5, 2))
    assert e.coeffs == (13, 13)
    assert e * e == e


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("m", [1, 2])
def test_idempotent_family_exhaustive(p, m):
    R = ResidueRing(p, m)
    for orders in [(2,), (3,), (4,), (5,), (6,), (2, 2), (7,), (8,), (3, 3), (10,), (2, 6), (12,)]:
        G = DeltaGroup(orders)
        if G.size % p == 0:
            continue
        es = [idempotent(cls[0], R) for cls in conjugacy_classes(G, p)]
        total = GroupAlgebraElement.zero(G, R)
        for i, a in enumerate(es):
            assert a * a == a
            total = total + a
            for b in es[i + 1:]:
                assert a * b == GroupAlgebraElement.zero(G, R)
            # central: commutes with every group element
            for g in G.elements:
                d = GroupAlgebraElement.basis(G, R, g)
                assert a * d == d * a
        assert total == GroupAlgebraElement.one(G, R)


def test_idempotent_needs_invertible_order():
    with pytest.raises(DomainError):
        idempotent(DeltaCharacter.trivial(DeltaGroup((5,))), ResidueRing(5, 1))


def test_regular_module_split():
    G = DeltaGroup((4,))
    A = DeltaModule.regular(G, ResidueRing(5, 1))
    assert A.check()
    assert decomposition_orders(A) == [1, 1, 1, 1]


def test_trivial_action_kills_nontrivial_eigenspaces():
    G = DeltaGroup((6,))
    A = DeltaModule.trivial_action(G, ResidueRing(7, 2), [1, 2])
    for psi in G.characters():
        want = A.log_order if psi.is_trivial() else 0
        assert eigenspace(A, psi).log_order == want


def test_eigenspace_against_brute_force_z9():
    rng = np.random.default_rng(5)
    G = DeltaGroup((2,))
    R = ResidueRing(3, 2)
    S, zeta = coefficient_ring(G, R)
    for _ in range(25):
        A = random_module(G, R, rng, blocks=3, relations=1)
        for psi in G.characters():
            E = eigenspace(A, psi)
            assert E.check()
            vals = [character_value(psi, g, S, zeta)[0] for g in G.generators()]
            fixed = brute_fixed(A, vals)
            assert len(fixed) == 3**E.log_order
            assert brute_invariants(fixed, A) == E.module.invariants()


def test_decomposition_multiplicative():
    rng = np.random.default_rng(11)
    for p, orders in [(5, (4,)), (7, (3,)), (5, (3,)), (13, (2, 2)), (11, (5,)), (3, (8,))]:
        G = DeltaGroup(orders)
        R = ResidueRing(p, 2)
        for _ in range(5):
            A = random_module(G, R, rng, blocks=3, relations=2)
            assert A.check()
            assert sum(decomposition_orders(A)) == A.log_order


def test_non_split_classes():
    G = DeltaGroup((3,))
    assert residue_degree(G, 5) == 2
    classes = conjugacy_classes(G, 5)
    assert sorted(len(c) for c in classes) == [1, 2]
    A = DeltaModule.regular(G, ResidueRing(5, 1))
    assert sorted(decomposition_orders(A)) == [1, 2]


def test_sigma2_split_and_non_split():
    G = DeltaGroup((4,))
    phi = DeltaCharacter.trivial(G)
    pairs = sigma2(phi, 5)
    assert len(pairs) == 4
    for a, b in pairs:
        assert a[0] * b[0] == phi
    G3 = DeltaGroup((3,))
    pairs3 = sigma2(DeltaCharacter.trivial(G3), 5)
    # [1] pairs with [1], the conjugate pair {chi, chi^-1} pairs with itself
    assert len(pairs3) == 2


def test_unramified_ring():
    S = UnramifiedRing(5, 2, 2)
    assert is_irreducible_mod_p(S.h, 5)
    z = S.root_of_unity(3)
    assert S.pow(z, 3) == S.const(1) and z != S.const(1)
    assert is_irreducible_mod_p([2, 0, 1], 5) and not is_irreducible_mod_p([1, 0, 1], 5)
    # brute force: degree-2 and 3 polynomials are irreducible iff they have no root
    for f in (2, 3):
        for tail in itertools.product(range(5), repeat=f):
            h = list(tail) + [1]
            has_root = any(sum(c * x**i for i, c in enumerate(h)) % 5 == 0 for x in range(5))
            assert is_irreducible_mod_p(h, 5) == (not has_root)


def test_lemma_regular_modules():
    for p, n in [(5, 4), (7, 3), (13, 6)]:
        G = DeltaGroup((n,))
        R = ResidueRing(p, 1)
        A = DeltaModule.regular(G, R)
        for chi in G.characters():
            tc = tensor_trivial_eigenspace(A, A, chi)
            assert tc.isomorphic and tc.log_order == 1


def test_lemma_trivial_b():
    G = DeltaGroup((4,))
    R = ResidueRing(5, 2)
    A = DeltaModule.regular(G, R)
    B = DeltaModule.trivial_action(G, R, [2, 1])
    chi = DeltaCharacter(G, (1,))
    tc = tensor_trivial_eigenspace(A, B, chi)
    assert tc.lhs_invariants == tc.rhs_invariants == []


def test_tensor_decomposition_random():
    rng = np.random.default_rng(2)
    for p, orders in [(5, (4,)), (5, (3,)), (7, (2, 2)), (3, (4,))]:
        G = DeltaGroup(orders)
        R = ResidueRing(p, 1 + int(rng.integers(0, 2)))
        for _ in range(4):
            A = random_module(G, R, rng, blocks=2)
            B = random_module(G, R, rng, blocks=2)
            for phi in G.characters()[:3]:
                lhs, rhs = tensor_decomposition(A, B, phi)
                assert lhs == rhs
