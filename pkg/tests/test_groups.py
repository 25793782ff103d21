from __future__ import annotations

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopforders.exactnum import ConductorError, root_of_unity
from hopforders.finfield import (determinant, elementary, finite_field, identity, is_symplectic, mat_mul,
                                 symplectic_form)
from hopforders.groups import (AbelianSubgroup, CapExceededError, GroupError, abelian_group, centralizer,
                               coset_representatives, double_cosets, dual_action, dual_group, fixed_subgroup,
                               linear_action, matrix_group_closure, permutation_group, semidirect_product,
                               vector_space, Subgroup)


# ---- finite fields

@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9])
def test_field_axioms(q):
    F = finite_field(q)
    els = list(F.elements())
    for a, b, c in product(els, repeat=3):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els[1:]:
        assert F.mul(a, F.inv(a)) == 1
    g = F.primitive_element()
    powers = {1}
    x = 1
    for _ in range(q - 1):
        x = F.mul(x, g)
        powers.add(x)
    assert len(powers) == q - 1


# ---- abelian groups and duals

def test_abelian_group_examples():
    V = abelian_group(2, 2)
    assert V.order == 4 and V.exponent == 2
    assert abelian_group(3).order == 3
    A = abelian_group(2, 4)
    assert (A.order, A.exponent) == (8, 4)
    with pytest.raises(GroupError):
        abelian_group(1)


def test_dual_examples():
    D = dual_group(abelian_group(2), 2)
    for chi, a in product(range(2), repeat=2):
        assert D.evaluate((chi,), (a,)).exponent == (chi * a) % 2
    assert dual_group(abelian_group(2, 2), 2).order == 4
    with pytest.raises(ConductorError):
        dual_group(abelian_group(4), 2)


def _small_abelian():
    return st.lists(st.sampled_from([2, 3, 4, 5, 6]), min_size=1, max_size=3).filter(
        lambda fs: np.prod(fs) <= 36)


@settings(max_examples=30, deadline=None)
@given(_small_abelian())
def test_character_orthogonality_and_separation(factors):
    A = abelian_group(*factors)
    D = dual_group(A, A.exponent)
    n = D.conductor
    P = D.pairing_table
    for i, chi in enumerate(D.elements):
        total = sum((root_of_unity(int(k), n) for k in P[i]), root_of_unity(0, n) * 0)
        assert total.is_zero() == any(chi)
    # characters separate points
    for j, a in enumerate(A.elements):
        if any(a):
            assert P[:, j].any()
    # homomorphism: chi(a + b) = chi(a) chi(b)
    for chi in D.elements[:5]:
        for a in A.elements[:6]:
            for b in A.elements[:6]:
                lhs = D.exponent_at(chi, A.add(a, b))
                assert lhs == (D.exponent_at(chi, a) + D.exponent_at(chi, b)) % n


# ---- matrix groups

def _gens(F, d=2):
    return [elementary(d, 0, 1, 1), elementary(d, 1, 0, 1)]


@pytest.mark.parametrize("q, order", [(2, 6), (3, 24), (4, 60), (5, 120)])
def test_sl2_orders(q, order):
    F = finite_field(q)
    gens = [elementary(2, i, j, a) for (i, j) in ((0, 1), (1, 0)) for a in F.prime_basis()]
    Q = matrix_group_closure(F, gens)
    assert Q.order == order == q * (q * q - 1)
    assert all(determinant(F, A) == 1 for A in Q.labels)
    assert Q.verify_axioms()


def test_gl2_2_equals_sl2_2():
    F = finite_field(2)
    brute = [((a, b), (c, d)) for a, b, c, d in product(range(2), repeat=4) if (a * d - b * c) % 2]
    assert len(brute) == 6
    Q = matrix_group_closure(F, _gens(F))
    assert sorted(Q.labels) == sorted(brute)


def test_symplectic_two_by_two_is_sl2():
    F = finite_field(3)
    Q = matrix_group_closure(F, _gens(F))
    assert all(is_symplectic(F, A) for A in Q.labels)
    assert symplectic_form(F, 1) == ((0, 1), (2, 0))


def test_closure_is_deterministic_and_capped():
    F = finite_field(3)
    a = matrix_group_closure(F, _gens(F))
    b = matrix_group_closure(F, list(reversed(_gens(F))))
    assert a.labels == b.labels
    with pytest.raises(CapExceededError):
        matrix_group_closure(F, _gens(F), cap=10)


# ---- semidirect products

def _affine(q):
    F = finite_field(q)
    Q = matrix_group_closure(F, _gens(F))
    V = vector_space(F, 2)
    return F, Q, V, semidirect_product(V, Q, linear_action(F, V, Q))


@pytest.mark.parametrize("q, order", [(2, 24), (3, 216)])
def test_affine_group_orders(q, order):
    _, Q, _, G = _affine(q)
    assert G.order == order
    assert G.verify_axioms(sample=None if q == 2 else 40)
    N = G.normal_subgroup()
    assert N.is_normal() and N.is_abelian()
    # Q maps isomorphically onto G/N
    C = G.complement_subgroup()
    assert C.is_subgroup() and C.order == Q.order
    for a in range(Q.order):
        for b in range(0, Q.order, 5):
            assert G.mul(G.embed_complement(a), G.embed_complement(b)) == G.embed_complement(Q.mul(a, b))


def test_semidirect_product_law_matches_definition():
    F, Q, V, G = _affine(2)
    act = linear_action(F, V, Q)
    for g, h in product(range(G.order), repeat=2):
        n1, q1 = G.split(g)
        n2, q2 = G.split(h)
        n = V.index(V.add(V.elements[n1], V.elements[int(act[q1, n2])]))
        assert G.split(G.mul(g, h)) == (n, Q.mul(q1, q2))


def test_trivial_action_gives_direct_product():
    F = finite_field(2)
    Q = matrix_group_closure(F, _gens(F))
    V = abelian_group(3)
    table = np.tile(np.arange(3), (Q.order, 1))
    G = semidirect_product(V, Q, table)
    N = G.normal_subgroup()
    assert len(centralizer(G, N.indices)) == G.order


def test_invalid_action_rejected():
    F = finite_field(2)
    Q = matrix_group_closure(F, _gens(F))
    V = abelian_group(2, 2)
    bad = np.tile(np.arange(4), (Q.order, 1))
    bad[1] = [0, 0, 1, 2]
    with pytest.raises(GroupError):
        semidirect_product(V, Q, bad)


# ---- dual action

def test_dual_action_is_action_and_elements_of_n_act_trivially():
    _, _, _, G = _affine(2)
    N = G.normal_subgroup()
    act = dual_action(G, N, 2)
    assert act.verify()
    for n in N.indices:
        assert list(act.table[n]) == list(range(4))
    assert list(act.table[G.identity]) == list(range(4))


def test_dual_action_definition(sl21):
    G, N, c = sl21.G, sl21.N, sl21.conductor
    act = dual_action(G, N, c)
    D = N.dual(c)
    for g in range(G.order):
        for i, nu in enumerate(D.elements):
            mu = D.elements[act.apply(g, i)]
            for n in N.indices:
                inner = G.mul(G.mul(G.inv(g), n), g)
                assert D.exponent_at(mu, N.tuple_of(n)) == D.exponent_at(nu, N.tuple_of(inner))


def test_tau_acts_on_characters_by_inverse_transpose(sl21):
    G, N, tau = sl21.G, sl21.N, sl21.tau
    D = N.dual(sl21.conductor)
    act = dual_action(G, N, sl21.conductor)
    T = G.complement.labels[G.split(tau)[1]]
    F = finite_field(2)
    Tinv_t = tuple(zip(*[list(r) for r in _inverse2(F, T)]))
    for i, nu in enumerate(D.elements):
        img = tuple(sum(Tinv_t[r][k] * nu[k] for k in range(2)) % 2 for r in range(2))
        assert D.elements[act.apply(tau, i)] == img


def _inverse2(F, A):
    (a, b), (c, d) = A
    det_inv = F.inv(F.sub(F.mul(a, d), F.mul(b, c)))
    return ((F.mul(d, det_inv), F.mul(F.neg(b), det_inv)), (F.mul(F.neg(c), det_inv), F.mul(a, det_inv)))


def test_dual_action_needs_normal_subgroup(s4):
    G = s4.G
    t = G.index((1, 0, 2, 3))
    with pytest.raises(GroupError):
        dual_action(G, AbelianSubgroup(G, [t]), 2)


# ---- cosets, double cosets, fixed points, centralizers

def test_double_coset_examples(s4):
    G = s4.G
    reps, cells = double_cosets(G, Subgroup(G, range(G.order)))
    assert reps == [G.identity]
    reps, _ = double_cosets(G, Subgroup(G, [G.identity]))
    assert len(reps) == G.order
    reps, cells = double_cosets(G, s4.M)
    assert len(reps) == 6 and reps[0] == G.identity
    # brute-force partition
    seen = set()
    for r, cell in zip(reps, cells):
        brute = {G.mul(G.mul(a, r), b) for a in s4.M for b in s4.M}
        assert set(cell) == brute
        assert not (seen & brute)
        seen |= brute
    assert sum(len(c) for c in cells) == G.order


def test_double_cosets_partition_sl(sl21):
    reps, cells = double_cosets(sl21.G, sl21.M)
    assert sorted(x for c in cells for x in c) == list(range(sl21.G.order))
    assert all(r == min(c) or r == sl21.G.identity for r, c in zip(reps, cells))


def test_fixed_points_of_tau_are_second_line(sl21):
    G, N, tau = sl21.G, sl21.N, sl21.tau
    fixed = {n for n in N.indices if G.conj(tau, n) == n}
    second = {G.embed_normal(G.normal.index(v)) for v in [(0, 0), (0, 1)]}
    assert fixed == second


def test_fixed_subgroup_is_subgroup_and_identity_fixes_all(sl21):
    act = dual_action(sl21.G, sl21.N, sl21.conductor)
    D = sl21.N.dual(sl21.conductor)
    assert fixed_subgroup(act, sl21.G.identity) == list(range(D.order))
    for g in range(sl21.G.order):
        fx = fixed_subgroup(act, g)
        for a in fx:
            for b in fx:
                assert D.index(D.add(D.elements[a], D.neg(D.elements[b]))) in fx


def test_dual_fixed_points_trivial_for_sigma_tau(sl21):
    G = sl21.G
    act = dual_action(G, sl21.N, sl21.conductor)
    for sigma in sl21.P.indices:
        if sigma != G.identity:
            assert fixed_subgroup(act, G.mul(sigma, sl21.tau)) == [0]


def test_centralizer_examples(sl21):
    A = permutation_group([(1, 2, 0)])
    assert len(centralizer(A, [1])) == A.order
    G = sl21.G
    assert set(centralizer(G, sl21.N.indices).indices) == set(sl21.N.indices)
    assert len(centralizer(G, [G.identity])) == G.order


def test_coset_representatives(sl21):
    G, N = sl21.G, sl21.N
    reps = coset_representatives(G, N)
    assert reps[0] == G.identity and len(reps) == G.order // N.order == 6
    assert set(reps) == set(G.complement_subgroup().indices)
    cosets = {frozenset(G.mul(r, n) for n in N) for r in reps}
    assert len(cosets) == 6
    assert coset_representatives(G, Subgroup(G, range(G.order))) == [G.identity]


def test_symplectic_embedding_helpers():
    F = finite_field(3)
    I = identity(4)
    assert is_symplectic(F, I)
    assert mat_mul(F, I, I) == I
