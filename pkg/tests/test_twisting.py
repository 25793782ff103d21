from __future__ import annotations

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopforders.algebra import GroupAlgebra, all_idempotents, apply_character_leg, coproduct, tensor_product
from hopforders.exactnum import root_of_unity
from hopforders.groups import AbelianSubgroup, abelian_group, dual_group, permutation_group
from hopforders.twisting import (Cocycle, Pairing, TwistError, bicharacter_cocycle, build_twist, check_cocycle,
                                 coboundary, cocycle_from_iso, decomposition_from_iso, find_lagrangian,
                                 is_nondegenerate, lemma_J_forms, pairing_of, radical, standard_cocycle, trivial_cocycle, twisted_antipode,
                                 twisted_coproduct, verify_twist_axioms, verify_twisted_hopf_axioms)


def klein_cocycle():
    # omega(phi^i psi^j, phi^k psi^l) = (-1)^(jk)
    D = dual_group(abelian_group(2, 2), 2)
    return bicharacter_cocycle(D, [[0, 0], [1, 0]], 2)


def brute_cocycle_ok(omega):
    A, T, n = omega.base, omega.table, omega.conductor
    els = range(A.order)
    S = A.add_table
    if T[0].any() or T[:, 0].any():
        return False
    return all((T[a, b] + T[S[a, b], c] - T[b, c] - T[a, S[b, c]]) % n == 0 for a, b, c in product(els, repeat=3))


# ---- cocycles

def test_check_cocycle_examples():
    D = dual_group(abelian_group(2, 2), 2)
    assert check_cocycle(trivial_cocycle(D, 2)).passed
    w = klein_cocycle()
    assert check_cocycle(w).passed and brute_cocycle_ok(w)
    x = np.array(D.elements)
    for a, b in product(range(4), repeat=2):
        assert w.table[a, b] == (x[a][1] * x[b][0]) % 2
    bad = w.table.copy()
    bad[1, 2] = (bad[1, 2] + 1) % 2
    cert = check_cocycle(Cocycle(D, bad, 2))
    assert not cert.passed and "cocycle_identity" in cert.witnesses


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(2,), (3,), (2, 2), (4,), (2, 4), (3, 3)]), st.data())
def test_check_cocycle_matches_brute_force(factors, data):
    A = abelian_group(*factors)
    n = A.exponent
    W = [[data.draw(st.integers(0, n - 1)) for _ in range(A.rank)] for _ in range(A.rank)]
    try:
        omega = bicharacter_cocycle(A, W, n)
    except TwistError:
        return
    mu = [data.draw(st.integers(0, n - 1)) for _ in range(A.order)]
    twisted = omega * coboundary(A, mu, n)
    assert check_cocycle(twisted).passed == brute_cocycle_ok(twisted)
    perturbed = Cocycle(A, twisted.table + np.eye(A.order, dtype=np.int64)[::-1], n)
    assert check_cocycle(perturbed).passed == brute_cocycle_ok(perturbed)


def test_cocycle_text_round_trip():
    w = klein_cocycle()
    again = Cocycle.from_text(w.to_text(), w.base, w.conductor)
    assert np.array_equal(again.table, w.table)
    with pytest.raises(TwistError):
        Cocycle.from_text("(0,0) (0,0) 0\n", w.base, 2)


# ---- pairings and radicals

def test_pairing_examples():
    D = dual_group(abelian_group(2, 2), 2)
    sym = bicharacter_cocycle(D, [[1, 0], [0, 1]], 2)
    assert not pairing_of(sym).table.any()
    B = pairing_of(klein_cocycle())
    assert B.value((1, 0), (0, 1)).exponent == 1
    assert B.is_skew() and B.is_bimultiplicative()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=16, max_size=16))
def test_pairing_invariant_under_coboundaries(mu):
    D = dual_group(abelian_group(4, 4), 4)
    omega = bicharacter_cocycle(D, [[0, 1], [0, 0]], 4)
    moved = omega * coboundary(D, mu, 4)
    assert check_cocycle(moved).passed
    assert pairing_of(moved) == pairing_of(omega)


def test_radical_examples():
    A = abelian_group(2, 2)
    assert radical(Pairing(A, np.zeros((4, 4)), 2)) == [0, 1, 2, 3]
    assert radical(pairing_of(klein_cocycle())) == [0]
    # (Z/2)^2 x Z/3 with the pairing living on the first factor only
    C = abelian_group(2, 2, 3)
    w = bicharacter_cocycle(C, [[0, 3, 0], [0, 0, 0], [0, 0, 0]], 6)
    rad = radical(pairing_of(w))
    assert sorted(C.elements[i] for i in rad) == [(0, 0, k) for k in range(3)]


def brute_radical(B):
    A = B.base
    return [a for a in range(A.order) if all(B.table[a, b] % B.conductor == 0 for b in range(A.order))]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(2, 2), (4, 4), (2, 2, 2, 2), (3, 3), (2, 4), (6,)]), st.data())
def test_radical_matches_brute_force(factors, data):
    A = abelian_group(*factors)
    n = A.exponent
    W = [[data.draw(st.integers(0, n - 1)) for _ in range(A.rank)] for _ in range(A.rank)]
    try:
        omega = bicharacter_cocycle(A, W, n)
    except TwistError:
        return
    B = pairing_of(omega)
    assert radical(B) == brute_radical(B)


# ---- Lagrangians

def test_klein_lagrangian():
    B = pairing_of(klein_cocycle())
    dec = find_lagrangian(B)
    A = B.base
    assert sorted(A.elements[i] for i in dec.lag) == [(0, 0), (1, 0)]
    assert dec.check().passed


def test_z3_squared_lagrangian():
    A = dual_group(abelian_group(3, 3), 3)
    # B((a,b),(c,d)) = zeta^(ad - bc) comes from omega = zeta^(ad)
    B = pairing_of(bicharacter_cocycle(A, [[0, 1], [0, 0]], 3))
    assert B.value((1, 0), (0, 1)).exponent == 1
    dec = find_lagrangian(B)
    assert sorted(A.elements[i] for i in dec.lag) == [(0, 0), (1, 0), (2, 0)]


def test_degenerate_pairing_has_no_lagrangian():
    A = abelian_group(2, 2)
    with pytest.raises(TwistError):
        find_lagrangian(Pairing(A, np.zeros((4, 4)), 2))


@pytest.mark.parametrize("factors, W, n", [
    ((2, 2), [[0, 1], [0, 0]], 2),
    ((4, 4), [[0, 1], [0, 0]], 4),
    ((6, 6), [[0, 1], [0, 0]], 6),
    ((2, 2, 2, 2), [[0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]], 2),
    ((2, 2, 2, 2), [[0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1], [0, 0, 0, 0]], 2),
    ((2, 4, 2, 4), [[0, 0, 2, 0], [0, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0]], 4),
])
def test_lagrangian_properties(factors, W, n):
    A = abelian_group(*factors)
    B = pairing_of(bicharacter_cocycle(A, W, n))
    assert is_nondegenerate(B)
    dec = find_lagrangian(B)
    assert sorted(B.perp(dec.lag)) == sorted(dec.lag)
    assert len(dec.lag) ** 2 == A.order
    assert dec.check().passed
    std = standard_cocycle(dec)
    assert check_cocycle(std).passed
    assert pairing_of(std) == B


def test_standard_cocycle_klein():
    B = pairing_of(klein_cocycle())
    dec = find_lagrangian(B)
    std = standard_cocycle(dec)
    assert np.array_equal(std.table, klein_cocycle().table)
    assert not std.table[0].any() and not std.table[:, 0].any()


# ---- cocycles from an isomorphism

def test_cocycle_from_iso_order_two(sl21):
    M, omega = cocycle_from_iso(sl21.L, sl21.P, sl21.conductor)
    assert M.order == 4
    assert int((omega.table != 0).sum()) == 4  # one -1 block
    assert is_nondegenerate(pairing_of(omega))
    assert check_cocycle(omega).passed


def test_cocycle_from_inverted_iso_same_pairing_up_to_relabel(sl31):
    c = sl31.conductor
    M1, w1 = cocycle_from_iso(sl31.L, sl31.P, c, [(1,)])
    M2, w2 = cocycle_from_iso(sl31.L, sl31.P, c, [(2,)])
    B1, B2 = pairing_of(w1), pairing_of(w2)
    assert not np.array_equal(B1.table, B2.table)
    # relabel the P-coordinate of characters by inversion
    D = M1.dual(c)
    perm = [D.index((x[0], (-x[1]) % 3)) for x in D.elements]
    assert np.array_equal(B1.table, B2.table[np.ix_(perm, perm)])
    assert is_nondegenerate(B1) and is_nondegenerate(B2)


# ---- twists

def test_trivial_twist_is_one(s4):
    alg, V = s4.algebra, s4.M
    tw = build_twist(alg, V, trivial_cocycle(V.dual(alg.conductor), alg.conductor))
    assert tw.J == alg.tensor_one() and tw.J_inv == alg.tensor_one()


def test_klein_twist_brute_force(s4):
    alg, V, tw = s4.algebra, s4.M, s4.twist
    es = all_idempotents(alg, V)
    D = V.dual(alg.conductor)
    J = alg.tensor({})
    J_inv = alg.tensor({})
    for i, j in product(range(D.order), repeat=2):
        w = tw.omega.value(i, j).exponent
        J = J + tensor_product(es[i], es[j]).scale(root_of_unity(w, alg.conductor))
        J_inv = J_inv + tensor_product(es[i], es[j]).scale(root_of_unity(-w, alg.conductor))
    assert J == tw.J and J_inv == tw.J_inv
    assert verify_twist_axioms(tw.J, tw.J_inv).passed


def test_verify_twist_axioms_examples(s4):
    alg = s4.algebra
    assert verify_twist_axioms(alg.tensor_one()).passed
    g = s4.M.generators[0]
    cert = verify_twist_axioms(tensor_product(alg.basis(g), alg.basis(g)))
    assert not cert.checks["counit_left"]


@pytest.mark.parametrize("name", ["s4", "sl21", "sl31", "gl21", "sp31"])
def test_built_twists_satisfy_axioms(name, request):
    inst = request.getfixturevalue(name)
    tw = inst.twist
    cert = verify_twist_axioms(tw.J, tw.J_inv)
    assert cert.passed, cert.failed()
    assert tw.U * tw.U_inv == inst.algebra.one()


def test_twisted_structure(sl21):
    tw, alg = sl21.twist, sl21.algebra
    assert twisted_coproduct(tw, alg.one()) == coproduct(alg.one())
    sample = [alg.basis(g) for g in range(0, alg.group.order, 3)] + [sl21.X.basis[5]]
    cert = verify_twisted_hopf_axioms(tw, sample)
    assert cert.passed, cert.failed()
    # S_J is an antihomomorphism
    for a in sample[:4]:
        for b in sample[:4]:
            assert twisted_antipode(tw, a * b) == twisted_antipode(tw, b) * twisted_antipode(tw, a)
    for x in sample:
        assert apply_character_leg(lambda g: 1, twisted_coproduct(tw, x), "left") == x
        assert apply_character_leg(lambda g: 1, twisted_coproduct(tw, x), "right") == x


def test_lemma_forms(s4, sl21, sl31):
    cert = lemma_J_forms(s4.twist, s4.extras["decomposition"])
    assert cert.passed, cert.failed()
    for inst in (sl21, sl31):
        dec = decomposition_from_iso(inst.M, inst.L.abstract.rank, inst.twist.omega)
        cert = lemma_J_forms(inst.twist, dec)
        assert cert.passed, cert.failed()


def test_lemma_forms_trivial_subgroup():
    G = permutation_group([(1, 0)])
    alg = GroupAlgebra(G, 2)
    one = AbelianSubgroup(G, [], "1")
    D = one.dual(2)
    tw = build_twist(alg, one, trivial_cocycle(D, 2))
    assert tw.J == alg.tensor_one()
