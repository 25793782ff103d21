from __future__ import annotations

from fractions import Fraction

import pytest

from hopforders.algebra import GroupAlgebra, idempotent
from hopforders.cocharacters import (HypothesisError, coalgebra_decomposition, distinguished_cocharacter,
                                     double_coset_data, e_tau, e_tau_closed_form, induced_character,
                                     induced_character_values, irreducible_cocharacter, n_tau,
                                     perp_coset_key, perp_coset_representatives, sandwich, uniqueness_pipeline)
from hopforders.exactnum import root_of_unity
from hopforders.groups import AbelianSubgroup, GroupError, permutation_group
from hopforders.orders import contains
from hopforders.twisting import TwistError, trivial_cocycle


def _brute_sandwich(alg, M, tau, phi, psi):
    """|M|^-2 sum over a, b of phi(a^-1) psi(b^-1) a tau b."""
    G, c = alg.group, alg.conductor
    D = M.dual(c)
    out = alg.zero()
    for a in M.to_group:
        for b in M.to_group:
            w = -D.exponent_at(D.elements[phi], M.tuple_of(a)) - D.exponent_at(D.elements[psi], M.tuple_of(b))
            out = out + alg.basis(G.mul(G.mul(a, tau), b)).scale(root_of_unity(w, c))
    return out.scale(Fraction(1, M.order ** 2))


# ---- sandwiches and N_tau

def test_sandwich_matches_definition(s4):
    alg, M = s4.algebra, s4.M
    for tau in (s4.G.identity, 5, 11):
        for phi in range(M.order):
            for psi in range(M.order):
                assert sandwich(alg, M, tau, [(phi, psi, 0)]) == _brute_sandwich(alg, M, tau, phi, psi)
    assert sandwich(alg, M, 3, []).is_zero()


def test_n_tau_at_identity_is_diagonal(sl21):
    data = n_tau(sl21.algebra, sl21.M, sl21.G.identity, sl21.omega)
    assert sorted(data.pairs) == [(i, i) for i in range(sl21.M.order)]
    assert sorted(data.rad) == sorted(data.pairs)
    assert data.dim_sqrt == 1 and data.s == 1


def test_n_tau_with_trivial_intersection_is_everything(sl21):
    G, M = sl21.G, sl21.M
    Mset = set(M.to_group)
    for tau in range(G.order):
        inter = [m for m in M.to_group if G.conj(G.inv(tau), m) in Mset]
        if inter == [G.identity]:
            data = n_tau(sl21.algebra, M, tau, sl21.omega)
            assert data.size == M.order ** 2
            break
    else:
        pytest.fail("no double coset with trivial intersection")


@pytest.mark.parametrize("name", ["s4", "sl21"])
def test_n_tau_is_support_of_sandwiches(name, request):
    inst = request.getfixturevalue(name)
    alg, M = inst.algebra, inst.M
    for data in double_coset_data(alg, M, inst.omega):
        nonzero = {(phi, psi) for phi in range(M.order) for psi in range(M.order)
                   if not sandwich(alg, M, data.tau, [(phi, psi, 0)]).is_zero()}
        assert nonzero == set(data.pairs)


@pytest.mark.parametrize("name", ["s4", "sl21", "sl31"])
def test_every_coset_has_square_ratio_and_integral_s(name, request):
    inst = request.getfixturevalue(name)
    rows = double_coset_data(inst.algebra, inst.M, inst.omega)
    assert sum(d.size for d in rows) == inst.G.order
    for d in rows:
        assert d.size == len(d.rad) * d.dim_sqrt ** 2
        assert d.s is not None and d.s * d.s * d.size * len(d.rad) == inst.M.order ** 2
        assert d.size == len(d.cell)


# ---- irreducible cocharacters

def test_cocharacters_agree_exactly_on_perp_cosets(s4):
    alg, M = s4.algebra, s4.M
    for data in double_coset_data(alg, M, s4.omega):
        by_key = {}
        for m in M.to_group:
            for m2 in M.to_group:
                value = irreducible_cocharacter(data, m, m2).value
                key = perp_coset_key(data, m, m2)
                if key in by_key:
                    assert by_key[key] == value
                else:
                    assert all(v != value for v in by_key.values())
                    by_key[key] = value
        assert len(perp_coset_representatives(data)) == len(by_key) == len(data.rad)


def test_identity_coset_distinguished_value_on_z2():
    G = permutation_group([(1, 0)])
    alg = GroupAlgebra(G, 2)
    M = AbelianSubgroup(G, [1])
    value = sandwich(alg, M, G.identity, [(0, 0, 0)]).scale(M.order)
    assert value == idempotent(alg, M, (0,)).scale(2)


@pytest.mark.parametrize("name", ["s4", "sl21"])
def test_distinguished_cocharacters(name, request):
    inst = request.getfixturevalue(name)
    alg, M = inst.algebra, inst.M
    for data in double_coset_data(alg, M, inst.omega):
        chi, cert = distinguished_cocharacter(data)
        assert cert.passed, cert.to_dict()
        e = idempotent(alg, M, M.dual(alg.conductor).zero())
        assert chi.value == (e * alg.basis(data.tau) * e).scale(M.order)
        assert contains(inst.X, chi.value).integral


def test_distinguished_cocharacter_for_transposition(s4):
    t = s4.G.index((1, 0, 2, 3))
    data = n_tau(s4.algebra, s4.M, t, s4.omega)
    _, cert = distinguished_cocharacter(data)
    assert cert.passed


def test_distinguished_needs_nondegenerate_cocycle(s4):
    omega = trivial_cocycle(s4.M.abstract, s4.conductor)
    data = n_tau(s4.algebra, s4.M, s4.G.identity, omega)
    with pytest.raises(TwistError):
        distinguished_cocharacter(data)


@pytest.mark.parametrize("name", ["s4", "sl21"])
def test_coalgebra_decomposition(name, request):
    inst = request.getfixturevalue(name)
    cert = coalgebra_decomposition(inst.algebra, inst.M, inst.omega)
    assert cert.passed
    assert all(r["ok"] for r in cert.details["cosets"])


# ---- induced character

def _permutation_character(G):
    Q = {G.embed_complement(q) for q in range(G.complement.order)}
    cosets = {frozenset(G.mul(x, q) for q in Q) for x in range(G.order)}
    return [sum(1 for C in cosets if frozenset(G.mul(g, x) for x in C) == C) - 1 for g in range(G.order)]


def test_induced_character_matches_brute_force(sl21):
    assert induced_character_values(sl21.G) == _permutation_character(sl21.G)


@pytest.mark.parametrize("name", ["sl21", "sl31"])
def test_induced_character_on_order(name, request):
    inst = request.getfixturevalue(name)
    values, cert = induced_character(inst.X)
    assert cert.passed
    assert values[inst.G.identity] == inst.G.order // inst.G.complement.order - 1


def test_induced_character_needs_semidirect_product(s4):
    with pytest.raises(GroupError):
        induced_character(s4.X)


def test_induced_character_on_idempotents(sl21):
    alg, N, G = sl21.algebra, sl21.N, sl21.G
    chi = induced_character_values(G)
    D = N.dual(alg.conductor)

    def evaluate(x):
        total = None
        for g, c in x.terms.items():
            term = c * chi[g]
            total = term if total is None else total + term
        return total

    assert evaluate(idempotent(alg, N, D.zero())).is_zero()
    for nu in D.elements[1:]:
        assert evaluate(idempotent(alg, N, nu)) == root_of_unity(0, alg.conductor)


# ---- E_tau chain

@pytest.mark.parametrize("name", ["sl21", "sl31"])
def test_e_tau_matches_closed_form(name, request):
    inst = request.getfixturevalue(name)
    alg, M = inst.algebra, inst.M
    chi = induced_character_values(inst.G)
    c = sandwich(alg, M, inst.tau, [(0, 0, 0)]).scale(M.order)
    closed, data = e_tau_closed_form(inst)
    assert e_tau(inst.twist, c, chi) == closed
    assert {tuple(x) for x in data.fixed} == {tuple(x) for x in data.trivial_on_intersection}


def test_closed_form_rejects_identity(sl21):
    with pytest.raises(HypothesisError):
        e_tau_closed_form(sl21, tau=sl21.G.identity)


@pytest.mark.parametrize("name", ["sl21", "sl31", "sp31"])
def test_uniqueness_pipeline(name, request):
    cert = uniqueness_pipeline(request.getfixturevalue(name))
    assert cert.passed, [k for k, v in cert.checks.items() if not v]
