"""Double-coset subcoalgebras of the twisted group algebra, their irreducible
cocharacters, and the chain of elements E_tau that recovers e_eps^L inside
any Hopf order of a twisted semidirect product.

Characters of M are indexed as in ``M.dual(conductor)``; e_phi tau e_psi is
expanded in the group basis by summing over M x M directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Any, Optional, Sequence

import numpy as np

from .algebra import AlgElem, GroupAlgebra, apply_character_leg, coproduct, idempotent
from .certificates import Certificate
from .exactnum import root_of_unity, sum_of_roots
from .groups import AbelianSubgroup, GroupError, SemidirectProduct, double_cosets, dual_action
from .instances import BuiltInstance
from .orders import Lattice, _Echelon, character_values
from .twisting import Cocycle, Twist, TwistError, is_nondegenerate, pairing_of, twisted_coproduct


class HypothesisError(ValueError):
    """Input data violate a hypothesis needed by a closed-form formula."""


# ---------------------------------------------------------------- sandwiches

def sandwich(alg: GroupAlgebra, M: AbelianSubgroup, tau: int,
             terms: Sequence[tuple[int, int, int]]) -> AlgElem:
    """sum over (phi, psi, w) of zeta^w e_phi tau e_psi.

    The coefficient of g is |M|^-2 times the sum over a tau b = g and over
    the terms of zeta^(w - phi(a) - psi(b)).
    """
    G = alg.group
    Nc = alg.conductor
    P = M.dual(Nc).pairing_table
    n = M.order
    if not terms:
        return alg.zero()
    T = np.asarray(terms, dtype=np.int64).reshape(-1, 3)
    E = (T[:, 2, None, None] - P[T[:, 0]][:, :, None] - P[T[:, 1]][:, None, :]) % Nc
    counts = np.stack([(E == k).sum(axis=0) for k in range(Nc)], axis=-1).reshape(n * n, Nc)
    mul = G._mul
    targets = np.array([mul[mul[a][tau]][b] for a in M.to_group for b in M.to_group], dtype=np.int64)
    cells = np.unique(targets)
    acc = np.zeros((cells.size, Nc), dtype=np.int64)
    np.add.at(acc, np.searchsorted(cells, targets), counts)
    out = {}
    for g, row in zip(cells.tolist(), acc.tolist()):
        c = sum_of_roots(row, Nc, n * n)
        if not c.is_zero():
            out[g] = c
    return AlgElem(alg, out, _clean=False)


# ---------------------------------------------------------------- N_tau and Rad_tau

@dataclass
class DoubleCosetData:
    algebra: GroupAlgebra
    M: AbelianSubgroup
    tau: int
    cell: list[int]
    pairs: list[tuple[int, int]]
    rad: list[tuple[int, int]]
    dim_sqrt: int
    s: Optional[int]
    nondegenerate: bool
    weights: np.ndarray = field(repr=False, default=None)  # type: ignore[assignment]

    @property
    def size(self) -> int:
        return len(self.pairs)


@dataclass
class Cocharacter:
    value: AlgElem
    label: tuple


def _lift(omega: Cocycle, conductor: int) -> Cocycle:
    return omega if omega.conductor == conductor else omega.lifted(conductor)


def n_tau(alg: GroupAlgebra, M: AbelianSubgroup, tau: int, omega: Cocycle) -> DoubleCosetData:
    """N_tau = {(phi, psi) : phi(m) = psi(tau^-1 m tau) on M cap tau M tau^-1}
    and the radical of (omega, omega^-1) restricted to it."""
    G = alg.group
    Nc = alg.conductor
    omega = _lift(omega, Nc)
    P = M.dual(Nc).pairing_table
    m_index = {g: i for i, g in enumerate(M.to_group)}
    ti = G.inv(tau)
    inter = [(m_index[m], m_index[G.conj(ti, m)]) for m in M.to_group if G.conj(ti, m) in m_index]
    a_idx = [a for a, _ in inter]
    b_idx = [b for _, b in inter]
    left = P[:, a_idx] % Nc
    right = P[:, b_idx] % Nc
    by_key: dict[bytes, list[int]] = {}
    for psi in range(M.order):
        by_key.setdefault(right[psi].tobytes(), []).append(psi)
    pairs = [(phi, psi) for phi in range(M.order) for psi in by_key.get(left[phi].tobytes(), [])]
    B = pairing_of(omega).table % Nc
    f = np.array([p for p, _ in pairs], dtype=np.int64)
    g = np.array([q for _, q in pairs], dtype=np.int64)
    form = (B[f][:, f] - B[g][:, g]) % Nc
    rad = [pairs[i] for i in np.nonzero(~form.any(axis=1))[0].tolist()]
    ratio, rem = divmod(len(pairs), len(rad))
    root = isqrt(ratio)
    if rem or root * root != ratio:
        raise TwistError(f"|N_tau|/|Rad_tau| = {len(pairs)}/{len(rad)} is not a perfect square")
    prod = len(pairs) * len(rad)
    sq = isqrt(prod)
    nondeg = is_nondegenerate(pairing_of(omega))
    s = None
    if sq * sq == prod and M.order % sq == 0:
        s = M.order // sq
    elif nondeg:
        raise TwistError("s = |M|/sqrt(|N_tau||Rad_tau|) is not an integer for a non-degenerate cocycle")
    cell = sorted({G.mul(G.mul(a, tau), b) for a in M.to_group for b in M.to_group})
    return DoubleCosetData(alg, M, tau, cell, pairs, rad, root, s, nondeg, P)


def double_coset_data(alg: GroupAlgebra, M: AbelianSubgroup, omega: Cocycle) -> list[DoubleCosetData]:
    reps, _ = double_cosets(alg.group, M)
    return [n_tau(alg, M, t, omega) for t in reps]


# ---------------------------------------------------------------- cocharacters

def _m_index(M: AbelianSubgroup, m: int) -> int:
    return M.abstract.index(M.tuple_of(m))


def irreducible_cocharacter(data: DoubleCosetData, m: int, m2: int) -> Cocharacter:
    """c_tau(m, m') = dim_sqrt * sum over Rad_tau of phi(m) psi(m') e_phi tau e_psi."""
    P = data.weights
    a, b = _m_index(data.M, m), _m_index(data.M, m2)
    terms = [(phi, psi, int(P[phi, a] + P[psi, b])) for phi, psi in data.rad]
    value = sandwich(data.algebra, data.M, data.tau, terms).scale(data.dim_sqrt)
    return Cocharacter(value, ("c", data.tau, m, m2))


def perp_coset_key(data: DoubleCosetData, m: int, m2: int) -> tuple[int, ...]:
    """The restriction of (m, m') to Rad_tau; equal keys mean the same coset
    of the annihilator of Rad_tau."""
    P, Nc = data.weights, data.algebra.conductor
    a, b = _m_index(data.M, m), _m_index(data.M, m2)
    return tuple(int((P[phi, a] + P[psi, b]) % Nc) for phi, psi in data.rad)


def perp_coset_representatives(data: DoubleCosetData) -> list[tuple[int, int]]:
    """First pair (in lexicographic order of M-indices) of each coset."""
    seen: dict[tuple[int, ...], tuple[int, int]] = {}
    for m in data.M.to_group:
        for m2 in data.M.to_group:
            key = perp_coset_key(data, m, m2)
            if key not in seen:
                seen[key] = (m, m2)
    return list(seen.values())


def distinguished_cocharacter(data: DoubleCosetData) -> tuple[Cocharacter, Certificate]:
    """|M| e_eps tau e_eps, with the check s * sum_i c_tau(m_i, m_i') = |M| e_eps tau e_eps."""
    if not data.nondegenerate:
        raise TwistError("the distinguished cocharacter needs a non-degenerate cocycle")
    alg, M = data.algebra, data.M
    value = sandwich(alg, M, data.tau, [(0, 0, 0)]).scale(M.order)
    cert = Certificate("distinguished_cocharacter")
    reps = perp_coset_representatives(data)
    total = alg.zero()
    for m, m2 in reps:
        total = total + irreducible_cocharacter(data, m, m2).value
    cert.record("coset_count", len(reps) == len(data.rad), {"reps": len(reps), "rad": len(data.rad)})
    lhs = total.scale(data.s)
    cert.record("decomposition_identity", lhs == value)
    cert.record("s_divides_M", data.s is not None and M.order % data.s == 0, {"s": data.s})
    cert.record("in_double_coset", set(value.support()) <= set(data.cell))
    cert.details.update({"tau": data.tau, "N_tau": data.size, "Rad_tau": len(data.rad),
                         "dim_sqrt": data.dim_sqrt, "s": data.s})
    return Cocharacter(value, ("distinguished", data.tau)), cert


def coalgebra_decomposition(alg: GroupAlgebra, M: AbelianSubgroup, omega: Cocycle) -> Certificate:
    """For each double coset: e_phi tau e_psi over N_tau is a basis of K(M tau M),
    and it vanishes off N_tau; the dimensions add up to |G|."""
    G = alg.group
    cert = Certificate("coalgebra_decomposition")
    rows = []
    total = 0
    ok_all = True
    for data in double_coset_data(alg, M, omega):
        inside = set(data.pairs)
        ech = _Echelon(alg.conductor)
        rank = 0
        support_ok = True
        vanish_ok = True
        cell = set(data.cell)
        for phi in range(M.order):
            for psi in range(M.order):
                x = sandwich(alg, M, data.tau, [(phi, psi, 0)])
                if (phi, psi) in inside:
                    support_ok &= set(x.support()) <= cell
                    rank += ech.add(dict(x.terms), {})
                else:
                    vanish_ok &= x.is_zero()
        ok = rank == data.size == len(data.cell) and support_ok and vanish_ok
        ok_all &= ok
        total += data.size
        rows.append({"tau": data.tau, "cell": len(data.cell), "N_tau": data.size, "rank": rank,
                     "Rad_tau": len(data.rad), "s": data.s, "ok": ok})
    cert.record("per_coset_bases", ok_all, [r for r in rows if not r["ok"]][:1])
    cert.record("dimension_sum", total == G.order, {"sum": total, "order": G.order})
    cert.details["cosets"] = rows
    return cert


# ---------------------------------------------------------------- induced character

def induced_character_values(G: SemidirectProduct) -> list[int]:
    """Ind_Q^G(trivial) minus trivial on group elements: fixed cosets - 1."""
    T = G.table.astype(np.int64)
    inv = np.array([G.inv(g) for g in range(G.order)], dtype=np.int64)
    in_Q = np.zeros(G.order, dtype=bool)
    in_Q[[G.embed_complement(q) for q in range(G.complement.order)]] = True
    xs = np.arange(G.order)
    qn = G.complement.order
    out = []
    for g in range(G.order):
        conj = T[T[inv, g], xs]  # x^-1 g x
        out.append(int(in_Q[conj].sum()) // qn - 1)
    return out


def induced_character_formula(X: Lattice) -> list[int]:
    """1 on e_nu q when nu is non-trivial and fixed by q, else 0."""
    G = X.algebra.group
    N = X.normal  # type: ignore[attr-defined]
    act = dual_action(G, N, X.conductor).table
    out = []
    for q in X.coset_reps:  # type: ignore[attr-defined]
        for nu in range(N.order):
            out.append(1 if nu != 0 and act[q, nu] == nu else 0)
    return out


def induced_character(X: Lattice) -> tuple[list[int], Certificate]:
    """Group values of the character, checked against the basis formula."""
    G = X.algebra.group
    if not isinstance(G, SemidirectProduct):
        raise GroupError("induced character needs a semidirect product")
    values = induced_character_values(G)
    got = character_values(X, lambda g: values[g])
    want = induced_character_formula(X)
    cert = Certificate("induced_character")
    bad = next((i for i, (a, b) in enumerate(zip(got, want)) if a != b), None)
    cert.record("formula_matches_permutation_character", bad is None,
                None if bad is None else {"basis_index": bad, "value": str(got[bad]), "formula": want[bad]})
    cert.record("integral_on_order", all(v.is_integral() for v in got))
    return values, cert


# ---------------------------------------------------------------- E_tau

def e_tau(tw: Twist, c: AlgElem, chi: Sequence[int]) -> AlgElem:
    """(chi (x) id)(Delta_J(c)) with chi given by its values on group elements."""
    return apply_character_leg(lambda g: chi[g], twisted_coproduct(tw, c), "left")


@dataclass
class ClosedFormData:
    fixed: list[tuple[int, ...]]
    alpha: dict[int, int]
    gamma: dict[int, int]
    trivial_on_intersection: list[tuple[int, ...]]


def _closed_form_data(inst: BuiltInstance, tau: int) -> tuple[ClosedFormData, dict[int, tuple[int, int]]]:
    G, L, N = inst.G, inst.L, inst.N
    Nc = inst.conductor
    decomp: dict[int, tuple[int, int]] = {}
    for l1 in L.to_group:
        for l2 in L.to_group:
            decomp[G.mul(l1, G.conj(tau, l2))] = (l1, l2)
    if len(decomp) != N.order or any(x not in N for x in decomp):
        raise HypothesisError("N is not the direct sum of L and tau.L")
    tau2 = G.mul(tau, tau)
    alpha = {l: decomp[G.conj(tau2, l)][0] for l in L.to_group}
    gamma = {l: decomp[G.conj(tau2, l)][1] for l in L.to_group}
    DL = L.dual(Nc)
    fixed = []
    for lam in DL.elements:
        if all(DL.exponent_at(lam, L.tuple_of(G.mul(alpha[l], gamma[l]))) == DL.exponent_at(lam, L.tuple_of(l))
               for l in L.generators):
            fixed.append(lam)
    moved = {G.mul(G.conj(tau, n), G.inv(n)) for n in N.indices}
    inter = [l for l in L.to_group if l in moved]
    trivial = [lam for lam in DL.elements
               if all(DL.exponent_at(lam, L.tuple_of(l)) == 0 for l in inter)]
    return ClosedFormData(fixed, alpha, gamma, trivial), decomp


def _nu_of(inst: BuiltInstance, lam: Sequence[int], decomp: dict[int, tuple[int, int]]) -> tuple[int, ...]:
    L, N = inst.L, inst.N
    DL, DN = L.dual(inst.conductor), N.dual(inst.conductor)
    vals = []
    for g in N.generators:
        l1, l2 = decomp[g]
        vals.append(DL.exponent_at(lam, L.tuple_of(l1)) + DL.exponent_at(lam, L.tuple_of(l2)))
    return DN.from_values(vals)


def e_tau_closed_form(inst: BuiltInstance, tau: Optional[int] = None,
                      inverse: bool = False) -> tuple[AlgElem, ClosedFormData]:
    """sum over sigma in P and non-trivial lambda with lambda o (alpha+gamma) = lambda
    of sigma tau^(+-1) e^N_(lambda,lambda) sigma^-1."""
    G = inst.G
    tau = inst.tau if tau is None else tau
    if tau is None:
        raise HypothesisError("instance has no tau")
    data, decomp = _closed_form_data(inst, tau)
    nontrivial = [lam for lam in data.fixed if any(lam)]
    if not nontrivial:
        raise HypothesisError("no non-trivial character is fixed by alpha + gamma (N^tau is trivial)")
    alg = inst.algebra
    t = G.inv(tau) if inverse else tau
    out: dict[int, Any] = {}
    for lam in nontrivial:
        e = idempotent(alg, inst.N, _nu_of(inst, lam, decomp))
        for s in inst.P.to_group:
            left = G.mul(s, t)
            si = G.inv(s)
            for g, c in e.terms.items():
                h = G.mul(G.mul(left, g), si)
                out[h] = out[h] + c if h in out else c
    return AlgElem(alg, out), data


def uniqueness_pipeline(inst: BuiltInstance, tau: Optional[int] = None) -> Certificate:
    """Every identity of the chain E_tau, E_tau^-1, their product, and the
    contractions whose product is e_eps^L, each checked exactly."""
    G, alg, tw, L = inst.G, inst.algebra, inst.twist, inst.L
    tau = inst.tau if tau is None else tau
    cert = Certificate("uniqueness_pipeline")
    chi = induced_character_values(G)
    M = inst.M
    Nc = inst.conductor
    elems = {}
    data = None
    for label, t in (("tau", tau), ("tau_inv", G.inv(tau))):
        c = sandwich(alg, M, t, [(0, 0, 0)]).scale(M.order)
        direct = e_tau(tw, c, chi)
        closed, data = e_tau_closed_form(inst, tau, inverse=(label == "tau_inv"))
        cert.record(f"E_{label}_matches_closed_form", direct == closed,
                    {"difference_support": sorted((direct - closed).support())[:5]})
        elems[label] = direct
    assert data is not None
    DL = L.dual(Nc)
    fixed = [tuple(l) for l in data.fixed]
    fixed_set = set(fixed)
    subgroup = (DL.zero() in fixed_set and all(DL.add(a, b) in fixed_set for a in fixed for b in fixed))
    cert.record("fixed_set_is_subgroup", subgroup)
    cert.record("fixed_set_equals_trivial_on_intersection",
                fixed_set == {tuple(l) for l in data.trivial_on_intersection})
    cert.record("fixed_set_nontrivial", len(fixed) > 1)
    prod = elems["tau"] * elems["tau_inv"]
    cert.record("product_in_KL", set(prod.support()) <= set(L.to_group))
    expected = alg.zero()
    for lam in fixed:
        if any(lam):
            expected = expected + idempotent(alg, L, lam)
    cert.record("product_equals_sum_of_idempotents", prod == expected)
    delta = coproduct(prod)
    cert.record("twisted_coproduct_untwisted_on_product", twisted_coproduct(tw, prod) == delta)
    final = alg.one()
    contractions_ok = True
    for phi in fixed:
        if not any(phi):
            continue
        vals = {l: root_of_unity(DL.exponent_at(phi, L.tuple_of(l)), Nc) for l in L.to_group}
        contracted = apply_character_leg(vals, delta, "left")
        want = alg.zero()
        phi_inv = DL.neg(phi)
        for lam in fixed:
            if lam != phi_inv:
                want = want + idempotent(alg, L, lam)
        contractions_ok &= contracted == want
        final = final * contracted
    cert.record("contractions_match", contractions_ok)
    e_eps = idempotent(alg, L, DL.zero())
    cert.record("final_product_is_e_eps_L", final == e_eps)
    cert.details.update({"fixed_characters": [list(l) for l in fixed],
                         "E_tau_terms": len(elems["tau"].terms), "product_terms": len(prod.terms)})
    return cert
