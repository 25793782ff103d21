"""Concrete instances with every arbitrary choice fixed deterministically.

The linear families are G = F_q^{2n} x| Q for Q one of SL_{2n}(q),
GL_{2n}(q), Sp_{2n}(q).  Inside them

  L  = span(v_1, ..., v_n)                  (first half of the coordinates)
  P  = {(I S(a); 0 I) : a in F_{q^n}}       (S additive, injective)
  tau = (I 0; I I)

and M = LP carries the cocycle built from the generator-matching
isomorphism P -> dual(L).  The standard order X lives on N = F_q^{2n}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

from .algebra import GroupAlgebra, idempotent, tensor_multiply
from .certificates import Certificate
from .exactnum import CycNumber, root_of_unity
from .finfield import (ExtensionField, FiniteField, Matrix, block, elementary,
                       finite_field, identity, invert_matrix, is_symplectic, mat_mul,
                       matrix_in_basis, orthogonal_basis, transpose, zero_matrix)
from .groups import (DEFAULT_CAP, AbelianSubgroup, FiniteGroup, GroupError, SemidirectProduct,
                     abelian_subgroup_from_elements, dual_action, generated_subgroup,
                     linear_action, matrix_group_closure, normal_closure, permutation_group,
                     semidirect_product, vector_space, vector_to_tuple)
from .orders import Lattice, contains, min_poly, standard_order
from .twisting import (Cocycle, LagrangianDecomposition, Twist, TwistError, bicharacter_cocycle,
                       build_twist, cocycle_from_iso, pairing_of, standard_cocycle)

FAMILIES = ("sl", "gl", "sp", "s4", "heisenberg_gl", "psl_witness", "composite")


class InstanceError(ValueError):
    """Bad or out-of-range instance parameters."""


# ---------------------------------------------------------------- specs

@dataclass
class InstanceSpec:
    family: str
    q: Optional[int] = None
    n: Optional[int] = None
    p: Optional[int] = None
    ns: tuple[int, ...] = ()
    cap: int = DEFAULT_CAP
    conductor: Optional[int] = None  # None means automatic
    tau: Union[None, str, Sequence[Sequence[int]]] = None  # None: block matrix; "identity"; explicit

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise InstanceError(f"unknown family {self.family!r}; known: {', '.join(FAMILIES)}")
        if self.cap <= 0:
            raise InstanceError("cap must be positive")
        self.ns = tuple(int(x) for x in self.ns)
        need = {"sl": ("q", "n"), "gl": ("q", "n"), "sp": ("q", "n"), "s4": (),
                "heisenberg_gl": ("p", "n"), "psl_witness": ("p",), "composite": ("q", "ns")}
        for key in need[self.family]:
            if not getattr(self, key):
                raise InstanceError(f"family {self.family} needs parameter {key}")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "InstanceSpec":
        known = {"family", "q", "n", "p", "ns", "cap", "conductor", "tau"}
        extra = set(data) - known
        if extra:
            raise InstanceError(f"unknown spec keys: {sorted(extra)}")
        if "family" not in data:
            raise InstanceError("spec needs a family")
        kw = dict(data)
        if kw.get("conductor") in ("auto", None):
            kw["conductor"] = None
        if "ns" in kw:
            kw["ns"] = tuple(kw["ns"])
        return cls(**kw)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"family": self.family}
        for key in ("q", "n", "p"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.ns:
            out["ns"] = list(self.ns)
        out["cap"] = self.cap
        out["conductor"] = "auto" if self.conductor is None else self.conductor
        if self.tau is not None:
            out["tau"] = self.tau if isinstance(self.tau, str) else [list(r) for r in self.tau]
        return out

    @property
    def label(self) -> str:
        if self.family in ("sl", "gl", "sp"):
            return f"{self.family}({self.q},{self.n})"
        if self.family == "heisenberg_gl":
            return f"heisenberg_gl({self.p},{self.n})"
        if self.family == "psl_witness":
            return f"psl_witness({self.p})"
        if self.family == "composite":
            return f"composite({self.q};{','.join(map(str, self.ns))})"
        return "s4"


@dataclass
class BuiltInstance:
    spec: InstanceSpec
    G: FiniteGroup
    N: AbelianSubgroup
    L: AbelianSubgroup
    P: AbelianSubgroup
    M: AbelianSubgroup
    tau: Optional[int]
    f: list[tuple[int, ...]]
    omega: Cocycle
    twist: Twist
    X: Lattice
    choices: dict[str, Any] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def algebra(self) -> GroupAlgebra:
        return self.twist.algebra

    @property
    def conductor(self) -> int:
        return self.algebra.conductor

    def summary(self) -> dict[str, Any]:
        return {
            "label": self.spec.label,
            "order_G": self.G.order,
            "order_M": self.M.order,
            "order_N": self.N.order,
            "conductor": self.conductor,
            "basis_size": self.X.size,
            "J_terms": len(self.twist.J.terms),
        }


def _conductor(spec: InstanceSpec, p: int) -> int:
    c = spec.conductor if spec.conductor is not None else p
    if c % p:
        raise InstanceError(f"conductor {c} is not a multiple of the characteristic {p}")
    return c


# ---------------------------------------------------------------- matrix helpers

def _order_gl(q: int, d: int) -> int:
    out = 1
    for i in range(d):
        out *= q ** d - q ** i
    return out


def _order_sp(q: int, n: int) -> int:
    out = q ** (n * n)
    for i in range(1, n + 1):
        out *= q ** (2 * i) - 1
    return out


def _embed(d: int, offset: int, A: Matrix) -> Matrix:
    """Identity of size d with A placed on the diagonal at offset."""
    k = len(A)
    return tuple(tuple(A[r - offset][c - offset] if offset <= r < offset + k and offset <= c < offset + k
                       else (1 if r == c else 0) for c in range(d)) for r in range(d))


def _sl_generators(F: FiniteField, d: int) -> list[Matrix]:
    return [elementary(d, i, j, b) for i in range(d) for j in range(d) if i != j
            for b in F.prime_basis()]


def _sp_generators(F: FiniteField, n: int) -> list[Matrix]:
    I, Z = identity(n), zero_matrix(n)
    sym: list[Matrix] = []
    for i in range(n):
        for j in range(i, n):
            for b in F.prime_basis():
                S = [[0] * n for _ in range(n)]
                S[i][j] = b
                S[j][i] = b
                sym.append(tuple(tuple(r) for r in S))
    gens = [block(I, S, Z, I) for S in sym] + [block(I, Z, S, I) for S in sym]
    for i in range(n):
        for j in range(n):
            if i != j:
                for b in F.prime_basis():
                    A = elementary(n, i, j, b)
                    gens.append(block(A, Z, Z, transpose(invert_matrix(F, A))))
    return gens


def _tau_matrix(F: FiniteField, n: int, override) -> Matrix:
    if override is None:
        return block(identity(n), zero_matrix(n), identity(n), identity(n))
    if override == "identity":
        return identity(2 * n)
    if isinstance(override, str):
        raise InstanceError(f"unknown tau override {override!r}")
    return tuple(tuple(int(x) for x in row) for row in override)


# ---------------------------------------------------------------- linear families

def _linear_instance(spec: InstanceSpec, F: FiniteField, n: int, Q: FiniteGroup,
                     P_matrices: Sequence[Matrix], choices: dict[str, Any],
                     L_coords: Optional[Sequence[int]] = None, tau_matrix: Optional[Matrix] = None,
                     name: str = "G") -> BuiltInstance:
    d = len(Q.labels[0])
    V = vector_space(F, d)
    G = semidirect_product(V, Q, linear_action(F, V, Q), cap=spec.cap, name=name)
    N = G.normal_subgroup("N")
    coords = list(range(n)) if L_coords is None else list(L_coords)
    L_gens = []
    for i in coords:
        for b in F.prime_basis():
            vec = [0] * d
            vec[i] = b
            L_gens.append(G.embed_normal(V.index(vector_to_tuple(F, vec))))
    P_gens = []
    for S in P_matrices:
        try:
            P_gens.append(G.embed_complement(Q.index(S)))
        except (KeyError, ValueError):
            raise InstanceError("a matrix of P is not in Q") from None
    L = AbelianSubgroup(G, L_gens, "L")
    P = AbelianSubgroup(G, P_gens, "P")
    conductor = _conductor(spec, F.p)
    M, omega = cocycle_from_iso(L, P, conductor)
    f = [tuple(1 if i == j else 0 for i in range(L.abstract.rank)) for j in range(P.abstract.rank)]
    alg = GroupAlgebra(G, conductor)
    tw = build_twist(alg, M, omega)
    X = standard_order(alg, N)
    tau = None
    if tau_matrix is not None:
        try:
            tau = G.embed_complement(Q.index(tau_matrix))
        except (KeyError, ValueError):
            raise InstanceError("tau is not an element of Q") from None
        choices["tau"] = [list(r) for r in tau_matrix]
    choices["conductor"] = conductor
    choices["L_generators"] = [list(G.labels[g][0]) for g in L.generators]
    choices["P_generators"] = [[list(r) for r in G.labels[g][1]] for g in P.generators]
    choices["f"] = "j-th generator of P -> j-th dual basis character of L"
    choices["coset_representatives"] = "Q-part of the semidirect product"
    return BuiltInstance(spec, G, N, L, P, M, tau, f, omega, tw, X, choices)


def _phi_matrices(F: FiniteField, n: int) -> tuple[ExtensionField, list[Matrix]]:
    E = ExtensionField(F, n)
    return E, [E.multiplication_matrix(a) for a in E.prime_basis()]


def build_sl_instance(q: int, n: int, cap: int = DEFAULT_CAP, conductor: Optional[int] = None,
                      tau: Union[None, str, Sequence[Sequence[int]]] = None,
                      family: str = "sl") -> BuiltInstance:
    spec = InstanceSpec(family, q=q, n=n, cap=cap, conductor=conductor, tau=tau)
    F = finite_field(q)
    d = 2 * n
    est = q ** d * _order_gl(q, d) // (q - 1) * ((q - 1) if family == "gl" else 1)
    if est > cap:
        raise InstanceError(f"|G| = {est} exceeds the cap {cap}")
    gens = _sl_generators(F, d)
    if family == "gl":
        xi = F.primitive_element()
        gens.append(tuple(tuple((xi if r == 0 else 1) if r == c else 0 for c in range(d)) for r in range(d)))
    Q = matrix_group_closure(F, gens, cap, family.upper())
    expected = _order_gl(q, d) // (1 if family == "gl" else q - 1)
    if Q.order != expected:
        raise GroupError(f"generated {family.upper()} has order {Q.order}, expected {expected}")
    E, phis = _phi_matrices(F, n)
    I, Z = identity(n), zero_matrix(n)
    P_mats = [block(I, S, Z, I) for S in phis]
    choices = {"field_modulus": list(E.modulus), "phi_basis": "polynomial basis of F_q^n over F_q",
               "Q_generators": f"elementary transvections over the prime basis of F_{q}"
               + (" plus diag(primitive, 1, ...)" if family == "gl" else "")}
    return _linear_instance(spec, F, n, Q, P_mats, choices,
                            tau_matrix=_tau_matrix(F, n, tau), name=f"F{q}^{d}:{family.upper()}")


def build_gl_instance(q: int, n: int, cap: int = DEFAULT_CAP, conductor: Optional[int] = None,
                      tau: Union[None, str, Sequence[Sequence[int]]] = None) -> BuiltInstance:
    return build_sl_instance(q, n, cap, conductor, tau, family="gl")


def sp_symmetric_matrices(F: FiniteField, n: int) -> tuple[list[Matrix], dict[str, Any]]:
    """D * Psi(a) for a over an F_p-basis of F_{q^n}, where Psi is the
    multiplication matrix in a trace-orthogonal basis and D its Gram diagonal.

    Multiplication is self-adjoint for the trace form, so D*Psi(a) is
    symmetric even when the Gram diagonal cannot be normalized to 1.
    """
    E = ExtensionField(F, n)
    basis, gram = orthogonal_basis(E)
    D = tuple(tuple(gram[i] if i == j else 0 for j in range(n)) for i in range(n))
    mats = [mat_mul(F, D, matrix_in_basis(E, a, basis)) for a in E.prime_basis()]
    for S in mats:
        if S != transpose(S):
            raise ArithmeticError("trace-orthogonal multiplication matrix is not symmetric")
    return mats, {"orthogonal_basis": [list(b) for b in basis], "gram": list(gram)}


def build_sp_instance(q: int, n: int, cap: int = DEFAULT_CAP, conductor: Optional[int] = None,
                      tau: Union[None, str, Sequence[Sequence[int]]] = None) -> BuiltInstance:
    spec = InstanceSpec("sp", q=q, n=n, cap=cap, conductor=conductor, tau=tau)
    F = finite_field(q)
    est = q ** (2 * n) * _order_sp(q, n)
    if est > cap:
        raise InstanceError(f"|G| = {est} exceeds the cap {cap}")
    Q = matrix_group_closure(F, _sp_generators(F, n), cap, "SP")
    if Q.order != _order_sp(q, n):
        raise GroupError(f"generated Sp has order {Q.order}, expected {_order_sp(q, n)}")
    sym, info = sp_symmetric_matrices(F, n)
    I, Z = identity(n), zero_matrix(n)
    P_mats = [block(I, S, Z, I) for S in sym]
    tau_m = _tau_matrix(F, n, tau)
    for A in P_mats + [tau_m]:
        if not is_symplectic(F, A):
            raise InstanceError("P or tau is not symplectic")
    info["Q_generators"] = "symplectic root elements over the prime basis"
    return _linear_instance(spec, F, n, Q, P_mats, info, tau_matrix=tau_m, name=f"F{q}^{2 * n}:SP")


def build_composite_instance(q: int, ns: Sequence[int], cap: int = DEFAULT_CAP,
                             conductor: Optional[int] = None) -> BuiltInstance:
    """F_q^{2n} x| (SL_{2n_1}(q) x ... x SL_{2n_k}(q)) block diagonally, with
    the product of the per-block twists.  The certificate in
    extras['product_twist'] compares J with the product of the factors."""
    ns = tuple(int(x) for x in ns)
    spec = InstanceSpec("composite", q=q, ns=ns, cap=cap, conductor=conductor)
    F = finite_field(q)
    d = 2 * sum(ns)
    est = q ** d
    for k in ns:
        est *= _order_gl(q, 2 * k) // (q - 1)
    if est > cap:
        raise InstanceError(f"|G| = {est} exceeds the cap {cap}")
    offsets = [2 * sum(ns[:i]) for i in range(len(ns))]
    gens: list[Matrix] = []
    P_mats: list[Matrix] = []
    L_coords: list[int] = []
    tau_blocks = []
    for k, off in zip(ns, offsets):
        gens += [_embed(d, off, A) for A in _sl_generators(F, 2 * k)]
        _, phis = _phi_matrices(F, k)
        I, Z = identity(k), zero_matrix(k)
        P_mats += [_embed(d, off, block(I, S, Z, I)) for S in phis]
        L_coords += [off + i for i in range(k)]
        tau_blocks.append((off, block(I, Z, I, I)))
    Q = matrix_group_closure(F, gens, cap, "SLxSL")
    tau_m = identity(d)
    for off, T in tau_blocks:
        tau_m = mat_mul(F, tau_m, _embed(d, off, T))
    choices = {"blocks": list(ns), "offsets": offsets}
    inst = _linear_instance(spec, F, sum(ns), Q, P_mats, choices, L_coords=L_coords,
                            tau_matrix=tau_m, name=f"F{q}^{d}:prodSL")
    # per-block twists and their product
    alg, G = inst.algebra, inst.G
    cert = Certificate("product_twist")
    J = alg.tensor_one()
    J_inv = alg.tensor_one()
    rank_pos = 0
    for k in ns:
        r = k * F.m
        Li = AbelianSubgroup(G, inst.L.generators[rank_pos:rank_pos + r], f"L{rank_pos}")
        Pi = AbelianSubgroup(G, inst.P.generators[rank_pos:rank_pos + r], f"P{rank_pos}")
        Mi, wi = cocycle_from_iso(Li, Pi, inst.conductor)
        twi = build_twist(alg, Mi, wi)
        J = tensor_multiply(J, twi.J)
        J_inv = tensor_multiply(J_inv, twi.J_inv)
        rank_pos += r
    cert.record("J_is_product", J == inst.twist.J)
    cert.record("J_inv_is_product", J_inv == inst.twist.J_inv)
    inst.extras["product_twist"] = cert
    return inst


# ---------------------------------------------------------------- structural hypotheses (i)-(v)

def check_thm2_hypotheses(inst: BuiltInstance, tau: Optional[int] = None) -> Certificate:
    """Direct enumeration of conditions (i)-(v) on the data (N, Q, L, P, tau)."""
    G = inst.G
    if not isinstance(G, SemidirectProduct):
        raise InstanceError("hypothesis check needs a semidirect product")
    tau = inst.tau if tau is None else tau
    if tau is None:
        raise InstanceError("instance has no tau")
    L, P, N = inst.L, inst.P, inst.N
    cert = Certificate("thm2_hypotheses")
    cert.details["tau"] = G.labels[tau][1]

    iso = sorted(L.abstract.factors) == sorted(P.abstract.factors)
    bad = next(((l, p) for l in L.indices for p in P.indices if G.mul(l, p) != G.mul(p, l)), None)
    cert.record("i_isomorphic_commuting", iso and bad is None,
                {"L": L.abstract.factors, "P": P.abstract.factors,
                 "noncommuting": None if bad is None else [G.labels[bad[0]], G.labels[bad[1]]]})

    act = G.action
    ident = np.arange(act.shape[1])
    trivial = [q for q in range(act.shape[0]) if q != G.complement.identity and np.array_equal(act[q], ident)]
    cert.record("ii_faithful", not trivial, {"acts_trivially": [G.complement.labels[q] for q in trivial[:1]]})

    tauL = {G.conj(tau, l) for l in L.indices}
    inter = sorted((tauL & set(L.indices)) - {G.identity})
    in_N = tauL <= set(N.indices)
    ok3 = in_N and not inter and L.order * len(tauL) == N.order
    cert.record("iii_direct_sum", ok3,
                {"tauL_in_N": in_N, "intersection": [G.labels[x][0] for x in inter[:3]],
                 "orders": [L.order, len(tauL), N.order]})

    fixed = [n for n in N.indices if G.conj(tau, n) == n]
    cert.record("iv_fixed_points", len(fixed) > 1, {"fixed": [G.labels[x][0] for x in fixed]})
    cert.details["N_tau"] = [G.labels[x][0] for x in fixed]

    DA = dual_action(G, N, inst.conductor)
    D = N.dual(inst.conductor)
    fix_tau = set(np.nonzero(DA.table[tau] == np.arange(D.order))[0].tolist())
    witness = None
    for s in P.indices:
        if s == G.identity:
            continue
        st = G.mul(s, tau)
        f1 = set(np.nonzero(DA.table[st] == np.arange(D.order))[0].tolist()) - {0}
        if f1:
            witness = {"sigma": G.labels[s][1], "kind": "fixed by sigma tau", "character": D.elements[min(f1)]}
            break
        conj = G.conj(s, tau)
        f2 = (fix_tau & set(np.nonzero(DA.table[conj] == np.arange(D.order))[0].tolist())) - {0}
        if f2:
            witness = {"sigma": G.labels[s][1], "kind": "fixed by tau and sigma tau sigma^-1",
                       "character": D.elements[min(f2)]}
            break
    cert.record("v_dual_fixed_points", witness is None, witness)
    return cert


# ---------------------------------------------------------------- S4

def build_s4_instance(cap: int = DEFAULT_CAP, conductor: Optional[int] = None) -> BuiltInstance:
    """S4 with M = N = Klein four-group and omega(phi, psi) = (-1)^(phi_1 psi_0),
    the standard cocycle of the Lagrangian spanned by the first dual generator."""
    spec = InstanceSpec("s4", cap=cap, conductor=conductor)
    G = permutation_group([(1, 0, 2, 3), (1, 2, 3, 0)], cap, "S4")
    a, b = G.index((1, 0, 3, 2)), G.index((2, 3, 0, 1))
    V = AbelianSubgroup(G, [a, b], "V")
    c = _conductor(spec, 2)
    half = c // 2
    omega = bicharacter_cocycle(V.dual(c), [[0, 0], [half, 0]], c)
    D = omega.base
    dec = LagrangianDecomposition(D, pairing_of(omega),
                                  tuple(i for i, x in enumerate(D.elements) if not x[1]),
                                  tuple(i for i, x in enumerate(D.elements) if not x[0]))
    if not np.array_equal(standard_cocycle(dec).table % c, omega.table % c):
        raise TwistError("omega is not the standard cocycle of its decomposition")
    P_table = V.dual(c).pairing_table
    L_el = [V.to_group[m] for m in range(V.order) if not P_table[list(dec.lag), m].any()]
    P_el = [V.to_group[m] for m in range(V.order) if not P_table[list(dec.comp), m].any()]
    L = abelian_subgroup_from_elements(G, L_el, "L")
    P = abelian_subgroup_from_elements(G, P_el, "P")
    alg = GroupAlgebra(G, c)
    tw = build_twist(alg, V, omega)
    X = standard_order(alg, V)
    choices = {"conductor": c, "omega": "(-1)^(phi_1 psi_0) on characters of V",
               "V_generators": [list(G.labels[a]), list(G.labels[b])],
               "lagrangian": [list(dec.ambient.elements[i]) for i in dec.lag],
               "L": [list(G.labels[x]) for x in L.indices], "coset_representatives": "minimal index"}
    inst = BuiltInstance(spec, G, V, L, P, V, None, [], omega, tw, X, choices)
    inst.extras["decomposition"] = dec
    return inst


# ---------------------------------------------------------------- Heisenberg-type example

def build_heisenberg_gl_example(p: int, n: int, cap: int = DEFAULT_CAP,
                                conductor: Optional[int] = None) -> BuiltInstance:
    """The subgroup of GL_{2n+2}(p) with a_11 = a_dd = 1, zero first column
    and zero last row off the diagonal; M, L, N and the mirror order X'."""
    spec = InstanceSpec("heisenberg_gl", p=p, n=n, cap=cap, conductor=conductor)
    F = finite_field(p)
    d = 2 * n + 2
    est = p ** (4 * n + 1) * _order_gl(p, 2 * n)
    if est > cap:
        raise InstanceError(f"|G| = {est} exceeds the cap {cap}")
    last = d - 1
    xs = [elementary(d, i + 1, last, 1) for i in range(2 * n)]
    ys = [elementary(d, 0, i + 1, 1) for i in range(2 * n)]
    z = elementary(d, 0, last, 1)
    inner = _sl_generators(F, 2 * n)
    xi = F.primitive_element()
    inner.append(tuple(tuple((xi if r == 0 else 1) if r == c else 0 for c in range(2 * n))
                       for r in range(2 * n)))
    gens = xs + ys + [z] + [_embed(d, 1, A) for A in inner]
    G = matrix_group_closure(F, gens, cap, "G")
    if G.order != est:
        raise GroupError(f"closure has order {G.order}, expected {est}")
    X_ = [G.index(m) for m in xs]
    Y_ = [G.index(m) for m in ys]
    Z_ = G.index(z)
    cert = Certificate("heisenberg_example")

    def comm(a: int, b: int) -> int:
        return G.mul(G.mul(a, b), G.mul(G.inv(a), G.inv(b)))

    rel = all(G.element_order(g) == p for g in X_ + Y_ + [Z_])
    rel &= all(comm(g, Z_) == G.identity for g in X_ + Y_)
    rel &= all(comm(a, b) == G.identity for S in (X_, Y_) for a in S for b in S)
    rel &= all(comm(Y_[i], X_[j]) == (Z_ if i == j else G.identity)
               for i in range(2 * n) for j in range(2 * n))
    cert.record("presentation_relations", rel)
    Gamma = generated_subgroup(G, X_ + Y_ + [Z_])
    cert.record("Gamma_order", Gamma.order == p ** (4 * n + 1), {"order": Gamma.order})
    cert.record("Gamma_normal", Gamma.is_normal())

    L = AbelianSubgroup(G, X_[n:], "L")
    P = AbelianSubgroup(G, Y_[:n], "P")
    N = AbelianSubgroup(G, X_ + [Z_], "N")
    N2 = AbelianSubgroup(G, Y_ + [Z_], "N'")
    cert.record("N_normal_abelian", N.is_normal() and N.is_abelian())
    cert.record("N_mirror_normal_abelian", N2.is_normal() and N2.is_abelian())
    cert.record("L_in_N", all(x in N for x in L.indices))
    c = _conductor(spec, p)
    M, omega = cocycle_from_iso(L, P, c)
    closure_M = normal_closure(G, M.indices)
    cert.record("M_not_in_normal_abelian", not closure_M.is_abelian(),
                {"normal_closure_order": closure_M.order})
    cert.details["normal_closure_order"] = closure_M.order
    alg = GroupAlgebra(G, c)
    tw = build_twist(alg, M, omega)
    X = standard_order(alg, N, "X")
    X2 = standard_order(alg, N2, "X'")
    witness = None
    for rho in P.abstract.elements:
        e = idempotent(alg, P, rho)
        in_X, in_X2 = contains(X, e), contains(X2, e)
        if in_X2.integral and not in_X.integral:
            k = in_X.first_violation
            witness = {"character": list(rho), "basis_index": k, "coordinate": str(in_X.coordinates[k])}
            break
    cert.record("orders_differ", witness is not None)
    cert.details["X_ne_X_mirror_witness"] = witness
    choices = {"conductor": c, "x_i": "I + E_{i+1,2n+2}", "y_i": "I + E_{1,i+1}", "z": "I + E_{1,2n+2}",
               "coset_representatives": "minimal index"}
    inst = BuiltInstance(spec, G, N, L, P, M, None,
                         [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)],
                         omega, tw, X, choices)
    inst.extras.update({"X_mirror": X2, "N_mirror": N2, "certificate": cert})
    return inst


# ---------------------------------------------------------------- PSL witness

def _kmat_mul(A, B, conductor: int):
    k = len(A)
    zero = CycNumber.zero(conductor)
    out = []
    for i in range(k):
        row = []
        for j in range(k):
            s = zero
            for t in range(k):
                if not A[i][t].is_zero() and not B[t][j].is_zero():
                    s = s + A[i][t] * B[t][j]
            row.append(s)
        out.append(tuple(row))
    return tuple(out)


def build_psl_witness(p: int, cap: int = DEFAULT_CAP) -> Certificate:
    """Heisenberg subgroup of SL_3(p), its p-dimensional irreducible
    representation, and the element w = p^-2 sum_{r,s} g1^r g3^s whose
    minimal polynomial has a non-integral coefficient."""
    if p not in (2, 3, 5):
        raise InstanceError("psl witness is desk scale only for p in {2, 3, 5}")
    F = finite_field(p)
    g1m, g2m, g3m = elementary(3, 0, 1, 1), elementary(3, 0, 2, 1), elementary(3, 1, 2, 1)
    H = matrix_group_closure(F, [g1m, g2m, g3m], cap, "Heis")
    g1, g2, g3 = H.index(g1m), H.index(g2m), H.index(g3m)
    cert = Certificate("psl_witness")
    cert.record("heisenberg_order", H.order == p ** 3, {"order": H.order})
    one, zero = CycNumber.one(p), CycNumber.zero(p)
    zeta = root_of_unity(1, p)
    shift = tuple(tuple(one if j == (i + 1) % p else zero for j in range(p)) for i in range(p))
    scal = tuple(tuple(zeta if i == j else zero for j in range(p)) for i in range(p))
    diag = tuple(tuple(root_of_unity(i, p) if i == j else zero for j in range(p)) for i in range(p))
    rho: dict[int, Any] = {H.identity: tuple(tuple(one if i == j else zero for j in range(p)) for i in range(p))}
    images = {g1: shift, g2: scal, g3: diag}
    frontier = [H.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in (g1, g2, g3):
                y = H.mul(x, s)
                if y not in rho:
                    rho[y] = _kmat_mul(rho[x], images[s], p)
                    nxt.append(y)
        frontier = nxt
    hom = all(_kmat_mul(rho[a], rho[b], p) == rho[H.mul(a, b)] for a in range(H.order) for b in range(H.order))
    cert.record("irrep_homomorphism", hom)
    alg = GroupAlgebra(H, p)
    terms: dict[int, Any] = {}
    for r in range(p):
        for s in range(p):
            g = H.mul(H.power(g1, r), H.power(g3, s))
            terms[g] = terms.get(g, 0) + 1
    w = alg.element(terms).scale(CycNumber.from_rational(Fraction(1, p * p), p))
    image = [[zero] * p for _ in range(p)]
    for g, c in w.terms.items():
        for i in range(p):
            for j in range(p):
                if not rho[g][i][j].is_zero():
                    image[i][j] = image[i][j] + c * rho[g][i][j]
    target = [[CycNumber.from_rational(Fraction(1, p), p) if j == 0 else zero for j in range(p)] for i in range(p)]
    cert.record("image_matches", image == target,
                {"image": [[str(x) for x in row] for row in image]})
    trace = zero
    for i in range(p):
        trace = trace + image[i][i]
    rank_one = all(image[i] == image[0] for i in range(p))
    cert.record("image_rank_one_trace", rank_one and trace == CycNumber.from_rational(Fraction(1, p), p),
                {"trace": str(trace)})
    mp = min_poly(w)
    bad = [k for k, c in enumerate(mp) if not c.is_integral()]
    cert.record("non-integral minimal polynomial", bool(bad), {"coefficients": [str(c) for c in mp]})
    cert.details["min_poly"] = [str(c) for c in mp]
    cert.details["non_integral_degrees"] = bad
    idem_ok = True
    for gen in (g1, g2, g3):
        avg = alg.element({H.power(gen, r): 1 for r in range(p)}).scale(CycNumber.from_rational(Fraction(1, p), p))
        idem_ok &= (avg * avg) == avg
    cert.record("averaging_idempotents", idem_ok)
    cert.details["order"] = H.order
    return cert


# ---------------------------------------------------------------- dispatch

def build_instance(spec: Union[InstanceSpec, Mapping[str, Any]]) -> Union[BuiltInstance, Certificate]:
    """Build from a spec; the psl_witness family returns its report directly."""
    if not isinstance(spec, InstanceSpec):
        spec = InstanceSpec.from_dict(spec)
    fam = spec.family
    if fam in ("sl", "gl"):
        return build_sl_instance(spec.q, spec.n, spec.cap, spec.conductor, spec.tau, family=fam)
    if fam == "sp":
        return build_sp_instance(spec.q, spec.n, spec.cap, spec.conductor, spec.tau)
    if fam == "s4":
        return build_s4_instance(spec.cap, spec.conductor)
    if fam == "heisenberg_gl":
        return build_heisenberg_gl_example(spec.p, spec.n, spec.cap, spec.conductor)
    if fam == "composite":
        return build_composite_instance(spec.q, spec.ns, spec.cap, spec.conductor)
    return build_psl_witness(spec.p, spec.cap)
