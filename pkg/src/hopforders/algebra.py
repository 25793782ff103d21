"""The group algebra KG as a Hopf algebra, with sparse exact elements."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .exactnum import CycNumber, root_of_unity, sum_of_roots
from .groups import AbelianSubgroup, FiniteGroup, GroupError

Scalar = Union[int, Fraction, CycNumber]


class AlgebraMismatch(ValueError):
    pass


class GroupAlgebra:
    """KG over K = Q(zeta_N)."""

    def __init__(self, group: FiniteGroup, conductor: int):
        self.group = group
        self.conductor = conductor
        self._one = CycNumber.one(conductor)

    def scalar(self, x: Scalar) -> CycNumber:
        if isinstance(x, CycNumber):
            if x.conductor != self.conductor:
                raise AlgebraMismatch("scalar has a different conductor")
            return x
        return CycNumber.from_rational(x, self.conductor)

    def element(self, terms: Mapping[int, Scalar]) -> "AlgElem":
        return AlgElem(self, {g: self.scalar(c) for g, c in terms.items()})

    def basis(self, g: int) -> "AlgElem":
        return AlgElem(self, {g: self._one}, _clean=False)

    def one(self) -> "AlgElem":
        return self.basis(self.group.identity)

    def zero(self) -> "AlgElem":
        return AlgElem(self, {}, _clean=False)

    def tensor(self, terms: Mapping[tuple[int, ...], Scalar], arity: int = 2) -> "TensorElem":
        return TensorElem(self, {k: self.scalar(c) for k, c in terms.items()}, arity)

    def tensor_one(self, arity: int = 2) -> "TensorElem":
        return TensorElem(self, {(self.group.identity,) * arity: self._one}, arity, _clean=False)

    def __repr__(self) -> str:
        return f"GroupAlgebra({self.group.name}, conductor={self.conductor})"


def _accumulate(out: dict, key, value: CycNumber) -> None:
    cur = out.get(key)
    out[key] = value if cur is None else cur + value


def _strip(d: dict) -> dict:
    return {k: v for k, v in d.items() if not v.is_zero()}


class AlgElem:
    """Sparse element of KG: group index -> nonzero coefficient."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: GroupAlgebra, terms: dict[int, CycNumber], *, _clean: bool = True):
        self.algebra = algebra
        self.terms = _strip(terms) if _clean else terms

    @property
    def group(self) -> FiniteGroup:
        return self.algebra.group

    def _check(self, other: "AlgElem") -> None:
        if other.algebra is not self.algebra:
            raise AlgebraMismatch("elements live in different group algebras")

    def coefficient(self, g: int) -> CycNumber:
        return self.terms.get(g, CycNumber.zero(self.algebra.conductor))

    def support(self) -> list[int]:
        return sorted(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "AlgElem") -> "AlgElem":
        self._check(other)
        out = dict(self.terms)
        for g, c in other.terms.items():
            _accumulate(out, g, c)
        return AlgElem(self.algebra, out)

    def __neg__(self) -> "AlgElem":
        return AlgElem(self.algebra, {g: -c for g, c in self.terms.items()}, _clean=False)

    def __sub__(self, other: "AlgElem") -> "AlgElem":
        return self + (-other)

    def scale(self, s: Scalar) -> "AlgElem":
        s = self.algebra.scalar(s)
        if s.is_zero():
            return self.algebra.zero()
        return AlgElem(self.algebra, {g: c * s for g, c in self.terms.items()}, _clean=False)

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            return alg_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgElem):
            return NotImplemented
        return other.algebra is self.algebra and other.terms == self.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        items = ", ".join(f"{g}: {c}" for g, c in sorted(self.terms.items())[:6])
        more = "" if len(self.terms) <= 6 else f", ... ({len(self.terms)} terms)"
        return f"AlgElem({{{items}{more}}})"


class TensorElem:
    """Sparse element of KG^(tensor k): index tuples -> nonzero coefficient."""

    __slots__ = ("algebra", "terms", "arity")

    def __init__(self, algebra: GroupAlgebra, terms: dict[tuple[int, ...], CycNumber],
                 arity: int = 2, *, _clean: bool = True):
        self.algebra = algebra
        self.arity = arity
        self.terms = _strip(terms) if _clean else terms

    @property
    def group(self) -> FiniteGroup:
        return self.algebra.group

    def _check(self, other: "TensorElem") -> None:
        if other.algebra is not self.algebra or other.arity != self.arity:
            raise AlgebraMismatch("tensors live in different spaces")

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "TensorElem") -> "TensorElem":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _accumulate(out, k, c)
        return TensorElem(self.algebra, out, self.arity)

    def __neg__(self) -> "TensorElem":
        return TensorElem(self.algebra, {k: -c for k, c in self.terms.items()}, self.arity, _clean=False)

    def __sub__(self, other: "TensorElem") -> "TensorElem":
        return self + (-other)

    def scale(self, s: Scalar) -> "TensorElem":
        s = self.algebra.scalar(s)
        return TensorElem(self.algebra, {k: c * s for k, c in self.terms.items()}, self.arity)

    def __mul__(self, other):
        if isinstance(other, TensorElem):
            return tensor_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElem):
            return NotImplemented
        return other.algebra is self.algebra and other.arity == self.arity and other.terms == self.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"TensorElem(arity={self.arity}, {len(self.terms)} terms)"


# ---------------------------------------------------------------- products

def alg_multiply(a: AlgElem, b: AlgElem) -> AlgElem:
    a._check(b)
    mul = a.group._mul
    out: dict[int, CycNumber] = {}
    for g, c in a.terms.items():
        row = mul[g]
        for h, d in b.terms.items():
            _accumulate(out, row[h], c * d)
    return AlgElem(a.algebra, out)


def tensor_multiply(s: TensorElem, t: TensorElem) -> TensorElem:
    s._check(t)
    mul = s.group._mul
    out: dict[tuple[int, ...], CycNumber] = {}
    if s.arity == 2:
        for (g1, g2), c in s.terms.items():
            r1, r2 = mul[g1], mul[g2]
            for (h1, h2), d in t.terms.items():
                _accumulate(out, (r1[h1], r2[h2]), c * d)
    else:
        for k1, c in s.terms.items():
            for k2, d in t.terms.items():
                _accumulate(out, tuple(mul[x][y] for x, y in zip(k1, k2)), c * d)
    return TensorElem(s.algebra, out, s.arity)


def tensor_conjugate(t: TensorElem, x: TensorElem, x_inv: TensorElem) -> TensorElem:
    """x t x^-1."""
    return tensor_multiply(tensor_multiply(x, t), x_inv)


def tensor_product(*elems: AlgElem) -> TensorElem:
    alg = elems[0].algebra
    out: dict[tuple[int, ...], CycNumber] = {(): CycNumber.one(alg.conductor)}
    for e in elems:
        if e.algebra is not alg:
            raise AlgebraMismatch("elements live in different group algebras")
        out = {k + (g,): c * d for k, c in out.items() for g, d in e.terms.items()}
    return TensorElem(alg, out, len(elems))


# ---------------------------------------------------------------- Hopf structure

def coproduct(a: AlgElem) -> TensorElem:
    return TensorElem(a.algebra, {(g, g): c for g, c in a.terms.items()}, 2, _clean=False)


def counit(a: AlgElem) -> CycNumber:
    total = CycNumber.zero(a.algebra.conductor)
    for c in a.terms.values():
        total = total + c
    return total


def antipode(a: AlgElem) -> AlgElem:
    inv = a.group._inv
    return AlgElem(a.algebra, {inv[g]: c for g, c in a.terms.items()}, _clean=False)


def multiply_legs(t: TensorElem) -> AlgElem:
    """m: KG (x) KG -> KG."""
    mul = t.group._mul
    out: dict[int, CycNumber] = {}
    for (g, h), c in t.terms.items():
        _accumulate(out, mul[g][h], c)
    return AlgElem(t.algebra, out)


def map_leg(t: TensorElem, leg: int, f: Callable[[int], Union[AlgElem, TensorElem]]) -> TensorElem:
    """Apply a linear map, given on group elements, to one leg.

    If f returns a TensorElem the leg is expanded (arity grows)."""
    out: dict[tuple[int, ...], CycNumber] = {}
    cache: dict[int, object] = {}
    arity = None
    for key, c in t.terms.items():
        g = key[leg]
        img = cache.get(g)
        if img is None:
            img = cache[g] = f(g)
        if isinstance(img, TensorElem):
            for sub, d in img.terms.items():
                _accumulate(out, key[:leg] + sub + key[leg + 1:], c * d)
            arity = t.arity + img.arity - 1
        else:
            for h, d in img.terms.items():
                _accumulate(out, key[:leg] + (h,) + key[leg + 1:], c * d)
            arity = t.arity
    return TensorElem(t.algebra, out, t.arity if arity is None else arity)


def coproduct_on_leg(t: TensorElem, leg: int) -> TensorElem:
    alg = t.algebra
    return map_leg(t, leg, lambda g: coproduct(alg.basis(g)))


def extend_by_one(t: TensorElem, position: int) -> TensorElem:
    """Insert a 1 leg: position 0 gives 1 (x) t, position arity gives t (x) 1."""
    e = t.group.identity
    return TensorElem(t.algebra, {k[:position] + (e,) + k[position:]: c for k, c in t.terms.items()},
                      t.arity + 1, _clean=False)


def contract_leg(t: TensorElem, leg: int, functional: Callable[[int], Scalar]) -> Union[AlgElem, TensorElem]:
    """Apply a linear functional (given on group elements) to one leg."""
    alg = t.algebra
    out: dict[tuple[int, ...], CycNumber] = {}
    cache: dict[int, CycNumber] = {}
    for key, c in t.terms.items():
        g = key[leg]
        v = cache.get(g)
        if v is None:
            v = cache[g] = alg.scalar(functional(g))
        if not v.is_zero():
            _accumulate(out, key[:leg] + key[leg + 1:], c * v)
    if t.arity == 2:
        return AlgElem(alg, {k[0]: c for k, c in out.items()})
    return TensorElem(alg, out, t.arity - 1)


# ---------------------------------------------------------------- characters and idempotents

class SubgroupCharacter:
    """A character of an embedded abelian subgroup, callable on its elements."""

    def __init__(self, subgroup: AbelianSubgroup, chi: Sequence[int], conductor: int):
        self.subgroup = subgroup
        self.chi = tuple(chi)
        self.dual = subgroup.dual(conductor)
        self.conductor = conductor

    def exponent(self, g: int) -> int:
        try:
            a = self.subgroup.tuple_of(g)
        except GroupError:
            raise GroupError(f"character of {self.subgroup.name} is undefined at element {g}") from None
        return self.dual.exponent_at(self.chi, a)

    def __call__(self, g: int) -> CycNumber:
        return root_of_unity(self.exponent(g), self.conductor)

    def inverse(self) -> "SubgroupCharacter":
        return SubgroupCharacter(self.subgroup, self.dual.neg(self.chi), self.conductor)


def apply_character_leg(phi: Union[Callable[[int], Scalar], Mapping[int, Scalar]], t: TensorElem,
                        leg: str = "left") -> AlgElem:
    """(phi (x) id)(t) for leg='left', (id (x) phi)(t) for leg='right'."""
    if isinstance(phi, Mapping):
        table = phi

        def f(g: int) -> Scalar:
            if g not in table:
                raise GroupError(f"character undefined at element {g}")
            return table[g]
    else:
        f = phi
    position = {"left": 0, "right": 1}[leg]
    result = contract_leg(t, position, f)
    assert isinstance(result, AlgElem)
    return result


def _coefficient_cache(conductor: int, scale: int) -> Callable[[int], CycNumber]:
    cache: dict[int, CycNumber] = {}

    def get(k: int) -> CycNumber:
        k %= conductor
        v = cache.get(k)
        if v is None:
            v = cache[k] = root_of_unity(k, conductor) * Fraction(1, scale)
        return v
    return get


def idempotent(alg: GroupAlgebra, M: AbelianSubgroup, chi: Sequence[int]) -> AlgElem:
    """e_phi = (1/|M|) sum_m phi(m^-1) m."""
    D = M.dual(alg.conductor)
    coef = _coefficient_cache(alg.conductor, M.order)
    terms = {}
    for a, g in zip(M.abstract.elements, M.to_group):
        terms[g] = coef(-D.exponent_at(chi, a))
    return AlgElem(alg, terms, _clean=False)


def all_idempotents(alg: GroupAlgebra, M: AbelianSubgroup) -> list[AlgElem]:
    return [idempotent(alg, M, chi) for chi in M.abstract.elements]


def restrict_character(N: AbelianSubgroup, nu: Sequence[int], L: AbelianSubgroup,
                       conductor: int) -> tuple[int, ...]:
    """nu|_L as a character tuple of L."""
    DN, DL = N.dual(conductor), L.dual(conductor)
    vals = [DN.exponent_at(nu, N.tuple_of(l)) for l in L.generators]
    return DL.from_values(vals)


def refine_idempotent(alg: GroupAlgebra, L: AbelianSubgroup, N: AbelianSubgroup,
                      lam: Sequence[int]) -> tuple[AlgElem, bool]:
    """e^L_lambda together with the check that it is the sum of e^N_nu over
    the nu restricting to lambda."""
    if not all(l in N for l in L.indices):
        raise GroupError("L is not contained in N")
    direct = idempotent(alg, L, lam)
    total = alg.zero()
    for nu in N.abstract.elements:
        if restrict_character(N, nu, L, alg.conductor) == tuple(lam):
            total = total + idempotent(alg, N, nu)
    return direct, total == direct


def fourier_element(alg: GroupAlgebra, M: AbelianSubgroup, exponents: Sequence[int],
                    ) -> AlgElem:
    """sum_phi zeta^{exponents[phi]} e_phi, computed coefficientwise."""
    N = alg.conductor
    D = M.dual(N)
    P = D.pairing_table  # [phi, m] exponent of phi(m)
    E = (np.asarray(exponents, dtype=np.int64)[:, None] - P) % N  # [phi, m]
    counts = np.stack([(E == k).sum(axis=0) for k in range(N)], axis=-1)
    terms = {}
    for mi, g in enumerate(M.to_group):
        c = sum_of_roots(counts[mi].tolist(), N, M.order)
        if not c.is_zero():
            terms[g] = c
    return AlgElem(alg, terms, _clean=False)


def fourier_tensor(alg: GroupAlgebra, M: AbelianSubgroup, table: np.ndarray) -> TensorElem:
    """sum_{phi,psi} zeta^{table[phi,psi]} e_phi (x) e_psi in the group basis."""
    N = alg.conductor
    D = M.dual(N)
    P = D.pairing_table
    n = M.order
    W = np.asarray(table, dtype=np.int64) % N
    terms = {}
    # coefficient of m (x) m' is (1/n^2) sum zeta^{W[phi,psi] - phi(m) - psi(m')}
    for mi in range(n):
        A = (W - P[:, mi][:, None]) % N  # [phi, psi]
        # for each m' gather exponents A[phi,psi] - P[psi, m']
        E = (A[:, :, None] - P[None, :, :]) % N  # [phi, psi, m']
        counts = np.stack([(E == k).sum(axis=(0, 1)) for k in range(N)], axis=-1)  # [m', k]
        for mj in range(n):
            c = sum_of_roots(counts[mj].tolist(), N, n * n)
            if not c.is_zero():
                terms[(M.to_group[mi], M.to_group[mj])] = c
    return TensorElem(alg, terms, 2, _clean=False)
