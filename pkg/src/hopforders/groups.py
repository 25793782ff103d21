"""Finite groups at desk scale: abelian groups with characters, full-table
groups, matrix groups over finite fields, semidirect products, actions,
cosets and double cosets."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property, reduce
from itertools import product
from math import gcd, prod
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .exactnum import ConductorError, RootExponent
from .finfield import FiniteField, Matrix, identity, mat_mul, mat_vec

DEFAULT_CAP = 5000


class CapExceededError(RuntimeError):
    """A group would exceed the desk-scale cap."""


class GroupError(ValueError):
    """Structural precondition on a group or subgroup failed."""


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


# ---------------------------------------------------------------- abelian

class AbelianGroup:
    """Z/d_1 x ... x Z/d_k with elements as integer tuples."""

    def __init__(self, invariant_factors: Sequence[int]):
        factors = tuple(int(d) for d in invariant_factors)
        if any(d < 2 for d in factors):
            raise GroupError("invariant factors must be >= 2")
        self.factors = factors
        self.order = prod(factors)
        self.exponent = reduce(_lcm, factors, 1)
        strides, s = [], 1
        for d in reversed(factors):
            strides.append(s)
            s *= d
        self._strides = tuple(reversed(strides))

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        return self.factors

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def elements(self) -> list[tuple[int, ...]]:
        return list(product(*(range(d) for d in self.factors)))

    def index(self, a: Sequence[int]) -> int:
        return sum((x % d) * s for x, d, s in zip(a, self.factors, self._strides))

    def element(self, i: int) -> tuple[int, ...]:
        return self.elements[i]

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % d for x, y, d in zip(a, b, self.factors))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % d for x, d in zip(a, self.factors))

    def scale(self, k: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((k * x) % d for x, d in zip(a, self.factors))

    def element_order(self, a: Sequence[int]) -> int:
        o = 1
        for x, d in zip(a, self.factors):
            o = _lcm(o, d // gcd(x % d, d))
        return o

    @cached_property
    def add_table(self) -> np.ndarray:
        n = self.order
        idx = np.arange(n)
        coords = np.array(self.elements, dtype=np.int64).reshape(n, self.rank)
        out = np.zeros((n, n), dtype=np.int64)
        for k, (d, s) in enumerate(zip(self.factors, self._strides)):
            out += ((coords[:, k][:, None] + coords[:, k][None, :]) % d) * s
        del idx
        return out

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([self.index(self.neg(a)) for a in self.elements], dtype=np.int64)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AbelianGroup) and type(other) is type(self) and other.factors == self.factors

    def __hash__(self) -> int:
        return hash(("AbelianGroup", self.factors))

    def __repr__(self) -> str:
        return f"AbelianGroup{self.factors}"


def abelian_group(*factors: int) -> AbelianGroup:
    return AbelianGroup(factors)


@dataclass(frozen=True)
class Character:
    """phi(a) = zeta_N^{sum (N/d_i) c_i a_i} on the target abelian group."""

    group: AbelianGroup
    exponents: tuple[int, ...]

    def exponent_at(self, a: Sequence[int], conductor: int) -> int:
        if conductor % self.group.exponent:
            raise ConductorError(f"conductor {conductor} too small for {self.group}")
        return sum((conductor // d) * c * x for c, x, d in
                   zip(self.exponents, a, self.group.factors)) % conductor

    def evaluate(self, a: Sequence[int], conductor: int) -> RootExponent:
        return RootExponent(self.exponent_at(a, conductor), conductor)

    def is_trivial(self) -> bool:
        return not any(self.exponents)


class DualGroup(AbelianGroup):
    """The character group of an abelian group, evaluated into mu_N."""

    def __init__(self, base: AbelianGroup, conductor: int):
        if conductor % base.exponent:
            raise ConductorError(f"conductor {conductor} not divisible by exponent {base.exponent}")
        super().__init__(base.factors)
        self.base = base
        self.conductor = conductor
        self._weights = tuple(conductor // d for d in base.factors)

    def exponent_at(self, chi: Sequence[int], a: Sequence[int]) -> int:
        return sum(w * c * x for w, c, x in zip(self._weights, chi, a)) % self.conductor

    def evaluate(self, chi: Sequence[int], a: Sequence[int]) -> RootExponent:
        return RootExponent(self.exponent_at(chi, a), self.conductor)

    def character(self, chi: Sequence[int]) -> Character:
        return Character(self.base, tuple(chi))

    def from_values(self, values: Sequence[int]) -> tuple[int, ...]:
        """Character with given exponents on the canonical generators."""
        out = []
        for v, w, d in zip(values, self._weights, self.factors):
            if v % w:
                raise ValueError("values are not those of a character")
            out.append((v // w) % d)
        return tuple(out)

    @cached_property
    def pairing_table(self) -> np.ndarray:
        """exponent_at(chi_i, a_j) for all indices."""
        chis = np.array(self.elements, dtype=np.int64).reshape(self.order, self.rank)
        w = np.array(self._weights, dtype=np.int64)
        return ((chis * w) @ chis.T) % self.conductor

    def __repr__(self) -> str:
        return f"DualGroup{self.factors}@{self.conductor}"


def dual_group(A: AbelianGroup, conductor: int) -> DualGroup:
    return DualGroup(A, conductor)


# ---------------------------------------------------------------- full-table groups

class FiniteGroup:
    """A finite group given by labelled elements and a full multiplication table."""

    def __init__(self, labels: Sequence[Hashable], table: np.ndarray, name: str = "G"):
        self.labels = list(labels)
        self.index_of = {x: i for i, x in enumerate(self.labels)}
        self.table = np.asarray(table, dtype=np.int32)
        self.name = name
        n = len(self.labels)
        if self.table.shape != (n, n):
            raise GroupError("table shape does not match element count")
        ident = [i for i in range(n) if np.array_equal(self.table[i], np.arange(n))]
        if len(ident) != 1:
            raise GroupError("no unique identity")
        self.identity = ident[0]
        inv = np.full(n, -1, dtype=np.int32)
        rows, cols = np.nonzero(self.table == self.identity)
        inv[rows] = cols
        if (inv < 0).any():
            raise GroupError("missing inverses")
        self.inverse_table = inv
        self._mul = self.table.tolist()
        self._inv = inv.tolist()

    @property
    def order(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self._mul[self._mul[g][x]][self._inv[g]]

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self._inv[a], -k
        r = self.identity
        for _ in range(k):
            r = self._mul[r][a]
        return r

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self._mul[x][a]
            k += 1
        return k

    def index(self, label: Hashable) -> int:
        return self.index_of[label]

    def verify_axioms(self, sample: int | None = None) -> bool:
        n = self.order
        T = self.table.astype(np.int64)
        rows = range(n) if sample is None or sample >= n else np.linspace(0, n - 1, sample).astype(int)
        for a in rows:
            if not np.array_equal(T[T[a], :], T[a][T]):
                return False
        # every row and column is a permutation
        ar = np.arange(n)
        return bool(all(np.array_equal(np.sort(T[i]), ar) for i in range(n))
                    and all(np.array_equal(np.sort(T[:, i]), ar) for i in range(n)))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order={self.order})"


def closure(generators: Sequence[Hashable], mul: Callable[[Hashable, Hashable], Hashable],
            one: Hashable, cap: int = DEFAULT_CAP, name: str = "G") -> FiniteGroup:
    """Breadth-first closure from the identity under right multiplication by
    the generators (taken in sorted order)."""
    gens = sorted(set(generators))
    elems = [one]
    seen = {one: 0}
    queue = deque([one])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = mul(x, s)
            if y not in seen:
                if len(elems) >= cap:
                    raise CapExceededError(f"desk-scale cap {cap} exceeded while closing {name}")
                seen[y] = len(elems)
                elems.append(y)
                queue.append(y)
    n = len(elems)
    table = np.empty((n, n), dtype=np.int32)
    for i, x in enumerate(elems):
        table[i] = [seen[mul(x, y)] for y in elems]
    return FiniteGroup(elems, table, name)


def matrix_group_closure(F: FiniteField, generators: Sequence[Matrix], cap: int = DEFAULT_CAP,
                         name: str = "Q") -> FiniteGroup:
    if not generators:
        raise GroupError("need at least one generator")
    d = len(generators[0])
    G = closure(generators, lambda a, b: mat_mul(F, a, b), identity(d), cap, name)
    G.field = F  # type: ignore[attr-defined]
    G.dimension = d  # type: ignore[attr-defined]
    return G


def permutation_group(generators: Sequence[Sequence[int]], cap: int = DEFAULT_CAP,
                      name: str = "S") -> FiniteGroup:
    """Permutations as image tuples; the product ab is 'apply b then a'."""
    gens = [tuple(g) for g in generators]
    n = len(gens[0])
    return closure(gens, lambda a, b: tuple(a[b[i]] for i in range(n)), tuple(range(n)), cap, name)


# ---------------------------------------------------------------- subgroups

class Subgroup:
    """Sorted element indices plus the ambient group."""

    def __init__(self, group: FiniteGroup, indices: Iterable[int]):
        self.group = group
        self.indices = tuple(sorted(set(int(i) for i in indices)))
        self._set = frozenset(self.indices)

    @property
    def order(self) -> int:
        return len(self.indices)

    def __contains__(self, i: int) -> bool:
        return i in self._set

    def __iter__(self):
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subgroup) and other.group is self.group and other._set == self._set

    def __hash__(self) -> int:
        return hash(self._set)

    def is_subgroup(self) -> bool:
        G = self.group
        if G.identity not in self._set:
            return False
        return all(G.mul(a, G.inv(b)) in self._set for a in self.indices for b in self.indices)

    def is_normal(self) -> bool:
        G = self.group
        return all(G.conj(g, x) in self._set for g in range(G.order) for x in self.indices)

    def is_abelian(self) -> bool:
        G = self.group
        return all(G.mul(a, b) == G.mul(b, a) for a in self.indices for b in self.indices)

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order} in {self.group.name})"


def generated_subgroup(G: FiniteGroup, generators: Iterable[int]) -> Subgroup:
    gens = sorted(set(generators))
    elems = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = G.mul(x, s)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(G, elems)


def centralizer(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    S = list(S)
    return Subgroup(G, [g for g in range(G.order) if all(G.mul(g, x) == G.mul(x, g) for x in S)])


def normal_closure(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    gens = {G.conj(g, x) for g in range(G.order) for x in S}
    return generated_subgroup(G, gens)


def coset_representatives(G: FiniteGroup, N: Subgroup) -> list[int]:
    """One representative per left coset gN, minimal index, identity first."""
    if not N.is_normal():
        raise GroupError("coset representatives requested for a non-normal subgroup")
    assigned = np.zeros(G.order, dtype=bool)
    reps = [G.identity]
    for n in N:
        assigned[G.mul(G.identity, n)] = True
    for g in range(G.order):
        if not assigned[g]:
            reps.append(g)
            for n in N:
                assigned[G.mul(g, n)] = True
    return reps


def double_cosets(G: FiniteGroup, M: Subgroup) -> tuple[list[int], list[list[int]]]:
    """Representatives (minimal index, identity first) and cells M tau M."""
    if not M.is_subgroup():
        raise GroupError("not a subgroup")
    cell_of = np.full(G.order, -1, dtype=np.int64)
    reps: list[int] = []
    cells: list[list[int]] = []
    order = [G.identity] + [g for g in range(G.order) if g != G.identity]
    for g in order:
        if cell_of[g] >= 0:
            continue
        cell = sorted({G.mul(G.mul(a, g), b) for a in M for b in M})
        for x in cell:
            cell_of[x] = len(reps)
        reps.append(g)
        cells.append(cell)
    return reps, cells


# ---------------------------------------------------------------- embedded abelian subgroups

class AbelianSubgroup(Subgroup):
    """An abelian subgroup of G together with an isomorphism from an
    abstract AbelianGroup, fixed by a list of independent generators."""

    def __init__(self, group: FiniteGroup, generators: Sequence[int], name: str = "A"):
        gens = [int(g) for g in generators]
        for a in gens:
            for b in gens:
                if group.mul(a, b) != group.mul(b, a):
                    raise GroupError("generators do not commute")
        orders = [group.element_order(g) for g in gens]
        gens = [g for g, o in zip(gens, orders) if o > 1]
        orders = [o for o in orders if o > 1]
        self.abstract = AbelianGroup(orders)
        self.generators = tuple(gens)
        self.name = name
        to_group = []
        for a in self.abstract.elements:
            x = group.identity
            for g, k in zip(gens, a):
                x = group.mul(x, group.power(g, k))
            to_group.append(x)
        if len(set(to_group)) != self.abstract.order:
            raise GroupError("generators are not independent")
        self.to_group = to_group
        self.to_tuple = {x: a for x, a in zip(to_group, self.abstract.elements)}
        super().__init__(group, to_group)

    def tuple_of(self, g: int) -> tuple[int, ...]:
        try:
            return self.to_tuple[g]
        except KeyError:
            raise GroupError(f"element {g} is not in {self.name}") from None

    def element_index(self, a: Sequence[int]) -> int:
        return self.to_group[self.abstract.index(a)]

    def dual(self, conductor: int) -> DualGroup:
        return DualGroup(self.abstract, conductor)

    def __repr__(self) -> str:
        return f"AbelianSubgroup({self.name}{self.abstract.factors} in {self.group.name})"


def abelian_subgroup_from_elements(G: FiniteGroup, elements: Iterable[int], name: str = "A") -> AbelianSubgroup:
    """Find independent generators for an abelian subgroup given as a set.

    Greedy choice of an element of largest order independent of what is
    already spanned, with backtracking if the greedy choice dead-ends.
    """
    target = frozenset(elements)
    if not Subgroup(G, target).is_subgroup() or not Subgroup(G, target).is_abelian():
        raise GroupError("not an abelian subgroup")
    cand = sorted(target - {G.identity}, key=lambda g: (-G.element_order(g), g))

    def search(gens: list[int], span: frozenset[int]) -> list[int] | None:
        if span == target:
            return gens
        for g in cand:
            if g in span:
                continue
            o = G.element_order(g)
            powers = [G.power(g, k) for k in range(o)]
            if any(p in span for p in powers[1:]):
                continue
            new = frozenset(G.mul(s, p) for s in span for p in powers)
            got = search(gens + [g], new)
            if got is not None:
                return got
            return None  # greedy failed at this level; caller tries next
        return None

    gens = search([], frozenset({G.identity}))
    if gens is None:
        # fall back to exhaustive search over ordered choices
        gens = _exhaustive_basis(G, target, cand)
    return AbelianSubgroup(G, gens, name)


def _exhaustive_basis(G: FiniteGroup, target: frozenset[int], cand: list[int]) -> list[int]:
    def rec(gens, span):
        if span == target:
            return gens
        for g in cand:
            if g in span:
                continue
            o = G.element_order(g)
            powers = [G.power(g, k) for k in range(o)]
            if any(p in span for p in powers[1:]):
                continue
            got = rec(gens + [g], frozenset(G.mul(s, p) for s in span for p in powers))
            if got is not None:
                return got
        return None

    got = rec([], frozenset({G.identity}))
    if got is None:
        raise GroupError("could not decompose abelian subgroup")
    return got


# ---------------------------------------------------------------- actions

@dataclass
class GroupAction:
    """Action table: table[g, x] = g . x on target indices 0..size-1."""

    acting: FiniteGroup
    size: int
    table: np.ndarray
    description: str = ""

    def apply(self, g: int, x: int) -> int:
        return int(self.table[g, x])

    def verify(self) -> bool:
        G = self.acting
        if not np.array_equal(self.table[G.identity], np.arange(self.size)):
            return False
        for a in range(G.order):
            for b in range(G.order):
                if not np.array_equal(self.table[G.mul(a, b)], self.table[a][self.table[b]]):
                    return False
        return True


def fixed_subgroup(act: GroupAction, g: int) -> list[int]:
    row = act.table[g]
    return [int(x) for x in np.nonzero(row == np.arange(act.size))[0]]


def dual_action(G: FiniteGroup, N: AbelianSubgroup, conductor: int) -> GroupAction:
    """(g . nu)(n) = nu(g^-1 n g) on indices of the dual of N."""
    if not N.is_normal():
        raise GroupError("dual action needs a normal subgroup")
    D = N.dual(conductor)
    chis = np.array(D.elements, dtype=np.int64).reshape(D.order, D.rank)
    weights = np.array(D._weights, dtype=np.int64)
    factors = np.array(D.factors, dtype=np.int64)
    strides = np.array(D._strides, dtype=np.int64)
    table = np.empty((G.order, D.order), dtype=np.int64)
    for g in range(G.order):
        gi = G.inv(g)
        # columns: tuple of g^-1 n_i g for each generator n_i
        A = np.array([N.tuple_of(G.conj(gi, n)) for n in N.generators], dtype=np.int64).reshape(D.rank, D.rank)
        vals = ((chis * weights) @ A.T) % conductor  # value exponents on generators
        if (vals % weights).any():
            raise GroupError("conjugation does not preserve the character lattice")
        new = (vals // weights) % factors
        table[g] = new @ strides
    return GroupAction(G, D.order, table, "dual action on characters of " + N.name)


# ---------------------------------------------------------------- semidirect products

class SemidirectProduct(FiniteGroup):
    """N x| Q with (n1,q1)(n2,q2) = (n1 + q1.n2, q1 q2); index = q*|N| + n."""

    def __init__(self, N: AbelianGroup, Q: FiniteGroup, action: np.ndarray, name: str = "G",
                 cap: int = DEFAULT_CAP):
        action = np.asarray(action, dtype=np.int64)
        nN, nQ = N.order, Q.order
        if nN * nQ > cap:
            raise CapExceededError(f"desk-scale cap {cap} exceeded: |G| = {nN * nQ}")
        if action.shape != (nQ, nN):
            raise GroupError("action table has the wrong shape")
        add = N.add_table
        if not np.array_equal(action[Q.identity], np.arange(nN)):
            raise GroupError("identity does not act trivially")
        for q in range(nQ):
            row = action[q]
            if sorted(row.tolist()) != list(range(nN)) or not np.array_equal(row[add], add[row][:, row]):
                raise GroupError("action is not by automorphisms")
        QT = Q.table.astype(np.int64)
        for a in range(nQ):
            if not np.array_equal(action[QT[a]], action[a][action]):
                raise GroupError("not a group action")
        self.normal = N
        self.complement = Q
        self.action = action
        qi = np.repeat(np.arange(nQ), nN)
        ni = np.tile(np.arange(nN), nQ)
        # (n1,q1)(n2,q2) = (n1 + q1.n2, q1 q2)
        prod_q = QT[qi[:, None], qi[None, :]]
        prod_n = add[ni[:, None], action[qi[:, None], ni[None, :]]]
        table = prod_q * nN + prod_n
        labels = [(N.elements[n], Q.labels[q]) for q, n in zip(qi, ni)]
        super().__init__(labels, table, name)

    def split(self, g: int) -> tuple[int, int]:
        q, n = divmod(g, self.normal.order)
        return n, q

    def embed_normal(self, n: int) -> int:
        return self.complement.identity * self.normal.order + n

    def embed_complement(self, q: int) -> int:
        return q * self.normal.order

    def normal_subgroup(self, name: str = "N") -> AbelianSubgroup:
        gens = []
        for k in range(self.normal.rank):
            unit = tuple(1 if i == k else 0 for i in range(self.normal.rank))
            gens.append(self.embed_normal(self.normal.index(unit)))
        return AbelianSubgroup(self, gens, name)

    def complement_subgroup(self) -> Subgroup:
        return Subgroup(self, [self.embed_complement(q) for q in range(self.complement.order)])


def semidirect_product(N: AbelianGroup, Q: FiniteGroup, action: np.ndarray | GroupAction,
                       cap: int = DEFAULT_CAP, name: str = "G") -> SemidirectProduct:
    table = action.table if isinstance(action, GroupAction) else action
    return SemidirectProduct(N, Q, table, name, cap)


def vector_space(F: FiniteField, dim: int) -> AbelianGroup:
    """F_q^dim as (Z/p)^(dim*m); coordinate i, digit k sits at position i*m + k."""
    return AbelianGroup([F.p] * (dim * F.m))


def vector_to_tuple(F: FiniteField, v: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in v:
        out.extend(F.digits(x))
    return tuple(out)


def tuple_to_vector(F: FiniteField, a: Sequence[int]) -> tuple[int, ...]:
    m = F.m
    return tuple(F.from_digits(a[i:i + m]) for i in range(0, len(a), m))


def linear_action(F: FiniteField, V: AbelianGroup, Q: FiniteGroup) -> np.ndarray:
    """Table of matrix-vector action of a matrix group on F_q^d."""
    vecs = [tuple_to_vector(F, a) for a in V.elements]
    table = np.empty((Q.order, V.order), dtype=np.int64)
    for qi, A in enumerate(Q.labels):
        table[qi] = [V.index(vector_to_tuple(F, mat_vec(F, A, v))) for v in vecs]
    return table
