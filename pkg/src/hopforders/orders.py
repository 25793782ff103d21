"""R-lattices in KG: membership, tensor membership, Hopf-order verification,
character integrality, intersection with subalgebras, and integrality of
single elements through their minimal polynomials."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Iterable, Optional, Sequence, Union

from .algebra import (
    AlgElem,
    GroupAlgebra,
    TensorElem,
    antipode,
    coproduct,
    counit,
    idempotent,
)
from .certificates import Certificate
from .exactnum import CycNumber, cyc_invert
from .groups import AbelianSubgroup, GroupError, coset_representatives
from .qsparse import QMatrix, Realifier
from .twisting import Twist, twisted_coproduct

Coords = dict[int, CycNumber]


class SingularBasisError(ValueError):
    """The proposed basis is not a K-basis."""


class SubalgebraError(ValueError):
    """The spanning set is not closed under the Hopf operations."""


@dataclass
class MembershipReport:
    description: str
    coordinates: dict
    integral: bool
    first_violation: Optional[Any] = None

    def vector(self, size: int) -> list[CycNumber]:
        """Dense coordinate vector (for element reports)."""
        conductor = next(iter(self.coordinates.values())).conductor if self.coordinates else 1
        zero = CycNumber.zero(conductor)
        return [self.coordinates.get(i, zero) for i in range(size)]

    def __bool__(self) -> bool:
        return self.integral


# ---------------------------------------------------------------- dense exact inversion

def _invert_dense(mat: list[list[CycNumber]], conductor: int) -> list[list[CycNumber]]:
    n = len(mat)
    one, zero = CycNumber.one(conductor), CycNumber.zero(conductor)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(mat)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not aug[r][c].is_zero()), None)
        if piv is None:
            raise SingularBasisError("basis change matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = cyc_invert(aug[c][c])
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and not aug[r][c].is_zero():
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _components(basis: Sequence[AlgElem], n: int) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite support graph (group rows, basis columns)."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for b in basis:
        sup = b.support()
        if not sup:
            raise SingularBasisError("zero element in basis")
        r0 = find(sup[0])
        for g in sup[1:]:
            r = find(g)
            if r != r0:
                parent[r] = r0
    rows: dict[int, list[int]] = {}
    for g in range(n):
        rows.setdefault(find(g), []).append(g)
    cols: dict[int, list[int]] = {}
    for i, b in enumerate(basis):
        cols.setdefault(find(b.support()[0]), []).append(i)
    return [(rows[k], cols.get(k, [])) for k in sorted(rows, key=lambda k: rows[k][0])]


# ---------------------------------------------------------------- lattices

class Lattice:
    """The R-span of a K-basis of KG, with cached exact coordinate maps."""

    def __init__(self, algebra: GroupAlgebra, basis: Sequence[AlgElem], name: str = "X"):
        n = algebra.group.order
        if len(basis) != n:
            raise SingularBasisError(f"need {n} basis elements, got {len(basis)}")
        for b in basis:
            if b.algebra is not algebra:
                raise GroupError("basis element from another algebra")
        self.algebra = algebra
        self.basis = list(basis)
        self.name = name
        self.size = n
        coords: list[Coords] = [dict() for _ in range(n)]
        for rows, cols in _components(self.basis, n):
            if len(rows) != len(cols):
                raise SingularBasisError("basis change matrix is singular")
            mat = [[self.basis[j].coefficient(g) for j in cols] for g in rows]
            inv = _invert_dense(mat, algebra.conductor)  # inv[col_pos][row_pos]
            for a, j in enumerate(cols):
                for b, g in enumerate(rows):
                    v = inv[a][b]
                    if not v.is_zero():
                        coords[g][j] = v
        self.coords_of = coords
        self.realifier = Realifier(algebra.conductor)
        R = self.realifier
        self.A_real = R.matrix(((i, g, v) for g in range(n) for i, v in coords[g].items()), (n, n))
        self.AT_real = R.matrix(((g, i, v) for g in range(n) for i, v in coords[g].items()), (n, n))
        self.B_real = R.matrix(((g, i, c) for i, b in enumerate(self.basis) for g, c in b.terms.items()),
                               (n, n))

    @property
    def conductor(self) -> int:
        return self.algebra.conductor

    def coordinates(self, x: AlgElem) -> Coords:
        out: Coords = {}
        for g, c in x.terms.items():
            for i, v in self.coords_of[g].items():
                cur = out.get(i)
                out[i] = c * v if cur is None else cur + c * v
        return {i: v for i, v in sorted(out.items()) if not v.is_zero()}

    def realify_tensor(self, t: TensorElem) -> QMatrix:
        n = self.size
        return self.realifier.matrix(((g, h, c) for (g, h), c in t.terms.items()), (n, n))

    def realify_element_columns(self, elems: Sequence[AlgElem]) -> QMatrix:
        """Matrix whose j-th column is the group-basis expansion of elems[j]."""
        n = self.size
        return self.realifier.matrix(((g, j, c) for j, e in enumerate(elems) for g, c in e.terms.items()),
                                     (n, len(elems)))

    def __repr__(self) -> str:
        return f"Lattice({self.name}, rank {self.size})"


def lattice_from_basis(algebra: GroupAlgebra, basis: Sequence[AlgElem], name: str = "X") -> Lattice:
    return Lattice(algebra, basis, name)


def group_lattice(algebra: GroupAlgebra) -> Lattice:
    """RG."""
    return Lattice(algebra, [algebra.basis(g) for g in range(algebra.group.order)], "RG")


def standard_order(algebra: GroupAlgebra, N: AbelianSubgroup, name: str = "X") -> Lattice:
    """R-span of e^N_nu q over characters nu and coset representatives q."""
    G = algebra.group
    if N.group is not G:
        raise GroupError("N is not a subgroup of this group")
    reps = coset_representatives(G, N)  # raises when N is not normal
    idem = [idempotent(algebra, N, nu) for nu in N.abstract.elements]
    basis = []
    for q in reps:
        for e in idem:
            basis.append(AlgElem(algebra, {G.mul(g, q): c for g, c in e.terms.items()}, _clean=False))
    X = Lattice(algebra, basis, name)
    X.coset_reps = reps  # type: ignore[attr-defined]
    X.normal = N  # type: ignore[attr-defined]
    return X


# ---------------------------------------------------------------- membership

def contains(X: Lattice, x: AlgElem, description: str = "element") -> MembershipReport:
    coords = X.coordinates(x)
    bad = [i for i, v in coords.items() if not v.is_integral()]
    return MembershipReport(description, coords, not bad, bad[0] if bad else None)


def tensor_coordinates_dict(X: Lattice, t: TensorElem) -> dict[tuple[int, int], CycNumber]:
    """Leg-by-leg coordinates using the cached maps (reference path)."""
    left: dict[tuple[int, int], CycNumber] = {}
    for (g, h), c in t.terms.items():
        for i, v in X.coords_of[g].items():
            key = (i, h)
            cur = left.get(key)
            left[key] = c * v if cur is None else cur + c * v
    out: dict[tuple[int, int], CycNumber] = {}
    for (i, h), c in left.items():
        if c.is_zero():
            continue
        for j, v in X.coords_of[h].items():
            key = (i, j)
            cur = out.get(key)
            out[key] = c * v if cur is None else cur + c * v
    return {k: v for k, v in sorted(out.items()) if not v.is_zero()}


def _tensor_qmatrix(X: Lattice, t: Union[TensorElem, QMatrix]) -> QMatrix:
    T = t if isinstance(t, QMatrix) else X.realify_tensor(t)
    return X.A_real @ T @ X.AT_real


def tensor_contains(X: Lattice, t: TensorElem, description: str = "tensor",
                    method: str = "sparse") -> MembershipReport:
    """Membership of t in X (x)_R X; every coordinate must be integral."""
    if method == "dict":
        coords = tensor_coordinates_dict(X, t)
        bad = [k for k, v in coords.items() if not v.is_integral()]
        return MembershipReport(description, coords, not bad, bad[0] if bad else None)
    if method != "sparse":
        raise ValueError(f"unknown method {method!r}")
    C = _tensor_qmatrix(X, t)
    coords = {(i, j): v for i, j, v in C.entries(X.conductor)}
    pos = C.nonintegral_positions()
    first = tuple(int(x) for x in pos[0]) if len(pos) else None
    return MembershipReport(description, coords, first is None, first)


def _first_bad(C: QMatrix) -> Optional[tuple[int, int]]:
    if C.is_integral():
        return None
    pos = C.nonintegral_positions()
    return (int(pos[0][0]), int(pos[0][1]))


# ---------------------------------------------------------------- Hopf order verification

@dataclass
class HopfOrderCertificate:
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, Any] = field(default_factory=dict)
    basis_size: int = 0
    twisted: bool = False

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def __bool__(self) -> bool:
        return self.passed

    def as_certificate(self) -> Certificate:
        return Certificate("hopf_order", dict(self.checks), dict(self.witnesses),
                           {"basis_size": self.basis_size, "twisted": self.twisted})


CHECK_NAMES = ("unit", "product", "coproduct", "counit", "antipode", "twist")


def _scan(indices: Sequence[int], fn: Callable[[int], Optional[Any]], jobs: int) -> Optional[tuple[int, Any]]:
    """First (index, witness) with a non-None witness, in index order."""
    if jobs <= 1:
        for i in indices:
            w = fn(i)
            if w is not None:
                return i, w
        return None
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(fn, indices))
    for i, w in zip(indices, results):
        if w is not None:
            return i, w
    return None


def _left_operator(X: Lattice, x: AlgElem) -> QMatrix:
    G = X.algebra.group
    n = X.size
    mul = G._mul
    return X.realifier.matrix(((mul[g][h], h, c) for g, c in x.terms.items() for h in range(n)), (n, n))


def _right_operator(X: Lattice, x: AlgElem) -> QMatrix:
    G = X.algebra.group
    n = X.size
    mul = G._mul
    return X.realifier.matrix(((mul[h][g], h, c) for g, c in x.terms.items() for h in range(n)), (n, n))


def verify_hopf_order(X: Lattice, twist: Optional[Twist] = None, jobs: int = 1) -> HopfOrderCertificate:
    """Closure of X under the (possibly twisted) Hopf operations, checked on
    basis elements and basis pairs; R-linearity makes this sufficient."""
    alg = X.algebra
    G = alg.group
    n = X.size
    N = X.conductor
    cert = HopfOrderCertificate(basis_size=n, twisted=twist is not None)

    unit = contains(X, alg.one(), "unit")
    cert.checks["unit"] = unit.integral
    if not unit.integral:
        cert.witnesses["unit"] = {"coordinate": unit.first_violation,
                                  "value": str(unit.coordinates[unit.first_violation])}

    B = X.B_real
    A = X.A_real

    def product_fail(i: int):
        C = A @ (_left_operator(X, X.basis[i]) @ B)
        bad = _first_bad(C)
        if bad is None:
            return None
        k, j = bad
        return {"i": i, "j": j, "coordinate": k, "value": str(C.entry(k, j, N))}

    hit = _scan(range(n), product_fail, jobs)
    cert.checks["product"] = hit is None
    if hit is not None:
        cert.witnesses["product"] = hit[1]

    def coproduct_fail(i: int):
        b = X.basis[i]
        t = twisted_coproduct(twist, b) if twist is not None else coproduct(b)
        C = _tensor_qmatrix(X, t)
        bad = _first_bad(C)
        if bad is None:
            return None
        return {"i": i, "coordinate": list(bad), "value": str(C.entry(bad[0], bad[1], N))}

    hit = _scan(range(n), coproduct_fail, jobs)
    cert.checks["coproduct"] = hit is None
    if hit is not None:
        cert.witnesses["coproduct"] = hit[1]

    bad_counit = next((i for i, b in enumerate(X.basis) if not counit(b).is_integral()), None)
    cert.checks["counit"] = bad_counit is None
    if bad_counit is not None:
        cert.witnesses["counit"] = {"i": bad_counit, "value": str(counit(X.basis[bad_counit]))}

    inv = G._inv
    S = X.realifier.permutation(((inv[h], h) for h in range(n)), n)
    if twist is not None:
        S = _left_operator(X, twist.U) @ (_right_operator(X, twist.U_inv) @ S)
    C = A @ (S @ B)
    bad = _first_bad(C)
    cert.checks["antipode"] = bad is None
    if bad is not None:
        cert.witnesses["antipode"] = {"i": bad[1], "coordinate": bad[0], "value": str(C.entry(bad[0], bad[1], N))}

    if twist is None:
        cert.checks["twist"] = True
    else:
        for label, t in (("J", twist.J), ("J_inv", twist.J_inv)):
            rep = tensor_contains(X, t, label)
            if not rep.integral:
                cert.checks["twist"] = False
                cert.witnesses["twist"] = {"tensor": label, "coordinate": list(rep.first_violation),
                                           "value": str(rep.coordinates[rep.first_violation])}
                break
        else:
            cert.checks["twist"] = True
    return cert


# ---------------------------------------------------------------- characters

def character_values(X: Lattice, chi: Union[Callable[[int], Any], Sequence[Any]]) -> list[CycNumber]:
    """Values of a linear functional on the basis of X.  ``chi`` is either a
    function on group elements or the list of values on the basis."""
    alg = X.algebra
    if callable(chi):
        cache: dict[int, CycNumber] = {}
        out = []
        for b in X.basis:
            total = CycNumber.zero(alg.conductor)
            for g, c in b.terms.items():
                v = cache.get(g)
                if v is None:
                    v = cache[g] = alg.scalar(chi(g))
                total = total + c * v
            out.append(total)
        return out
    vals = [alg.scalar(v) for v in chi]
    if len(vals) != X.size:
        raise ValueError("need one value per basis element")
    return vals


def character_integrality(X: Lattice, chi: Union[Callable[[int], Any], Sequence[Any]]) -> bool:
    return all(v.is_integral() for v in character_values(X, chi))


# ---------------------------------------------------------------- minimal polynomials

class _Echelon:
    """Incremental row echelon form over K for sparse vectors, tracking how
    each stored row combines the inputs."""

    def __init__(self, conductor: int):
        self.conductor = conductor
        self.rows: list[tuple[Any, dict, dict]] = []  # pivot, vector, combination

    def reduce(self, vec: dict, comb: dict) -> tuple[dict, dict]:
        vec, comb = dict(vec), dict(comb)
        for pivot, row, rcomb in self.rows:
            c = vec.get(pivot)
            if c is None or c.is_zero():
                continue
            f = c / row[pivot]
            for k, v in row.items():
                nv = vec.get(k, CycNumber.zero(self.conductor)) - f * v
                if nv.is_zero():
                    vec.pop(k, None)
                else:
                    vec[k] = nv
            for k, v in rcomb.items():
                nv = comb.get(k, CycNumber.zero(self.conductor)) - f * v
                if nv.is_zero():
                    comb.pop(k, None)
                else:
                    comb[k] = nv
        return vec, comb

    def add(self, vec: dict, comb: dict) -> bool:
        """Insert; returns False (and stores nothing) if vec reduces to zero."""
        vec, comb = self.reduce(vec, comb)
        if not vec:
            return False
        self.rows.append((min(vec), vec, comb))
        return True


def min_poly(x: AlgElem) -> list[CycNumber]:
    """Monic minimal polynomial of left multiplication by x, coefficients
    from the constant term upwards.

    The Krylov sequence starts at 1; since KG is a faithful module over
    itself and 1 is a cyclic vector for left multiplication, the dependency
    found there is the full minimal polynomial."""
    alg = x.algebra
    N = alg.conductor
    one = CycNumber.one(N)
    ech = _Echelon(N)
    v = alg.one()
    k = 0
    while True:
        vec, comb = ech.reduce(v.terms, {k: one})
        if not vec:
            coeffs = [comb.get(i, CycNumber.zero(N)) for i in range(k + 1)]
            lead = coeffs[-1]
            return [c / lead for c in coeffs]
        ech.rows.append((min(vec), vec, comb))
        v = x * v
        k += 1


def is_integral_element(x: AlgElem) -> bool:
    return all(c.is_integral() for c in min_poly(x))


def evaluate_poly(coeffs: Sequence[CycNumber], x: AlgElem) -> AlgElem:
    alg = x.algebra
    out = alg.zero()
    power = alg.one()
    for c in coeffs:
        out = out + power.scale(c)
        power = x * power
    return out


# ---------------------------------------------------------------- subalgebras

class SubLattice:
    """An R-lattice of full rank in a subalgebra A of KG."""

    def __init__(self, algebra: GroupAlgebra, basis: Sequence[AlgElem], name: str = "X|A"):
        self.algebra = algebra
        self.basis = list(basis)
        self.name = name
        self._ech = _Echelon(algebra.conductor)
        one = CycNumber.one(algebra.conductor)
        for i, b in enumerate(self.basis):
            if not self._ech.add(b.terms, {i: one}):
                raise SingularBasisError("sublattice basis is linearly dependent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def coordinates(self, x: AlgElem) -> Optional[Coords]:
        rest, comb = self._ech.reduce(x.terms, {})
        if rest:
            return None
        return {i: -v for i, v in sorted(comb.items()) if not v.is_zero()}

    def contains(self, x: AlgElem) -> MembershipReport:
        coords = self.coordinates(x)
        if coords is None:
            return MembershipReport("element outside the subalgebra", {}, False, "outside")
        bad = [i for i, v in coords.items() if not v.is_integral()]
        return MembershipReport("element", coords, not bad, bad[0] if bad else None)


def _span_basis(elems: Iterable[AlgElem], conductor: int) -> tuple[list[AlgElem], _Echelon]:
    ech = _Echelon(conductor)
    out = []
    one = CycNumber.one(conductor)
    for e in elems:
        if ech.add(e.terms, {len(out): one}):
            out.append(e)
    return out, ech


def _in_span(ech: _Echelon, vec: dict) -> bool:
    rest, _ = ech.reduce(vec, {})
    return not rest


def _int_row_basis(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """A Z-basis of the row lattice (echelon form by integer row operations)."""
    rows = [list(r) for r in rows if any(r)]
    basis: list[list[int]] = []
    for col in range(ncols):
        active = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            new = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[col]:
                    new.append(r)
                elif any(r):
                    rest.append(r)
            active = new
        if active:
            basis.append(active[0])
        rows = rest
    return basis


def _frac_inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [r[n:] for r in aug]


def _frac_det(M: list[list[Fraction]]) -> Fraction:
    M = [list(r) for r in M]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            if M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


def intersect_subalgebra(X: Lattice, spanning: Sequence[AlgElem], max_tries: int = 2000) -> SubLattice:
    """An R-basis of X cut with the span of ``spanning``, after checking that
    the span is closed under product, coproduct and antipode."""
    alg = X.algebra
    N = alg.conductor
    A, ech = _span_basis(spanning, N)
    k = len(A)
    if k == 0:
        raise SubalgebraError("empty span")
    if k == X.size:
        return SubLattice(alg, X.basis, X.name)
    if not _in_span(ech, alg.one().terms):
        raise SubalgebraError("span does not contain 1")
    for a in A:
        if not _in_span(ech, antipode(a).terms):
            raise SubalgebraError("span not closed under the antipode")
        for b in A:
            if not _in_span(ech, (a * b).terms):
                raise SubalgebraError("span not closed under products")
        # Delta(a) = sum c_g g (x) g lies in A (x) A iff its slices do; for a
        # diagonal tensor the slices are multiples of group elements
        for g in a.terms:
            if not _in_span(ech, alg.basis(g).terms):
                raise SubalgebraError("span not closed under the coproduct")

    R = X.realifier
    phi = R.phi
    # coordinates in X of each a_j, realified: a Q-linear map Q^{k phi} -> Q^{n phi}
    cols = [X.coordinates(a) for a in A]
    T = R.matrix(((i, j, v) for j, c in enumerate(cols) for i, v in c.items()), (X.size, k))
    dense = T.num.toarray()
    rows = [list(map(int, r)) for r in dense]
    H = _int_row_basis(rows, k * phi)
    if len(H) != k * phi:
        raise SubalgebraError("coordinate map is not injective")
    den = T.den
    Hq = [[Fraction(x, den) for x in r] for r in H]
    dual = _frac_inverse(Hq)  # columns form a Z-basis of the intersection
    zbasis_vecs = [[dual[r][c] for r in range(k * phi)] for c in range(k * phi)]

    def to_cyc_vector(v: list[Fraction]) -> list[CycNumber]:
        return [CycNumber.from_coeffs(v[j * phi:(j + 1) * phi], N) for j in range(k)]

    def to_elem(cv: list[CycNumber]) -> AlgElem:
        out = alg.zero()
        for c, a in zip(cv, A):
            if not c.is_zero():
                out = out + a.scale(c)
        return out

    cand = [to_cyc_vector(v) for v in zbasis_vecs]
    if phi == 1:
        return SubLattice(alg, [to_elem(c) for c in cand], X.name + "|A")
    target = abs(_frac_det(zbasis_vecs))

    def realified_columns(ws: Sequence[list[CycNumber]]) -> list[list[Fraction]]:
        out = []
        from .exactnum import root_of_unity
        for w in ws:
            for t in range(phi):
                z = root_of_unity(t, N)
                col: list[Fraction] = []
                for c in w:
                    col.extend((c * z).coeffs)
                out.append(col)
        return out

    tries = 0
    for combo in combinations(range(len(cand)), k):
        tries += 1
        if tries > max_tries:
            break
        ws = [cand[i] for i in combo]
        d = abs(_frac_det(realified_columns(ws)))
        if d == target:
            return SubLattice(alg, [to_elem(w) for w in ws], X.name + "|A")
    raise SubalgebraError("no free R-basis found among the Z-basis candidates")
