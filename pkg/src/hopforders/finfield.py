"""Finite fields F_q and small matrices over them.

F_q with q = p^m is F_p[x]/(f) for the lexicographically least monic
irreducible f of degree m.  Elements are encoded as integers 0..q-1 whose
base-p digits are the polynomial coefficients, lowest degree first.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Sequence

import numpy as np

Matrix = tuple[tuple[int, ...], ...]


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = 2
    while q % p:
        p += 1
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, m


def _poly_mod(a: list, f: Sequence, add, mul, neg, inv) -> list:
    # remainder of a modulo f over a field given by callables, lowest first
    a = list(a)
    lead_inv = inv(f[-1])
    while len(a) >= len(f):
        c = mul(a[-1], lead_inv)
        shift = len(a) - len(f)
        if c:
            for i, x in enumerate(f):
                a[i + shift] = add(a[i + shift], neg(mul(c, x)))
        a.pop()
    return a


def _least_irreducible(degree: int, elements: Sequence[int], add, mul, neg, inv) -> tuple[int, ...]:
    """Lexicographically least monic irreducible, reading coefficients from the top."""
    if degree == 1:
        return (0, 1)
    for tail in product(elements, repeat=degree):
        f = tuple(reversed(tail)) + (1,)
        if f[0] == 0:
            continue
        reducible = False
        for d in range(1, degree // 2 + 1):
            for gtail in product(elements, repeat=d):
                g = tuple(reversed(gtail)) + (1,)
                if not any(_poly_mod(list(f), g, add, mul, neg, inv)):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return f
    raise RuntimeError("no irreducible polynomial found")


class FiniteField:
    """F_q with integer-encoded elements and precomputed tables."""

    def __init__(self, q: int):
        self.q = q
        self.p, self.m = _factor_prime_power(q)
        p, m = self.p, self.m
        if m == 1:
            self.modulus = (0, 1)
            self.add_table = np.fromfunction(lambda a, b: (a + b) % p, (q, q), dtype=np.int64)
            self.mul_table = np.fromfunction(lambda a, b: (a * b) % p, (q, q), dtype=np.int64)
        else:
            fp = lambda a, b: (a + b) % p  # noqa: E731
            self.modulus = _least_irreducible(
                m, range(p), fp, lambda a, b: (a * b) % p, lambda a: (-a) % p,
                lambda a: pow(a, p - 2, p))
            self.add_table = np.zeros((q, q), dtype=np.int64)
            self.mul_table = np.zeros((q, q), dtype=np.int64)
            for a in range(q):
                da = self.digits(a)
                for b in range(q):
                    db = self.digits(b)
                    self.add_table[a, b] = self.from_digits([(x + y) % p for x, y in zip(da, db)])
                    conv = [0] * (2 * m - 1)
                    for i, x in enumerate(da):
                        for j, y in enumerate(db):
                            conv[i + j] = (conv[i + j] + x * y) % p
                    rem = _poly_mod(conv, self.modulus, fp, lambda s, t: (s * t) % p,
                                    lambda s: (-s) % p, lambda s: pow(s, p - 2, p))
                    self.mul_table[a, b] = self.from_digits(rem + [0] * (m - len(rem)))
        self._neg = [int(np.where(self.add_table[a] == 0)[0][0]) for a in range(q)]
        self._inv = [0] + [int(np.where(self.mul_table[a] == 1)[0][0]) for a in range(1, q)]
        self._add = self.add_table.tolist()
        self._mul = self.mul_table.tolist()

    def digits(self, a: int) -> list[int]:
        return [(a // self.p ** k) % self.p for k in range(self.m)]

    def from_digits(self, ds: Sequence[int]) -> int:
        return sum(int(d) * self.p ** k for k, d in enumerate(ds))

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in a finite field")
        return self._inv[a]

    def elements(self) -> range:
        return range(self.q)

    def prime_basis(self) -> list[int]:
        """The F_p-basis 1, x, ..., x^(m-1) as encoded elements."""
        return [self.p ** k for k in range(self.m)]

    def primitive_element(self) -> int:
        for g in range(2, self.q) if self.q > 2 else [1]:
            seen, x = set(), 1
            for _ in range(self.q - 1):
                x = self.mul(x, g)
                seen.add(x)
            if len(seen) == self.q - 1:
                return g
        return 1

    def __repr__(self) -> str:
        return f"FiniteField({self.q})"


@lru_cache(maxsize=None)
def finite_field(q: int) -> FiniteField:
    return FiniteField(q)


# matrices

def identity(d: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(d)) for i in range(d))


def mat_mul(F: FiniteField, A: Matrix, B: Matrix) -> Matrix:
    add, mul = F._add, F._mul
    cols = list(zip(*B))
    out = []
    for row in A:
        new = []
        for col in cols:
            s = 0
            for a, b in zip(row, col):
                if a and b:
                    s = add[s][mul[a][b]]
            new.append(s)
        out.append(tuple(new))
    return tuple(out)


def mat_vec(F: FiniteField, A: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    add, mul = F._add, F._mul
    out = []
    for row in A:
        s = 0
        for a, b in zip(row, v):
            if a and b:
                s = add[s][mul[a][b]]
        out.append(s)
    return tuple(out)


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def elementary(d: int, i: int, j: int, a: int) -> Matrix:
    """Identity plus a in entry (i, j)."""
    return tuple(tuple((1 if r == c else 0) + (a if (r, c) == (i, j) else 0)
                       for c in range(d)) for r in range(d))


def determinant(F: FiniteField, A: Matrix) -> int:
    M = [list(r) for r in A]
    d = len(M)
    det = 1
    for c in range(d):
        piv = next((r for r in range(c, d) if M[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = F.neg(det)
        det = F.mul(det, M[c][c])
        inv = F.inv(M[c][c])
        for r in range(c + 1, d):
            if M[r][c]:
                f = F.mul(M[r][c], inv)
                M[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[r], M[c])]
    return det


def block(A: Matrix, B: Matrix, C: Matrix, D: Matrix) -> Matrix:
    """The block matrix (A B; C D)."""
    top = [tuple(a) + tuple(b) for a, b in zip(A, B)]
    bot = [tuple(c) + tuple(d) for c, d in zip(C, D)]
    return tuple(top + bot)


def zero_matrix(r: int, c: int | None = None) -> Matrix:
    return tuple(tuple(0 for _ in range(r if c is None else c)) for _ in range(r))


def symplectic_form(F: FiniteField, n: int) -> Matrix:
    I, Z = identity(n), zero_matrix(n)
    negI = tuple(tuple(F.neg(x) for x in row) for row in I)
    return block(Z, I, negI, Z)


def is_symplectic(F: FiniteField, A: Matrix) -> bool:
    n = len(A) // 2
    Om = symplectic_form(F, n)
    return mat_mul(F, mat_mul(F, transpose(A), Om), A) == Om


class ExtensionField:
    """F_{q^n} as F_q[y]/(g), elements are length-n tuples over F_q."""

    def __init__(self, base: FiniteField, n: int):
        self.base, self.n = base, n
        F = base
        self.modulus = _least_irreducible(n, list(F.elements()), F.add, F.mul, F.neg, F.inv)

    def elements(self) -> list[tuple[int, ...]]:
        return [tuple(reversed(t)) for t in product(self.base.elements(), repeat=self.n)]

    def mul(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        F, n = self.base, self.n
        conv = [0] * (2 * n - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                conv[i + j] = F.add(conv[i + j], F.mul(x, y))
        rem = _poly_mod(conv, self.modulus, F.add, F.mul, F.neg, F.inv)
        return tuple(rem) + (0,) * (n - len(rem))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def basis_element(self, i: int) -> tuple[int, ...]:
        return tuple(1 if k == i else 0 for k in range(self.n))

    def multiplication_matrix(self, a: Sequence[int]) -> Matrix:
        """Matrix of y -> a*y in the polynomial basis (columns are images)."""
        cols = [self.mul(a, self.basis_element(j)) for j in range(self.n)]
        return transpose(tuple(cols))

    def trace(self, a: Sequence[int]) -> int:
        M = self.multiplication_matrix(a)
        s = 0
        for i in range(self.n):
            s = self.base.add(s, M[i][i])
        return s

    def prime_basis(self) -> list[tuple[int, ...]]:
        """An F_p-basis: base prime basis placed in each coordinate."""
        out = []
        for i in range(self.n):
            for b in self.base.prime_basis():
                out.append(tuple(b if k == i else 0 for k in range(self.n)))
        return out


def orthogonal_basis(E: ExtensionField) -> tuple[list[tuple[int, ...]], list[int]]:
    """A basis of E over F_q orthogonal for the trace form, with Gram diagonal.

    Plain symmetric Gram-Schmidt; a diagonal entry that is a square is
    rescaled to 1.
    """
    F = E.base

    def form(x, y):
        return E.trace(E.mul(x, y))

    squares = {F.mul(c, c): c for c in F.elements() if c}
    vecs = [E.basis_element(i) for i in range(E.n)]
    basis: list[tuple[int, ...]] = []
    gram: list[int] = []
    while vecs:
        idx = next((i for i, v in enumerate(vecs) if form(v, v)), None)
        if idx is None:
            for i in range(len(vecs)):
                for j in range(i + 1, len(vecs)):
                    w = E.add(vecs[i], vecs[j])
                    if form(w, w):
                        vecs[i], idx = w, i
                        break
                if idx is not None:
                    break
        if idx is None:
            raise ArithmeticError("trace form is alternating on a complement")
        pivot = vecs.pop(idx)
        d = form(pivot, pivot)
        if d in squares:
            s = F.inv(squares[d])
            pivot = tuple(F.mul(s, x) for x in pivot)
            d = 1
        dinv = F.inv(d)
        projected = []
        for v in vecs:
            c = F.mul(form(v, pivot), dinv)
            projected.append(tuple(F.sub(x, F.mul(c, y)) for x, y in zip(v, pivot)))
        vecs = projected
        basis.append(pivot)
        gram.append(d)
    return basis, gram


def matrix_in_basis(E: ExtensionField, a: Sequence[int], basis: list[tuple[int, ...]]) -> Matrix:
    """Matrix of y -> a*y with respect to an arbitrary F_q-basis."""
    F = E.base
    # change of basis: columns of C are basis vectors in polynomial coordinates
    C = transpose(tuple(tuple(b) for b in basis))
    Cinv = invert_matrix(F, C)
    return mat_mul(F, mat_mul(F, Cinv, E.multiplication_matrix(a)), C)


def invert_matrix(F: FiniteField, A: Matrix) -> Matrix:
    d = len(A)
    M = [list(r) + [1 if i == j else 0 for j in range(d)] for i, r in enumerate(A)]
    for c in range(d):
        piv = next((r for r in range(c, d) if M[r][c]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = F.inv(M[c][c])
        M[c] = [F.mul(inv, x) for x in M[c]]
        for r in range(d):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[r], M[c])]
    return tuple(tuple(r[d:]) for r in M)
