"""Sparse exact matrices over Q(zeta_N), realified to integer matrices.

An entry a of K becomes the phi(N) x phi(N) integer block whose k-th column
holds the power-basis coordinates of a * zeta^k (after clearing a common
denominator).  Realification is a ring homomorphism, so products of K
matrices become products of sparse int64 matrices, which scipy does fast.
A result is integral exactly when every numerator is divisible by the
common denominator, and the K-entry (i, j) is read from the first column of
block (i, j).
"""

from __future__ import annotations

from math import gcd, lcm
from typing import Iterable, Iterator, Optional

import numpy as np
import scipy.sparse as sp

from .exactnum import CycNumber, root_of_unity, totient

OVERFLOW_LIMIT = 1 << 62


class ExactOverflowError(ArithmeticError):
    """An int64 product could overflow; the instance is beyond desk scale."""


class QMatrix:
    """Integer CSR numerator over one positive denominator."""

    __slots__ = ("num", "den", "phi")

    def __init__(self, num: sp.spmatrix, den: int, phi: int):
        self.num = sp.csr_matrix(num, dtype=np.int64)
        self.num.eliminate_zeros()
        self.den = int(den)
        self.phi = phi

    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape

    def normalized(self) -> "QMatrix":
        data = self.num.data
        g = self.den
        if data.size:
            g = gcd(g, int(np.gcd.reduce(np.abs(data))))
        if g > 1:
            scaled = sp.csr_matrix((data // g, self.num.indices, self.num.indptr), shape=self.num.shape)
            return QMatrix(scaled, self.den // g, self.phi)
        return self

    def _max(self) -> int:
        return int(np.abs(self.num.data).max()) if self.num.data.size else 0

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        a, b = self.normalized(), other.normalized()
        row_nnz = int(np.diff(a.num.indptr).max()) if a.num.nnz else 0
        bound = a._max() * b._max() * max(row_nnz, 1)
        if bound >= OVERFLOW_LIMIT or a.den * b.den >= OVERFLOW_LIMIT:
            raise ExactOverflowError("int64 bound exceeded in exact sparse product")
        return QMatrix(a.num @ b.num, a.den * b.den, self.phi).normalized()

    def is_integral(self) -> bool:
        if self.den == 1:
            return True
        return not (self.num.data % self.den).any()

    def nonintegral_positions(self) -> np.ndarray:
        """(row, col) pairs of the scalar (block) entries that fail integrality,
        sorted."""
        m = self.num.tocoo()
        bad = (m.data % self.den) != 0
        if not bad.any():
            return np.zeros((0, 2), dtype=np.int64)
        pos = np.stack([m.row[bad] // self.phi, m.col[bad] // self.phi], axis=1)
        pos = np.unique(pos, axis=0)
        return pos

    def entry(self, i: int, j: int, conductor: int) -> CycNumber:
        """The K-entry (i, j), read from the first column of its block."""
        phi = self.phi
        col = self.num[i * phi:(i + 1) * phi, j * phi].toarray().ravel()
        return CycNumber(conductor, [int(x) for x in col], self.den)

    def entries(self, conductor: int) -> Iterator[tuple[int, int, CycNumber]]:
        """All nonzero K-entries in row-major order."""
        phi = self.phi
        m = self.num.tocsc()[:, ::phi].tocoo() if phi > 1 else self.num.tocoo()
        blocks: dict[tuple[int, int], list[int]] = {}
        for r, c, v in zip(m.row.tolist(), m.col.tolist(), m.data.tolist()):
            key = (r // phi, c)
            vec = blocks.get(key)
            if vec is None:
                vec = blocks[key] = [0] * phi
            vec[r % phi] = v
        for (i, j) in sorted(blocks):
            yield i, j, CycNumber(conductor, blocks[(i, j)], self.den)


class Realifier:
    """Caches the integer blocks of scalars for one conductor."""

    def __init__(self, conductor: int):
        self.conductor = conductor
        self.phi = totient(conductor)
        self._cache: dict[CycNumber, tuple[tuple[tuple[int, ...], ...], int]] = {}

    def block(self, a: CycNumber) -> tuple[tuple[tuple[int, ...], ...], int]:
        """Rows of the multiplication matrix of a, and its denominator."""
        got = self._cache.get(a)
        if got is None:
            phi = self.phi
            if phi == 1:
                got = (((a.nums[0],),), a.den)
            else:
                cols = [a * root_of_unity(k, self.conductor) for k in range(phi)]
                d = 1
                for c in cols:
                    d = lcm(d, c.den)
                rows = tuple(tuple(c.nums[r] * (d // c.den) for c in cols) for r in range(phi))
                got = (rows, d)
            self._cache[a] = got
        return got

    def matrix(self, entries: Iterable[tuple[int, int, CycNumber]], shape: tuple[int, int]) -> QMatrix:
        phi = self.phi
        items = [(i, j, self.block(v)) for i, j, v in entries if not v.is_zero()]
        den = 1
        for _, _, (_, d) in items:
            den = lcm(den, d)
        if den >= OVERFLOW_LIMIT:
            raise ExactOverflowError("common denominator too large")
        rows: list[int] = []
        cols: list[int] = []
        data: list[int] = []
        if phi == 1:
            for i, j, (blk, d) in items:
                rows.append(i)
                cols.append(j)
                data.append(blk[0][0] * (den // d))
        else:
            for i, j, (blk, d) in items:
                f = den // d
                for r in range(phi):
                    br = blk[r]
                    for k in range(phi):
                        if br[k]:
                            rows.append(i * phi + r)
                            cols.append(j * phi + k)
                            data.append(br[k] * f)
        if data and max(abs(x) for x in data) >= OVERFLOW_LIMIT:
            raise ExactOverflowError("entry too large for int64")
        m = sp.csr_matrix((np.array(data, dtype=np.int64), (np.array(rows, dtype=np.int64),
                                                             np.array(cols, dtype=np.int64))),
                          shape=(shape[0] * phi, shape[1] * phi))
        m.sum_duplicates()
        return QMatrix(m, den, phi).normalized()

    def permutation(self, images: Iterable[tuple[int, int]], size: int,
                    coeff: Optional[CycNumber] = None) -> QMatrix:
        """Matrix with entry (row, col) = coeff for each given pair."""
        c = coeff if coeff is not None else CycNumber.one(self.conductor)
        return self.matrix(((r, k, c) for r, k in images), (size, size))
