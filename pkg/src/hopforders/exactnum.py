"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are stored in the power basis 1, z, ..., z^(phi(N)-1) as integer
numerators over one common positive denominator.  Because Z[zeta_N] is the
full ring of integers, an element is integral exactly when that denominator
is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence, Union

__all__ = [
    "ConductorError",
    "CycNumber",
    "RootExponent",
    "cyclotomic_polynomial",
    "totient",
    "root_of_unity",
    "cyc_arith",
    "cyc_invert",
    "is_integral_scalar",
    "lift_conductor",
    "sum_of_roots",
]

Scalar = Union[int, Fraction, "CycNumber"]


class ConductorError(ValueError):
    """Raised when conductors are incompatible or too small."""


def totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    # exact division of integer polynomials (low degree first), den monic
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    assert not any(num), "non-exact polynomial division"
    return out


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple[int, ...]:
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(_cyclotomic(d)))
    return tuple(poly)


def cyclotomic_polynomial(n: int) -> list[int]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    return list(_cyclotomic(n))


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    # z^k in the power basis for k = 0..n-1
    phi = _cyclotomic(n)
    deg = len(phi) - 1
    rows = []
    cur = [1] + [0] * (deg - 1)
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by z and reduce with the monic Phi
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, phi[:-1])]
    return tuple(rows)


def _normalize(nums: Sequence[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums = [-x for x in nums]
        den = -den
    g = den
    for x in nums:
        if g == 1:
            break
        g = gcd(g, x)
    if g > 1:
        nums = [x // g for x in nums]
        den //= g
    return tuple(nums), den


class CycNumber:
    """An exact element of Q(zeta_N)."""

    __slots__ = ("conductor", "nums", "den", "_hash")

    def __init__(self, conductor: int, nums: Sequence[int], den: int = 1, *, _raw: bool = False):
        if _raw:
            self.conductor = conductor
            self.nums = nums  # type: ignore[assignment]
            self.den = den
        else:
            if conductor < 1:
                raise ConductorError("conductor must be positive")
            deg = totient(conductor)
            if len(nums) != deg:
                raise ValueError(f"expected {deg} coefficients, got {len(nums)}")
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            self.conductor = conductor
            self.nums, self.den = _normalize([int(x) for x in nums], int(den))
        self._hash = None

    # construction helpers

    @classmethod
    def from_rational(cls, value: Union[int, Fraction], conductor: int = 1) -> "CycNumber":
        value = Fraction(value)
        deg = totient(conductor)
        return cls(conductor, (value.numerator,) + (0,) * (deg - 1), value.denominator, _raw=True)

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Union[int, Fraction]], conductor: int) -> "CycNumber":
        fr = [Fraction(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        return cls(conductor, [int(c * den) for c in fr], den)

    @classmethod
    def zero(cls, conductor: int) -> "CycNumber":
        return cls.from_rational(0, conductor)

    @classmethod
    def one(cls, conductor: int) -> "CycNumber":
        return cls.from_rational(1, conductor)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.den) for x in self.nums)

    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_integral(self) -> bool:
        return self.den == 1

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.nums[0], self.den)

    # arithmetic

    def _coerce(self, other: Scalar) -> "CycNumber":
        if isinstance(other, CycNumber):
            if other.conductor != self.conductor:
                raise ConductorError(
                    f"conductor mismatch: {self.conductor} vs {other.conductor}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNumber.from_rational(other, self.conductor)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Scalar) -> "CycNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.den == o.den:
            nums, den = [a + b for a, b in zip(self.nums, o.nums)], self.den
        else:
            nums = [a * o.den + b * self.den for a, b in zip(self.nums, o.nums)]
            den = self.den * o.den
        nums, den = _normalize(nums, den)
        return CycNumber(self.conductor, nums, den, _raw=True)

    __radd__ = __add__

    def __neg__(self) -> "CycNumber":
        return CycNumber(self.conductor, tuple(-a for a in self.nums), self.den, _raw=True)

    def __sub__(self, other: Scalar) -> "CycNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Scalar) -> "CycNumber":
        return (-self) + other

    def __mul__(self, other: Scalar) -> "CycNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.nums, o.nums
        if len(a) == 1:
            nums = (a[0] * b[0],)
        else:
            n = self.conductor
            table = _power_table(n)
            conv = [0] * (2 * len(a) - 1)
            for i, x in enumerate(a):
                if x:
                    for j, y in enumerate(b):
                        if y:
                            conv[i + j] += x * y
            nums = list(conv[: len(a)])
            for k in range(len(a), len(conv)):
                c = conv[k]
                if c:
                    row = table[k % n]
                    for t, r in enumerate(row):
                        if r:
                            nums[t] += c * r
        nums, den = _normalize(nums, self.den * o.den)
        return CycNumber(self.conductor, nums, den, _raw=True)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> "CycNumber":
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * cyc_invert(o)

    def __rtruediv__(self, other: Scalar) -> "CycNumber":
        return cyc_invert(self) * other

    def __pow__(self, k: int) -> "CycNumber":
        base = self if k >= 0 else cyc_invert(self)
        k = abs(k)
        result = CycNumber.one(self.conductor)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = CycNumber.from_rational(other, self.conductor)
        if not isinstance(other, CycNumber):
            return NotImplemented
        return (self.conductor == other.conductor and self.den == other.den
                and self.nums == other.nums)

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self.nums[0], self.den))
            else:
                self._hash = hash((self.conductor, self.nums, self.den))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"CycNumber({self.conductor}, {self!s})"

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class RootExponent:
    """zeta_N ** exponent, multiplied by adding exponents."""

    exponent: int
    conductor: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponent", self.exponent % self.conductor)

    def __mul__(self, other: "RootExponent") -> "RootExponent":
        if other.conductor != self.conductor:
            raise ConductorError("conductor mismatch")
        return RootExponent(self.exponent + other.exponent, self.conductor)

    def inverse(self) -> "RootExponent":
        return RootExponent(-self.exponent, self.conductor)

    def __pow__(self, k: int) -> "RootExponent":
        return RootExponent(self.exponent * k, self.conductor)

    def is_one(self) -> bool:
        return self.exponent == 0

    def to_cyc(self) -> CycNumber:
        return root_of_unity(self.exponent, self.conductor)


@lru_cache(maxsize=4096)
def root_of_unity(k: int, conductor: int) -> CycNumber:
    """zeta_N^k reduced into the power basis."""
    row = _power_table(conductor)[k % conductor]
    return CycNumber(conductor, row, 1, _raw=True)


def sum_of_roots(counts: Sequence[int], conductor: int, scale: int = 1) -> CycNumber:
    """(sum_k counts[k] zeta^k) / scale, with len(counts) == conductor."""
    table = _power_table(conductor)
    nums = [0] * len(table[0])
    for k, c in enumerate(counts):
        if c:
            for t, r in enumerate(table[k]):
                if r:
                    nums[t] += int(c) * r
    nums, den = _normalize(nums, scale)
    return CycNumber(conductor, nums, den, _raw=True)


def cyc_arith(a: CycNumber, b: CycNumber, op: str) -> CycNumber:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


# polynomial helpers over Q, lowest degree first

def _trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _pdivmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, x in enumerate(b):
            a[i + shift] -= c * x
    return _trim(q), a


def _psub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def _pmul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def cyc_invert(a: CycNumber) -> CycNumber:
    """Multiplicative inverse via the extended Euclidean algorithm mod Phi_N."""
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero")
    if len(a.nums) == 1:
        return CycNumber.from_rational(Fraction(a.den, a.nums[0]), a.conductor)
    modulus = [Fraction(c) for c in _cyclotomic(a.conductor)]
    r0, r1 = modulus, _trim([Fraction(x, a.den) for x in a.nums])
    s0, s1 = [], [Fraction(1)]
    while len(r1) > 1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _psub(s0, _pmul(q, s1))
    # r1 is a nonzero constant because Phi_N is irreducible
    c = r1[0]
    _, s1 = _pdivmod(s1, modulus)
    coeffs = [x / c for x in s1] + [Fraction(0)] * (len(a.nums) - len(s1))
    return CycNumber.from_coeffs(coeffs, a.conductor)


def is_integral_scalar(a: CycNumber) -> bool:
    return a.den == 1


def lift_conductor(a: CycNumber, new_conductor: int) -> CycNumber:
    """Re-express a in Q(zeta_M) for a multiple M of its conductor."""
    if new_conductor % a.conductor:
        raise ConductorError(f"{a.conductor} does not divide {new_conductor}")
    step = new_conductor // a.conductor
    result = CycNumber.zero(new_conductor)
    for k, x in enumerate(a.nums):
        if x:
            result = result + root_of_unity(k * step, new_conductor) * Fraction(x, a.den)
    return result
