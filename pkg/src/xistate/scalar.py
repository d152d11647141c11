"""Exact arithmetic in cyclotomic fields Q(zeta_n)."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Union

Number = Union[int, Fraction, "Scalar"]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(num: list, den: list) -> tuple[list, list]:
    num = [Fraction(c) for c in num]
    den = _trim([Fraction(c) for c in den])
    if len(num) < len(den):
        return [], _trim(num)
    quot = [Fraction(0)] * (len(num) - len(den) + 1)
    lead = den[-1]
    for shift in range(len(num) - len(den), -1, -1):
        coef = num[shift + len(den) - 1] / lead
        quot[shift] = coef
        if coef:
            for i, d in enumerate(den):
                num[shift + i] -= coef * d
    return _trim(quot), _trim(num[: len(den) - 1])


def _poly_mul(a: list, b: list) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_sub(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return _trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    poly: list = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not rem
    return tuple(int(c) for c in poly)


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


@lru_cache(maxsize=None)
def _mobius(n: int) -> int:
    result, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


@lru_cache(maxsize=None)
def _root_power_reduced(n: int, k: int) -> tuple[Fraction, ...]:
    """Coefficients of zeta_n**k reduced modulo Phi_n."""
    k %= n
    mono = [Fraction(0)] * k + [Fraction(1)]
    _, rem = _poly_divmod(mono, list(cyclotomic_polynomial(n)))
    return _pad(rem, euler_phi(n))


def _pad(p: list, length: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(p[i]) if i < len(p) else Fraction(0) for i in range(length))


class Scalar:
    """An element of Q(zeta_n) stored in the power basis 1, zeta, ..., zeta^(phi(n)-1)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Number]) -> None:
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        raw = [Fraction(c) for c in coeffs]
        phi = euler_phi(order)
        if len(raw) > phi:
            _, raw = _poly_divmod(raw, list(cyclotomic_polynomial(order)))
        self.order = order
        self.coeffs = _pad(raw, phi)

    # constructors -------------------------------------------------------
    @classmethod
    def rational(cls, value: int | Fraction | str, order: int = 1) -> Scalar:
        return cls(order, [Fraction(value)])

    @classmethod
    def zero(cls, order: int = 1) -> Scalar:
        return cls(order, [])

    @classmethod
    def one(cls, order: int = 1) -> Scalar:
        return cls(order, [1])

    @classmethod
    def root_of_unity(cls, order: int, k: int = 1) -> Scalar:
        """zeta_order ** k."""
        s = cls.__new__(cls)
        s.order = order
        s.coeffs = _root_power_reduced(order, k)
        return s

    @classmethod
    def coerce(cls, value: Number, order: int = 1) -> Scalar:
        if isinstance(value, Scalar):
            return value
        return cls.rational(value, order)

    # field embedding ----------------------------------------------------
    def lift(self, order: int) -> Scalar:
        """Re-express in Q(zeta_order); requires self.order | order."""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"cannot lift order {self.order} to {order}")
        step = order // self.order
        acc = [Fraction(0)] * euler_phi(order)
        for k, c in enumerate(self.coeffs):
            if c:
                for i, v in enumerate(_root_power_reduced(order, k * step)):
                    acc[i] += c * v
        out = Scalar.__new__(Scalar)
        out.order = order
        out.coeffs = tuple(acc)
        return out

    def _common(self, other: Number) -> tuple[Scalar, Scalar]:
        other = Scalar.coerce(other)
        n = _lcm(self.order, other.order)
        return self.lift(n), other.lift(n)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: Number) -> Scalar:
        a, b = self._common(other)
        return Scalar(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar(self.order, [-x for x in self.coeffs])

    def __sub__(self, other: Number) -> Scalar:
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other: Number) -> Scalar:
        return Scalar.coerce(other) - self

    def __mul__(self, other: Number) -> Scalar:
        if not isinstance(other, Scalar):
            f = Fraction(other)
            return Scalar(self.order, [x * f for x in self.coeffs])
        a, b = self._common(other)
        return Scalar(a.order, _poly_mul(list(a.coeffs), list(b.coeffs)))

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise ZeroDivisionError("zero scalar has no inverse")
        # extended Euclid in Q[x] against the irreducible Phi_n
        mod = [Fraction(c) for c in cyclotomic_polynomial(self.order)]
        r0, r1 = mod, _trim(list(self.coeffs))
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        inv_c = 1 / r1[0]
        return Scalar(self.order, [c * inv_c for c in s1])

    def __truediv__(self, other: Number) -> Scalar:
        return self * Scalar.coerce(other).inverse()

    def __rtruediv__(self, other: Number) -> Scalar:
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> Scalar:
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Scalar.one(self.order)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> Scalar:
        """Image under zeta -> zeta^-1 (complex conjugation)."""
        out = [Fraction(0)] * self.order
        for k, c in enumerate(self.coeffs):
            out[-k % self.order] += c
        return Scalar(self.order, out)

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.rational(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def _normalized_trace(self) -> Fraction:
        # (1/phi(n)) Tr_{Q(zeta_n)/Q}, which does not depend on n
        n = self.order
        total = Fraction(0)
        for k, c in enumerate(self.coeffs):
            if c:
                g = n // gcd(n, k)
                total += c * _mobius(g) * Fraction(1, euler_phi(g))
        return total

    def __hash__(self) -> int:
        conj = Scalar(self.order, [])
        for k, c in enumerate(self.coeffs):
            if c:
                conj = conj + Scalar.root_of_unity(self.order, -k) * c
        return hash((self._normalized_trace(), (self * conj)._normalized_trace()))

    def approx(self) -> complex:
        import cmath

        z = cmath.exp(2j * cmath.pi / self.order)
        return complex(sum(float(c) * z**k for k, c in enumerate(self.coeffs)))

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        z = self.approx()
        approx: float | list[float] = round(z.real, 12) if abs(z.imag) < 1e-12 else [round(z.real, 12), round(z.imag, 12)]
        return {
            "cyclotomic_order": self.order,
            "coeffs": [str(c) for c in self.coeffs],
            "approx": approx,
        }

    @classmethod
    def from_json(cls, doc: dict | int | str) -> Scalar:
        if isinstance(doc, (int, str)):
            return cls.rational(Fraction(doc))
        return cls(int(doc["cyclotomic_order"]), [Fraction(c) for c in doc["coeffs"]])

    def __repr__(self) -> str:
        if self.is_rational():
            return f"Scalar({self.coeffs[0]})"
        terms = [f"{c}*z{self.order}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Scalar(" + " + ".join(terms) + ")"

    def __str__(self) -> str:
        if self.is_rational():
            return str(self.coeffs[0])
        return repr(self)
