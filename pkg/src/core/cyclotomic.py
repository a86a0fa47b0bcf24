# src/core/cyclotomic.py
"""Exact arithmetic in Q(zeta_n) on the power basis zeta^0 .. zeta^(n-1).

Values are kept reduced modulo the n-th cyclotomic polynomial, so two equal
values of the same conductor n have identical coefficient tuples. Values of
different conductors are embedded into the lcm before mixing.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
from sympy import cyclotomic_poly, mobius, totient

from .config import MAX_CONDUCTOR
from .errors import CapExceeded, NotRational, UsageError

Scalar = Union[int, Fraction]


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@lru_cache(maxsize=None)
def _phi_coeffs(n: int) -> Tuple[int, ...]:
    """n-th cyclotomic polynomial, constant term first (monic)."""
    coeffs = cyclotomic_poly(n, polys=True).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


@lru_cache(maxsize=None)
def _trace_weights(n: int) -> Tuple[Fraction, ...]:
    # normalized trace of zeta_n^j is mu(m)/phi(m) with m = n / gcd(j, n)
    weights = []
    for j in range(n):
        m = n // gcd(j, n)
        weights.append(Fraction(int(mobius(m)), int(totient(m))))
    return tuple(weights)


def _reduce(n: int, coeffs: Sequence[Scalar]) -> Tuple[Fraction, ...]:
    a = [Fraction(0)] * n
    for k, c in enumerate(coeffs):
        if c:
            a[k % n] += c
    phi = _phi_coeffs(n)
    d = len(phi) - 1
    for k in range(n - 1, d - 1, -1):
        c = a[k]
        if not c:
            continue
        shift = k - d
        for j, p in enumerate(phi):
            if p:
                a[shift + j] -= c * p
    return tuple(a)


class CycNum:
    """An element of Q(zeta_n) in canonical reduced form."""

    __slots__ = ("n", "coeffs", "_hash")

    def __init__(self, n: int, coeffs: Sequence[Scalar] = (), reduced: bool = False):
        if n < 1:
            raise UsageError(f"Cyclotomic order must be positive, got {n}")
        self.n = n
        self.coeffs = tuple(coeffs) if reduced else _reduce(n, coeffs)
        self._hash = None

    # --- constructors ---
    @classmethod
    def rational(cls, q: Scalar, n: int = 1) -> "CycNum":
        coeffs = [Fraction(0)] * n
        coeffs[0] = Fraction(q)
        return cls(n, coeffs, reduced=True)

    @classmethod
    def zeta(cls, n: int, k: int = 1) -> "CycNum":
        coeffs = [0] * n
        coeffs[k % n] = 1
        return cls(n, coeffs)

    @classmethod
    def coerce(cls, value: Union["CycNum", Scalar], n: int = 1) -> "CycNum":
        if isinstance(value, CycNum):
            return value
        if isinstance(value, (int, Fraction)):
            return cls.rational(value, n)
        raise TypeError(f"Cannot use {type(value).__name__} as a cyclotomic number")

    # --- structure ---
    def embed(self, m: int) -> "CycNum":
        """Same value viewed in Q(zeta_m); requires n | m."""
        if m == self.n:
            return self
        if m % self.n:
            raise UsageError(f"Cannot embed conductor {self.n} into {m}")
        step = m // self.n
        coeffs = [Fraction(0)] * m
        for k, c in enumerate(self.coeffs):
            if c:
                coeffs[k * step] = c
        return CycNum(m, coeffs)

    def _common(self, other: "CycNum") -> Tuple["CycNum", "CycNum"]:
        if self.n == other.n:
            return self, other
        m = _lcm(self.n, other.n)
        if m > MAX_CONDUCTOR:
            raise CapExceeded(f"Common conductor {m} exceeds STEMRANK_MAX_CONDUCTOR={MAX_CONDUCTOR}")
        return self.embed(m), other.embed(m)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def normalized_trace(self) -> Fraction:
        """Tr(a)/[Q(zeta_n):Q]; independent of the field the value is viewed in."""
        w = _trace_weights(self.n)
        return sum((c * w[k] for k, c in enumerate(self.coeffs) if c), Fraction(0))

    # --- arithmetic ---
    def __add__(self, other):
        other = CycNum.coerce(other)
        a, b = self._common(other)
        return CycNum(a.n, [x + y for x, y in zip(a.coeffs, b.coeffs)], reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CycNum(self.n, [-x for x in self.coeffs], reduced=True)

    def __sub__(self, other):
        return self + (-CycNum.coerce(other))

    def __rsub__(self, other):
        return CycNum.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self._common(other)
        n = a.n
        out = [Fraction(0)] * n
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    out[(i + j) % n] += x * y
        return CycNum(n, out)

    __rmul__ = __mul__

    def scale(self, q: Scalar) -> "CycNum":
        q = Fraction(q)
        return CycNum(self.n, [q * x for x in self.coeffs], reduced=True)

    def __truediv__(self, q: Scalar) -> "CycNum":
        if not isinstance(q, (int, Fraction)):
            raise TypeError("Only division by rationals is supported")
        return self.scale(Fraction(1) / Fraction(q))

    def __pow__(self, k: int) -> "CycNum":
        if k < 0:
            raise UsageError("Negative powers are not supported")
        result = CycNum.rational(1, self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def galois(self, k: int) -> "CycNum":
        return galois(self, k)

    def conj(self) -> "CycNum":
        return galois(self, -1)

    # --- comparison / hashing ---
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycNum.rational(other)
        if not isinstance(other, CycNum):
            return NotImplemented
        a, b = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.normalized_trace())
        return self._hash

    def sort_key(self) -> Tuple:
        """Deterministic ordering key; only comparable between equal conductors."""
        return (self.n, self.coeffs)

    # --- conversion ---
    def evaluate(self) -> complex:
        powers = np.exp(2j * np.pi * np.arange(self.n) / self.n)
        return complex(np.dot(np.array([float(c) for c in self.coeffs]), powers))

    def to_json(self) -> Dict:
        return {"n": self.n, "coeffs": [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Dict) -> "CycNum":
        try:
            n = int(data["n"])
            coeffs = [Fraction(int(num), int(den)) for num, den in data["coeffs"]]
        except (KeyError, TypeError, ValueError) as e:
            raise UsageError(f"Malformed cyclotomic value {data!r}: {e}")
        return cls(n, coeffs)

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                coef = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                terms.append(f"{coef}z{self.n}^{k}")
        return " + ".join(terms) if terms else "0"


# --- module-level operations ---

def cyc_arith(a: CycNum, b: CycNum, op: str) -> CycNum:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise UsageError(f"Unknown cyclotomic operation '{op}'")


def galois(a: CycNum, k: int) -> CycNum:
    """Apply zeta -> zeta^k; k must be coprime to the conductor."""
    n = a.n
    if gcd(k % n, n) != 1 and n > 1:
        raise UsageError(f"Galois exponent {k} is not coprime to {n}")
    coeffs = [Fraction(0)] * n
    for j, c in enumerate(a.coeffs):
        if c:
            coeffs[(j * k) % n] += c
    return CycNum(n, coeffs)


def as_rational(a: CycNum) -> Fraction:
    if not a.is_rational():
        raise NotRational(f"Value {a!r} is not rational")
    return a.coeffs[0]


def as_integer(a: CycNum, what: str = "value") -> int:
    """as_rational plus the integrality assertion used for dimensions and indicators."""
    q = as_rational(a)
    if q.denominator != 1:
        raise NotRational(f"{what} is {q}, expected an integer")
    return q.numerator


def cyc_sum(values: Iterable[CycNum], n: int = 1) -> CycNum:
    total = CycNum.rational(0, n)
    for v in values:
        total = total + v
    return total


def conj_vector(values: Sequence[CycNum]) -> List[CycNum]:
    return [v.conj() for v in values]
