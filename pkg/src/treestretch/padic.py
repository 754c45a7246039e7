"""Exact p-adic valuations on rationals and Hensel splitting of x^2 - t x + 1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from sympy import isprime

from .errors import InvalidPrime, NotHyperbolic, ParseError

INF = math.inf

RationalLike = Union[int, Fraction, str]


@lru_cache(maxsize=256)
def check_prime(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or p < 2 or not isprime(p):
        raise InvalidPrime(f"{p!r} is not a prime")
    return p


def to_fraction(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ParseError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        text = x.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {x!r}") from exc
    raise ParseError(f"not a rational: {x!r}")


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _int_val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def val(x: RationalLike, p: int):
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    check_prime(p)
    x = to_fraction(x)
    if x == 0:
        return INF
    return _int_val(x.numerator, p) - _int_val(x.denominator, p)


def unit_part(x: Fraction, p: int) -> Fraction:
    """x / p^val(x), a p-adic unit."""
    v = val(x, p)
    return x / Fraction(p) ** v


def residue(x: Fraction, p: int, precision: int) -> int:
    """Image of x (val(x) >= 0) in Z / p^precision."""
    mod = p**precision
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class PAdicRational:
    value: Fraction
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        object.__setattr__(self, "value", to_fraction(self.value))

    @property
    def valuation(self):
        return val(self.value, self.prime)

    def __str__(self):
        return format_fraction(self.value)


@dataclass(frozen=True)
class PAdicApprox:
    """p^valuation * unit_residue, known modulo p^(valuation + precision)."""

    unit_residue: int
    valuation: int
    precision: int
    prime: int

    def __post_init__(self):
        check_prime(self.prime)
        if self.precision < 1:
            raise ValueError("precision must be positive")
        if self.unit_residue % self.prime == 0:
            raise ValueError("unit_residue must be invertible mod p")
        object.__setattr__(self, "unit_residue", self.unit_residue % self.prime**self.precision)

    def to_fraction(self) -> Fraction:
        return self.unit_residue * Fraction(self.prime) ** self.valuation

    def __str__(self):
        return f"{self.unit_residue}*{self.prime}^{self.valuation} + O({self.prime}^{self.valuation + self.precision})"


def eigenvalue_valuations(trace: RationalLike, p: int) -> tuple[int, int]:
    """Valuations of the two roots of x^2 - trace*x + 1, smaller first.

    The Newton polygon has vertices (0, 0), (1, val(trace)), (2, 0); it has
    a break exactly when val(trace) < 0.
    """
    v = val(trace, p)
    if v < 0:
        return (v, -v)
    return (0, 0)


def hensel_split(trace: RationalLike, p: int, precision: int) -> tuple[PAdicApprox, PAdicApprox]:
    """Both roots of x^2 - trace*x + 1 in Q_p when val(trace) < 0.

    Returns ``(alpha, beta)`` with val(alpha) = val(trace) < 0 < val(beta).
    Writing beta = p^m * b with m = -val(trace) and trace = p^-m * u, the unit
    b is the simple root of p^(2m) b^2 - u b + 1 = 0, which Newton iteration
    lifts from b = 1/u mod p.
    """
    check_prime(p)
    if precision < 1:
        raise ValueError("precision must be positive")
    t = to_fraction(trace)
    v = val(t, p)
    if v >= 0:
        raise NotHyperbolic(f"val({t}) = {v} >= 0: roots need not lie in Q_{p}")
    m = -v
    mod = p**precision
    u = residue(t * Fraction(p) ** m, p, precision)
    c = p ** (2 * m) % mod
    b = pow(u, -1, p)
    k = 1
    while k < precision:
        k = min(2 * k, precision)
        mk = p**k
        f = (c * b * b - u * b + 1) % mk
        df = (2 * c * b - u) % mk
        b = (b - f * pow(df, -1, mk)) % mk
    alpha = PAdicApprox(pow(b, -1, mod), v, precision, p)
    beta = PAdicApprox(b, m, precision, p)
    return alpha, beta
