"""Exact rational, prime and valuation arithmetic over Q."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd, isqrt
from numbers import Rational

import mpmath

SIEVE_LIMIT = 10**6


class ArithmeticError_(ValueError):
    """Domain errors (valuation of zero, unsupported zeta argument, ...)."""


class FactorizationError(ArithmeticError_):
    pass


@lru_cache(maxsize=1)
def _sieve() -> tuple[int, ...]:
    flags = bytearray([1]) * (SIEVE_LIMIT + 1)
    flags[0] = flags[1] = 0
    for p in range(2, isqrt(SIEVE_LIMIT) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, SIEVE_LIMIT + 1, p)))
    return tuple(i for i, f in enumerate(flags) if f)


def primes_up_to(n: int) -> list[int]:
    if n > SIEVE_LIMIT:
        raise ArithmeticError_(f"sieve limited to {SIEVE_LIMIT}")
    ps = _sieve()
    from bisect import bisect_right

    return list(ps[: bisect_right(ps, n)])


# Deterministic Miller-Rabin bases, valid below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= 3_317_044_064_679_887_385_961_981:
        raise FactorizationError(f"primality of {n} outside deterministic range")
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=65536)
def factor_int(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of |n| as sorted (p, e) pairs; n must be nonzero."""
    if n == 0:
        raise ArithmeticError_("cannot factor 0")
    n = abs(n)
    out = []
    for p in _sieve():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        if n > SIEVE_LIMIT**2 and not is_prime(n):
            raise FactorizationError(
                f"cofactor {n} has no prime factor below {SIEVE_LIMIT}"
            )
        out.append((n, 1))
    return tuple(out)


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factor_int(n)]


def valuation(x, p: int) -> int:
    """ord_p(x) for a nonzero rational x."""
    x = Fraction(x)
    if x == 0:
        raise ArithmeticError_("valuation of 0 is +infinity")
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def moebius(n: int) -> int:
    if n < 1:
        raise ArithmeticError_("moebius needs n >= 1")
    fac = factor_int(n) if n > 1 else ()
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """B_n with B_1 = -1/2 (only even n are used)."""
    a = [Fraction(0)] * (n + 1)
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    b = a[0]
    return -b if n == 1 else b


def zeta_q(s: int, dps: int = 30):
    """Riemann zeta at an even integer s >= 2 as an mpmath mpf."""
    if s < 2 or s % 2:
        raise ArithmeticError_("zeta_q supports even s >= 2 only")
    k = s // 2
    b = bernoulli(s)
    with mpmath.workdps(dps):
        val = (
            (-1) ** (k + 1)
            * mpmath.mpf(b.numerator)
            / b.denominator
            * (2 * mpmath.pi) ** s
            / (2 * factorial(s))
        )
        return +val


@dataclass(frozen=True)
class FactoredRational:
    """Nonzero rational as sign times prime powers; with sign ignored, a fractional ideal."""

    sign: int = 1
    exponents: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ArithmeticError_("sign must be +1 or -1")
        clean = tuple(sorted((p, e) for p, e in self.exponents if e != 0))
        object.__setattr__(self, "exponents", clean)

    @classmethod
    def from_rational(cls, x) -> "FactoredRational":
        x = Fraction(x)
        if x == 0:
            raise ArithmeticError_("cannot factor 0")
        exps = dict(factor_int(x.numerator)) if abs(x.numerator) > 1 else {}
        if x.denominator > 1:
            for p, e in factor_int(x.denominator):
                exps[p] = -e
        return cls(1 if x > 0 else -1, tuple(exps.items()))

    @classmethod
    def from_map(cls, exps: dict, sign: int = 1) -> "FactoredRational":
        return cls(sign, tuple(exps.items()))

    @property
    def as_map(self) -> dict:
        return dict(self.exponents)

    def ord(self, p: int) -> int:
        return self.as_map.get(p, 0)

    def value(self) -> Fraction:
        v = Fraction(self.sign)
        for p, e in self.exponents:
            v *= Fraction(p) ** e
        return v

    def ideal(self) -> "FactoredRational":
        return FactoredRational(1, self.exponents)

    def norm(self) -> Fraction:
        return abs(self.value())

    def is_integral(self) -> bool:
        return all(e >= 0 for _, e in self.exponents)

    def _combine(self, other, k: int) -> "FactoredRational":
        exps = self.as_map
        for p, e in other.exponents:
            exps[p] = exps.get(p, 0) + k * e
        return FactoredRational(self.sign * (other.sign if k % 2 else 1), tuple(exps.items()))

    def __mul__(self, other):
        if not isinstance(other, FactoredRational):
            other = FactoredRational.from_rational(other)
        return self._combine(other, 1)

    def __truediv__(self, other):
        if not isinstance(other, FactoredRational):
            other = FactoredRational.from_rational(other)
        return self._combine(other, -1)

    def __pow__(self, k: int):
        sign = self.sign if k % 2 else 1
        return FactoredRational(sign, tuple((p, k * e) for p, e in self.exponents))

    def __str__(self):
        return str(self.value())


ONE = FactoredRational()


@dataclass(frozen=True)
class FieldContext:
    """Arithmetic constants of the base field; only Q is supported."""

    degree: int = 1
    real_places: int = 1
    complex_places: int = 0
    discriminant: int = 1
    roots_of_unity: int = 2
    class_representatives: tuple = field(default=(1,))

    def __post_init__(self):
        if (self.degree, self.real_places, self.complex_places, self.discriminant, self.roots_of_unity) != (1, 1, 0, 1, 2):
            raise ArithmeticError_("only the rational field is supported")


QQ = FieldContext()


def as_fraction(x) -> Fraction:
    if isinstance(x, (int, Fraction, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out
