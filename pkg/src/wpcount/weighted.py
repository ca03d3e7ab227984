"""Points of weighted projective space over Q: scaling ideals, heights, automorphisms."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .arith import FactoredRational, as_fraction, factor_int


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[int, ...]

    def __post_init__(self):
        ws = tuple(int(w) for w in self.weights)
        if not ws or any(w < 1 for w in ws):
            raise ValueError(f"weights must be positive integers, got {self.weights}")
        object.__setattr__(self, "weights", ws)

    @property
    def m(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return sum(self.weights)

    @property
    def min(self) -> int:
        return min(self.weights)

    def __iter__(self):
        return iter(self.weights)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]


def _as_weights(w) -> WeightVector:
    return w if isinstance(w, WeightVector) else WeightVector(tuple(w))


@dataclass(frozen=True)
class WeightedPoint:
    coords: tuple[Fraction, ...]
    weights: WeightVector

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_weights(self.weights))
        cs = tuple(as_fraction(c) for c in self.coords)
        if len(cs) != self.weights.m:
            raise ValueError("coordinate count does not match weights")
        if all(c == 0 for c in cs):
            raise ValueError("the origin is not a point of weighted projective space")
        object.__setattr__(self, "coords", cs)

    @classmethod
    def of(cls, coords, weights) -> "WeightedPoint":
        return cls(tuple(coords), _as_weights(weights))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def as_ints(self) -> tuple[int, ...]:
        if not self.is_integral():
            raise ValueError("point has non-integer coordinates")
        return tuple(c.numerator for c in self.coords)


def scale(lam, x: WeightedPoint) -> WeightedPoint:
    lam = as_fraction(lam)
    if lam == 0:
        raise ValueError("scaling factor must be nonzero")
    return WeightedPoint(tuple(lam**w * c for w, c in zip(x.weights, x.coords)), x.weights)


def scaling_ideal(x: WeightedPoint) -> FactoredRational:
    """Ideal with exponent min_i floor(ord_p(x_i)/w_i) at each p, zero coordinates skipped."""
    nz = [(w, c) for w, c in zip(x.weights, x.coords) if c != 0]
    g = 0
    for _, c in nz:
        g = gcd(g, c.numerator)
    cands = set(p for p, _ in factor_int(g)) if g > 1 else set()
    for _, c in nz:
        if c.denominator > 1:
            cands.update(p for p, _ in factor_int(c.denominator))
    exps = {}
    for p in cands:
        exps[p] = min(_ord(c, p) // w for w, c in nz)
    return FactoredRational.from_map(exps)


def _ord(c: Fraction, p: int) -> int:
    v = 0
    n, d = c.numerator, c.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def is_primitive_int(coords, weights) -> bool:
    """True iff the integer tuple has scaling ideal (1); avoids full factorization when possible."""
    g = 0
    for c in coords:
        g = gcd(g, c)
    if g == 1:
        return True
    if g == 0:
        raise ValueError("the origin is not a point of weighted projective space")
    for p, _ in factor_int(g):
        if all(c == 0 or c % p**w == 0 for c, w in zip(coords, weights)):
            return False
    return True


def normalize_primitive(x: WeightedPoint) -> WeightedPoint:
    q = scaling_ideal(x).value()
    return scale(1 / q, x)


def height(x: WeightedPoint) -> float:
    s_inf = max(float(abs(c)) ** (1.0 / w) for w, c in zip(x.weights, x.coords))
    return s_inf / float(scaling_ideal(x).value())


def height_at_most(x: WeightedPoint, T) -> bool:
    """Exact test of height(x) <= T for rational T, by clearing the w_i-th roots."""
    T = as_fraction(T)
    q = scaling_ideal(x).value()
    bound = q * T
    return all(abs(c) <= bound**w for w, c in zip(x.weights, x.coords))


def automorphism_count(x: WeightedPoint) -> int:
    return 2 if all(c == 0 for w, c in zip(x.weights, x.coords) if w % 2) else 1


def negate(x: WeightedPoint) -> WeightedPoint:
    return scale(-1, x)


def canonical_orbit_rep(x: WeightedPoint) -> WeightedPoint:
    y = negate(x)
    return x if x.coords <= y.coords else y


def is_canonical_int(coords, weights) -> bool:
    neg = tuple(-c if w % 2 else c for c, w in zip(coords, weights))
    return tuple(coords) <= neg
