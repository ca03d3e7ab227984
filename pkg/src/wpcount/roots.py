"""Real root isolation for univariate polynomials (coefficients lowest degree first).

Two routines:
  isolate_real_roots / real_roots_exact: exact coefficients, Descartes rule of signs
      with bisection, returning certified disjoint brackets;
  real_roots: float coefficients, splitting the line at critical points into
      monotone pieces and bracketing each sign change.
"""
from __future__ import annotations

import math
from fractions import Fraction
from math import lcm

from scipy.optimize import brentq

from . import poly


class RootIsolationError(RuntimeError):
    pass


# ---- exact --------------------------------------------------------------------------


def _to_int_poly(p) -> list[int]:
    p = poly.trim([Fraction(c) for c in p])
    D = lcm(*(c.denominator for c in p)) if p else 1
    ints = [int(c * D) for c in p]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints] if g > 1 else ints


def _taylor_shift1(p: list[int]) -> list[int]:
    """Coefficients of p(t + 1)."""
    a = list(p)
    n = len(a)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            a[j] += a[j + 1]
    return a


def _scale_half(p: list[int]) -> list[int]:
    """2^n p(t / 2), integer coefficients."""
    n = len(p) - 1
    return [c << (n - i) for i, c in enumerate(p)]


def _sign_variations(p) -> int:
    signs = [c > 0 for c in p if c != 0]
    return sum(1 for x, y in zip(signs, signs[1:]) if x != y)


def _descartes_01(p: list[int]) -> int:
    """Upper bound (exact when 0 or 1) for the number of roots of p in (0, 1)."""
    q = _taylor_shift1(list(reversed(p)))
    while q and q[0] == 0:
        q = q[1:]
    return _sign_variations(q)


def _isolate_01(p: list[int], lo: Fraction, width: Fraction, out: list, depth: int = 0):
    if depth > 2000:
        raise RootIsolationError("Descartes bisection did not terminate")
    v = _descartes_01(p)
    if v == 0:
        return
    if v == 1:
        out.append((lo, lo + width))
        return
    half = width / 2
    left = _scale_half(p)
    mid_val = sum(left)  # left(1) = 2^n p(1/2)
    if mid_val == 0:
        out.append((lo + half, lo + half))
    right = _taylor_shift1(left)
    if right[0] == 0:
        right = right[1:]
    _isolate_01(left, lo, half, out, depth + 1)
    _isolate_01(right, lo + half, half, out, depth + 1)


def _cauchy_bound(p: list[int]) -> int:
    lead = abs(p[-1])
    b = 1 + max(Fraction(abs(c), lead) for c in p[:-1])
    k = 1
    while k < b:
        k *= 2
    return k


def isolate_real_roots(coeffs) -> list[tuple[Fraction, Fraction]]:
    """Disjoint brackets [lo, hi], one per distinct real root, sorted; lo == hi for exact roots."""
    p = poly.trim([Fraction(c) for c in coeffs])
    if len(p) <= 1:
        return []
    p = _to_int_poly(poly.squarefree(p))
    out: list = []
    if p[0] == 0:
        out.append((Fraction(0), Fraction(0)))
        p = p[1:]
        while p and p[0] == 0:
            p = p[1:]
    if len(p) <= 1:
        return out
    B = _cauchy_bound(p)
    pos = [c * B**i for i, c in enumerate(p)]
    neg = [c * (-B) ** i for i, c in enumerate(p)]
    if pos[-1] < 0:
        pos = [-c for c in pos]
    if neg[-1] < 0:
        neg = [-c for c in neg]
    pr: list = []
    _isolate_01(pos, Fraction(0), Fraction(1), pr)
    nr: list = []
    _isolate_01(neg, Fraction(0), Fraction(1), nr)
    # a root exactly at t = 1 would be at +-B, excluded by the strict Cauchy bound
    out += [(B * a, B * b) for a, b in pr]
    out += [(-B * b, -B * a) for a, b in nr]
    return sorted(set(out))


def _sign(p, x) -> int:
    v = poly.eval_poly(p, x)
    return (v > 0) - (v < 0)


def refine_root(coeffs, lo: Fraction, hi: Fraction, tol: float = 1e-13) -> tuple[Fraction, Fraction]:
    """Shrink an isolating bracket of a squarefree polynomial by exact bisection."""
    p = _to_int_poly(poly.squarefree(coeffs))
    if lo == hi:
        return lo, hi
    # brackets are open intervals; drop roots sitting on an endpoint
    for end in (lo, hi):
        if _sign(p, end) == 0:
            p = poly.divmod_poly(p, [-end, 1])[0]
    slo = _sign(p, lo)
    shi = _sign(p, hi)
    if slo == shi:
        raise RootIsolationError(f"bracket [{float(lo)}, {float(hi)}] has no sign change")
    while hi - lo > tol * max(1, abs(lo)):
        mid = (lo + hi) / 2
        sm = _sign(p, mid)
        if sm == 0:
            return mid, mid
        if sm == slo:
            lo = mid
        else:
            hi = mid
    return lo, hi


def real_roots_exact(coeffs, tol: float = 1e-13, lo=None, hi=None) -> list[float]:
    """Distinct real roots of an exact-coefficient polynomial, certified to width tol."""
    out = []
    for a, b in isolate_real_roots(coeffs):
        if lo is not None and b < lo:
            continue
        if hi is not None and a > hi:
            continue
        a, b = refine_root(coeffs, a, b, tol)
        out.append(float((a + b) / 2))
    return out


# ---- float --------------------------------------------------------------------------


def _horner(c, x):
    acc = 0.0
    for v in reversed(c):
        acc = acc * x + v
    return acc


def _abs_scale(c, x):
    ax = abs(x)
    acc = 0.0
    for v in reversed(c):
        acc = acc * ax + abs(v)
    return acc


def real_roots(coeffs, rel_tol: float = 1e-10) -> list[float]:
    """Real roots of a float-coefficient polynomial, sorted, with tangential roots included."""
    c = [float(v) for v in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    if len(c) > 1 and c[0] == 0.0:
        # x = 0 is an exact root; the relative tangency test below cannot see it
        k = next(i for i, v in enumerate(c) if v != 0.0)
        return sorted(set([0.0] + real_roots(c[k:], rel_tol)))
    n = len(c) - 1
    if n <= 0:
        return []
    if n == 1:
        return [-c[0] / c[1]]
    if n == 2:
        a, b, cc = c[2], c[1], c[0]
        disc = b * b - 4 * a * cc
        if disc < 0:
            if -disc <= rel_tol * (b * b + abs(4 * a * cc)):
                return [-b / (2 * a)]
            return []
        sq = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sq, b))
        if q == 0.0:
            return [0.0]
        r = sorted({q / a, cc / q})
        return r
    crit = real_roots([i * v for i, v in enumerate(c)][1:], rel_tol)
    B = 1.0 + max(abs(v / c[-1]) for v in c[:-1])
    pts = [-B] + [x for x in crit if -B < x < B] + [B]
    roots = []
    for x in pts[1:-1]:
        if abs(_horner(c, x)) <= rel_tol * _abs_scale(c, x):
            roots.append(x)
    for a, b in zip(pts, pts[1:]):
        fa, fb = _horner(c, a), _horner(c, b)
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0:
            roots.append(brentq(lambda x: _horner(c, x), a, b, xtol=1e-15 * max(1.0, abs(a), abs(b)), rtol=1e-15, maxiter=200))
    roots.sort()
    out = []
    for r in roots:
        if not out or r - out[-1] > 1e-14 * max(1.0, abs(r)):
            out.append(r)
    return out
