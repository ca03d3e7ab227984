from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wpcount.roots import isolate_real_roots, real_roots, real_roots_exact, refine_root


def _mp_real_roots(coeffs):
    rs = mpmath.polyroots(list(reversed(coeffs)), maxsteps=400, extraprec=400)
    return sorted(float(r.real) for r in rs if abs(r.imag) < 1e-25)


def test_alpha_root():
    # x^3 + 3x - 2
    (r,) = real_roots_exact([-2, 3, 0, 1])
    assert abs(r - 0.59607) < 1e-5


def test_quartic_roots():
    r = real_roots_exact([-3, -8, 6, 0, 1])
    assert len(r) == 2
    assert abs(r[0] + 0.3044) < 1e-4 and abs(r[1] - 1.3240) < 1e-4
    assert r == pytest.approx(_mp_real_roots([-3, -8, 6, 0, 1]), abs=1e-13)


def test_brackets_are_disjoint_and_certified():
    p = [0, -2, 0, 1]  # x^3 - 2x
    br = isolate_real_roots(p)
    assert len(br) == 3
    for (a, b), (c, d) in zip(br, br[1:]):
        assert b <= c
    lo, hi = refine_root(p, *br[2], tol=1e-15)
    assert float(lo) <= 2**0.5 <= float(hi)


def test_repeated_roots_counted_once():
    # (x - 1)^2 (x + 2)
    assert real_roots_exact([2, -3, 0, 1]) == pytest.approx([-2, 1])
    assert real_roots([2, -3, 0, 1]) == pytest.approx([-2, 1], abs=1e-7)


def test_rational_roots():
    br = isolate_real_roots([Fraction(-1, 4), 0, 1])
    assert len(br) == 2
    assert real_roots_exact([Fraction(-1, 4), 0, 1]) == pytest.approx([-0.5, 0.5], abs=1e-13)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=2, max_size=7).filter(lambda c: c[-1] != 0))
def test_exact_roots_vs_mpmath(coeffs):
    ours = real_roots_exact(coeffs, tol=1e-14)
    ref = sorted(set(round(r, 9) for r in _mp_real_roots(coeffs)))
    assert [round(r, 9) for r in ours] == pytest.approx(ref, abs=1e-8)


def _from_roots(rs):
    c = [1]
    for r in rs:
        nxt = [0] * (len(c) + 1)
        for i, v in enumerate(c):
            nxt[i] -= r * v
            nxt[i + 1] += v
        c = nxt
    return c


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=5, unique=True))
def test_float_roots_simple(rs):
    got = real_roots(_from_roots(rs))
    assert got == pytest.approx(sorted(rs), rel=1e-9, abs=1e-9)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=1, max_size=5))
def test_float_roots_with_multiplicity(rs):
    # tangential roots are reported, possibly as a tight cluster
    got = real_roots(_from_roots(rs))
    for r in set(rs):
        assert min(abs(g - r) for g in got) < 1e-4 * max(1, abs(r))
    for g in got:
        assert min(abs(g - r) for r in rs) < 1e-4 * max(1, abs(g))
