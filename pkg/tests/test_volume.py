import math

import mpmath
import pytest

from wpcount.volume import bounding_box, corner_abscissae, region_grid, slice_intervals, volume_monte_carlo, volume_slice

ALPHA = 0.5960716379833286  # real root of x^3 + 3x - 2


def _x1_2_closed_form():
    a = mpmath.findroot(lambda x: x**3 + 3 * x - 2, 0.6)
    return float((4 + 2 * mpmath.log(2) + 2 * a - 2 * mpmath.log(a)) / 3)


def _x1_3_closed_form():
    mpmath.mp.dps = 30
    r = [x.real for x in mpmath.polyroots([1, 0, 6, -8, -3], maxsteps=200, extraprec=100) if abs(x.imag) < 1e-20]
    a0, a1 = -min(r), max(r)
    s3 = mpmath.sqrt(3)
    I0 = mpmath.quad(lambda a: mpmath.sqrt(a**6 + 2), [-mpmath.sqrt(a0), 1]) / s3
    I1 = mpmath.quad(lambda a: mpmath.sqrt(a**6 - 2), [mpmath.sqrt(a1), s3]) / s3
    return float(1 + I0 - I1 - (a1**2 - a0**2) / 8 + mpmath.log(3 * a1 / a0) / 4)


@pytest.fixture(scope="module")
def vols(specs):
    return {n: volume_slice(specs[n]) for n in ("x1_2", "x1_3", "identity_p11", "identity_p24")}


def test_x1_2_volume_closed_form(vols):
    assert abs(vols["x1_2"].value - _x1_2_closed_form()) < 1e-10
    assert vols["x1_2"].error < 1e-10


def test_x1_3_volume_closed_form(vols):
    assert abs(vols["x1_3"].value - _x1_3_closed_form()) < 1e-10


def test_identity_volumes(vols):
    assert vols["identity_p11"].value == pytest.approx(4.0, abs=1e-10)
    assert vols["identity_p24"].value == pytest.approx(4.0, abs=1e-10)


def test_corner_abscissae_x1_2(vols):
    cs = vols["x1_2"].meta["corner_abscissae"]
    for want in (ALPHA, -ALPHA, 1.0, -1.0, 2.0, -2.0):
        assert min(abs(c - want) for c in cs) < 1e-9


def test_corner_abscissae_x1_3(specs):
    cs = corner_abscissae(specs["x1_3"], 1, -2, 2)
    for want in (math.sqrt(1.3240709921470284), math.sqrt(0.3044219350790911), 1.0, math.sqrt(3)):
        assert min(abs(c - want) for c in cs) < 1e-9
        assert min(abs(c + want) for c in cs) < 1e-9


@pytest.mark.parametrize("name", ["x1_2", "x1_3"])
def test_symmetric_halves(vols, name):
    m = vols[name].meta
    assert abs(m["left_half"] - m["right_half"]) < 1e-8


@pytest.mark.parametrize("name", ["x1_2", "x1_3"])
@pytest.mark.parametrize("T", [2, 5])
def test_region_scaling_law(specs, vols, name, T):
    spec = specs[name]
    v = volume_slice(spec, T=T).value
    expect = vols[name].value * T ** (spec.source.total / spec.e)
    assert abs(v / expect - 1) < 1e-6


@pytest.mark.parametrize("name", ["x1_2", "x1_3"])
def test_monte_carlo_agrees(specs, vols, name):
    mc = volume_monte_carlo(specs[name], 200_000, seed=7)
    assert abs(mc.value - vols[name].value) < 4 * mc.error
    again = volume_monte_carlo(specs[name], 200_000, seed=7)
    assert again.value == mc.value


@pytest.mark.parametrize("name", ["x1_2", "x1_3"])
def test_certified_box_contains_region(specs, name):
    B = bounding_box(specs[name], 1.05).box(1)
    pts = region_grid(specs[name], 150)
    assert pts
    assert all(abs(x) <= B[0] and abs(y) <= B[1] for x, y in pts)
    tight = bounding_box(specs[name], 2.0).box(1)
    for a in (-0.999 * tight[0], 0.0, 0.5 * tight[0]):
        for lo, hi in slice_intervals(specs[name], a):
            assert -tight[1] <= lo <= hi <= tight[1]


def test_slice_measure_example(specs):
    # at a = 0 the X1(2) slice is |2b| <= 1: length 1
    (iv,) = slice_intervals(specs["x1_2"], 0.0)
    assert iv == pytest.approx((-0.5, 0.5))
