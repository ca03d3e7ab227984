from fractions import Fraction

import mpmath
import pytest

from wpcount.asymptotics import leading_constant
from wpcount.volume import volume_slice


def _pred(specs, analyses, name):
    return leading_constant(analyses[name].c_phi, volume_slice(specs[name]).value, specs[name])


def test_x1_2_constant_closed_form(specs, analyses):
    p = _pred(specs, analyses, "x1_2")
    a = mpmath.findroot(lambda x: x**3 + 3 * x - 2, 0.6)
    closed = 945 / (2 * mpmath.pi**6) * (2 + mpmath.log(2) + a - mpmath.log(a))
    assert abs(p.leading_constant - float(closed)) < 1e-10
    assert p.exponent == 6 and p.error_exponent == 4
    assert not p.special_log_flag


def test_x1_3_constant(specs, analyses):
    p = _pred(specs, analyses, "x1_3")
    assert abs(p.leading_constant - 45 / float(mpmath.pi) ** 4 * p.volume) < 1e-12
    assert round(p.leading_constant, 4) == 0.8416
    assert p.exponent == 4 and p.error_exponent == 3


def test_schanuel_constant_identity(specs, analyses):
    p = _pred(specs, analyses, "identity_p11")
    assert p.leading_constant == pytest.approx(12 / float(mpmath.pi) ** 2, rel=1e-12)
    assert p.special_log_flag
    assert p.error_exponent == 1


def test_to_json(specs, analyses):
    js = _pred(specs, analyses, "x1_2").to_json()
    assert js["c_phi"] == "3/2" and js["exponent"] == "6" and js["error_exponent"] == "4"


def test_rescaling_leaves_constant_unchanged(specs):
    from wpcount.local import global_analysis

    for c in (2, Fraction(1, 3)):
        s = specs["x1_2"].rescaled(c)
        p = leading_constant(global_analysis(s).c_phi, volume_slice(s).value, s)
        assert p.leading_constant == pytest.approx(1.8708601758680115, rel=1e-9)


def test_nonpositive_volume_rejected(specs, analyses):
    with pytest.raises(ValueError):
        leading_constant(analyses["x1_2"].c_phi, 0.0, specs["x1_2"])
