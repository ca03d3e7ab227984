from fractions import Fraction

import pytest

from wpcount.weighted import (
    WeightedPoint,
    WeightVector,
    automorphism_count,
    canonical_orbit_rep,
    height,
    height_at_most,
    is_primitive_int,
    normalize_primitive,
    scale,
    scaling_ideal,
)


def P(coords, w):
    return WeightedPoint.of(coords, w)


def test_weight_vector_validation():
    assert WeightVector((2, 4)).total == 6
    with pytest.raises(ValueError):
        WeightVector((0, 1))
    with pytest.raises(ValueError):
        P((0, 0), (1, 1))


def test_scaling_ideal_examples():
    # 2^2 | 4 and 2^4 | 16 but 2^8 does not divide 16
    assert scaling_ideal(P((4, 16), (2, 4))).value() == 2
    assert scaling_ideal(P((8, 0), (2, 4))).value() == 2
    assert scaling_ideal(P((0, 48), (2, 4))).value() == 2
    assert scaling_ideal(P((Fraction(1, 4), 3), (2, 4))).value() == Fraction(1, 2)
    assert scaling_ideal(P((3, 5), (1, 3))).value() == 1


def test_primitive_and_normalize():
    assert is_primitive_int((2, 4), (2, 4))
    assert not is_primitive_int((4, 16), (2, 4))
    x = normalize_primitive(P((Fraction(3, 4), Fraction(5, 16)), (2, 4)))
    assert x.as_ints() == (3, 5)
    assert scaling_ideal(x).value() == 1


def test_height_and_exact_test():
    x = P((16, 64), (4, 6))
    # 16^(1/4) = 2, 64^(1/6) = 2 and the scaling ideal is (2)
    assert height(x) == pytest.approx(1.0)
    assert height_at_most(x, 1)
    assert not height_at_most(x, Fraction(99, 100))


def test_automorphisms():
    assert automorphism_count(P((1, 0), (2, 4))) == 2
    assert automorphism_count(P((1, 0), (1, 3))) == 1
    assert automorphism_count(P((0, 5), (1, 2))) == 2


def test_canonical_rep():
    x = P((3, -2), (1, 3))
    y = scale(-1, x)
    assert canonical_orbit_rep(x) == canonical_orbit_rep(y)
