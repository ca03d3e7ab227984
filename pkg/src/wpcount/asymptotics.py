"""Leading constant and exponents of the asymptotic count N(T) ~ C T^{|w|/e}."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import QQ, zeta_q
from .local import GlobalAnalysis
from .morphism import MorphismSpec


@dataclass(frozen=True)
class AsymptoticPrediction:
    c_phi: Fraction
    volume: float
    leading_constant: float
    exponent: Fraction
    error_exponent: Fraction
    special_log_flag: bool

    def to_json(self) -> dict:
        return {
            "c_phi": str(self.c_phi),
            "volume": self.volume,
            "C": self.leading_constant,
            "exponent": str(self.exponent),
            "error_exponent": str(self.error_exponent),
            "special_log": self.special_log_flag,
        }


def c_phi(analysis: GlobalAnalysis, spec: MorphismSpec | None = None) -> Fraction:
    return analysis.c_phi


def leading_constant(cphi, volume: float, spec: MorphismSpec) -> AsymptoticPrediction:
    if not volume > 0:
        raise ValueError("volume must be positive")
    w = spec.source
    with mpmath.workdps(30):
        local = (mpmath.mpf(2) ** QQ.complex_places / mpmath.sqrt(QQ.discriminant)) ** w.m
        C = local * mpmath.mpf(cphi.numerator) / cphi.denominator * mpmath.mpf(volume)
        C = C / (zeta_q(w.total) * QQ.roots_of_unity)
    exponent = Fraction(w.total, spec.e)
    err = exponent - Fraction(w.min, spec.e * QQ.degree)
    special = w.weights in ((1, 1), (2,))
    return AsymptoticPrediction(Fraction(cphi), float(volume), float(C), exponent, err, special)
