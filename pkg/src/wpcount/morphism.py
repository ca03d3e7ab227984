"""Weighted-homogeneous polynomials and morphism specifications P(w) -> P(u)."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from . import poly
from .weighted import WeightedPoint, WeightVector, _as_weights


class MorphismError(ValueError):
    """Invalid morphism: parse failure, degree mismatch or common zero."""

    condition = "parse"


class DegreeError(MorphismError):
    condition = "degree"


class CommonZeroError(MorphismError):
    condition = "common-zero"

    def __init__(self, msg: str, witness: str | None = None):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True)
class WeightedPolynomial:
    terms: dict
    weights: WeightVector

    def __post_init__(self):
        object.__setattr__(self, "weights", _as_weights(self.weights))
        clean = {tuple(k): Fraction(c) for k, c in self.terms.items() if c != 0}
        if any(len(k) != self.weights.m for k in clean):
            raise DegreeError("exponent tuple length does not match weights")
        object.__setattr__(self, "terms", clean)
        degs = {self._deg(k) for k in clean}
        if len(degs) > 1:
            raise DegreeError(f"{poly.format_polynomial(clean)} is not weighted-homogeneous (degrees {sorted(degs)})")

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.weights))

    def _deg(self, k) -> int:
        return sum(a * w for a, w in zip(k, self.weights))

    @property
    def degree(self) -> int | None:
        if not self.terms:
            return None
        return self._deg(next(iter(self.terms)))

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, xs):
        acc = 0
        for k, c in self.terms.items():
            t = c
            for x, a in zip(xs, k):
                if a:
                    t = t * x**a
            acc += t
        return acc

    def __str__(self):
        return poly.format_polynomial(self.terms)

    def dehomogenize(self, keep: int) -> list:
        """Univariate polynomial in x_keep after setting every other variable to 1."""
        out: dict = {}
        for k, c in self.terms.items():
            out[k[keep]] = out.get(k[keep], 0) + c
        n = max(out, default=-1)
        return poly.trim([out.get(i, Fraction(0)) for i in range(n + 1)])

    def integer_form(self) -> tuple[int, dict]:
        """(D, terms with integer coefficients) with D * self = integer polynomial."""
        from math import lcm

        D = lcm(*(c.denominator for c in self.terms.values())) if self.terms else 1
        return D, {k: int(c * D) for k, c in self.terms.items()}

    def coefficient_primes(self) -> set:
        from .arith import prime_divisors

        ps: set = set()
        for c in self.terms.values():
            for n in (c.numerator, c.denominator):
                if abs(n) > 1:
                    ps.update(prime_divisors(n))
        return ps


@dataclass(frozen=True)
class MorphismSpec:
    source: WeightVector
    target: WeightVector
    polys: tuple
    e: int
    name: str = ""

    def __post_init__(self):
        if self.source.m != self.target.m or len(self.polys) != self.source.m:
            raise MorphismError("source weights, target weights and polynomials must have equal length")

    @property
    def m(self) -> int:
        return self.source.m

    @cached_property
    def integer_forms(self):
        return tuple(f.integer_form() for f in self.polys)

    def rescaled(self, c) -> "MorphismSpec":
        """The representative (c^{u_i} f_i) of the same morphism."""
        c = Fraction(c)
        polys = tuple(
            WeightedPolynomial({k: v * c**u for k, v in f.terms.items()}, self.source)
            for f, u in zip(self.polys, self.target)
        )
        return MorphismSpec(self.source, self.target, polys, self.e, self.name)

    def to_config(self) -> dict:
        return {
            "name": self.name,
            "source_weights": list(self.source.weights),
            "target_weights": list(self.target.weights),
            "polynomials": [str(f) for f in self.polys],
        }


def build_morphism(source, target, polynomials, name: str = "", validate: bool = True) -> MorphismSpec:
    """Assemble and check a morphism from weights and polynomial strings or term dicts."""
    w, u = _as_weights(source), _as_weights(target)
    if w.m != u.m or len(polynomials) != w.m:
        raise MorphismError("source_weights, target_weights and polynomials must have equal length")
    polys = []
    for i, p in enumerate(polynomials):
        terms = poly.parse_polynomial(p, w.m) if isinstance(p, str) else p
        try:
            polys.append(WeightedPolynomial(terms, w))
        except DegreeError as exc:
            raise DegreeError(f"polynomial {i + 1}: {exc}") from None
    es = set()
    for i, (f, ui) in enumerate(zip(polys, u)):
        if f.is_zero():
            continue
        if f.degree % ui:
            raise DegreeError(f"polynomial {i + 1} is not weighted-homogeneous of degree e*u_{i + 1} (degree {f.degree}, u = {ui})")
        es.add(f.degree // ui)
    if len(es) != 1:
        raise DegreeError(f"polynomials are not weighted-homogeneous of degree e*u_i for a single e (got {sorted(es)})")
    e = es.pop()
    if e == 0:
        raise DegreeError("e = 0 gives a constant map; only non-constant morphisms are supported")
    spec = MorphismSpec(w, u, tuple(polys), e, name)
    if validate:
        res = validate_no_common_zero(spec)
        if not res.ok:
            raise CommonZeroError(f"polynomials have a common zero off the origin: {res.witness}", res.witness)
    return spec


def parse_morphism(config) -> MorphismSpec:
    """Parse a JSON config (text, dict or path) into a validated MorphismSpec."""
    if isinstance(config, Path):
        config = config.read_text()
    if isinstance(config, str):
        try:
            config = json.loads(config)
        except json.JSONDecodeError as exc:
            raise MorphismError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(config, dict):
        raise MorphismError("config must be a JSON object")
    for key in ("source_weights", "target_weights", "polynomials"):
        if key not in config:
            raise MorphismError(f"missing field {key!r}")
    for key in ("source_weights", "target_weights"):
        v = config[key]
        if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
            raise MorphismError(f"field {key!r} must be an array of integers")
    ps = config["polynomials"]
    if not isinstance(ps, list) or not all(isinstance(x, str) for x in ps):
        raise MorphismError("field 'polynomials' must be an array of strings")
    try:
        return build_morphism(config["source_weights"], config["target_weights"], ps, str(config.get("name", "")))
    except poly.PolynomialParseError as exc:
        raise MorphismError(f"field 'polynomials': {exc}") from None
    except ValueError as exc:
        if isinstance(exc, MorphismError):
            raise
        raise MorphismError(str(exc)) from None


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    witness: str | None = None


def validate_no_common_zero(spec: MorphismSpec) -> ValidationResult:
    """Exact common-zero test for m = 2 via both dehomogenizations."""
    if spec.m != 2:
        raise MorphismError("common-zero validation implemented for m=2 only")
    f1, f2 = spec.polys
    g = poly.gcd_poly(f1.dehomogenize(1), f2.dehomogenize(1))
    if len(g) != 1:
        return ValidationResult(False, f"x1 = 1 chart: gcd(f1(1,t), f2(1,t)) = {_fmt_uni(g, 't')}")
    g = poly.gcd_poly(f1.dehomogenize(0), f2.dehomogenize(0))
    if len(g) != 1:
        return ValidationResult(False, f"x2 = 1 chart: gcd(f1(s,1), f2(s,1)) = {_fmt_uni(g, 's')}")
    return ValidationResult(True)


def _fmt_uni(p: list, var: str) -> str:
    if not p:
        return "0"
    return poly.format_polynomial({(i,): c for i, c in enumerate(p) if c}).replace("x1", var)


def evaluate(spec: MorphismSpec, x: WeightedPoint) -> WeightedPoint:
    vals = tuple(f(x.coords) for f in spec.polys)
    if all(v == 0 for v in vals):
        raise AssertionError(f"morphism vanished at {x.coords}; validation should have excluded this")
    return WeightedPoint(vals, spec.target)


def evaluate_int(spec: MorphismSpec, coords) -> tuple:
    return tuple(f(coords) for f in spec.polys)


FIXTURE_DIR = Path(__file__).parent / "fixtures"


def fixture_names() -> list[str]:
    return sorted(p.name for p in FIXTURE_DIR.glob("*.json"))


def load_config(path_or_name) -> tuple[MorphismSpec, bytes]:
    """Load a config file, falling back to the shipped fixtures by name."""
    p = Path(path_or_name)
    if not p.exists():
        cand = FIXTURE_DIR / p.name
        if not cand.exists() and not p.suffix:
            cand = FIXTURE_DIR / (p.name + ".json")
        if not cand.exists():
            raise FileNotFoundError(f"config {path_or_name} not found (fixtures: {', '.join(fixture_names())})")
        p = cand
    raw = p.read_bytes()
    return parse_morphism(raw.decode()), raw


def load_fixture(name: str) -> MorphismSpec:
    return load_config(name)[0]
