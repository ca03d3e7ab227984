"""Local discrepancy profiles, discrepancy sets, residue censuses and C_phi over Q."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import prod

from . import poly
from .arith import FactoredRational, moebius, prime_divisors, valuation
from .morphism import MorphismSpec, evaluate
from .weighted import WeightedPoint, scaling_ideal

K_MAX = 24
CLASS_BUDGET = 2_000_000


class AnalysisError(RuntimeError):
    """Local analysis could not be completed (infinite discrepancy set, no stabilization, ...)."""


def candidate_primes(spec: MorphismSpec) -> list[int]:
    """Primes that can divide a discrepancy: coefficient primes and resultant primes."""
    if spec.e > 1 and any(w > 1 for w in spec.source):
        raise AnalysisError(
            f"discrepancy set may be infinite: e = {spec.e} > 1 with non-unit source weights {spec.source.weights}"
        )
    if spec.m != 2:
        raise AnalysisError("local analysis implemented for m=2 only")
    ps: set = set()
    for f in spec.polys:
        ps |= f.coefficient_primes()
    f1, f2 = spec.polys
    for keep in (1, 0):
        r = poly.resultant(f1.dehomogenize(keep), f2.dehomogenize(keep))
        if r == 0:
            raise AnalysisError("vanishing resultant; morphism failed validation")
        for n in (r.numerator, r.denominator):
            if abs(n) > 1:
                ps.update(prime_divisors(n))
    return sorted(ps)


def _ordp(x, p: int) -> int | None:
    """ord_p of a rational; None for zero."""
    return None if x == 0 else valuation(x, p)


@dataclass(frozen=True)
class LocalProfile:
    """Local discrepancy at p as a function of residue classes mod (p^s_1, ..., p^s_m)."""

    p: int
    s: tuple[int, ...]
    classes: dict  # primitive residue tuple -> j
    labels: dict = field(default_factory=dict)  # non-primitive residue tuple -> label

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(self.p**si for si in self.s)

    @property
    def j_values(self) -> list[int]:
        return sorted(set(self.classes.values()))

    @property
    def is_trivial(self) -> bool:
        return not any(self.s)

    def key(self, coords) -> tuple:
        return tuple(int(c) % q for c, q in zip(coords, self.moduli))

    def j_of(self, coords) -> int:
        """Local discrepancy of a primitive integer point."""
        return self.classes[self.key(coords)]

    def label(self, key) -> int | None:
        return self.classes.get(key, self.labels.get(key))


class _Profiler:
    def __init__(self, spec: MorphismSpec, p: int):
        self.spec = spec
        self.p = p
        self.w = spec.source.weights
        self.u = spec.target.weights
        self.m = spec.m
        self.slack = [min(valuation(c, p) for c in f.terms.values()) for f in spec.polys]

    def primitivity(self, r, levels) -> bool | None:
        """True/False if every point of the class is (non-)primitive, None if undecided."""
        p, deep = self.p, True
        for ri, li, wi in zip(r, levels, self.w):
            if ri % p**li:
                o = valuation(ri, p)
                if o < wi:
                    return True
                continue
            if li < wi:
                deep = False
        return False if deep else None

    def bounds(self, r, k: int):
        """Per polynomial: ('det', floor(ord/u)) or ('low', lower bound) on the class at level k."""
        out = []
        for f, u, c in zip(self.spec.polys, self.u, self.slack):
            v = f(r)
            o = _ordp(v, self.p)
            if o is not None and o < c + k:
                out.append((True, o // u))
            else:
                out.append((False, (c + k) // u))
        return out

    def decide_j(self, r, k: int):
        bs = self.bounds(r, k)
        det = [v for d, v in bs if d]
        low = [v for d, v in bs if not d]
        D = min(det) if det else None
        L = min(low) if low else None
        if D is not None and (L is None or D <= L):
            return D
        return None

    def refine(self):
        """Tree refinement; returns leaves {(level, residues): j} for primitive classes."""
        p, m = self.p, self.m
        work = [(0,) * m]
        leaves = {}
        k = 0
        while work:
            if k > K_MAX:
                raise AnalysisError(f"local profile did not stabilize below K_max={K_MAX} at p={p}")
            nxt = []
            for r in work:
                prim = self.primitivity(r, (k,) * m) if k else None
                if prim is False:
                    continue
                if prim:
                    j = self.decide_j(r, k)
                    if j is not None:
                        leaves[(k, r)] = j
                        continue
                step = p**k
                for t in product(range(p), repeat=m):
                    nxt.append(tuple(ri + ti * step for ri, ti in zip(r, t)))
            if len(nxt) > CLASS_BUDGET:
                raise AnalysisError(f"local profile at p={p} exceeds the class budget")
            work = nxt
            k += 1
        return leaves

    def raw_label(self, r, levels, cap: int, depth: int = 0) -> int:
        """min over the class of min(min_i floor(ord f_i / u_i), cap), decided by lifting."""
        k = min(levels)
        bs = self.bounds(r, k)
        det = [v for d, v in bs if d]
        low = [v for d, v in bs if not d]
        D = min(det) if det else None
        L = min(low) if low else None
        if D is not None and (L is None or D <= L):
            return min(D, cap)
        if L is not None and L >= cap and (D is None or D >= cap):
            return cap
        if depth > 8 * K_MAX:
            raise AnalysisError(f"labeling of non-primitive class {r} at p={self.p} did not stabilize")
        i = levels.index(k)
        out = None
        for t in range(self.p):
            rr = list(r)
            rr[i] = r[i] + t * self.p**k
            ll = list(levels)
            ll[i] = k + 1
            v = self.raw_label(tuple(rr), tuple(ll), cap, depth + 1)
            out = v if out is None else min(out, v)
        return out


def local_profile(spec: MorphismSpec, p: int) -> LocalProfile:
    pr = _Profiler(spec, p)
    leaves = pr.refine()
    jset = sorted(set(leaves.values()))
    m = spec.m
    if len(jset) <= 1:
        return LocalProfile(p, (0,) * m, {(0,) * m: jset[0] if jset else 0})
    K = max(max(k for k, _ in leaves), max(spec.source.weights))
    if p ** (m * K) > CLASS_BUDGET:
        raise AnalysisError(f"local modulus at p={p} too large to tabulate (p^{m * K})")
    qK = p**K
    table = {}
    for R in product(range(qK), repeat=m):
        j = None
        for lev in range(K + 1):
            j = leaves.get((lev, tuple(x % p**lev for x in R)))
            if j is not None:
                break
        if j is None:
            if pr.primitivity(R, (K,) * m) is not False:
                raise AnalysisError(f"residue {R} mod {p}^{K} neither labeled nor non-primitive")
            continue
        table[R] = j
    s_min = None
    for s in sorted(product(range(K + 1), repeat=m), key=lambda s: (sum(s), s)):
        seen: dict = {}
        ok = True
        for R, j in table.items():
            key = tuple(x % p**si for x, si in zip(R, s))
            if seen.setdefault(key, j) != j:
                ok = False
                break
        if ok:
            s_min = s
            break
    assert s_min is not None
    s = tuple(max(a, b) for a, b in zip(s_min, spec.source.weights))
    mods = [p**si for si in s]
    classes = {}
    for R, j in table.items():
        classes[tuple(x % q for x, q in zip(R, mods))] = j
    cap = max(jset)
    labels = {}
    for key in product(*(range(q) for q in mods)):
        if key in classes:
            continue
        labels[key] = pr.raw_label(key, s, cap)
    return LocalProfile(p, s, classes, labels)


@dataclass
class GlobalAnalysis:
    discrepancy_set: list  # sorted positive Fractions
    bad_primes: list
    profiles: dict  # prime -> LocalProfile (all candidate primes)
    census: dict  # (d, c1) -> int
    modulus_index: dict  # c1 -> int
    c_phi: Fraction
    weights_total: int
    e: int

    @property
    def d_max(self) -> Fraction:
        return max(self.discrepancy_set)

    def local_j(self, coords) -> dict:
        return {p: prof.j_of(coords) for p, prof in self.profiles.items()}

    def d_of(self, coords) -> Fraction:
        """Discrepancy generator of a primitive integer point, from the profiles."""
        d = Fraction(1)
        for p, prof in self.profiles.items():
            d *= Fraction(p) ** prof.j_of(coords)
        return d

    def to_json(self) -> dict:
        return {
            "discrepancy_set": [str(d) for d in self.discrepancy_set],
            "bad_primes": list(self.bad_primes),
            "moduli": {str(p): list(self.profiles[p].s) for p in self.bad_primes},
            "local_constant_j": {
                str(p): prof.j_values[0] for p, prof in sorted(self.profiles.items()) if prof.is_trivial
            },
            "census": [
                {"d": str(d), "c1": c1, "count": n, "index": self.modulus_index[c1]}
                for (d, c1), n in sorted(self.census.items())
            ],
            "c_phi": str(self.c_phi),
        }


def _squarefree_products(primes) -> list[int]:
    out = [1]
    for p in primes:
        out += [x * p for x in out]
    return sorted(out)


def _local_count(prof: LocalProfile, w, j: int, c: int) -> tuple[int, int]:
    """(#classes mod p^t in (p^c)^w labeled j, exponent sum of t), t_i = max(s_i, w_i c)."""
    p = prof.p
    t = [max(si, wi * c) for si, wi in zip(prof.s, w)]
    n = 0
    for R in product(*(range(0, p**ti, p ** (wi * c)) for ti, wi in zip(t, w))):
        if prof.label(prof.key(R)) == j:
            n += 1
    return n, sum(t)


def global_analysis(spec: MorphismSpec) -> GlobalAnalysis:
    primes = candidate_primes(spec)
    profiles = {p: local_profile(spec, p) for p in primes}
    bad = [p for p in primes if not profiles[p].is_trivial]
    dset = [Fraction(1)]
    for p in primes:
        dset = [d * Fraction(p) ** j for d in dset for j in profiles[p].j_values]
    dset = sorted(set(dset))
    w = spec.source.weights
    census, index = {}, {}
    for c1 in _squarefree_products(bad):
        idx = 1
        for p in bad:
            idx *= p ** _local_count(profiles[p], w, 0, 1 if c1 % p == 0 else 0)[1]
        index[c1] = idx
        for d in dset:
            n = 1
            for p in bad:
                n *= _local_count(profiles[p], w, valuation(d, p), 1 if c1 % p == 0 else 0)[0]
            census[(d, c1)] = n
    wt = spec.source.total
    total = Fraction(0)
    for d in dset:
        dn = _d_power(d, wt, spec.e)
        for c1 in index:
            total += dn * moebius(c1) * Fraction(census[(d, c1)], index[c1])
    euler = prod((Fraction(1) - Fraction(1, p**wt)) ** -1 for p in bad) if bad else Fraction(1)
    return GlobalAnalysis(dset, bad, profiles, census, index, total * euler, wt, spec.e)


def _d_power(d: Fraction, wt: int, e: int) -> Fraction:
    out = Fraction(1)
    for p, k in FactoredRational.from_rational(d).exponents:
        if (k * wt) % e:
            raise AnalysisError(f"d^(|w|/e) is not rational for d = {d}")
        out *= Fraction(p) ** (k * wt // e)
    return out


def discrepancy(spec: MorphismSpec, x: WeightedPoint) -> FactoredRational:
    """I_u(phi(x)) * I_w(x)^(-e) computed from scratch by factorization."""
    return scaling_ideal(evaluate(spec, x)) / scaling_ideal(x) ** spec.e
