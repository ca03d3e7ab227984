"""Exact point counts N(T) by pruned integer enumeration, plus Moebius and convergence checks.

A point of P(w)(Q) is represented by its primitive integer coordinates x, unique up to
x -> (-1)_* x.  Its height under phi is at most T iff |f_j(x)| <= (d(x) T)^{u_j} for all j,
where d(x) is the discrepancy.  Summing 1/#Aut over canonical representatives therefore
equals half the number of primitive integer solutions, which is what the fast counter
computes: for each x1 it finds the admissible x2-set exactly and counts residues in it.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .arith import factor_int, moebius
from .asymptotics import AsymptoticPrediction
from .local import GlobalAnalysis, discrepancy
from .morphism import MorphismSpec, evaluate_int
from .roots import real_roots
from .volume import bounding_box
from .weighted import (
    WeightedPoint,
    automorphism_count,
    height_at_most,
    is_canonical_int,
    is_primitive_int,
)

DEFAULT_BUDGET = 50_000_000
DEFAULT_SLAB = 2048


class BudgetExceeded(RuntimeError):
    pass


class EnumerationError(RuntimeError):
    pass


def _fdiv_count(lo: int, hi: int, x0: int, mod: int) -> int:
    """#{b in [lo, hi] : b = x0 mod mod}."""
    if hi < lo:
        return 0
    return (hi - x0) // mod - (lo - 1 - x0) // mod


class Enumerator:
    """Per-(spec, analysis, T) machinery shared by all counting modes."""

    def __init__(self, spec: MorphismSpec, analysis: GlobalAnalysis, T, exclude_singular: bool = False):
        if spec.m != 2:
            raise EnumerationError("enumeration implemented for m=2 only")
        self.spec = spec
        self.analysis = analysis
        self.T = Fraction(T)
        if self.T <= 0:
            raise EnumerationError("T must be positive")
        self.w = spec.source.weights
        self.u = spec.target.weights
        self.dset = list(analysis.discrepancy_set)
        self.region = bounding_box(spec, 1.05)
        self.A = self.region.int_bound(0, max(self.dset) * self.T)
        # integer forms grouped by b-degree: bterms[j][k] = [(i, c), ...]
        self.D = []
        self.bterms = []
        self.amax = 0
        for Dj, terms in spec.integer_forms:
            kmax = max(k[1] for k in terms)
            g = [[] for _ in range(kmax + 1)]
            for (i, k), c in terms.items():
                g[k].append((i, c))
                self.amax = max(self.amax, i)
            self.D.append(Dj)
            self.bterms.append(g)
        # per d: (den, lim, float bound) with |D_j f_j| * den <= lim
        self.lims = []
        for d in self.dset:
            row = []
            for Dj, uj in zip(self.D, self.u):
                th = (d * self.T) ** uj
                row.append((th.denominator, Dj * th.numerator, float(Dj * th)))
            self.lims.append(row)
        self.bad = list(analysis.bad_primes)
        self.profiles = [analysis.profiles[p] for p in self.bad]
        self.La = math.prod(pr.moduli[0] for pr in self.profiles)
        self.Lb = math.prod(pr.moduli[1] for pr in self.profiles)
        const = Fraction(1)
        for p, pr in analysis.profiles.items():
            if pr.is_trivial:
                const *= Fraction(p) ** pr.j_values[0]
        self.const_d = const
        self.good_excluded = set(self.bad)
        self._tables: dict = {}
        self.exclude_singular = exclude_singular
        if exclude_singular and not _is_x1_2(spec):
            raise EnumerationError("--exclude-singular is only defined for the X1(2) fixture")

    # -- residue tables ------------------------------------------------------------

    def table(self, a: int) -> list:
        """For each d index, the residues r mod Lb with (a, r) primitive at bad primes and label d."""
        key = a % self.La
        t = self._tables.get(key)
        if t is not None:
            return t
        t = [[] for _ in self.dset]
        index = {d: i for i, d in enumerate(self.dset)}
        for r in range(self.Lb):
            d = self.const_d
            ok = True
            for p, pr in zip(self.bad, self.profiles):
                j = pr.classes.get((a % pr.moduli[0], r % pr.moduli[1]))
                if j is None:
                    ok = False
                    break
                d *= Fraction(p) ** j
            if ok:
                t[index[d]].append(r)
        self._tables[key] = t
        return t

    def label(self, a: int, b: int):
        """d(x) for a point primitive at the bad primes, else None."""
        d = self.const_d
        for p, pr in zip(self.bad, self.profiles):
            j = pr.classes.get((a % pr.moduli[0], b % pr.moduli[1]))
            if j is None:
                return None
            d *= Fraction(p) ** j
        return d

    # -- admissible sets -----------------------------------------------------------

    def coefs(self, a: int) -> list:
        ap = [1]
        for _ in range(self.amax):
            ap.append(ap[-1] * a)
        return [[sum(c * ap[i] for i, c in grp) for grp in g] for g in self.bterms]

    @staticmethod
    def _ok(coefs, lims, b: int) -> bool:
        for c, (den, lim, _) in zip(coefs, lims):
            v = 0
            for x in reversed(c):
                v = v * b + x
            if abs(v) * den > lim:
                return False
        return True

    def ranges(self, a: int, di: int, coefs=None) -> list[tuple[int, int]]:
        """Exact integer b-ranges with |f_j(a, b)| <= (d T)^{u_j} for all j."""
        coefs = coefs if coefs is not None else self.coefs(a)
        lims = self.lims[di]
        brk = []
        for c, (_, _, fb) in zip(coefs, lims):
            if len(c) <= 1:
                continue
            fc = [float(x) for x in c]
            for sg in (-fb, fb):
                cc = list(fc)
                cc[0] -= sg
                brk.extend(real_roots(cc))
        ok = self._ok
        if not brk:
            if ok(coefs, lims, 0):
                raise EnumerationError(f"unbounded admissible set at x1 = {a}")
            return []
        brk.sort()
        zones = []
        for x in brk:
            pad = 1 + abs(x) * 1e-9
            lo, hi = math.floor(x - pad), math.ceil(x + pad)
            if zones and lo <= zones[-1][1] + 1:
                zones[-1][1] = max(zones[-1][1], hi)
            else:
                zones.append([lo, hi])
        if ok(coefs, lims, zones[0][0] - 1) or ok(coefs, lims, zones[-1][1] + 1):
            raise EnumerationError(f"admissible set at x1 = {a} extends past its outer roots")
        out: list = []

        def add(lo, hi):
            if out and out[-1][1] == lo - 1:
                out[-1][1] = hi
            else:
                out.append([lo, hi])

        for zi, (zlo, zhi) in enumerate(zones):
            for b in range(zlo, zhi + 1):
                if ok(coefs, lims, b):
                    add(b, b)
            if zi + 1 < len(zones):
                slo, shi = zhi + 1, zones[zi + 1][0] - 1
                if slo <= shi and ok(coefs, lims, (slo + shi) // 2):
                    add(slo, shi)
        return [tuple(r) for r in out]

    # -- fast counting ---------------------------------------------------------------

    def _good_primes_of(self, a: int) -> list[int]:
        w1 = self.w[0]
        return [p for p, e in factor_int(a) if e >= w1 and p not in self.good_excluded]

    def count_slab(self, a_lo: int, a_hi: int) -> list[int]:
        """Number of primitive integer points with x1 in [a_lo, a_hi], per d index."""
        out = [0] * len(self.dset)
        w2 = self.w[1]
        Lb = self.Lb
        for a in range(a_lo, a_hi + 1):
            coefs = self.coefs(a)
            tab = self.table(a)
            if a == 0:
                for di in range(len(self.dset)):
                    if tab[di]:
                        out[di] += self._count_axis(self.ranges(0, di, coefs), tab[di])
                continue
            ps = self._good_primes_of(a)
            subsets = []
            for k in range(len(ps) + 1):
                for Q in combinations(ps, k):
                    M = math.prod(q**w2 for q in Q)
                    subsets.append((-1 if k % 2 else 1, M, pow(Lb, -1, M) if M > 1 else 0))
            for di in range(len(self.dset)):
                res = tab[di]
                if not res:
                    continue
                rs = self.ranges(a, di, coefs)
                n = 0
                for lo, hi in rs:
                    for sgn, M, inv in subsets:
                        mod = Lb * M
                        for r in res:
                            x0 = r + Lb * ((-r * inv) % M) if M > 1 else r
                            n += sgn * _fdiv_count(lo, hi, x0, mod)
                if self.exclude_singular:
                    n -= self._singular_hits(a, di, rs)
                out[di] += n
        return out

    def _count_axis(self, rs, res) -> int:
        """Points (0, b), b != 0, primitive: Moebius over squarefree n coprime to bad primes."""
        if not rs:
            return 0
        w2 = self.w[1]
        Lb = self.Lb
        bmax = max(max(abs(lo), abs(hi)) for lo, hi in rs)
        pieces = []
        for lo, hi in rs:
            if lo <= 0 <= hi:
                if lo <= -1:
                    pieces.append((lo, -1))
                if hi >= 1:
                    pieces.append((1, hi))
            else:
                pieces.append((lo, hi))
        total = 0
        n = 1
        while n**w2 <= bmax:
            mu = moebius(n)
            if mu and all(n % p for p in self.bad):
                M = n**w2
                inv = pow(Lb, -1, M) if M > 1 else 0
                for lo, hi in pieces:
                    for r in res:
                        x0 = r + Lb * ((-r * inv) % M) if M > 1 else r
                        total += mu * _fdiv_count(lo, hi, x0, Lb * M)
            n += 1
        return total

    def _singular_hits(self, a: int, di: int, rs) -> int:
        hits = 0
        cands = [0]
        if (3 * a * a) % 8 == 0:
            cands.append(3 * a * a // 8)
        for b in set(cands):
            if any(lo <= b <= hi for lo, hi in rs) and is_primitive_int((a, b), self.w) and self.label(a, b) == self.dset[di]:
                hits += 1
        return hits

    # -- literal scan ----------------------------------------------------------------

    def scan_slab(self, a_lo: int, a_hi: int, check_every: int = 100) -> list[Fraction]:
        """Mass per d by visiting each candidate point, with exact height re-check from scratch."""
        out = [Fraction(0)] * len(self.dset)
        seen = 0
        for a in range(a_lo, a_hi + 1):
            coefs = self.coefs(a)
            for di, d in enumerate(self.dset):
                for lo, hi in self.ranges(a, di, coefs):
                    for b in range(lo, hi + 1):
                        if a == 0 and b == 0:
                            continue
                        if not is_canonical_int((a, b), self.w):
                            continue
                        if not is_primitive_int((a, b), self.w):
                            continue
                        if self.label(a, b) != d:
                            continue
                        if self.exclude_singular and a != 0 and (b == 0 or 8 * b == 3 * a * a):
                            continue
                        x = WeightedPoint((a, b), self.spec.source)
                        y = WeightedPoint(evaluate_int(self.spec, (a, b)), self.spec.target)
                        if not height_at_most(y, self.T):
                            raise EnumerationError(f"pruned candidate {(a, b)} fails the exact height test")
                        seen += 1
                        if seen % check_every == 1:
                            dd = discrepancy(self.spec, x).value()
                            if dd != d:
                                raise EnumerationError(f"profile discrepancy {d} != direct {dd} at {(a, b)}")
                        out[di] += Fraction(1, automorphism_count(x))
        return out


def _is_x1_2(spec: MorphismSpec) -> bool:
    return (
        spec.source.weights == (2, 4)
        and spec.target.weights == (4, 6)
        and spec.polys[0].terms == {(2, 0): 1, (0, 1): -2}
        and spec.polys[1].terms == {(1, 1): 3, (3, 0): -1}
    )


# ---- drivers -------------------------------------------------------------------------


_WORKER: dict = {}


def _worker_init(spec, analysis, T, exclude_singular, mode):
    _WORKER["en"] = Enumerator(spec, analysis, T, exclude_singular)
    _WORKER["mode"] = mode


def _worker_run(bounds):
    en = _WORKER["en"]
    if _WORKER["mode"] == "scan":
        return [str(x) for x in en.scan_slab(*bounds)]
    return [str(x) for x in en.count_slab(*bounds)]


@dataclass
class CountOptions:
    threads: int = 1
    budget: int = DEFAULT_BUDGET
    slab: int = DEFAULT_SLAB
    checkpoint: str | None = None
    mode: str = "fast"  # "fast" or "scan"
    exclude_singular: bool = False


def _checkpoint_key(spec, T, opts) -> str:
    import hashlib

    blob = json.dumps([spec.to_config(), str(T), opts.slab, opts.mode, opts.exclude_singular], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def count_by_discrepancy(spec: MorphismSpec, analysis: GlobalAnalysis, T, opts: CountOptions | None = None) -> dict:
    """Mass N(T) split by the discrepancy of each point: {d: Fraction}."""
    opts = opts or CountOptions()
    en = Enumerator(spec, analysis, T, opts.exclude_singular)
    A = en.A
    if 2 * A + 1 > opts.budget:
        raise BudgetExceeded(f"x1 range has {2 * A + 1} values, above the budget {opts.budget}; raise --budget")
    slabs = [(lo, min(lo + opts.slab - 1, A)) for lo in range(-A, A + 1, opts.slab)]
    done: dict = {}
    key = _checkpoint_key(spec, en.T, opts)
    if opts.checkpoint and os.path.exists(opts.checkpoint):
        with open(opts.checkpoint) as fh:
            ck = json.load(fh)
        if ck.get("key") == key:
            done = {int(k): v for k, v in ck["slabs"].items()}

    def save():
        if not opts.checkpoint:
            return
        tmp = opts.checkpoint + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"key": key, "slabs": {str(k): v for k, v in sorted(done.items())}}, fh)
        os.replace(tmp, opts.checkpoint)

    todo = [i for i in range(len(slabs)) if i not in done]
    if opts.threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(opts.threads, initializer=_worker_init, initargs=(spec, analysis, en.T, opts.exclude_singular, opts.mode)) as ex:
            for i, part in zip(todo, ex.map(_worker_run, [slabs[i] for i in todo])):
                done[i] = part
                save()
    else:
        for i in todo:
            part = en.scan_slab(*slabs[i]) if opts.mode == "scan" else en.count_slab(*slabs[i])
            done[i] = [str(x) for x in part]
            save()
    totals = [Fraction(0)] * len(en.dset)
    for i in range(len(slabs)):
        for di, v in enumerate(done[i]):
            totals[di] += Fraction(v)
    if opts.mode == "scan":
        return dict(zip(en.dset, totals))
    return {d: t / 2 for d, t in zip(en.dset, totals)}


def count_exact(spec: MorphismSpec, analysis: GlobalAnalysis, T, opts: CountOptions | None = None) -> Fraction:
    return sum(count_by_discrepancy(spec, analysis, T, opts).values(), Fraction(0))


# ---- Moebius cross-check ---------------------------------------------------------------


@dataclass
class MoebiusReport:
    ok: bool
    per_d: dict
    max_scaling_generator: int
    prime_cut: int
    tail_certified: bool
    primitive_total: int
    count_exact_points: int
    witness: str | None = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "per_d": {str(d): v for d, v in sorted(self.per_d.items())},
            "max_scaling_generator": self.max_scaling_generator,
            "prime_cut": self.prime_cut,
            "tail_certified": self.tail_certified,
            "primitive_total": self.primitive_total,
            "count_exact_points": self.count_exact_points,
            "witness": self.witness,
        }


def _scaling_generator(coords, weights) -> int:
    """Positive generator of the scaling ideal of a nonzero integer tuple."""
    g = 0
    for c in coords:
        g = math.gcd(g, c)
    out = 1
    if g > 1:
        for p, _ in factor_int(g):
            k = min(_ordp(c, p) // w for c, w in zip(coords, weights) if c)
            out *= p**k
    return out


def _ordp(c: int, p: int) -> int:
    v = 0
    while c % p == 0:
        c //= p
        v += 1
    return v


def _in_V(analysis: GlobalAnalysis, coords, d: Fraction) -> bool:
    """Residue-class membership of an integer point in the congruence set for d."""
    for p, prof in analysis.profiles.items():
        lab = prof.label(prof.key(coords))
        if lab is None or lab != _v(d, p):
            return False
    return True


def _v(d: Fraction, p: int) -> int:
    from .arith import valuation

    return valuation(d, p)


def moebius_crosscheck(spec: MorphismSpec, analysis: GlobalAnalysis, T, prime_cut: int = 50) -> MoebiusReport:
    """Check Nbar_d((1), T) = sum_{c <= cut} mu(c) N_d(c, T) for every d by direct enumeration."""
    en = Enumerator(spec, analysis, T)
    w = spec.source.weights
    per_d = {}
    ok = True
    witness = None
    gmax = 1
    prim_total = 0
    for di, d in enumerate(en.dset):
        gens = []
        for a in range(-en.A, en.A + 1):
            for lo, hi in en.ranges(a, di):
                for b in range(lo, hi + 1):
                    if (a, b) == (0, 0) or not _in_V(analysis, (a, b), d):
                        continue
                    gens.append(_scaling_generator((a, b), w))
        nbar = sum(1 for g in gens if g == 1)
        gmax = max([gmax] + gens)
        rhs = 0
        terms = {}
        for c in range(1, prime_cut + 1):
            mu = moebius(c)
            if mu:
                n_c = sum(1 for g in gens if g % c == 0)
                terms[c] = n_c
                rhs += mu * n_c
        per_d[d] = {"nbar": nbar, "moebius_sum": rhs, "terms": {str(c): v for c, v in terms.items() if v}}
        prim_total += nbar
        if nbar != rhs and ok:
            ok = False
            witness = f"d={d}: Nbar={nbar} but Moebius sum={rhs}"
    exact_pts = int(2 * count_exact(spec, analysis, T))
    tail = prime_cut >= gmax
    if prim_total != exact_pts and ok:
        ok = False
        witness = f"sum of Nbar over d = {prim_total} but count_exact gives {exact_pts} points"
    return MoebiusReport(ok and tail, per_d, gmax, prime_cut, tail, prim_total, exact_pts, witness)


# ---- convergence -----------------------------------------------------------------------


@dataclass
class CountReport:
    T_ladder: list
    masses: list
    fitted: list
    prediction: AsymptoticPrediction
    relative_gaps: list
    scaled_gaps: list = field(default_factory=list)
    gaps_shrinking: bool = True

    def to_json(self) -> dict:
        return {
            "T_ladder": [str(t) for t in self.T_ladder],
            "masses": [str(m) for m in self.masses],
            "fitted": self.fitted,
            "predicted": self.prediction.leading_constant,
            "relative_gaps": self.relative_gaps,
            "scaled_gaps": self.scaled_gaps,
            "gaps_shrinking": self.gaps_shrinking,
            "prediction": self.prediction.to_json(),
        }

    def csv_rows(self) -> list[list]:
        rows = [["T", "mass_num", "mass_den", "fitted", "predicted", "rel_gap"]]
        for T, m, f, g in zip(self.T_ladder, self.masses, self.fitted, self.relative_gaps):
            rows.append([str(T), m.numerator, m.denominator, f, self.prediction.leading_constant, g])
        return rows


def convergence_report(spec, analysis, prediction: AsymptoticPrediction, T_ladder, opts: CountOptions | None = None) -> CountReport:
    Ts = [Fraction(t) for t in T_ladder]
    if Ts != sorted(Ts):
        raise EnumerationError("T ladder must be ascending")
    C = prediction.leading_constant
    rate = float(prediction.exponent - prediction.error_exponent)
    masses, fitted, gaps, scaled = [], [], [], []
    for T in Ts:
        m = count_exact(spec, analysis, T, opts)
        f = float(m) / float(T) ** float(prediction.exponent)
        g = abs(f - C) / C
        masses.append(m)
        fitted.append(f)
        gaps.append(g)
        tf = float(T)
        damp = tf**-rate * (math.log(tf) if prediction.special_log_flag and tf > 1 else 1.0)
        scaled.append(g / damp if damp else g)
    shrinking = len(gaps) < 2 or gaps[-1] <= gaps[0]
    return CountReport(Ts, masses, fitted, prediction, gaps, scaled, shrinking)
