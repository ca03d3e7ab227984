"""Volume of the real region {z : |f_j(z)| <= T^{u_j}} for morphisms of weighted projective lines."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import poly
from .morphism import MorphismSpec
from .roots import real_roots, real_roots_exact


class VolumeError(RuntimeError):
    pass


# ---- certified bounding box -----------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __add__(self, o):
        return Interval(self.lo + o.lo, self.hi + o.hi)

    def __mul__(self, o):
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(ps), max(ps))

    def scale(self, c):
        a, b = self.lo * c, self.hi * c
        return Interval(min(a, b), max(a, b))

    def __pow__(self, k: int):
        if k == 0:
            return Interval(Fraction(1), Fraction(1))
        a, b = self.lo**k, self.hi**k
        if k % 2 == 0 and self.lo <= 0 <= self.hi:
            return Interval(Fraction(0), max(a, b))
        return Interval(min(a, b), max(a, b))


def _interval_eval(terms: dict, boxes) -> Interval:
    acc = Interval(Fraction(0), Fraction(0))
    for k, c in terms.items():
        t = Interval(Fraction(1), Fraction(1))
        for iv, e in zip(boxes, k):
            if e:
                t = t * iv**e
        acc = acc + t.scale(c)
    return acc


def _sphere_edges(m: int):
    """Faces of the cube [-1, 1]^2, the unit sphere for the weighted sup-size."""
    one = Fraction(1)
    for i in range(m):
        for sgn in (-one, one):
            yield i, sgn


def _sphere_min_estimate(spec: MorphismSpec, n: int = 4096) -> float:
    t = np.linspace(-1.0, 1.0, n)
    best = math.inf
    for i, sgn in _sphere_edges(spec.m):
        z = [t, t]
        z[i] = np.full_like(t, float(sgn))
        r = np.zeros_like(t)
        for f, u in zip(spec.polys, spec.target):
            r = np.maximum(r, np.abs(_eval_np(f.terms, z)) ** (1.0 / u))
        best = min(best, float(r.min()))
    return best


def _certify(spec: MorphismSpec, target: Fraction, max_depth: int = 40) -> bool:
    """True if max_j |f_j|^(1/u_j) >= target on the whole unit sphere (exact interval arithmetic)."""
    thresholds = [target**u for u in spec.target]
    for i, sgn in _sphere_edges(spec.m):
        stack = [(Fraction(-1) + Fraction(2 * k, 64), Fraction(2, 64), 0) for k in range(64)]
        while stack:
            lo, h, depth = stack.pop()
            boxes = [Interval(lo, lo + h), Interval(lo, lo + h)]
            boxes[i] = Interval(sgn, sgn)
            ok = False
            for f, th in zip(spec.polys, thresholds):
                iv = _interval_eval(f.terms, boxes)
                if iv.lo >= th or iv.hi <= -th:
                    ok = True
                    break
            if ok:
                continue
            if depth >= max_depth:
                return False
            stack.append((lo, h / 2, depth + 1))
            stack.append((lo + h / 2, h / 2, depth + 1))
    return True


@dataclass(frozen=True)
class Region:
    """The region at T = 1 with a certified lower bound c for the size ratio on the unit sphere."""

    spec: MorphismSpec
    c_lower: Fraction
    c_estimate: float
    safety: float

    def box(self, T=1) -> tuple[float, ...]:
        """Half-widths B_i with the T-region inside prod [-B_i, B_i]."""
        T = float(T)
        c = float(self.c_lower)
        return tuple((T / c) ** (w / self.spec.e) for w in self.spec.source)

    def int_bound(self, i: int, T) -> int:
        """Largest integer n with n <= (T / c)^(w_i / e), exactly."""
        X = Fraction(T) / self.c_lower
        w, e = self.spec.source[i], self.spec.e
        n = int(float(X) ** (w / e)) + 2
        while n > 0 and Fraction(n) ** e > X**w:
            n -= 1
        while Fraction(n + 1) ** e <= X**w:
            n += 1
        return n


@lru_cache(maxsize=64)
def bounding_box(spec: MorphismSpec, safety: float = 2.0, retries: int = 4) -> Region:
    """Certified bounding region: outside prod [-B_i, B_i] some |f_j| exceeds 1."""
    if spec.m != 2:
        raise VolumeError("volume computation implemented for m=2 only")
    est = _sphere_min_estimate(spec)
    if not est > 0:
        raise VolumeError("size ratio vanishes on the unit sphere; region is unbounded")
    target = Fraction(math.floor(est / safety * 2**30), 2**30)
    for _ in range(retries + 1):
        if target > 0 and _certify(spec, target):
            return Region(spec, target, est, safety)
        target /= 2
    raise VolumeError("could not certify a bounding box")


# ---- float evaluation -----------------------------------------------------------------


def _eval_np(terms: dict, z):
    acc = 0.0
    for k, c in terms.items():
        t = float(c)
        for zi, e in zip(z, k):
            if e:
                t = t * zi**e
        acc = acc + t
    return acc


def _b_coeffs(terms: dict, a: float) -> list[float]:
    dmax = max(k[1] for k in terms)
    out = [0.0] * (dmax + 1)
    for (i, j), c in terms.items():
        out[j] += float(c) * a**i
    return out


def slice_intervals(spec: MorphismSpec, a: float, T=1.0, thresholds=None) -> list[tuple[float, float]]:
    """Admissible b-set at abscissa a as a sorted list of disjoint intervals."""
    T = float(T)
    ths = thresholds or [T**u for u in spec.target]
    cs = [_b_coeffs(f.terms, a) for f in spec.polys]
    brk = []
    for c, th in zip(cs, ths):
        if len(c) == 1:
            continue
        for sg in (-1.0, 1.0):
            cc = list(c)
            cc[0] -= sg * th
            brk.extend(real_roots(cc))
    brk.sort()

    def ok(b):
        for c, th in zip(cs, ths):
            v = 0.0
            for x in reversed(c):
                v = v * b + x
            if abs(v) > th:
                return False
        return True

    if not brk:
        if ok(0.0):
            raise VolumeError(f"unbounded slice at a = {a}")
        return []
    span = max(1.0, brk[-1] - brk[0])
    if ok(brk[0] - span) or ok(brk[-1] + span):
        raise VolumeError(f"unbounded slice at a = {a}")
    out: list = []
    for lo, hi in zip(brk, brk[1:]):
        if hi > lo and ok(0.5 * (lo + hi)):
            if out and out[-1][1] == lo:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return out


def slice_measure(spec: MorphismSpec, a: float, T=1.0) -> float:
    return sum(hi - lo for lo, hi in slice_intervals(spec, a, T))


# ---- corner abscissae ------------------------------------------------------------------


def corner_polynomials(spec: MorphismSpec, T=1) -> list[list]:
    """Exact polynomials in a whose real roots contain every abscissa where the slice structure changes."""
    T = Fraction(T)
    gs = []
    for f, u in zip(spec.polys, spec.target):
        for sg in (-1, 1):
            g = dict(f.terms)
            k = (0, 0)
            g[k] = g.get(k, 0) - sg * T**u
            if g[k] == 0:
                del g[k]
            gs.append(g)
    out = []
    for f in spec.polys:
        if max(k[1] for k in f.terms) > 0:
            out.append(poly.leading_in_b(f.terms))
    for g in gs:
        if max(k[1] for k in g) == 0:
            out.append(poly.leading_in_b(g))
        elif max(k[1] for k in g) >= 2:
            out.append(poly.resultant_in_b(g, poly.d_db(g)))
    for i in range(len(gs)):
        for j in range(2 * (i // 2 + 1), len(gs)):
            gi, gj = gs[i], gs[j]
            if max(k[1] for k in gi) == 0 or max(k[1] for k in gj) == 0:
                continue
            out.append(poly.resultant_in_b(gi, gj))
    return [p for p in out if len(poly.trim(p)) > 1]


def corner_abscissae(spec: MorphismSpec, T=1, lo=None, hi=None) -> list[float]:
    pts = set()
    for p in corner_polynomials(spec, T):
        for r in real_roots_exact(p, tol=1e-14, lo=lo, hi=hi):
            pts.add(r)
    out = sorted(pts)
    if lo is not None:
        out = [x for x in out if x > lo]
    if hi is not None:
        out = [x for x in out if x < hi]
    return out


# ---- slice quadrature ------------------------------------------------------------------


@dataclass
class VolumeResult:
    value: float
    error: float
    method: str
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": self.value, "error": self.error, "method": self.method, **self.meta}


def _gl_panels(breaks: list[float], n_total: int):
    """Nodes/weights on each panel, smoothstep-mapped so sqrt endpoint behaviour integrates fast."""
    length = breaks[-1] - breaks[0]
    nodes, weights, panel_of = [], [], []
    for pi, (lo, hi) in enumerate(zip(breaks, breaks[1:])):
        n = max(16, int(round(n_total * (hi - lo) / length)))
        t, wt = np.polynomial.legendre.leggauss(n)
        t = 0.5 * (t + 1.0)
        wt = 0.5 * wt
        phi = t * t * (3.0 - 2.0 * t)
        dphi = 6.0 * t * (1.0 - t)
        nodes.append(lo + (hi - lo) * phi)
        weights.append((hi - lo) * dphi * wt)
        panel_of.append(np.full(n, pi))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(panel_of)


def _quad(spec, breaks, n, T):
    xs, ws, pan = _gl_panels(breaks, n)
    vals = np.array([slice_measure(spec, float(x), T) for x in xs])
    per_panel = np.bincount(pan, weights=vals * ws, minlength=len(breaks) - 1)
    return float(per_panel.sum()), per_panel


def volume_slice(spec: MorphismSpec, grid: int = 2048, T=1) -> VolumeResult:
    """Slice integration over x1 with exact corner abscissae and one doubling for the error."""
    if spec.m != 2:
        raise VolumeError("volume computation implemented for m=2 only")
    region = bounding_box(spec)
    B1 = region.box(T)[0]
    inner = corner_abscissae(spec, T, -B1, B1)
    breaks = sorted(set([-B1, 0.0, B1] + inner))
    coarse, _ = _quad(spec, breaks, grid, T)
    fine, per_panel = _quad(spec, breaks, 2 * grid, T)
    mids = [0.5 * (a + b) for a, b in zip(breaks, breaks[1:])]
    left = float(sum(v for v, m in zip(per_panel, mids) if m < 0))
    right = float(sum(v for v, m in zip(per_panel, mids) if m > 0))
    return VolumeResult(
        fine,
        abs(fine - coarse),
        "slice",
        {"grid": grid, "T": float(T), "corner_abscissae": inner, "left_half": left, "right_half": right},
    )


# ---- Monte Carlo -----------------------------------------------------------------------


def volume_monte_carlo(spec: MorphismSpec, samples: int, seed: int = 0, batch: int = 1_000_000, safety: float = 1.05) -> VolumeResult:
    region = bounding_box(spec, safety)
    B = region.box(1)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < samples:
        n = min(batch, samples - done)
        z = [rng.uniform(-b, b, n) for b in B]
        inside = np.ones(n, dtype=bool)
        for f in spec.polys:
            inside &= np.abs(_eval_np(f.terms, z)) <= 1.0
        hits += int(inside.sum())
        done += n
    box_vol = math.prod(2 * b for b in B)
    p = hits / samples
    return VolumeResult(
        box_vol * p,
        box_vol * math.sqrt(p * (1 - p) / samples),
        "mc",
        {"samples": samples, "seed": seed, "box": list(B), "hits": hits},
    )


def region_grid(spec: MorphismSpec, n: int = 200) -> list[tuple[float, float]]:
    """Grid points of the bounding box lying in the region, for external plotting."""
    B = bounding_box(spec, 1.05).box(1)
    a = np.linspace(-B[0], B[0], n)
    b = np.linspace(-B[1], B[1], n)
    A, Bm = np.meshgrid(a, b, indexing="ij")
    inside = np.ones(A.shape, dtype=bool)
    for f in spec.polys:
        inside &= np.abs(_eval_np(f.terms, [A, Bm])) <= 1.0
    return [(float(x), float(y)) for x, y in zip(A[inside], Bm[inside])]
