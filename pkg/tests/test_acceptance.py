"""Acceptance criteria 1-8, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are printed in the
terminal summary (and inline with ``-s``).
"""
import json
import math
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import mpmath
import pytest

from naive_oracle import naive_count
from wpcount.asymptotics import leading_constant
from wpcount.enumeration import count_exact
from wpcount.local import AnalysisError, global_analysis
from wpcount.morphism import CommonZeroError, build_morphism, load_fixture
from wpcount.roots import isolate_real_roots, refine_root
from wpcount.volume import volume_monte_carlo, volume_slice

RESULTS: list[str] = []


@contextmanager
def criterion(label: str, desc: str):
    info: dict = {}
    try:
        yield info
    except BaseException as exc:
        line = f"CRITERION {label} FAIL  {desc} :: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
        RESULTS.append(line)
        print(line)
        raise
    detail = "; ".join(f"{k}={v}" for k, v in info.items())
    line = f"CRITERION {label} PASS  {desc}" + (f" :: {detail}" if detail else "")
    RESULTS.append(line)
    print(line)


def _cold_analysis(name: str) -> dict:
    """Analysis in a fresh interpreter, so the timing includes the prime sieve."""
    code = (
        "import json, time; t = time.perf_counter();"
        "from wpcount.morphism import load_fixture; from wpcount.local import global_analysis;"
        f"ga = global_analysis(load_fixture({name!r}));"
        "dt = time.perf_counter() - t;"
        "print(json.dumps({'dt': dt, 'ga': ga.to_json()}))"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_criterion1_x1_2_analysis():
    with criterion("1", "X1(2) analysis: D={1,2}, S={2}, s=(3,4), census 125/0/3/2 index 128, C=3/2, < 1 s") as info:
        r = _cold_analysis("x1_2")
        ga = global_analysis(load_fixture("x1_2"))
        assert ga.discrepancy_set == [1, 2]
        assert ga.bad_primes == [2]
        assert ga.profiles[2].s == (3, 4)
        assert [ga.census[(Fraction(d), c)] for d, c in ((1, 1), (1, 2), (2, 1), (2, 2))] == [125, 0, 3, 2]
        assert ga.modulus_index == {1: 128, 2: 128}
        assert ga.c_phi == Fraction(3, 2)
        assert r["ga"] == ga.to_json()
        assert r["dt"] < 1.0, f"runtime {r['dt']:.3f} s"
        info["runtime_s"] = f"{r['dt']:.3f}"


def test_criterion2_x1_3_analysis():
    with criterion("2", "X1(3) analysis: D={1}, S empty, C=1, < 1 s") as info:
        r = _cold_analysis("x1_3")
        ga = global_analysis(load_fixture("x1_3"))
        assert ga.discrepancy_set == [1]
        assert ga.bad_primes == []
        assert ga.c_phi == 1
        assert r["dt"] < 1.0, f"runtime {r['dt']:.3f} s"
        info["runtime_s"] = f"{r['dt']:.3f}"


def _certified_root(coeffs, lo, hi, width=1e-9):
    found = []
    for br in isolate_real_roots(coeffs):
        a, b = refine_root(coeffs, *br, tol=width)
        assert b - a <= width
        if lo <= a and b <= hi:
            found.append(float((a + b) / 2))
    (r,) = found
    return r


def test_criterion3_volumes():
    with criterion("3", "volumes 2.53774 / 1.8217 to 1e-3; MC 1e7 within 4 SE; roots alpha, -alpha0, alpha1 to 1e-6; < 30 s each") as info:
        published = {"x1_2": 2.53774, "x1_3": 1.8217}
        for name, ref in published.items():
            t0 = time.perf_counter()
            spec = load_fixture(name)
            v = volume_slice(spec)
            mc = volume_monte_carlo(spec, 10**7, seed=20240601)
            dt = time.perf_counter() - t0
            assert abs(v.value - ref) < 1e-3, (name, v.value)
            assert abs(mc.value - v.value) <= 4 * mc.error, (name, mc.value, mc.error)
            assert dt < 30, (name, dt)
            info[name] = f"slice {v.value:.10f} mc {mc.value:.5f}+-{mc.error:.5f} ({dt:.1f}s)"
        # alpha is a corner abscissa of the X1(2) region; alpha0, alpha1 are squares of X1(3) corners
        alpha = _certified_root([-2, 3, 0, 1], 0, 1)
        a0 = -_certified_root([-3, -8, 6, 0, 1], -1, 0)
        a1 = _certified_root([-3, -8, 6, 0, 1], 1, 2)
        for got, digits in ((alpha, "0.59607"), (-a0, "-0.3044"), (a1, "1.3240")):
            # the printed decimals are truncations of the certified value
            assert f"{got:.12f}".startswith(digits), (got, digits)
        c2 = volume_slice(load_fixture("x1_2")).meta["corner_abscissae"]
        c3 = volume_slice(load_fixture("x1_3")).meta["corner_abscissae"]
        assert min(abs(c - alpha) for c in c2) < 1e-6
        assert min(abs(c * c - a0) for c in c3) < 1e-6
        assert min(abs(c * c - a1) for c in c3) < 1e-6
        info["roots"] = f"{alpha:.10f}, {-a0:.10f}, {a1:.10f}"


def _pipeline_constant(name):
    spec = load_fixture(name)
    ga = global_analysis(spec)
    return leading_constant(ga.c_phi, volume_slice(spec).value, spec)


def _sig4(x):
    return float(f"{x:.4g}")


def test_criterion4_leading_constants():
    with criterion("4", "C = 1.87086 / 0.8416 to 4 significant figures; exact-factor audit to 1e-6") as info:
        p2 = _pipeline_constant("x1_2")
        p3 = _pipeline_constant("x1_3")
        assert _sig4(p2.leading_constant) == _sig4(1.87086)
        assert _sig4(p3.leading_constant) == _sig4(0.8416)
        assert f"{p2.leading_constant:.10f}".startswith("1.87086")
        assert f"{p3.leading_constant:.10f}".startswith("0.8416")
        with mpmath.workdps(30):
            a = mpmath.findroot(lambda x: x**3 + 3 * x - 2, 0.6)
            audit = 945 / (2 * mpmath.pi**6) * mpmath.mpf(3) / 2 * p2.volume
            closed = 945 / (2 * mpmath.pi**6) * (2 + mpmath.log(2) + a - mpmath.log(a))
        assert abs(float(audit) - float(closed)) < 1e-6
        assert abs(p2.leading_constant - float(closed)) < 1e-6
        info["C"] = f"{p2.leading_constant:.12f}, {p3.leading_constant:.12f}"
        info["audit_gap"] = f"{abs(float(audit - closed)):.2e}"


def test_criterion5_convergence():
    with criterion("5", "N(T)/T^k within 2% (X1(2), T=30), 5% (X1(3), T=100), 1% of 2/zeta(2) (P(1,1), T=1e4)") as info:
        cases = [("x1_2", 30, 0.02, None), ("x1_3", 100, 0.05, None), ("identity_p11", 10**4, 0.01, 12 / math.pi**2)]
        for name, T, tol, ref in cases:
            spec = load_fixture(name)
            ga = global_analysis(spec)
            pred = _pipeline_constant(name)
            ref = pred.leading_constant if ref is None else ref
            t0 = time.perf_counter()
            n = count_exact(spec, ga, T)
            dt = time.perf_counter() - t0
            fitted = float(n) / float(T) ** float(pred.exponent)
            gap = abs(fitted - ref) / ref
            assert gap < tol, (name, fitted, ref)
            info[name] = f"N={n} fitted={fitted:.6f} gap={gap:.2e} ({dt:.1f}s)"


ORACLE_TS = [Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3)]
# oracle-confirmed regression values of N(1); see the ledger entry on N(1)
PINNED_N1 = {"x1_2": Fraction(3), "x1_3": Fraction(1)}


def test_criterion6_oracle_equivalence():
    with criterion("6a", "count_exact == naive oracle for 4 fixtures x T in {1, 3/2, 2, 3}; N(1) pinned at oracle values") as info:
        for name in ("x1_2", "x1_3", "identity_p11", "identity_p24"):
            spec = load_fixture(name)
            ga = global_analysis(spec)
            got = [count_exact(spec, ga, T) for T in ORACLE_TS]
            want = [naive_count(name, T) for T in ORACLE_TS]
            assert got == want, (name, got, want)
            info[name] = "/".join(str(x) for x in got)
        for name, n1 in PINNED_N1.items():
            assert naive_count(name, 1) == n1
            assert count_exact(load_fixture(name), global_analysis(load_fixture(name)), 1) == n1


@pytest.mark.xfail(strict=True, reason="N(1)=2 contradicts the definitions; the oracle gives 3 (X1(2)) and 1 (X1(3)); see ledger")
def test_criterion6_literal_n1_equals_two():
    with criterion("6b", "literal N(1) = 2 for X1(2) and X1(3) (expected to fail, conflict ledgered)"):
        for name in ("x1_2", "x1_3"):
            spec = load_fixture(name)
            assert count_exact(spec, global_analysis(spec), 1) == 2, (name, count_exact(spec, global_analysis(spec), 1))


def test_criterion7_property_suites():
    from properties import N, PROPERTIES

    with criterion("7", f"property suites ({len(PROPERTIES)} properties, >= {N} cases each)") as info:
        failed = []
        for pname, fn in PROPERTIES:
            try:
                fn()
            except Exception as exc:  # collect all, then fail with the list
                failed.append(f"{pname}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        assert not failed, " | ".join(failed)
        info["passed"] = ", ".join(p for p, _ in PROPERTIES)


def test_criterion8_negative(tmp_path):
    with criterion("8", "e>1 with weights (2,4) rejected as possibly infinite; common zeros rejected with witnesses") as info:
        spec = build_morphism((2, 4), (2, 4), ["x1^2", "x2^2"])
        with pytest.raises(AnalysisError, match="discrepancy set may be infinite"):
            global_analysis(spec)
        witnesses = []
        bad = [
            ((1, 1), (1, 1), ["x1^2", "x1*x2"]),
            ((1, 1), (2, 3), ["x1^2 - x2^2", "x1^3 - x1*x2^2"]),
            ((1, 1), (1, 3), ["x2", "x2^3 + x1*x2^2"]),
        ]
        for w, u, polys in bad:
            with pytest.raises(CommonZeroError) as exc:
                build_morphism(w, u, polys)
            assert exc.value.witness
            witnesses.append(exc.value.witness)
        cfg = tmp_path / "common_zero.json"
        cfg.write_text(json.dumps({"source_weights": [1, 1], "target_weights": [1, 1], "polynomials": ["x1^2", "x1*x2"]}))
        r = subprocess.run([sys.executable, "-m", "wpcount", "validate", "--config", str(cfg)], capture_output=True, text=True)
        assert r.returncode == 2
        assert json.loads(r.stdout)["witness"]
        info["witnesses"] = " | ".join(witnesses)
