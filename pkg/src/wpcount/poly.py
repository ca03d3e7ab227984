"""Small exact polynomial toolkit: parsing, univariate gcd/resultant, bivariate resultant.

Univariate polynomials are lists of Fractions, lowest degree first.
Multivariate polynomials are dicts mapping exponent tuples to Fractions.
"""
from __future__ import annotations

import ast
import re
from fractions import Fraction

_VAR = re.compile(r"^x([1-9][0-9]*)$")


class PolynomialParseError(ValueError):
    def __init__(self, msg: str, text: str = "", col: int | None = None):
        loc = f" at column {col}" if col is not None else ""
        super().__init__(f"{msg}{loc} in {text!r}" if text else msg)
        self.col = col


# ---- multivariate dict polynomials -------------------------------------------------


def _padd(p: dict, q: dict, sign: int = 1) -> dict:
    out = dict(p)
    for k, c in q.items():
        v = out.get(k, 0) + sign * c
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def _pmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            v = out.get(k, 0) + c1 * c2
            if v:
                out[k] = v
            else:
                out.pop(k, None)
    return out


def _const(c, m: int) -> dict:
    c = Fraction(c)
    return {(0,) * m: c} if c else {}


def parse_polynomial(text: str, m: int) -> dict:
    """Parse a polynomial in x1..xm with integer or p/q rational coefficients."""
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise PolynomialParseError("syntax error", text, exc.offset) from None

    def walk(node) -> dict:
        col = getattr(node, "col_offset", None)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                raise PolynomialParseError("only integer literals allowed", text, col)
            return _const(node.value, m)
        if isinstance(node, ast.Name):
            mt = _VAR.match(node.id)
            if not mt or int(mt.group(1)) > m:
                raise PolynomialParseError(f"unknown variable {node.id!r}", text, col)
            e = [0] * m
            e[int(mt.group(1)) - 1] = 1
            return {tuple(e): Fraction(1)}
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = walk(node.operand)
            return inner if isinstance(node.op, ast.UAdd) else {k: -c for k, c in inner.items()}
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return _padd(walk(node.left), walk(node.right))
            if isinstance(node.op, ast.Sub):
                return _padd(walk(node.left), walk(node.right), -1)
            if isinstance(node.op, ast.Mult):
                return _pmul(walk(node.left), walk(node.right))
            if isinstance(node.op, ast.Div):
                den = walk(node.right)
                if set(den) - {(0,) * m} or not den:
                    raise PolynomialParseError("division only by nonzero constants", text, col)
                c = den[(0,) * m]
                return {k: v / c for k, v in walk(node.left).items()}
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and type(node.right.value) is int and node.right.value >= 0):
                    raise PolynomialParseError("exponent must be a nonnegative integer", text, col)
                base = walk(node.left)
                out = _const(1, m)
                for _ in range(node.right.value):
                    out = _pmul(out, base)
                return out
        raise PolynomialParseError(f"unsupported syntax {type(node).__name__}", text, col)

    return walk(tree.body)


def format_polynomial(terms: dict) -> str:
    if not terms:
        return "0"
    parts = []
    for k in sorted(terms, reverse=True):
        c = terms[k]
        mono = "*".join(
            f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(k) if e
        )
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        parts.append(("-" if c < 0 else "+", body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sg, body in parts[1:]:
        s += f" {sg} {body}"
    return s


# ---- univariate ----------------------------------------------------------------------


def trim(p: list) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p: list) -> int:
    return len(trim(p)) - 1


def deriv(p: list) -> list:
    return [i * c for i, c in enumerate(p)][1:]


def divmod_poly(a: list, b: list) -> tuple[list, list]:
    a = [Fraction(c) for c in trim(a)]
    b = [Fraction(c) for c in trim(b)]
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / b[-1]
        q[k] = c
        for i, bc in enumerate(b):
            a[i + k] -= c * bc
        a = trim(a)
    return q, a


def gcd_poly(a: list, b: list) -> list:
    """Monic gcd; gcd(0, 0) = [] (the zero polynomial)."""
    a, b = trim([Fraction(c) for c in a]), trim([Fraction(c) for c in b])
    while b:
        a, b = b, divmod_poly(a, b)[1]
    if not a:
        return []
    return [c / a[-1] for c in a]


def squarefree(p: list) -> list:
    p = trim([Fraction(c) for c in p])
    if len(p) <= 2:
        return p
    g = gcd_poly(p, deriv(p))
    return divmod_poly(p, g)[0] if len(g) > 1 else p


def det(mat: list) -> Fraction:
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    d = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            d = -d
        pv = a[col][col]
        d *= pv
        for r in range(col + 1, n):
            f = a[r][col] / pv
            if f:
                row, prow = a[r], a[col]
                for c in range(col, n):
                    row[c] -= f * prow[c]
    return d


def resultant(p: list, q: list, dp: int | None = None, dq: int | None = None) -> Fraction:
    """Sylvester resultant with formal degrees dp, dq (defaults: actual degrees)."""
    p = [Fraction(c) for c in p]
    q = [Fraction(c) for c in q]
    dp = degree(p) if dp is None else dp
    dq = degree(q) if dq is None else dq
    p = (p + [Fraction(0)] * (dp + 1))[: dp + 1]
    q = (q + [Fraction(0)] * (dq + 1))[: dq + 1]
    if dp < 0 or dq < 0:
        return Fraction(0)
    if dp == 0 and dq == 0:
        return Fraction(1)
    n = dp + dq
    rows = []
    for i in range(dq):
        row = [Fraction(0)] * n
        for j, c in enumerate(reversed(p)):
            row[i + j] = c
        rows.append(row)
    for i in range(dp):
        row = [Fraction(0)] * n
        for j, c in enumerate(reversed(q)):
            row[i + j] = c
        rows.append(row)
    return det(rows)


def eval_poly(p: list, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def interpolate(xs: list, ys: list) -> list:
    """Exact Newton interpolation; returns coefficients lowest first."""
    n = len(xs)
    coef = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    out = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # out = out * (x - xs[i]) + coef[i]
        new = [Fraction(0)] * n
        for k in range(n - 1):
            new[k + 1] += out[k]
            new[k] -= xs[i] * out[k]
        new[0] += coef[i]
        out = new
    return trim(out)


# ---- bivariate (variables a, b; keys (i, j) for a^i b^j) ----------------------------


def coeffs_in_b(terms: dict, a) -> list:
    """Specialize a -> value and return the univariate coefficient list in b."""
    dmax = max((k[1] for k in terms), default=0)
    out = [0] * (dmax + 1)
    for (i, j), c in terms.items():
        out[j] += c * a**i
    return out


def resultant_in_b(p: dict, q: dict) -> list:
    """Res_b(p, q) as an exact univariate polynomial in a, using formal b-degrees."""
    dp = max(k[1] for k in p)
    dq = max(k[1] for k in q)
    ap = max(k[0] for k in p)
    aq = max(k[0] for k in q)
    bound = dq * ap + dp * aq
    xs = [Fraction(i) for i in range(bound + 1)]
    ys = [resultant(coeffs_in_b(p, x), coeffs_in_b(q, x), dp, dq) for x in xs]
    return interpolate(xs, ys)


def leading_in_b(terms: dict) -> list:
    dmax = max(k[1] for k in terms)
    amax = max(k[0] for k in terms)
    out = [Fraction(0)] * (amax + 1)
    for (i, j), c in terms.items():
        if j == dmax:
            out[i] += c
    return trim(out)


def d_db(terms: dict) -> dict:
    return {(i, j - 1): c * j for (i, j), c in terms.items() if j > 0}
