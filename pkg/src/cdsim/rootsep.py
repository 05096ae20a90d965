"""Exact real-algebraic tools: rational polynomials, resultants, root bounds,
Sturm root isolation, and the time-bound evaluators built on them.

Irrational constants are replaced by rational under- or over-approximations
in whichever direction keeps an emitted bound valid.
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import permutations
from typing import Iterable, Optional, Sequence, Union

import mpmath

from .errors import DegreeTooSmall, NotSquare, PolynomialSyntaxError, ZeroPolynomial

Number = Union[int, Fraction]


def _trim(coeffs) -> tuple:
    c = [Fraction(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RatPoly:
    """Dense coefficients, lowest degree first."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def x(cls) -> "RatPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, a) -> "RatPoly":
        return cls((a,))

    @classmethod
    def from_roots(cls, roots, lead=1) -> "RatPoly":
        p = cls.const(lead)
        for r in roots:
            p = p * cls((-Fraction(r), 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return RatPoly(tuple(u + v for u, v in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RatPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = RatPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: "RatPoly"):
        if other.is_zero():
            raise ZeroPolynomial("division by the zero polynomial")
        q = [Fraction(0)] * max(self.degree - other.degree + 1, 0)
        r = list(self.coeffs)
        while len(r) >= len(other.coeffs) and r:
            k = len(r) - len(other.coeffs)
            f = r[-1] / other.lc
            q[k] = f
            for i, b in enumerate(other.coeffs):
                r[i + k] -= f * b
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return RatPoly(tuple(q)), RatPoly(tuple(r))

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def derivative(self) -> "RatPoly":
        return RatPoly(tuple(i * a for i, a in enumerate(self.coeffs))[1:])

    def monic(self) -> "RatPoly":
        return RatPoly(tuple(a / self.lc for a in self.coeffs)) if self.coeffs else self

    def compose(self, other: "RatPoly") -> "RatPoly":
        out = RatPoly()
        for a in reversed(self.coeffs):
            out = out * other + a
        return out

    def scale(self, c) -> "RatPoly":
        return RatPoly(tuple(a * c for a in self.coeffs))

    def norm1(self) -> Fraction:
        return sum((abs(a) for a in self.coeffs), Fraction(0))

    def norm_inf(self) -> Fraction:
        return max((abs(a) for a in self.coeffs), default=Fraction(0))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            a = self.coeffs[k]
            if a == 0:
                continue
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if k == 0:
                body = str(mag)
            else:
                coef = "" if mag == 1 else f"{mag} "
                body = coef + ("x" if k == 1 else f"x^{k}")
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        return text + "".join(f" {s} {b}" for s, b in parts[1:])

    @classmethod
    def parse(cls, text: str) -> "RatPoly":
        return parse_poly(text)


def _as_poly(v) -> RatPoly:
    return v if isinstance(v, RatPoly) else RatPoly.const(v)


_TERM = re.compile(
    r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*(x(?:\s*\^\s*(\d+))?)?\s*(?:/\s*(\d+))?\s*")


def parse_poly(text: str) -> RatPoly:
    """Read ``3x^2 - x/2 + 1/3``-style literals (``*`` optional)."""
    s = text.strip()
    if not s:
        raise PolynomialSyntaxError("empty polynomial")
    pos, out, first = 0, RatPoly(), True
    while pos < len(s):
        m = _TERM.match(s, pos)
        sign, coef, xpart, exp, den = m.groups()
        if m.end() == pos or (coef is None and xpart is None) or (sign is None and not first):
            raise PolynomialSyntaxError(f"cannot read {s[pos:]!r} in {text!r}")
        c = Fraction(coef) if coef else Fraction(1)
        if den:
            c /= int(den)
        if sign == "-":
            c = -c
        k = (int(exp) if exp else 1) if xpart else 0
        out = out + RatPoly((0,) * k + (c,))
        pos, first = m.end(), False
    return out


# ------------------------------------------------------------- basic tools

def poly_gcd(p: RatPoly, q: RatPoly) -> RatPoly:
    while not q.is_zero():
        p, q = q, p % q
    return p.monic()


def squarefree(p: RatPoly) -> RatPoly:
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial")
    g = poly_gcd(p, p.derivative())
    return (p // g).monic()


def integerize(p: RatPoly) -> RatPoly:
    """Primitive integer multiple of ``p`` (same roots)."""
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial")
    den = reduce(math.lcm, (a.denominator for a in p.coeffs), 1)
    ints = [int(a * den) for a in p.coeffs]
    g = reduce(math.gcd, ints)
    return RatPoly(tuple(Fraction(a, g) for a in ints))


def standardize(p: RatPoly):
    """``(P~, s(P), s~(P))`` with every nonzero coefficient of P~ at least 1
    in absolute value."""
    if p.is_zero():
        raise ZeroPolynomial("cannot standardize the zero polynomial")
    m = min(Fraction(1), min(abs(a) for a in p.coeffs if a))
    pt = p.scale(1 / m)
    return pt, p.norm1(), pt.norm1()


def cauchy_bound(p: RatPoly) -> Fraction:
    """Every complex root has modulus at most ``|P|_inf / |a_n| + 1``."""
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial")
    if p.degree < 1:
        raise DegreeTooSmall("a constant has no roots to bound")
    return p.norm_inf() / abs(p.lc) + 1


# ----------------------------------------------------------- determinants

def det_fraction(rows: Sequence[Sequence]) -> Fraction:
    """Gaussian elimination over the rationals."""
    a = [[Fraction(v) for v in r] for r in rows]
    n = len(a)
    if any(len(r) != n for r in a):
        raise NotSquare("matrix is not square")
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def interpolate(xs: Sequence, ys: Sequence) -> RatPoly:
    """Lagrange interpolation through distinct rational nodes."""
    out = RatPoly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if yi == 0:
            continue
        term = RatPoly.const(yi)
        for j, xj in enumerate(xs):
            if j != i:
                term = term * RatPoly((-Fraction(xj), 1)).scale(1 / (Fraction(xi) - xj))
        out = out + term
    return out


@dataclass(frozen=True)
class PolyMatrix:
    rows: tuple  # tuple of tuples of RatPoly

    def __post_init__(self):
        rows = tuple(tuple(_as_poly(e) for e in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if any(len(r) != len(rows) for r in rows):
            raise NotSquare(f"{len(rows)} rows of lengths {[len(r) for r in rows]}")

    @property
    def size(self) -> int:
        return len(self.rows)

    def at(self, y) -> list:
        return [[e(Fraction(y)) for e in r] for r in self.rows]

    def det(self) -> RatPoly:
        """Evaluation at ``deg + 1`` integer nodes, then interpolation."""
        if not self.rows:
            return RatPoly.const(1)
        bound = sum(max(max(e.degree, 0) for e in r) for r in self.rows)
        xs = list(range(bound + 1))
        return interpolate(xs, [det_fraction(self.at(x)) for x in xs])

    def row_norms(self) -> list:
        return [sum((e.norm1() for e in r), Fraction(0)) for r in self.rows]


def det_leibniz(m: PolyMatrix) -> RatPoly:
    """Permutation expansion; only for small matrices."""
    n = m.size
    out = RatPoly()
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = RatPoly.const(-1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            term = term * m.rows[i][j]
        out = out + term
    return out


def hadamard_bound(m: PolyMatrix) -> Fraction:
    """Product of the row 1-seminorms, an upper bound on ``|det M|_1``."""
    if not isinstance(m, PolyMatrix):
        m = PolyMatrix(m)
    return math.prod(m.row_norms(), start=Fraction(1))


def sylvester_matrix(p: RatPoly, q: RatPoly) -> PolyMatrix:
    """Rows: ``deg q`` shifted copies of p, then ``deg p`` shifted copies of q."""
    if p.is_zero() or q.is_zero():
        raise ZeroPolynomial("resultant of a zero polynomial")
    n, m = p.degree, q.degree
    size = n + m
    rows = []
    for i in range(m):
        rows.append([RatPoly()] * i + [RatPoly.const(a) for a in reversed(p.coeffs)] + [RatPoly()] * (size - n - 1 - i))
    for i in range(n):
        rows.append([RatPoly()] * i + [RatPoly.const(a) for a in reversed(q.coeffs)] + [RatPoly()] * (size - m - 1 - i))
    return PolyMatrix(tuple(tuple(r) for r in rows))


def resultant(p: RatPoly, q: RatPoly) -> Fraction:
    m = sylvester_matrix(p, q)
    if m.size == 0:
        return Fraction(1)
    return det_fraction(m.at(0))


def resultant_y(q: RatPoly, p: RatPoly) -> RatPoly:
    """``R(y) = res_x(Q(x), y - P(x))``."""
    if q.is_zero() or p.is_zero():
        raise ZeroPolynomial("resultant of a zero polynomial")
    if p.degree < 1:
        raise DegreeTooSmall("y - P(x) needs P of degree at least 1")
    xs = list(range(q.degree + 1))
    ys = [resultant(q, RatPoly.const(y) - p) for y in xs]
    return interpolate(xs, ys)


# ------------------------------------------------------------------- Sturm

def sturm_sequence(p: RatPoly) -> list:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def sign_variations(seq: Sequence[RatPoly], x) -> int:
    signs = [s for s in (f(x) for f in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(p: RatPoly, a, b, seq=None) -> int:
    """Distinct real roots in ``(a, b]`` of a squarefree p."""
    seq = seq or sturm_sequence(p)
    return sign_variations(seq, a) - sign_variations(seq, b)


def _split_point(p: RatPoly, a, b):
    m = (a + b) / 2
    j = 2
    while p(m) == 0:
        j += 1
        m = a + (b - a) * (Fraction(1, 2) + Fraction(1, 2 ** j))
    return m


def isolate_real_roots(p: RatPoly, interval=None, eps=Fraction(1, 2 ** 20)) -> list:
    """Disjoint rational intervals ``(lo, hi)``, each holding exactly one root
    of ``p`` in the closed interval, sorted.  Exact rational roots on an
    endpoint of ``interval`` come back as degenerate intervals."""
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial")
    p = squarefree(p)
    if p.degree < 1:
        return []
    eps = Fraction(eps)
    B = cauchy_bound(p) + 1
    seq = sturm_sequence(p)
    lo, hi = (Fraction(interval[0]), Fraction(interval[1])) if interval else (-B, B)
    out = []
    stack = [(-B, B)]
    while stack:
        a, b = stack.pop()
        n = count_roots(p, a, b, seq)
        if n == 0 or b < lo or a > hi:
            continue
        if n == 1:
            if a >= lo and b <= hi and b - a < eps:
                out.append((a, b))
                continue
            for e in (lo, hi):
                if a < e < b and p(e) == 0:
                    out.append((e, e))
                    break
            else:
                m = _split_point(p, a, b)
                stack += [(a, m), (m, b)]
            continue
        m = _split_point(p, a, b)
        stack += [(a, m), (m, b)]
    return sorted(out)


def rsep_exact(p: RatPoly, interval=(-1, 1), eps=Fraction(1, 2 ** 20)) -> Optional[tuple]:
    """Bracket ``(lower, upper)`` on the least gap between distinct real
    roots in ``interval``; None with fewer than two roots.  Refines until the
    lower end is positive."""
    eps = Fraction(eps)
    while True:
        iv = isolate_real_roots(p, interval, eps)
        if len(iv) < 2:
            return None
        lower = min(b[0] - a[1] for a, b in zip(iv, iv[1:]))
        upper = min(b[1] - a[0] for a, b in zip(iv, iv[1:]))
        if lower > 0:
            return lower, upper
        eps /= 16


# ------------------------------------------------------------------ bounds

def _sqrt_lower(n: int, bits: int = 64) -> Fraction:
    return Fraction(math.isqrt(n << (2 * bits)), 1 << bits)


def _sqrt_upper(n: int, bits: int = 64) -> Fraction:
    r = math.isqrt(n << (2 * bits))
    return Fraction(r if r * r == n << (2 * bits) else r + 1, 1 << bits)


def _pow_half_upper(n: int) -> Fraction:
    """Rational upper bound on ``n^(n/2 + 1)``."""
    if n % 2 == 0:
        return Fraction(n ** (n // 2 + 1))
    return n ** ((n + 1) // 2) * _sqrt_upper(n)


def rsep_lower_bound(p: RatPoly) -> Fraction:
    """``2 sqrt 2 / (n^(n/2+1) (s~ + 1)^n)`` for the primitive integer multiple
    of ``p``, rounded down."""
    if p.is_zero():
        raise ZeroPolynomial("zero polynomial")
    n = p.degree
    if n < 2:
        raise DegreeTooSmall(f"degree {n} < 2")
    _, _, st = standardize(integerize(p))
    return _sqrt_lower(8) / (_pow_half_upper(n) * (st + 1) ** n)


def rsep_lower_bound_interval(p: RatPoly, a, b) -> Fraction:
    """Same bound for roots in ``[a, b]`` through ``x = c + h t``."""
    a, b = Fraction(a), Fraction(b)
    c, h = (a + b) / 2, (b - a) / 2
    q = p.compose(RatPoly((c, h)))
    return h * rsep_lower_bound(q)


def min_value_bound(p: RatPoly, q: RatPoly) -> Fraction:
    """Lower bound on ``|P~(mu)|`` at a root ``mu`` of ``Q`` with ``P(mu) != 0``,
    namely ``1 / ((|P~|_1 + 1)^m |Q~|_1^n + 1)`` with ``n = deg P``,
    ``m = deg Q``."""
    pt, _, sp = standardize(p)
    qt, _, sq = standardize(q)
    n, m = pt.degree, qt.degree
    return 1 / ((sp + 1) ** m * sq ** n + 1)


def crit_value_bound(p: RatPoly) -> Fraction:
    """``1 / (n^n (|P~|_1 + 1)^(2n-1))`` at critical points that are not roots."""
    pt, _, sp = standardize(p)
    n = pt.degree
    if n < 2:
        raise DegreeTooSmall(f"degree {n} < 2")
    return 1 / (n ** n * (sp + 1) ** (2 * n - 1))


def halting_bound_1d(n: int, D: Number):
    """``D^(2^n)``: exact big integer for integer D."""
    D = Fraction(D)
    if D <= 1:
        raise ValueError("D must exceed 1")
    out = D ** (2 ** n)
    return out.numerator if out.denominator == 1 else out


@dataclass(frozen=True)
class LogOf:
    """The real number ``ln(value)`` for a positive rational ``value``."""

    value: Fraction

    def mp(self):
        return mpmath.log(_mpf(self.value))


def _mpf(v):
    if isinstance(v, LogOf):
        return v.mp()
    v = Fraction(v)
    return mpmath.mpf(v.numerator) / v.denominator


@dataclass(frozen=True)
class BoundParams:
    C: Fraction
    kappa: Union[Fraction, LogOf]
    r: Fraction
    n: int
    D: Fraction = Fraction(2)

    def __post_init__(self):
        if Fraction(self.C) <= 0 or not 0 < Fraction(self.r) < 1 or self.n < 0:
            raise ValueError("need C > 0, 0 < r < 1, n >= 0")
        with mpmath.workdps(30):
            if _mpf(self.kappa) <= 0:
                raise ValueError("kappa must be positive")


def anosov_mixing_steps(params: BoundParams, max_dps: int = 2000) -> int:
    """Least integer ``N0 >= 0`` with ``r^n > C exp(-N0 kappa)``, that is the
    least ``N0 > (ln C - n ln r) / kappa``.

    Evaluated in interval arithmetic, raising the precision until the floor
    is unambiguous.  If the threshold is (numerically) an integer T the
    answer T + 1 is returned, which always satisfies the inequality."""
    dps = 30
    iv = mpmath.iv
    saved = iv.dps
    try:
        while True:
            iv.dps = dps
            C, r = _frac_iv(params.C), _frac_iv(params.r)
            kappa = (iv.log(_frac_iv(params.kappa.value))
                     if isinstance(params.kappa, LogOf) else _frac_iv(params.kappa))
            T = (iv.log(C) - params.n * iv.log(r)) / kappa
            lo, hi = int(mpmath.floor(T.a)), int(mpmath.floor(T.b))
            if lo == hi:
                return max(lo + 1, 0)
            if dps >= max_dps:
                return max(hi + 1, 0)
            dps *= 2
    finally:
        iv.dps = saved


def _frac_iv(v):
    """Enclosing interval of a rational at the current interval precision."""
    v = Fraction(v)
    return mpmath.iv.mpf(v.numerator) / v.denominator


def mixing_inequality_holds(params: BoundParams, N0: int, dps: int = 60) -> bool:
    """``r^n > C exp(-N0 kappa)``, evaluated at high precision."""
    with mpmath.workdps(dps):
        return _mpf(params.r) ** params.n > _mpf(params.C) * mpmath.exp(-N0 * _mpf(params.kappa))


# ----------------------------------------------------------------- reports

def read_corpus(text: str) -> list:
    """One polynomial per line; ``#`` starts a comment."""
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(parse_poly(line))
    return out


def bounds_report(polys: Iterable[RatPoly], interval=(-1, 1)) -> list:
    rows = []
    for p in polys:
        row = {"polynomial": str(p), "degree": p.degree, "rsep_bound": "", "rsep_lower": "", "rsep_upper": "",
               "cauchy": ""}
        if p.degree >= 1:
            row["cauchy"] = str(cauchy_bound(p))
        if p.degree >= 2:
            row["rsep_bound"] = str(rsep_lower_bound(p))
            br = rsep_exact(p, interval)
            if br:
                row["rsep_lower"], row["rsep_upper"] = str(br[0]), str(br[1])
        rows.append(row)
    return rows


def rows_to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    return buf.getvalue()
