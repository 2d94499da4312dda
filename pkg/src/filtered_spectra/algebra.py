"""Exact polynomial algebra for algebraic Stieltjes transforms.

Everything here runs over exact rationals: univariate polynomials are
lists of Fractions indexed by degree, bivariate polynomials are sparse
(degx, degy) -> Fraction tables.  The module provides

* Sylvester resultants (Bareiss fraction-free determinants, generic over
  the coefficient ring, so the same engine eliminates a variable from
  polynomials whose coefficients are themselves polynomials);
* discriminants with the classical sign (-1)^(n(n-1)/2) res(F, F') / lc;
* real-root isolation by Sturm sequences + bisection;
* numerical certification of a candidate curve F(lambda, S(lambda)) = 0
  against the fixed-point solver;
* the rank-one elimination pipeline: from a rational (or polynomial
  relation) transform S_f of the profile distribution to the algebraic
  curve satisfied by the limit Stieltjes transform, via the master
  identity lambda*S = 1 + w^2 = (lambda/w) S_f(lambda/w);
* a self-check of the banded-walk fixed-point recursions against
  truncated path sums and contour quadrature.

Walk-recursion fine print: the fixed-point equations implemented are

    U = (B + A(1+U)C)(1+U),   V = (B + C(1+V)A)(1+V),
    W = (D + blockdiag(C(1+V)A, 0, A(1+U)C))(1+W),

the "window steps vs. complete excursions" decomposition.  (Dropping the
trailing (1+U) after B — a form that sometimes appears — fails against
direct enumeration already at walks of length two.)
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactnum import rat
from .kernel import Kernel

__all__ = [
    "BivariatePolynomial",
    "UnivariateRationalFunction",
    "RootInterval",
    "resultant",
    "auxiliary_resultant",
    "discriminant",
    "real_roots",
    "verify_curve",
    "rank_one_eliminate",
    "random_walk_recursion_check",
]


# ---------------------------------------------------------------------------
# univariate polynomials: lists of Fractions, index = degree, [] = 0
# ---------------------------------------------------------------------------

def _pnorm(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _pdeg(p):
    return len(p) - 1


def _padd(p, q):
    n = max(len(p), len(q))
    return _pnorm([
        (p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
        for i in range(n)])


def _psub(p, q):
    n = max(len(p), len(q))
    return _pnorm([
        (p[i] if i < len(p) else 0) - (q[i] if i < len(q) else 0)
        for i in range(n)])


def _pmul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _pnorm(out)


def _pscale(p, c):
    if c == 0:
        return []
    return [a * c for a in p]


def _pdivmod(p, q):
    """Exact field division with remainder over Q."""
    q = _pnorm(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    quo = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    while _pnorm(r) and len(_pnorm(r)) >= len(q):
        r = _pnorm(r)
        c = r[-1] / q[-1]
        d = len(r) - len(q)
        quo[d] = c
        for i, b in enumerate(q):
            r[i + d] -= c * b
    return _pnorm(quo), _pnorm(r)


def _pdivexact(p, q):
    quo, rem = _pdivmod(p, q)
    if rem:
        raise ArithmeticError("polynomial division was not exact")
    return quo


def _pgcd(p, q):
    """Monic gcd over Q."""
    a, b = _pnorm(p), _pnorm(q)
    while b:
        a, b = b, _pdivmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _plcm(p, q):
    g = _pgcd(p, q)
    if not g:
        return []
    return _pdivexact(_pmul(p, q), g)


def _pderiv(p):
    return _pnorm([i * c for i, c in enumerate(p)][1:])


def _peval(p, x):
    acc = 0 * x if not isinstance(x, (int, Fraction)) else Fraction(0)
    for c in reversed(p):
        acc = acc * x + (c if not isinstance(x, complex) else complex(c))
    return acc


def _pcontent(polys):
    """Monic gcd of a family of univariate polynomials."""
    g = []
    for p in polys:
        g = _pgcd(g, p)
        if g == [Fraction(1)]:
            break
    return g


# ---------------------------------------------------------------------------
# bivariate polynomials
# ---------------------------------------------------------------------------

class BivariatePolynomial:
    """Sparse exact polynomial in two variables.

    coeffs maps (degx, degy) -> Fraction, zeros dropped.  The variables
    are positional; curves use (x, y) = (lambda, S), profile relations
    use (x, y) = (m, v).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        clean = {}
        for (dx, dy), v in coeffs.items():
            v = rat(v)
            if v != 0:
                clean[(int(dx), int(dy))] = v
        self.coeffs = clean

    @classmethod
    def from_entries(cls, entries):
        """[[degx, degy, value], ...] with rational-string values allowed."""
        acc = {}
        for dx, dy, v in entries:
            key = (int(dx), int(dy))
            acc[key] = acc.get(key, Fraction(0)) + rat(v)
        return cls(acc)

    @classmethod
    def constant(cls, v):
        return cls({(0, 0): rat(v)})

    def to_entries(self):
        return [[dx, dy, str(v)] for (dx, dy), v in sorted(self.coeffs.items())]

    # -- structure -------------------------------------------------------

    @property
    def is_zero(self):
        return not self.coeffs

    def degree(self, var):
        if not self.coeffs:
            return -1
        pick = 0 if var == "x" else 1
        return max(k[pick] for k in self.coeffs)

    def as_poly_in(self, var):
        """List over var-degree of univariate coefficient lists in the other."""
        if var not in ("x", "y"):
            raise ValueError("var must be 'x' or 'y'")
        d = self.degree(var)
        if d < 0:
            return []
        other_deg = [0] * (d + 1)
        for (dx, dy) in self.coeffs:
            a, b = (dx, dy) if var == "x" else (dy, dx)
            other_deg[a] = max(other_deg[a], b)
        out = [[Fraction(0)] * (other_deg[a] + 1) for a in range(d + 1)]
        for (dx, dy), v in self.coeffs.items():
            a, b = (dx, dy) if var == "x" else (dy, dx)
            out[a][b] = v
        return [_pnorm(row) for row in out]

    @classmethod
    def from_poly_in(cls, var, rows):
        acc = {}
        for a, row in enumerate(rows):
            for b, v in enumerate(row):
                if v != 0:
                    key = (a, b) if var == "x" else (b, a)
                    acc[key] = v
        return cls(acc)

    def leading_coeff_in(self, var):
        """Univariate coefficient list (in the other variable) of the top power."""
        rows = self.as_poly_in(var)
        return rows[-1] if rows else []

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return BivariatePolynomial(acc)

    def __sub__(self, other):
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, Fraction(0)) - v
        return BivariatePolynomial(acc)

    def __neg__(self):
        return BivariatePolynomial({k: -v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return BivariatePolynomial(
                {k: v * other for k, v in self.coeffs.items()})
        acc = {}
        for (ax, ay), u in self.coeffs.items():
            for (bx, by), v in other.coeffs.items():
                key = (ax + bx, ay + by)
                acc[key] = acc.get(key, Fraction(0)) + u * v
        return BivariatePolynomial(acc)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, BivariatePolynomial) and \
            self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def evaluate(self, x, y):
        """Horner in y, then x; works for complex and exact arguments."""
        rows = self.as_poly_in("y")
        acc = 0j if isinstance(x, complex) or isinstance(y, complex) else Fraction(0)
        for row in reversed(rows):
            acc = acc * y + _peval(row, x)
        return acc

    # -- normalization ---------------------------------------------------

    def strip_monomials(self):
        """Divide out the largest x^a y^b monomial factor; return (poly, a, b)."""
        if not self.coeffs:
            return self, 0, 0
        a = min(k[0] for k in self.coeffs)
        b = min(k[1] for k in self.coeffs)
        if a == 0 and b == 0:
            return self, 0, 0
        return BivariatePolynomial(
            {(dx - a, dy - b): v for (dx, dy), v in self.coeffs.items()}), a, b

    def strip_content(self):
        """Divide out the gcd over Q[x] of the y-coefficients, then over Q[y]."""
        out = self
        for var in ("y", "x"):
            rows = out.as_poly_in(var)
            if not rows:
                return out
            g = _pcontent(rows)
            if _pdeg(g) > 0:
                rows = [_pdivexact(r, g) for r in rows]
                out = BivariatePolynomial.from_poly_in(var, rows)
        return out

    def normalized(self):
        """Monomials and content stripped, integer coefficients, content 1,
        positive coefficient on the lex-largest (degy, degx) monomial."""
        out, _, _ = self.strip_monomials()
        out = out.strip_content()
        if not out.coeffs:
            return out
        den = 1
        for v in out.coeffs.values():
            den = den * v.denominator // math.gcd(den, v.denominator)
        num = 0
        for v in out.coeffs.values():
            num = math.gcd(num, abs(v.numerator * (den // v.denominator)))
        scale = Fraction(den, num)
        lead = max(out.coeffs, key=lambda k: (k[1], k[0]))
        if out.coeffs[lead] < 0:
            scale = -scale
        return BivariatePolynomial(
            {k: v * scale for k, v in out.coeffs.items()})

    def proportional_to(self, other) -> bool:
        """True when self = c * other for some nonzero rational c."""
        if self.is_zero or other.is_zero:
            return self.is_zero and other.is_zero
        if set(self.coeffs) != set(other.coeffs):
            return False
        key = next(iter(self.coeffs))
        c = self.coeffs[key] / other.coeffs[key]
        return all(v == c * other.coeffs[k] for k, v in self.coeffs.items())

    def pretty(self, xname="x", yname="y"):
        if not self.coeffs:
            return "0"
        bits = []
        for (dx, dy), v in sorted(self.coeffs.items(),
                                  key=lambda kv: (-kv[0][1], -kv[0][0])):
            mono = "".join(
                f"{n}^{d}" if d > 1 else (n if d == 1 else "")
                for n, d in ((xname, dx), (yname, dy)))
            coeff = str(v) if (abs(v) != 1 or not mono) else ("-" if v < 0 else "")
            bits.append(f"{coeff}{'*' if coeff not in ('', '-') and mono else ''}{mono}")
        return " + ".join(bits).replace("+ -", "- ")

    def __repr__(self):
        return f"BivariatePolynomial({self.pretty()})"


# ---------------------------------------------------------------------------
# resultants: Sylvester matrix + Bareiss, generic over the entry ring
# ---------------------------------------------------------------------------

class _Ring:
    """Minimal integral-domain interface for the Bareiss elimination."""

    def __init__(self, zero, one, add, sub, mul, divexact, is_zero):
        self.zero, self.one = zero, one
        self.add, self.sub, self.mul = add, sub, mul
        self.divexact, self.is_zero = divexact, is_zero


_UNI_RING = _Ring(
    zero=[], one=[Fraction(1)],
    add=_padd, sub=_psub, mul=_pmul, divexact=_pdivexact,
    is_zero=lambda p: not p)

_BP_ZERO = BivariatePolynomial({})
_BP_ONE = BivariatePolynomial({(0, 0): Fraction(1)})


def _bp_divexact(p, q):
    """Exact division in Q[x][y] (raises if not exact)."""
    qrows = q.as_poly_in("y")
    if not qrows:
        raise ZeroDivisionError("bivariate division by zero")
    rrows = p.as_poly_in("y")
    out = []
    while rrows and len(rrows) >= len(qrows):
        c = _pdivexact(rrows[-1], qrows[-1])
        d = len(rrows) - len(qrows)
        while len(out) < d + 1:
            out.append([])
        out[d] = c
        for i, b in enumerate(qrows):
            rrows[i + d] = _psub(rrows[i + d], _pmul(c, b))
        while rrows and not rrows[-1]:
            rrows.pop()
    if rrows:
        raise ArithmeticError("bivariate division was not exact")
    return BivariatePolynomial.from_poly_in("y", out)


_BP_RING = _Ring(
    zero=_BP_ZERO, one=_BP_ONE,
    add=lambda a, b: a + b, sub=lambda a, b: a - b, mul=lambda a, b: a * b,
    divexact=_bp_divexact, is_zero=lambda p: p.is_zero)


def _bareiss_det(m, ring):
    """Fraction-free determinant over an integral domain."""
    n = len(m)
    if n == 0:
        return ring.one
    m = [row[:] for row in m]
    sign = 1
    prev = ring.one
    for k in range(n - 1):
        if ring.is_zero(m[k][k]):
            for r in range(k + 1, n):
                if not ring.is_zero(m[r][k]):
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return ring.zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                t = ring.sub(ring.mul(m[i][j], m[k][k]),
                             ring.mul(m[i][k], m[k][j]))
                m[i][j] = ring.divexact(t, prev)
            m[i][k] = ring.zero
        prev = m[k][k]
    det = m[n - 1][n - 1]
    if sign < 0:
        det = ring.sub(ring.zero, det)
    return det


def _sylvester_resultant(p, q, ring):
    """res(p, q) of coefficient lists (ascending) over the given ring."""
    p = list(p)
    q = list(q)
    while p and ring.is_zero(p[-1]):
        p.pop()
    while q and ring.is_zero(q[-1]):
        q.pop()
    if not p or not q:
        raise ValueError("resultant of the zero polynomial")
    m, n = len(p) - 1, len(q) - 1
    if m == 0 and n == 0:
        raise ValueError("both polynomials are constant in the eliminated variable")
    if m == 0:
        out = ring.one
        for _ in range(n):
            out = ring.mul(out, p[0])
        return out
    if n == 0:
        out = ring.one
        for _ in range(m):
            out = ring.mul(out, q[0])
        return out
    size = m + n
    rows = []
    pd = list(reversed(p))  # descending
    qd = list(reversed(q))
    for i in range(n):
        rows.append([ring.zero] * i + pd + [ring.zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([ring.zero] * i + qd + [ring.zero] * (size - n - 1 - i))
    return _bareiss_det(rows, ring)


def resultant(P: BivariatePolynomial, Q: BivariatePolynomial, eliminate: str):
    """res of two bivariate polynomials, eliminating 'x' or 'y'.

    Returns the univariate coefficient list (ascending, Fractions) in the
    surviving variable.  Errors if both inputs are constant in the
    eliminated variable or either is zero.
    """
    rows_p = P.as_poly_in(eliminate)
    rows_q = Q.as_poly_in(eliminate)
    return _pnorm(_sylvester_resultant(rows_p, rows_q, _UNI_RING))


def auxiliary_resultant(p, q) -> BivariatePolynomial:
    """res over an auxiliary variable whose coefficients are bivariate.

    p, q: coefficient lists (ascending in the auxiliary variable) whose
    entries are BivariatePolynomials or rationals.  This is the engine
    behind the w-elimination: three variables total, one eliminated.
    """
    def coerce(c):
        return c if isinstance(c, BivariatePolynomial) \
            else BivariatePolynomial.constant(c)
    return _sylvester_resultant(
        [coerce(c) for c in p], [coerce(c) for c in q], _BP_RING)


def discriminant(F: BivariatePolynomial, var: str = "y"):
    """Discriminant of F with respect to var, classical normalization.

    disc = (-1)^(n(n-1)/2) res(F, dF/dvar) / lc, an exact univariate
    coefficient list in the other variable; n = deg_var F >= 1 required.
    """
    n = F.degree(var)
    if n < 1:
        raise ValueError("discriminant needs degree >= 1 in the variable")
    rows = F.as_poly_in(var)
    deriv = [_pscale(rows[i], i) for i in range(1, len(rows))]
    res = _sylvester_resultant(rows, deriv, _UNI_RING)
    lead = rows[-1]
    out = _pdivexact(res, lead)
    if (n * (n - 1) // 2) % 2:
        out = _pscale(out, -1)
    return _pnorm(out)


# ---------------------------------------------------------------------------
# real roots: Sturm isolation + bisection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootInterval:
    """An isolating interval [lo, hi] for one real root, width <= 1e-12."""

    lo: Fraction
    hi: Fraction

    @property
    def midpoint(self) -> float:
        return float((self.lo + self.hi) / 2)

    @property
    def width(self) -> float:
        return float(self.hi - self.lo)


def _sturm_chain(p):
    chain = [_pnorm(p), _pderiv(p)]
    while chain[-1] and _pdeg(chain[-1]) > 0:
        r = _pdivmod(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append(_pscale(r, -1))
    if not chain[-1]:
        chain.pop()
    return chain


def _variations(chain, x):
    signs = []
    for p in chain:
        v = _peval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


_WIDTH = Fraction(1, 10 ** 12)


def _bisect_root(pf, lo, hi):
    """Shrink a sign-changing bracket to width 1e-12 (exact rational ends)."""
    flo = _peval(pf, lo)
    while hi - lo > _WIDTH:
        mid = (lo + hi) / 2
        v = _peval(pf, mid)
        if v == 0:
            return RootInterval(mid, mid)
        if (v > 0) == (flo > 0):
            lo, flo = mid, v
        else:
            hi = mid
    return RootInterval(lo, hi)


def real_roots(p) -> list:
    """Isolating intervals (refined to width 1e-12) for all real roots.

    p: coefficient sequence, ascending degree; entries anything rat()
    accepts.  Roots are reported once each regardless of multiplicity
    (isolation runs on the squarefree part), sorted increasing.
    """
    p = _pnorm([rat(c) for c in p])
    if not p:
        raise ValueError("real_roots of the zero polynomial")
    pf = _pdivexact(p, _pgcd(p, _pderiv(p))) if _pdeg(p) > 0 else []
    roots = []
    if not pf:
        return roots
    if pf[0] == 0:  # squarefree, so x divides exactly once
        roots.append(RootInterval(Fraction(0), Fraction(0)))
        pf = pf[1:]
    if _pdeg(pf) < 1:
        return roots
    bound = 1 + max(abs(c) for c in pf[:-1]) / abs(pf[-1])
    chain = _sturm_chain(pf)

    def probe(lo, hi):
        for k in range(1, _pdeg(pf) + 3):
            x = lo + (hi - lo) * Fraction(k, 2 * k + 1)
            if _peval(pf, x) != 0:
                return x
        raise AssertionError("could not find a non-root probe point")

    stack = [(-bound, bound,
              _variations(chain, -bound) - _variations(chain, bound))]
    while stack:
        lo, hi, count = stack.pop()
        if count <= 0:
            continue
        if count == 1:
            roots.append(_bisect_root(pf, lo, hi))
            continue
        mid = probe(lo, hi)
        left = _variations(chain, lo) - _variations(chain, mid)
        stack.append((lo, mid, left))
        stack.append((mid, hi, count - left))
    roots.sort(key=lambda r: r.midpoint)
    return roots


# ---------------------------------------------------------------------------
# numerical curve certification
# ---------------------------------------------------------------------------

def verify_curve(F: BivariatePolynomial, kern: Kernel, sample_lambdas) -> float:
    """Max normalized residual |F(lam, S(lam))| over the sample points.

    S comes from the color fixed-point solver (continued from the
    high-imaginary anchor).  The residual at each point is divided by
    max(1, |lc_y F(lam)|) so that a curve that is simply wrong scores
    O(1) rather than being excused by a huge leading coefficient.
    Sample points must satisfy Im(lam) != 0 or |lam| > 2A.
    """
    from .colorsolve import stieltjes_path

    lams = [complex(z) for z in sample_lambdas]
    if not lams:
        raise ValueError("no sample points")
    lead = F.leading_coeff_in("y")
    sols = stieltjes_path(kern, lams)
    worst = 0.0
    for lam, sol in zip(lams, sols):
        num = abs(F.evaluate(lam, sol.stieltjes))
        den = max(1.0, abs(_peval(lead, lam)))
        worst = max(worst, num / den)
    return worst


# ---------------------------------------------------------------------------
# rational functions and squarefree machinery over Q(x)
# ---------------------------------------------------------------------------

class UnivariateRationalFunction:
    """Quotient of exact univariate polynomials, gcd-reduced, monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=(1,)):
        num = _pnorm([rat(c) for c in num])
        den = _pnorm([rat(c) for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if num:
            g = _pgcd(num, den)
            if _pdeg(g) > 0:
                num = _pdivexact(num, g)
                den = _pdivexact(den, g)
        else:
            den = [Fraction(1)]
        lead = den[-1]
        if lead != 1:
            num = [c / lead for c in num]
            den = [c / lead for c in den]
        self.num = tuple(num)
        self.den = tuple(den)

    @classmethod
    def from_const(cls, c):
        return cls([rat(c)])

    @property
    def is_zero(self):
        return not self.num

    def __add__(self, other):
        return UnivariateRationalFunction(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den))

    def __sub__(self, other):
        return UnivariateRationalFunction(
            _psub(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den))

    def __neg__(self):
        return UnivariateRationalFunction(_pscale(self.num, -1), self.den)

    def __mul__(self, other):
        return UnivariateRationalFunction(
            _pmul(self.num, other.num), _pmul(self.den, other.den))

    def __truediv__(self, other):
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return UnivariateRationalFunction(
            _pmul(self.num, other.den), _pmul(self.den, other.num))

    def __eq__(self, other):
        return isinstance(other, UnivariateRationalFunction) and \
            self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def evaluate(self, x):
        return _peval(list(self.num), x) / _peval(list(self.den), x)

    def __repr__(self):
        return f"UnivariateRationalFunction({list(self.num)}, {list(self.den)})"


_RF_ZERO = UnivariateRationalFunction([])
_RF_ONE = UnivariateRationalFunction([1])


def _fp_norm(f):
    f = list(f)
    while f and f[-1].is_zero:
        f.pop()
    return f


def _fp_sub(f, g):
    n = max(len(f), len(g))
    return _fp_norm([
        (f[i] if i < len(f) else _RF_ZERO) - (g[i] if i < len(g) else _RF_ZERO)
        for i in range(n)])


def _fp_mul(f, g):
    if not f or not g:
        return []
    out = [_RF_ZERO] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a.is_zero:
            continue
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return _fp_norm(out)


def _fp_divmod(f, g):
    g = _fp_norm(g)
    if not g:
        raise ZeroDivisionError
    r = list(f)
    quo = [_RF_ZERO] * max(len(f) - len(g) + 1, 0)
    while _fp_norm(r) and len(_fp_norm(r)) >= len(g):
        r = _fp_norm(r)
        c = r[-1] / g[-1]
        d = len(r) - len(g)
        quo[d] = c
        for i, b in enumerate(g):
            r[i + d] = r[i + d] - c * b
    return _fp_norm(quo), _fp_norm(r)


def _fp_monic(f):
    f = _fp_norm(f)
    if not f:
        return f
    lead = f[-1]
    return [c / lead for c in f]


def _fp_gcd(f, g):
    a, b = _fp_norm(f), _fp_norm(g)
    while b:
        a, b = b, _fp_divmod(a, b)[1]
    return _fp_monic(a)


def _fp_deriv(f):
    return _fp_norm([
        UnivariateRationalFunction([i]) * c
        for i, c in enumerate(f)][1:])


def _squarefree_factors(f):
    """Yun decomposition over Q(x): list of (monic factor, multiplicity)."""
    f = _fp_monic(f)
    if len(f) <= 1:
        return []
    df = _fp_deriv(f)
    g = _fp_gcd(f, df)
    if len(g) <= 1:
        return [(f, 1)]
    b = _fp_divmod(f, g)[0]
    c = _fp_divmod(df, g)[0]
    d = _fp_sub(c, _fp_deriv(b))
    out = []
    i = 1
    while len(b) > 1:
        a = _fp_gcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b = _fp_divmod(b, a)[0]
        c = _fp_divmod(d, a)[0]
        d = _fp_sub(c, _fp_deriv(b))
        i += 1
    return out


def _bp_to_fp(bp: BivariatePolynomial):
    """Q[x,y] -> Q(x)[y] coefficient list."""
    return _fp_norm([
        UnivariateRationalFunction(row) for row in bp.as_poly_in("y")])


def _fp_to_bp(f) -> BivariatePolynomial:
    """Clear denominators: Q(x)[y] -> primitive Q[x,y]."""
    common = [Fraction(1)]
    for c in f:
        common = _plcm(common, list(c.den))
    rows = []
    for c in f:
        rows.append(_pmul(list(c.num), _pdivexact(common, list(c.den))))
    return BivariatePolynomial.from_poly_in("y", rows).normalized()


# ---------------------------------------------------------------------------
# rank-one elimination
# ---------------------------------------------------------------------------

def rank_one_eliminate(sf, kern: Kernel, sample_lambdas=None,
                       residual_tol: float = 1e-8) -> BivariatePolynomial:
    """Algebraic curve F(lambda, S) = 0 for a rank-one kernel s = f (x) f.

    sf describes the Stieltjes transform S_f of the profile distribution
    mu_f: either a UnivariateRationalFunction of m, or — when S_f carries
    a surd — a BivariatePolynomial relation R(m, v) = 0 satisfied by
    v = S_f(m) (variables (x, y) = (m, v)).

    The master identity lambda*S = 1 + w^2 = (lambda/w) S_f(lambda/w)
    turns R into a polynomial G(lambda, S, w) via m = lambda/w and
    v = S*w; eliminating w against E = 1 + w^2 - lambda*S by resultant
    and splitting the result into squarefree factors over Q(lambda)[S]
    yields candidate curves.  Factors that are monomials, content, or
    fail the numerical certificate are discarded; surviving factors
    (their product, if several) are returned normalized.  kern is the
    kernel to certify against; a collapse or an empty survivor set
    raises with the offending factorization in the message.
    """
    if isinstance(sf, UnivariateRationalFunction):
        rel = BivariatePolynomial.from_poly_in("y", [
            _pscale(list(sf.num), -1), list(sf.den)])  # v*den(m) - num(m)
    elif isinstance(sf, BivariatePolynomial):
        rel = sf
    else:
        raise TypeError("sf must be a rational function or a (m, v) relation")
    if rel.degree("y") < 1:
        raise ValueError("the relation does not involve S_f")

    # m = lambda/w, cleared by w^deg_m; then v = S*w.
    # m^a v^b  ->  lambda^a * S^b * w^(D - a + b)
    D = rel.degree("x")
    by_w = {}
    for (a, b), c in rel.coeffs.items():
        dw = D - a + b
        acc = by_w.setdefault(dw, {})
        key = (a, b)
        acc[key] = acc.get(key, Fraction(0)) + c
    g_coeffs = [
        BivariatePolynomial(by_w.get(dw, {})) for dw in range(max(by_w) + 1)]
    while g_coeffs and g_coeffs[-1].is_zero:
        g_coeffs.pop()
    while g_coeffs and g_coeffs[0].is_zero:
        g_coeffs.pop(0)  # w-monomial factor: only feeds the spurious w=0 branch
    if not g_coeffs:
        raise RuntimeError("the relation vanished identically after substitution")

    if len(g_coeffs) == 1:
        eliminated = g_coeffs[0]
    else:
        master = [
            BivariatePolynomial({(0, 0): Fraction(1), (1, 1): Fraction(-1)}),
            _BP_ZERO,
            _BP_ONE,
        ]  # 1 - lambda*S + w^2
        eliminated = auxiliary_resultant(master, g_coeffs)

    stripped = eliminated.normalized()
    if stripped.is_zero or stripped.degree("y") < 1:
        raise RuntimeError(
            "elimination collapsed: resultant reduced to "
            f"{stripped.pretty('lambda', 'S')!r}")

    # The point w = 0, S = 1/lambda solves E = 1 + w^2 - lambda*S no matter
    # what the profile relation says, so the resultant routinely carries
    # powers of (lambda*S - 1) that certify nothing.  Divide them out
    # exactly; anything else spurious is caught by the certificate below.
    phantom = BivariatePolynomial({(1, 1): Fraction(1), (0, 0): Fraction(-1)})
    while True:
        try:
            quotient = _bp_divexact(stripped, phantom)
        except ArithmeticError:
            break
        if quotient.is_zero or quotient.degree("y") < 1:
            break
        stripped = quotient.normalized()

    factors = _squarefree_factors(_bp_to_fp(stripped))
    candidates = []
    for fac, mult in factors:
        bp = _fp_to_bp(fac)
        if not bp.is_zero and bp.degree("y") >= 1:
            candidates.append((bp, mult))
    if not candidates:
        raise RuntimeError(
            "elimination collapsed: no factor involves S; factorization: "
            + "; ".join(f"({f.pretty('lambda', 'S')})^{m}"
                        for f, m in [(_fp_to_bp(f), m) for f, m in factors]))

    if sample_lambdas is None:
        radius = max(10.0, 2.5 * kern.amplitude())
        sample_lambdas = [
            radius * cmath.exp(1j * math.pi * (2 * k + 1) / 12)
            for k in range(12)]
    survivors = []
    rejected = []
    for bp, mult in candidates:
        res = verify_curve(bp, kern, sample_lambdas)
        if res < residual_tol:
            survivors.append(bp)
        else:
            rejected.append((bp, mult, res))
    if not survivors:
        raise RuntimeError(
            "no elimination factor passed certification; tried: "
            + "; ".join(f"({f.pretty('lambda', 'S')})^{m} residual={r:.3e}"
                        for f, m, r in rejected))
    out = survivors[0]
    for extra in survivors[1:]:
        out = out * extra
    return out.normalized()


# ---------------------------------------------------------------------------
# banded-walk recursion check
# ---------------------------------------------------------------------------

def _walk_path_sums(z, ell, t_max, lo, hi, starts, targets):
    """sum_{t=1..t_max} walk weights start->target with positions in [lo, hi].

    Exact within the truncation: the caps are chosen by callers so that
    no admissible walk of length <= t_max ever reaches them.
    """
    n = hi - lo + 1
    zker = np.asarray(z, dtype=complex)  # weight of displacement d at z[d+ell]
    out = np.zeros((len(starts), len(targets)), dtype=complex)
    tidx = [t - lo for t in targets]
    for si, s in enumerate(starts):
        vec = np.zeros(n, dtype=complex)
        vec[s - lo] = 1.0
        acc = np.zeros(len(targets), dtype=complex)
        for _ in range(t_max):
            vec = np.convolve(vec, zker)[ell:ell + n]
            acc += vec[tidx]
        out[si] = acc
    return out


def random_walk_recursion_check(z, ell: int, t_max: int = 60) -> float:
    """Fixed-point recursions for banded-walk sums vs. direct series.

    z: the L = 2*ell + 1 step weights (weight of displacement d is
    z[d + ell]); requires sum |z| < 1.  Solves

        U = (B + A(1+U)C)(1+U)     (walks staying >= 1, endpoints 1..ell)
        V = (B + C(1+V)A)(1+V)     (walks staying <= ell, same endpoints)
        W = (D + blockdiag(C(1+V)A, 0, A(1+U)C))(1+W)
                                   (unconstrained walks, endpoints -ell..ell)

    by damped iteration, then compares every entry against truncated
    path sums (tail below (sum|z|)^(t_max+1) / (1 - sum|z|)) and the
    central W row against contour-quadrature transforms of the step
    distribution.  Returns the largest absolute discrepancy.
    """
    z = [complex(v) for v in z]
    L = 2 * ell + 1
    if len(z) != L:
        raise ValueError(f"need {L} step weights for ell={ell}")
    rho = sum(abs(v) for v in z)
    if rho >= 1:
        raise ValueError("sum |z| must be < 1 for the walk sums to converge")

    def step_matrix(src, dst):
        m = np.zeros((len(src), len(dst)), dtype=complex)
        for i, a in enumerate(src):
            for j, b in enumerate(dst):
                if abs(b - a) <= ell:
                    m[i, j] = z[b - a + ell]
        return m

    low = list(range(1, ell + 1))           # positions 1..ell
    high = [p + ell for p in low]           # positions ell+1..2*ell
    window = list(range(-ell, ell + 1))     # positions -ell..ell

    A = step_matrix(low, high)
    B = step_matrix(low, low)
    C = step_matrix(high, low)
    D = step_matrix(window, window)
    eye_l = np.eye(ell)
    eye_w = np.eye(L)

    def solve(initial, update, tol=1e-14, max_iter=100000):
        x = initial
        omega = 1.0
        res_prev = math.inf
        for _ in range(max_iter):
            t = update(x)
            res = float(np.max(np.abs(t - x))) if x.size else 0.0
            if res <= tol:
                return t
            if res > res_prev and omega > 1 / 64:
                omega /= 2
            res_prev = res
            x = (1 - omega) * x + omega * t
        raise RuntimeError("walk fixed-point iteration did not converge")

    U = solve(np.zeros((ell, ell), complex),
              lambda u: (B + A @ (eye_l + u) @ C) @ (eye_l + u))
    V = solve(np.zeros((ell, ell), complex),
              lambda v: (B + C @ (eye_l + v) @ A) @ (eye_l + v))
    M = np.zeros((L, L), dtype=complex)
    if ell:
        M[:ell, :ell] = C @ (eye_l + V) @ A
        M[ell + 1:, ell + 1:] = A @ (eye_l + U) @ C
    W = solve(np.zeros((L, L), complex),
              lambda w: (D + M) @ (eye_w + w))

    cap = ell * (t_max + 1) + 1
    U_dp = _walk_path_sums(z, ell, t_max, 1, cap, low, low)
    V_dp = _walk_path_sums(z, ell, t_max, -cap, ell, low, low)
    W_dp = _walk_path_sums(z, ell, t_max, -cap, cap, window, window)

    worst = 0.0
    for got, want in ((U, U_dp), (V, V_dp), (W, W_dp)):
        if got.size:
            worst = max(worst, float(np.max(np.abs(got - want))))

    # central row of W against the contour integral of 1/(1 - zhat)
    T = 4096
    x = 2.0 * math.pi * np.arange(T) / T
    zhat = np.zeros(T, dtype=complex)
    for d in range(-ell, ell + 1):
        zhat += z[d + ell] * np.exp(1j * d * x)
    integrand = 1.0 / (1.0 - zhat)
    for j, pos in enumerate(window):
        theta = np.mean(np.exp(-1j * pos * x) * integrand) - (pos == 0)
        worst = max(worst, abs(theta - W[ell, j]))
    return worst
