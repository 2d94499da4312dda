"""Color space, covariance kernels, and filters.

Color space is C = [0,1] x S^1 carrying the uniform probability measure P
(Lebesgue on the interval times normalized Haar on the circle).  A kernel
is a nonnegative symmetric function

    s(c, c') = sum_{i,j} s_ij(x, y) xi^i eta^j,      c = (x, xi), c' = (y, eta),

with finitely many coefficient functions s_ij, each constant on the cells
of a fixed interval partition of [0,1].  The Fourier basis is exactly
xi^i eta^j — no 2*pi normalization anywhere.  Because s is real and
symmetric the coefficients satisfy

    conj(s_ij) = s_{-i,-j}           and           s_ji(y, x) = s_ij(x, y).

A filter is a finitely supported h: Z^2 -> R with h(-i,-j) = h(j,i);
its Fourier transform H gives the pure-Fourier kernel s = |H|^2, the
covariance profile of the corresponding filtered Wigner matrix.

Coefficients are stored exactly (complex rationals), so everything built
on top can run in exact arithmetic when it wants to.  Kernel and Filter
are immutable after construction; share them freely across workers.
"""

from __future__ import annotations

import cmath
import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactnum import CRat, rat

__all__ = [
    "IntervalPartition",
    "Filter",
    "Kernel",
    "KernelReport",
    "validate_kernel",
    "kernel_from_filter",
    "evaluate_kernel",
    "read_color_document",
    "unit_partition",
    "constant_kernel",
    "compass_filter",
    "angular_grid",
    "kernel_grid_matrix",
    "grid_weights",
    "as_kernel",
]


# ---------------------------------------------------------------------------
# interval partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntervalPartition:
    """Partition of [0,1] into consecutive intervals with rational endpoints.

    breakpoints must be strictly increasing, start at 0 and end at 1.
    Interval a is [b_a, b_{a+1}) except the last, which is closed.
    """

    breakpoints: tuple

    def __post_init__(self):
        pts = tuple(rat(b) for b in self.breakpoints)
        if len(pts) < 2:
            raise ValueError("need at least two breakpoints")
        if pts[0] != 0 or pts[-1] != 1:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", pts)

    @property
    def n(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def lengths(self) -> tuple:
        return tuple(b - a for a, b in zip(self.breakpoints, self.breakpoints[1:]))

    def locate(self, x) -> int:
        """Index of the interval containing x in [0,1]."""
        if x < 0 or x > 1:
            raise ValueError(f"spatial coordinate {x} outside [0,1]")
        fx = [float(b) for b in self.breakpoints]
        a = bisect_right(fx, float(x)) - 1
        return min(max(a, 0), self.n - 1)

    def midpoints(self):
        return [float(a + b) / 2 for a, b in
                zip(self.breakpoints, self.breakpoints[1:])]


def unit_partition() -> IntervalPartition:
    return IntervalPartition((0, 1))


# ---------------------------------------------------------------------------
# filters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Filter:
    """Finitely supported real function h on Z^2 with h(-i,-j) = h(j,i).

    taps maps (i, j) -> Fraction; zero taps are dropped.  The support
    bound K is the even integer 2 * max(|i|, |j|), so taps live in the
    square |i|, |j| <= K/2 and the kernel |H|^2 has Fourier support in
    [-K, K]^2.
    """

    taps: dict = field(compare=False)

    def __post_init__(self):
        clean = {}
        for (i, j), v in self.taps.items():
            v = rat(v)
            if v != 0:
                clean[(int(i), int(j))] = v
        if not clean:
            raise ValueError("filter is identically zero")
        for (i, j), v in clean.items():
            # h(-i,-j) = h(j,i) for all (i,j) <=> h(-j,-i) = h(i,j) on taps
            if clean.get((-j, -i)) != v:
                raise ValueError(
                    f"filter symmetry h(-i,-j) = h(j,i) fails at ({-j},{-i})")
        object.__setattr__(self, "taps", clean)

    @property
    def K(self) -> int:
        return 2 * max(max(abs(i), abs(j)) for i, j in self.taps)

    def l2_norm_sq(self) -> Fraction:
        return sum((v * v for v in self.taps.values()), Fraction(0))

    def __call__(self, i: int, j: int) -> Fraction:
        return self.taps.get((i, j), Fraction(0))


def compass_filter() -> Filter:
    """h = (1/2) * indicator of the four diagonal neighbors.

    Filtering a Wigner matrix with this h replaces each entry by the
    average of the four entries to its immediate NE, SE, SW and NW; the
    kernel is s = 4 cos^2(theta1) cos^2(theta2).
    """
    half = Fraction(1, 2)
    return Filter({(1, -1): half, (1, 1): half, (-1, 1): half, (-1, -1): half})


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Kernel:
    """Covariance kernel on color space.

    partition: the interval partition of [0,1];
    band:      Fourier support bound K >= 0;
    coeffs:    dict (i, j, a, b) -> CRat with |i|,|j| <= band and
               a, b interval indices — the value of s_ij on I_a x I_b.

    Treated as immutable after construction.
    """

    partition: IntervalPartition
    band: int
    coeffs: dict

    def __post_init__(self):
        clean = {}
        for (i, j, a, b), v in self.coeffs.items():
            v = v if isinstance(v, CRat) else CRat(v)
            if v != 0:
                clean[(int(i), int(j), int(a), int(b))] = v
        self.coeffs = clean
        self.band = int(self.band)
        if self.band < 0:
            raise ValueError("band must be >= 0")
        self._grid_cache = {}
        self._sup = None

    # -- exact accessors -----------------------------------------------

    def coeff(self, i: int, j: int, a: int, b: int) -> CRat:
        return self.coeffs.get((i, j, a, b), CRat(0))

    @property
    def is_pure_fourier(self) -> bool:
        return self.partition.n == 1

    def l1_norm(self) -> Fraction:
        """Exact L1 norm of s (s is nonnegative, so this is its integral)."""
        w = self.partition.lengths
        total = CRat(0)
        for a in range(self.partition.n):
            for b in range(self.partition.n):
                total = total + (w[a] * w[b]) * self.coeff(0, 0, a, b)
        if total.im != 0:
            raise ValueError("kernel integral came out non-real")
        return total.re

    # -- float accessors -----------------------------------------------

    def coeff_array(self) -> np.ndarray:
        """Dense complex table, shape (2K+1, 2K+1, nI, nI); index [i+K, j+K, a, b]."""
        K, nI = self.band, self.partition.n
        arr = np.zeros((2 * K + 1, 2 * K + 1, nI, nI), dtype=complex)
        for (i, j, a, b), v in self.coeffs.items():
            arr[i + K, j + K, a, b] = complex(v)
        return arr

    def coeff_matrix(self) -> np.ndarray:
        """Coefficient table flattened to a matrix over (i,a) x (j,b).

        Rank one here is exactly the factorized case s(c,c') = f(c) f(c').
        """
        K, nI = self.band, self.partition.n
        arr = self.coeff_array()
        return arr.transpose(0, 2, 1, 3).reshape((2 * K + 1) * nI, (2 * K + 1) * nI)

    def sup_norm(self) -> float:
        """Grid estimate of ||s||_inf, refined until stable to 1e-9.

        The grid is exact per spatial cell (s is constant there); the
        angular grid starts at 4K+1 points per circle and doubles until
        the observed maximum stops moving.
        """
        if self._sup is not None:
            return self._sup
        T = max(4 * self.band + 1, 8)
        prev = None
        for _ in range(8):
            m = float(np.max(kernel_grid_matrix(self, T)))
            if prev is not None and abs(m - prev) < 1e-9:
                prev = m
                break
            prev = m
            T *= 2
        self._sup = prev
        return prev

    def amplitude(self) -> float:
        """A = 2 * ||s||_inf^(1/2), the scale constant all the bounds use."""
        return 2.0 * math.sqrt(max(self.sup_norm(), 0.0))


def constant_kernel() -> Kernel:
    """s = 1: the plain Wigner/semicircle case."""
    return Kernel(unit_partition(), 0, {(0, 0, 0, 0): CRat(1)})


# ---------------------------------------------------------------------------
# construction and evaluation
# ---------------------------------------------------------------------------

def kernel_from_filter(h: Filter) -> Kernel:
    """The pure-Fourier kernel s = |H|^2 of a filter.

    s_ij = sum_{c,d} h(i+c, j+d) h(c, d), exact over rationals, and
    ||s||_L1 = ||h||_L2^2 by construction.
    """
    K = h.K
    coeffs = {}
    for (c, d), v in h.taps.items():
        for (e, f_), w in h.taps.items():
            i, j = e - c, f_ - d
            key = (i, j, 0, 0)
            cur = coeffs.get(key, Fraction(0))
            coeffs[key] = cur + w * v
    out = {k: CRat(v) for k, v in coeffs.items() if v != 0}
    kern = Kernel(unit_partition(), K, out)
    assert kern.l1_norm() == h.l2_norm_sq()
    return kern


def evaluate_kernel(kern: Kernel, c, cp) -> float:
    """Evaluate s at color points c = (x, theta), c' = (y, theta').

    Angles are radians on the circle.  The finite Fourier sum is
    evaluated exactly at the cell containing (x, y); the imaginary
    residue must be below 1e-12 and is discarded.
    """
    x, t1 = c
    y, t2 = cp
    a = kern.partition.locate(x)
    b = kern.partition.locate(y)
    val = 0j
    for (i, j, aa, bb), v in kern.coeffs.items():
        if aa == a and bb == b:
            val += complex(v) * cmath.exp(1j * (i * t1 + j * t2))
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ValueError(f"kernel value at {c},{cp} is not real: {val}")
    return val.real


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class KernelReport:
    ok: bool
    checks: dict
    messages: list
    sup_norm: float
    amplitude: float
    l1_norm: float


def validate_kernel(kern: Kernel) -> KernelReport:
    """Check the kernel invariants; report per-invariant pass/fail.

    Checks: Fourier support within the band; conjugate symmetry
    conj(s_ij) = s_{-i,-j}; exchange symmetry s_ji(y,x) = s_ij(x,y);
    pointwise nonnegativity on an angular grid exact for the
    trigonometric degree (failure there is a hard error, not a grid
    artifact); nondegeneracy ||s||_1 > 0.
    """
    checks = {}
    messages = []

    K = kern.band
    checks["band_bound"] = all(
        abs(i) <= K and abs(j) <= K for (i, j, _, _) in kern.coeffs)
    if not checks["band_bound"]:
        messages.append("coefficients outside the declared Fourier band")

    bad = None
    for (i, j, a, b), v in kern.coeffs.items():
        if kern.coeff(-i, -j, a, b) != v.conjugate():
            bad = (i, j, a, b)
            break
    checks["conjugate_symmetry"] = bad is None
    if bad:
        messages.append(f"conj(s_ij) != s_(-i,-j) at (i,j,a,b)={bad}")

    bad = None
    for (i, j, a, b), v in kern.coeffs.items():
        if kern.coeff(j, i, b, a) != v:
            bad = (i, j, a, b)
            break
    checks["exchange_symmetry"] = bad is None
    if bad:
        messages.append(f"s_ji(y,x) != s_ij(x,y) at (i,j,a,b)={bad}")

    # nonnegativity on a grid exact for the trig degree
    T = max(4 * K + 1, 8)
    grid = kernel_grid_matrix(kern, T, check_real=checks["conjugate_symmetry"])
    mn = float(np.min(grid))
    checks["nonnegative"] = mn >= -1e-12
    if not checks["nonnegative"]:
        p, q = np.unravel_index(int(np.argmin(grid)), grid.shape)
        aa, tt = divmod(int(p), T)
        bb, ss = divmod(int(q), T)
        messages.append(
            f"s < 0 (= {mn:.3e}) at interval cell ({aa},{bb}), "
            f"angles ({2 * math.pi * tt / T:.4f}, {2 * math.pi * ss / T:.4f})")

    l1 = float(kern.l1_norm()) if checks["conjugate_symmetry"] else float("nan")
    checks["nondegenerate"] = l1 > 0
    if not checks["nondegenerate"]:
        messages.append("||s||_1 = 0 (degenerate kernel)")

    ok = all(checks.values())
    sup = kern.sup_norm() if ok else float(np.max(np.abs(grid)))
    return KernelReport(
        ok=ok, checks=checks, messages=messages,
        sup_norm=sup, amplitude=2.0 * math.sqrt(max(sup, 0.0)), l1_norm=l1)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

def angular_grid(T: int) -> np.ndarray:
    """T equispaced angles on the circle; integrates trig degree < T exactly."""
    return 2.0 * math.pi * np.arange(T) / T


def kernel_grid_matrix(kern: Kernel, T: int, check_real: bool = True) -> np.ndarray:
    """s evaluated on the product grid, shape (nI*T, nI*T), row index a*T + t.

    One spatial node per interval suffices (s is constant per cell);
    quadrature weights are length_a / T per node.
    """
    key = (T, check_real)
    cached = kern._grid_cache.get(key)
    if cached is not None:
        return cached
    K, nI = kern.band, kern.partition.n
    th = angular_grid(T)
    phase = np.exp(1j * np.outer(np.arange(-K, K + 1), th))  # (2K+1, T)
    arr = kern.coeff_array()  # (2K+1, 2K+1, nI, nI)
    g = np.einsum("ijab,it,js->atbs", arr, phase, phase, optimize=True)
    g = g.reshape(nI * T, nI * T)
    if check_real:
        if np.max(np.abs(g.imag)) > 1e-10 * max(1.0, np.max(np.abs(g.real))):
            raise ValueError("kernel is not real on the evaluation grid")
    g = g.real.copy()
    kern._grid_cache[key] = g
    return g


def grid_weights(kern: Kernel, T: int) -> np.ndarray:
    """Quadrature weights matching kernel_grid_matrix's flattening."""
    w = np.repeat([float(l) for l in kern.partition.lengths], T) / T
    return w


# ---------------------------------------------------------------------------
# JSON documents
# ---------------------------------------------------------------------------

def read_color_document(doc):
    """Read a filter or kernel from a JSON document (path, str, or dict).

    {"type": "filter", "entries": [[i, j, value], ...]}
    {"type": "kernel", "breakpoints": [...],
     "coeffs": [[i, j, a, b, re, im], ...]}

    Values may be numbers, decimal strings, or 'p/q' rational strings.
    Returns a Filter or a Kernel accordingly.
    """
    if isinstance(doc, str):
        try:
            obj = json.loads(doc)
        except json.JSONDecodeError:
            with open(doc) as fd:
                obj = json.load(fd)
    else:
        obj = doc
    kind = obj.get("type")
    if kind == "filter":
        taps = {}
        for i, j, v in obj["entries"]:
            taps[(int(i), int(j))] = rat(v)
        return Filter(taps)
    if kind == "kernel":
        part = IntervalPartition(tuple(rat(b) for b in obj["breakpoints"]))
        coeffs = {}
        band = 0
        for i, j, a, b, re, im in obj["coeffs"]:
            coeffs[(int(i), int(j), int(a), int(b))] = CRat(rat(re), rat(im))
            band = max(band, abs(int(i)), abs(int(j)))
        return Kernel(part, band, coeffs)
    raise ValueError(f"unknown color document type {kind!r}")


def as_kernel(obj) -> Kernel:
    """Coerce a Filter/Kernel/JSON document to a Kernel."""
    if isinstance(obj, Kernel):
        return obj
    if isinstance(obj, Filter):
        return kernel_from_filter(obj)
    thing = read_color_document(obj)
    return thing if isinstance(thing, Kernel) else kernel_from_filter(thing)
