"""Fixed-point solver for the color equations and Stieltjes inversion.

The limit Stieltjes transform solves the coupled system

    Psi(c, lam) = integral of s(c, c') P(dc') / (lam - Psi(c', lam)),
    S(lam)      = integral of P(dc) / (lam - Psi(c, lam)),

with the convention S(lam) = integral mu(dx) / (lam - x), so
Im S(x + i*eps) <= 0 and density(x) = -Im S(x + i*eps) / pi.

Psi(., lam) inherits the kernel's Fourier band: one application of the
map pairs with s, which truncates the circle spectrum to |i| <= K, so
the solver state is exactly an (interval, Fourier mode) coefficient
table.  Iteration runs on grid values (T angular nodes per circle;
the nonlinearity 1/(lam - Psi) is analytic, so the node count controls
an exponentially small aliasing error, not a truncation of Psi itself).

Picard is a contraction for |lam| > 2A, where A = 2 sqrt(||s||_inf).
Closer to the real axis the solver damps adaptively (halve the step on
residual growth, floor 1/64) and continuation supplies warm starts:
descend from the anchor 4A*i, horizontally first, then geometrically in
the imaginary part.  Lower half-plane targets are solved at the
conjugate point and conjugated back (S(conj lam) = conj S(lam)).

Everything is vectorized across lambda points: the hot loop works on
(npoints, intervals, nodes) arrays, and converged points drop out.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .kernel import Kernel, angular_grid
from .moments import NiceFunction

__all__ = [
    "ColorSolution",
    "SpectralGrid",
    "solve_color_fixed_point",
    "stieltjes_path",
    "density_profile",
    "rank_one_w",
]

DENSITY_FLOOR = 1e-4  # support_estimate threshold on the extrapolated density


@dataclass
class ColorSolution:
    """One converged solve: lam, the color field, S(lam), and the residual."""

    lam: complex
    psi: NiceFunction
    stieltjes: complex
    residual: float


@dataclass
class SpectralGrid:
    """Density profile on a real grid, Richardson-extrapolated in epsilon."""

    xs: list
    epsilon: float
    density: list
    support_estimate: tuple
    flags: list          # per point: True when both solves converged
    eps_pair: tuple


# ---------------------------------------------------------------------------
# batched fixed-point core
# ---------------------------------------------------------------------------

class _GridOps:
    """Per-(kernel, T) tensors for the pairing map on grid values."""

    def __init__(self, kern: Kernel, T: int):
        self.kern = kern
        self.T = T
        self.K = kern.band
        self.nI = kern.partition.n
        self.arr = kern.coeff_array()            # (2K+1, 2K+1, nI, nI)
        th = angular_grid(T)
        self.phase = np.exp(1j * np.outer(np.arange(-self.K, self.K + 1), th))
        self.wts = np.array([float(l) for l in kern.partition.lengths])

    def apply(self, lam, psi):
        """One Picard map: (n,) lams, (n, nI, T) psi -> (new_psi, g)."""
        g = 1.0 / (lam[:, None, None] - psi)
        ghat = (g @ self.phase.T) / self.T        # (n, nI, 2K+1)
        new_hat = np.einsum(
            "ijab,nbj->nai", self.arr, ghat * self.wts[None, :, None])
        return new_hat @ self.phase, g

    def stieltjes(self, g):
        return g.mean(axis=2) @ self.wts

    def to_coeffs(self, psi):
        """Exact Fourier coefficients of degree-K grid data, (n, nI, 2K+1)."""
        return (psi @ np.conj(self.phase).T) / self.T


def _fixed_point_batch(ops: _GridOps, lams, psi0, tol, max_iter):
    """Damped Picard on a batch of lambda points.

    Returns (psi, S, residual, ok): ok is False where the iteration hit
    the division guard or ran out of iterations.  Converged points are
    frozen and removed from the working set as they finish.

    Near the support the Picard derivative approaches the unit circle
    and plain iteration crawls, so every few sweeps a one-dimensional
    extrapolation is tried: the dominant rate rho is estimated from two
    consecutive update vectors and the geometric tail delta/(1-rho)
    added in one jump.  The jump is kept only if an explicit map
    application at the candidate at least halves the residual, so the
    damped baseline iteration still carries the convergence guarantee.
    """
    lams = np.asarray(lams, dtype=complex)
    n = len(lams)
    psi = np.array(psi0, dtype=complex, copy=True)
    residual = np.full(n, np.inf)
    ok = np.zeros(n, dtype=bool)
    alive = np.arange(n)
    omega = np.ones(n)
    prev = np.full(n, np.inf)
    prev_delta = np.zeros_like(psi)
    have_prev = np.zeros(n, dtype=bool)

    it = 0
    while alive.size and it < max_iter:
        it += 1
        sub_lam = lams[alive]
        sub_psi = psi[alive]
        gap = np.min(np.abs(sub_lam[:, None, None] - sub_psi), axis=(1, 2))
        blown = gap < 1e-14
        if blown.any():
            residual[alive[blown]] = np.inf
            keep = ~blown
            alive, sub_lam, sub_psi = alive[keep], sub_lam[keep], sub_psi[keep]
            if not alive.size:
                break
        new, _ = ops.apply(sub_lam, sub_psi)
        delta = new - sub_psi
        res = np.max(np.abs(delta), axis=(1, 2))
        worse = res > prev[alive]
        omega[alive[worse]] = np.maximum(omega[alive[worse]] / 2, 1 / 64)
        prev[alive] = res
        done = res <= tol
        om = omega[alive][:, None, None]
        stepped = np.where(done[:, None, None], new,
                           (1 - om) * sub_psi + om * new)

        jumped = np.zeros(alive.size, dtype=bool)
        if it % 5 == 0 and have_prev[alive].any():
            pd = prev_delta[alive]
            den = np.sum(np.abs(pd) ** 2, axis=(1, 2))
            num = np.sum(np.conj(pd) * delta, axis=(1, 2))
            rho = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
            trial = (~done) & have_prev[alive] & (np.abs(rho) < 0.999) \
                & (np.abs(rho) > 0.2) & (np.abs(1.0 - rho) > 1e-6)
            if trial.any():
                idx = np.flatnonzero(trial)
                boost = (rho[idx] / (1.0 - rho[idx]))[:, None, None]
                cand = new[idx] + delta[idx] * boost
                safe = np.min(np.abs(sub_lam[idx][:, None, None] - cand),
                              axis=(1, 2)) > 1e-12
                mapped, _ = ops.apply(sub_lam[idx], cand)
                res_c = np.max(np.abs(mapped - cand), axis=(1, 2))
                take = safe & (res_c < 0.5 * res[idx])
                acc = idx[take]
                stepped[acc] = cand[take]
                res[acc] = res_c[take]
                prev[alive[acc]] = res_c[take]
                jumped[acc] = True

        psi[alive] = stepped
        residual[alive] = res
        prev_delta[alive] = delta
        have_prev[alive] = ~jumped
        ok[alive[done]] = True
        alive = alive[~done]

    with np.errstate(all="ignore"):
        final, g = ops.apply(lams, psi)
        residual = np.max(np.abs(final - psi), axis=(1, 2))
        return psi, ops.stieltjes(g), residual, ok


def _advance(ops, lam_from, lam_to, psi_from, tol, max_iter, depth=9):
    """March solutions between consecutive waypoints, bisecting failures."""
    psi, S, res, ok = _fixed_point_batch(ops, lam_to, psi_from, tol, max_iter)
    if ok.all() or depth == 0:
        return psi, S, res, ok
    bad = np.flatnonzero(~ok)
    mid = (np.asarray(lam_from)[bad] + np.asarray(lam_to)[bad]) / 2
    psi_m, _, _, ok_m = _advance(
        ops, np.asarray(lam_from)[bad], mid, np.array(psi_from)[bad],
        tol, max_iter, depth - 1)
    psi_b, S_b, res_b, ok_b = _advance(
        ops, mid, np.asarray(lam_to)[bad], psi_m, tol, max_iter, depth - 1)
    psi[bad], S[bad], res[bad] = psi_b, S_b, res_b
    ok[bad] = ok_m & ok_b
    return psi, S, res, ok


def _continue_batch(kern: Kernel, targets, anchor=None, T=128, tol=1e-13,
                    max_iter=60000):
    """Continuation from the anchor to every target; vectorized.

    Returns (S, psi_grids, residuals, ok) aligned with targets; lower
    half-plane targets are handled by conjugation symmetry.
    """
    A = kern.amplitude()
    if anchor is None:
        anchor = 4.0 * A * 1j
    anchor = complex(anchor)
    if abs(anchor) <= 2.0 * A:
        raise ValueError(f"anchor {anchor} is not outside |lambda| = 2A = {2 * A}")

    targets = np.asarray([complex(t) for t in targets], dtype=complex)
    if not np.all(np.isfinite(targets)):
        raise ValueError("targets must be finite complex numbers")
    n = len(targets)
    ops = _GridOps(kern, T)
    if n == 0:
        return (np.zeros(0, complex), np.zeros((0, ops.nI, T), complex),
                np.zeros(0), np.ones(0, bool))

    flip = targets.imag < 0
    work = np.where(flip, np.conj(targets), targets)

    psi0 = np.zeros((1, ops.nI, T), dtype=complex)
    psi_a, _, res_a, ok_a = _fixed_point_batch(
        ops, [anchor], psi0, tol, max_iter)
    if not ok_a[0]:
        raise RuntimeError(
            f"solver failed at the anchor {anchor} (residual {res_a[0]:.2e})")

    height = max(anchor.imag, 4.0 * A)
    xs = work.real
    floor_h = 1e-8
    hs = np.maximum(work.imag, floor_h)
    exact = work.imag > 0  # targets reached by the descent itself

    cur_lam = np.full(n, anchor, dtype=complex)
    cur_psi = np.broadcast_to(psi_a[0], (n, ops.nI, T)).copy()
    ok = np.ones(n, dtype=bool)

    # leg 1: slide to each target's vertical line at cruise height
    top = xs + 1j * height
    n1 = 8
    for k in range(1, n1 + 1):
        nxt = cur_lam + (top - cur_lam) * (1.0 / (n1 + 1 - k))
        cur_psi, S, res, step_ok = _advance(
            ops, cur_lam, nxt, cur_psi, tol, max_iter)
        ok &= step_ok
        cur_lam = nxt

    # leg 2: geometric descent to each target's height
    ratio = hs / height
    n2 = max(int(math.ceil(math.log(max(height / hs.min(), 1.0))
                           / math.log(1 / 0.7))), 1)
    for k in range(1, n2 + 1):
        nxt = xs + 1j * height * ratio ** (k / n2)
        cur_psi, S, res, step_ok = _advance(
            ops, cur_lam, nxt, cur_psi, tol, max_iter)
        ok &= step_ok
        cur_lam = nxt

    # leg 3: real-axis targets outside |lambda| = 2A take one exact hop
    if not exact.all():
        nxt = np.where(exact, cur_lam, work)
        cur_psi, S, res, step_ok = _advance(
            ops, cur_lam, nxt, cur_psi, tol, max_iter)
        ok &= step_ok
        cur_lam = nxt

    S = np.where(flip, np.conj(S), S)
    psi_out = np.where(flip[:, None, None], np.conj(cur_psi), cur_psi)
    return S, psi_out, res, ok


def _solution_from_grid(kern, ops, lam, psi_grid, S, residual) -> ColorSolution:
    coeffs = ops.to_coeffs(psi_grid[None, :, :])[0]  # (nI, 2K+1)
    values = [[complex(c) for c in row] for row in coeffs]
    nf = NiceFunction(kern.partition, ops.K, values).trim()
    return ColorSolution(lam=complex(lam), psi=nf,
                         stieltjes=complex(S), residual=float(residual))


def _assert_herglotz(lam, S, slack=1e-9):
    if lam.imag > 0 and S.imag > slack:
        raise AssertionError(
            f"Im S = {S.imag:.3e} > 0 at Im lambda > 0 (lam = {lam})")
    if lam.imag < 0 and S.imag < -slack:
        raise AssertionError(
            f"Im S = {S.imag:.3e} < 0 at Im lambda < 0 (lam = {lam})")


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def solve_color_fixed_point(kern: Kernel, lam, warm_start: ColorSolution = None,
                            T: int = 128, tol: float = 1e-13,
                            max_iter: int = 100000) -> ColorSolution:
    """Solve the color equations at one lambda by damped Picard iteration.

    Contraction is guaranteed for |lambda| > 2A; off the real axis the
    adaptive damping converges in practice, and real lambda outside the
    support also works (the iterates stay real).  A genuinely bad
    lambda — on the support, say — ends in the division guard or a
    non-convergence error, both carrying the last residual.  Without a
    warm start the iteration begins at Psi = 0.
    """
    lam = complex(lam)
    ops = _GridOps(kern, T)
    if warm_start is not None:
        psi0 = warm_start.psi.on_grid(T)[None, :, :]
    else:
        psi0 = np.zeros((1, ops.nI, T), dtype=complex)
    psi, S, res, ok = _fixed_point_batch(ops, [lam], psi0, tol, max_iter)
    if not ok[0]:
        raise RuntimeError(
            f"color fixed point did not converge at lambda = {lam}: "
            f"last residual {res[0]:.3e}")
    _assert_herglotz(lam, complex(S[0]))
    return _solution_from_grid(kern, ops, lam, psi[0], S[0], res[0])


def stieltjes_path(kern: Kernel, targets, anchor=None, T: int = 128,
                   tol: float = 1e-13) -> list:
    """Continue S(lambda) from the anchor (default 4A*i) to each target.

    Path following with warm starts: horizontal leg at cruise height,
    then geometric vertical descent, per-point step bisection on
    non-convergence.  Raises if any target ultimately fails.
    """
    S, psis, res, ok = _continue_batch(kern, targets, anchor=anchor, T=T,
                                       tol=tol)
    if not ok.all():
        bad = [complex(t) for t, o in zip(targets, ok) if not o]
        raise RuntimeError(f"continuation failed at lambda = {bad}")
    ops = _GridOps(kern, T)
    out = []
    for k, t in enumerate(targets):
        t = complex(t)
        _assert_herglotz(t, complex(S[k]))
        out.append(_solution_from_grid(kern, ops, t, psis[k], S[k], res[k]))
    return out


def density_profile(kern: Kernel, xs, eps_pair=(1e-2, 5e-3)) -> SpectralGrid:
    """Spectral density on a real grid by extrapolated Stieltjes inversion.

    density(x) = Richardson extrapolation of -Im S(x + i*eps) / pi over
    the two heights in eps_pair; support_estimate is the smallest
    interval containing every grid point with density >= 1e-4.  Solver
    failures flag their point (density NaN) instead of aborting the grid.
    """
    e1, e2 = float(eps_pair[0]), float(eps_pair[1])
    if not (0 < e2 < e1):
        raise ValueError("eps_pair must satisfy 0 < eps2 < eps1")
    xs = [float(x) for x in xs]
    n = len(xs)
    targets = [x + 1j * e1 for x in xs] + [x + 1j * e2 for x in xs]
    S, _, _, ok = _continue_batch(kern, targets)
    d1 = -S[:n].imag / math.pi
    d2 = -S[n:].imag / math.pi
    r = e1 / e2
    dens = (r * d2 - d1) / (r - 1.0)
    flags = ok[:n] & ok[n:]
    dens = np.where(flags, dens, np.nan)

    lit = [x for x, d, f in zip(xs, dens, flags) if f and d >= DENSITY_FLOOR]
    support = (min(lit), max(lit)) if lit else (math.nan, math.nan)
    return SpectralGrid(xs=xs, epsilon=e2, density=[float(d) for d in dens],
                        support_estimate=support,
                        flags=[bool(f) for f in flags], eps_pair=(e1, e2))


# ---------------------------------------------------------------------------
# rank-one functionals
# ---------------------------------------------------------------------------

def _rank_one_factor(kern: Kernel):
    """f with s(c,c') = f(c) f(c'), as a (2K+1, nI) coefficient table.

    The flattened coefficient table over (i, a) x (j, b) of such a
    kernel is the complex symmetric outer product u u^T; factor it from
    the largest diagonal entry and certify the reconstruction to 1e-10
    relative.  The sign is fixed by a positive mean (f >= 0 pointwise
    for every kernel this is used on).
    """
    M = kern.coeff_matrix()
    scale = float(np.max(np.abs(M)))
    if scale == 0.0:
        raise ValueError("zero kernel cannot be factored")
    q = int(np.argmax(np.abs(np.diag(M))))
    pivot = M[q, q]
    if abs(pivot) < 1e-12 * scale:
        raise ValueError("kernel is not rank one (no usable diagonal pivot)")
    u = M[:, q] / cmath.sqrt(pivot)
    defect = float(np.max(np.abs(M - np.outer(u, u))))
    if defect > 1e-10 * scale:
        raise ValueError(
            f"kernel is not rank one: factorization defect {defect:.3e} "
            f"(relative {defect / scale:.3e})")
    K, nI = kern.band, kern.partition.n
    table = u.reshape(2 * K + 1, nI)
    wts = np.array([float(l) for l in kern.partition.lengths])
    mean = table[K] @ wts
    if mean.real < 0:
        table = -table
    # realness of f: coefficient(-i) = conj(coefficient(i))
    defect = float(np.max(np.abs(table[::-1] - np.conj(table))))
    if defect > 1e-9 * math.sqrt(scale):
        raise ValueError(f"rank-one factor is not real-valued ({defect:.3e})")
    return table


def rank_one_w(kern: Kernel, lam, T: int = 128) -> complex:
    """w(lambda) = integral of f(c) P(dc) / (lambda - Psi(c, lambda)).

    Requires s = f (x) f (certified numerically from the coefficient
    table).  The returned value satisfies lambda*S = 1 + w^2, which is
    asserted before returning.
    """
    table = _rank_one_factor(kern)
    lam = complex(lam)
    sol = stieltjes_path(kern, [lam])[0]
    ops = _GridOps(kern, T)
    f_grid = table.T @ ops.phase          # (nI, T), complex residue ~ 0
    if float(np.max(np.abs(f_grid.imag))) > 1e-9 * max(
            1.0, float(np.max(np.abs(f_grid.real)))):
        raise AssertionError("rank-one factor came out non-real on the grid")
    psi_grid = sol.psi.on_grid(T)
    vals = f_grid.real / (lam - psi_grid)
    w = complex(vals.mean(axis=1) @ ops.wts)
    lhs = lam * sol.stieltjes
    if abs(lhs - (1 + w * w)) > 1e-8 * max(1.0, abs(lhs)):
        raise AssertionError(
            f"master identity violated: lambda*S = {lhs}, 1 + w^2 = {1 + w * w}")
    return w
