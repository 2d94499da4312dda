"""Matrix sampling and empirical spectra at desk scale.

Two random-matrix models share the same limit law and are sampled
here against the same counter-based random source (see rng):

* the filtered model: X_ij = sum over the N-by-N window of
  Y_kl * h(i-k, l-j), built from a symmetric i.i.d. field Y with a
  zero diagonal — X is real symmetric because h(-i,-j) = h(j,i);
* the colored Gaussian model on N^2 sites (x_p, xi_q) with independent
  entries 2^(d_ij/2) * sqrt(s(c_i, c_j)) * g_{i,j}.

Empirical spectral statistics normalize eigenvalues by sqrt(dimension)
and report moments m_k = dim^(-k/2-1) * trace(M^k) with per-trial
standard errors.

Eigenvalues come from LAPACK's symmetric path (Householder
tridiagonalization followed by implicit-shift QL/QR — scipy's "ev"
driver), with an explicit symmetry assertion on input and a residual
check ||M v - lambda v|| <= 1e-8 ||M|| on five eigenpairs spread
across the spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .kernel import Filter, Kernel
from .rng import gaussian_entries, rademacher_entries

__all__ = [
    "SampleConfig",
    "CovarianceReport",
    "ESD",
    "EsdSummary",
    "sample_filtered_wigner",
    "covariance_check",
    "sample_colored_gaussian",
    "eigenvalues_symmetric",
    "esd_statistics",
]

_Y_STREAM = 0        # substream for the filtered model's Y field
_COLOR_STREAM = 1    # substream for the colored Gaussian field


@dataclass(frozen=True)
class SampleConfig:
    N: int
    seed: int
    entry_law: str = "gaussian"
    trials: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.entry_law not in ("gaussian", "rademacher"):
            raise ValueError(f"unknown entry law {self.entry_law!r}")


def _entry_field(cfg: SampleConfig, trial: int, rows, cols,
                 stream=_Y_STREAM) -> np.ndarray:
    """Symmetric mean-0 variance-1 field at integer sites, zero diagonal.

    Keyed by the sorted index pair so Y[a,b] == Y[b,a] identically, in
    any slicing order.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    lo = np.minimum(rows, cols)
    hi = np.maximum(rows, cols)
    draw = rademacher_entries if cfg.entry_law == "rademacher" \
        else gaussian_entries
    vals = draw(cfg.seed, trial, lo, hi, stream)
    return np.where(rows == cols, 0.0, vals)


def sample_filtered_wigner(cfg: SampleConfig, h: Filter,
                           trial: int = 0) -> np.ndarray:
    """One sample of the (unnormalized) filtered matrix X.

    The convolution X_ij = sum_{k,l in {1..N}} Y_kl h(i-k, l-j) runs
    over the matrix window only; taps reaching outside contribute
    nothing.  The lower triangle is mirrored from the upper one, which
    by h(-i,-j) = h(j,i) and the symmetry of Y is a reordering of the
    same sum, so the output is symmetric to the bit.
    """
    N = cfg.N
    idx = np.arange(1, N + 1)
    Y = _entry_field(cfg, trial, idx[:, None], idx[None, :])
    taps = sorted(h.taps.items())
    X = np.zeros((N, N))
    for (a, b), weight in taps:
        # term Y[i - a, j + b]: rows shift by a, cols by -b, zero-fill
        shifted = np.zeros((N, N))
        r0, r1 = max(a, 0), N + min(a, 0)        # valid i-range (0-based)
        c0, c1 = max(-b, 0), N + min(-b, 0)
        shifted[r0:r1, c0:c1] = Y[r0 - a:r1 - a, c0 + b:c1 + b]
        X += float(weight) * shifted
    return np.triu(X) + np.triu(X, 1).T


@dataclass
class CovarianceReport:
    empirical: float
    theoretical: float
    z_score: float
    stderr: float
    trials: int


def _filter_autocorrelation(h: Filter, di: int, dj: int) -> Fraction:
    """s_{di,dj} = sum over taps (c,d) of h(di+c, dj+d) h(c,d), exact."""
    total = Fraction(0)
    for (c, d), w in h.taps.items():
        other = h.taps.get((di + c, dj + d))
        if other is not None:
            total += other * w
    return total


def covariance_check(h: Filter, cfg: SampleConfig,
                     index_quad) -> CovarianceReport:
    """Monte Carlo check of E[X_ij X_kl] = s_{i-k, l-j}.

    The identity holds only for indices in general position: all four
    further than K from 0 and N, and min(j-i, l-k) > K.  Anything else
    is refused — near the boundary the model simply does not pin the
    covariance down.
    """
    i, j, k, l = (int(v) for v in index_quad)
    N, K = cfg.N, h.K
    for v in (i, j, k, l):
        if not (1 <= v <= N) or min(abs(v - 0), abs(v - N)) <= K:
            raise ValueError(
                f"indices not in general position: {v} is within {K} "
                f"of a boundary multiple of N={N}")
    if min(j - i, l - k) <= K:
        raise ValueError(
            f"indices not in general position: min(j-i, l-k) = "
            f"{min(j - i, l - k)} <= K = {K}")

    theoretical = float(_filter_autocorrelation(h, i - k, l - j))

    taps = sorted(h.taps.items())
    trials = np.arange(cfg.trials)

    def entry_samples(row, col):
        acc = np.zeros(cfg.trials)
        for (a, b), weight in taps:
            r, c = row - a, col + b
            if 1 <= r <= N and 1 <= c <= N:
                acc += float(weight) * _entry_field(cfg, trials, r, c)
        return acc

    prods = entry_samples(i, j) * entry_samples(k, l)
    empirical = float(prods.mean())
    stderr = float(prods.std(ddof=1) / math.sqrt(cfg.trials))
    z = (empirical - theoretical) / stderr if stderr > 0 else 0.0
    return CovarianceReport(empirical=empirical, theoretical=theoretical,
                            z_score=float(z), stderr=stderr,
                            trials=cfg.trials)


def sample_colored_gaussian(kern: Kernel, N: int, seed: int,
                            trial: int = 0) -> np.ndarray:
    """The N^2-by-N^2 Gaussian model on the discretized color space.

    Colors enumerate (p/N, exp(2*pi*i*q/N)) for p, q in {0..N-1}, site
    index m = p*N + q.  Entry (m, m') is 2^(d/2) * sqrt(s(c_m, c_m'))
    times one standard Gaussian per unordered site pair (d = 1 on the
    diagonal).  Values of s below 1e-12 * ||s||_inf are snapped to
    exact zeros (they are zeros of s hit by roundoff), and tiny
    negative values with them.
    """
    if N > 64:
        raise ValueError(f"N = {N} exceeds the size guard 64 (N^2 <= 4096)")
    n2 = N * N
    K = kern.band
    arr = kern.coeff_array()
    part = kern.partition
    ps, qs = np.divmod(np.arange(n2), N)
    cell = np.array([part.locate(Fraction(int(p), N)) for p in ps])
    theta = 2.0 * np.pi * qs / N
    phase = np.exp(1j * np.outer(np.arange(-K, K + 1), theta))  # (2K+1, n2)

    # s(c_m, c_n) = sum_{i,j} s_ij(cell_m, cell_n) phase_i(m) phase_j(n),
    # assembled per interval pair to keep intermediates small
    smat = np.zeros((n2, n2))
    for a in range(part.n):
        sel_a = np.flatnonzero(cell == a)
        for b in range(part.n):
            sel_b = np.flatnonzero(cell == b)
            block = phase[:, sel_a].T @ arr[:, :, a, b] @ phase[:, sel_b]
            smat[np.ix_(sel_a, sel_b)] = block.real
    sup = float(np.max(np.abs(smat)))
    if sup > 0:
        smat[np.abs(smat) < 1e-12 * sup] = 0.0
    if smat.min() < 0:
        worst = float(smat.min())
        if worst < -1e-9 * max(sup, 1.0):
            raise ValueError(f"kernel evaluated negative: {worst}")
        smat[smat < 0] = 0.0
    amp = np.sqrt(smat)

    sites = np.arange(n2)
    g = gaussian_entries(seed, trial, np.minimum(sites[:, None], sites),
                         np.maximum(sites[:, None], sites), _COLOR_STREAM)
    M = amp * g
    M[np.diag_indices(n2)] *= math.sqrt(2.0)
    return np.triu(M) + np.triu(M, 1).T


def eigenvalues_symmetric(m: np.ndarray) -> np.ndarray:
    """Full spectrum of a symmetric matrix, ascending, with a residual check."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("input is not square")
    if not np.array_equal(m, m.T):
        raise AssertionError("input matrix is not symmetric")
    try:
        vals, vecs = scipy.linalg.eigh(m, driver="ev")
    except scipy.linalg.LinAlgError as exc:   # pragma: no cover
        raise RuntimeError(f"symmetric eigensolver did not converge: {exc}")
    n = len(vals)
    scale = float(np.linalg.norm(m))
    for idx in {0, n // 4, n // 2, (3 * n) // 4, n - 1}:
        resid = float(np.linalg.norm(m @ vecs[:, idx] - vals[idx] * vecs[:, idx]))
        if resid > 1e-8 * max(scale, 1e-300):
            raise RuntimeError(
                f"eigenpair {idx} residual {resid:.3e} exceeds 1e-8 * ||m||")
    return vals


@dataclass
class ESD:
    """Empirical spectral data of one sample (eigenvalues of M/sqrt(dim))."""

    eigenvalues: list
    empirical_moments: list     # m_k for k = 1..kmax

    @classmethod
    def from_matrix(cls, m: np.ndarray, kmax: int) -> "ESD":
        n = m.shape[0]
        lam = eigenvalues_symmetric(m) / math.sqrt(n)
        moments = [float(np.mean(lam ** k)) for k in range(1, kmax + 1)]
        return cls(eigenvalues=[float(v) for v in lam],
                   empirical_moments=moments)


@dataclass
class EsdSummary:
    kmax: int
    moment_mean: list
    moment_stderr: list
    hist_edges: list
    hist_mass: list
    esds: list = field(repr=False, default_factory=list)


def esd_statistics(samples, kmax: int = 6, bins=None) -> EsdSummary:
    """Aggregate empirical moments (with standard errors) and a histogram.

    samples: list of symmetric matrices (possibly of different sizes).
    Moments are averaged across samples; the standard error is the
    across-sample deviation of the per-sample moment (for a single
    sample, a within-sample plug-in estimate so z-scores stay usable).
    Histogram bins default to Freedman-Diaconis on the pooled
    normalized eigenvalues.
    """
    if kmax > 10:
        raise ValueError("kmax must be <= 10")
    esds = [ESD.from_matrix(np.asarray(m), kmax) for m in samples]
    per_k = np.array([e.empirical_moments for e in esds])  # (trials, kmax)
    mean = per_k.mean(axis=0)
    t = len(esds)
    if t > 1:
        stderr = per_k.std(axis=0, ddof=1) / math.sqrt(t)
    else:
        lam = np.array(esds[0].eigenvalues)
        n = len(lam)
        stderr = np.array([
            float(np.std(lam ** k, ddof=1)) / math.sqrt(n)
            for k in range(1, kmax + 1)])
    pooled = np.concatenate([e.eigenvalues for e in esds])
    edges = np.histogram_bin_edges(pooled, bins=bins if bins is not None
                                   else "fd")
    counts, edges = np.histogram(pooled, bins=edges)
    mass = counts / counts.sum() if counts.sum() else counts.astype(float)
    return EsdSummary(kmax=kmax,
                      moment_mean=[float(v) for v in mean],
                      moment_stderr=[float(v) for v in stderr],
                      hist_edges=[float(v) for v in edges],
                      hist_mass=[float(v) for v in mass],
                      esds=esds)
