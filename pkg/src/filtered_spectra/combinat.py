"""Wigner set partitions and tree integrals: the brute-force moment oracle.

A set partition pi of {1..k} is a Wigner partition when the walk graph
G_pi — vertices the parts, edges {part(i), part(i+1 cyclic)} — is a tree
with k/2 + 1 vertices (hence k/2 edges, each traversed exactly twice by
the cyclic walk).  These index the surviving terms in the trace-moment
expansion, and there are Catalan(k/2) of them.

Enumeration runs through Dyck paths.  Reading a path of k steps as a
depth-first tour of a rooted planar tree (up-step = descend to a new
child, down-step = return to the parent) gives a closed walk
v_0 v_1 ... v_k around the tree; assigning step i to the part of the
vertex v_{i-1} it leaves from produces exactly the Wigner partitions,
once each, with parts already ordered by first visit.

Permutation bookkeeping (all 1-based, as permutations of {1..k}):
tau_pi cycles each part in sorted order, eta_k is the full cycle
i -> i+1, and sigma_pi = eta_k^{-1} tau_pi is a fixed-point-free
involution pairing the two traversals of each tree edge: steps i and
sigma(i) cross the same edge in opposite directions.

The expectation E M_pi = E prod_{edges} s(kappa_A, kappa_B) over
i.i.d. uniform colors is a "tree integral".  Two independent
evaluators are provided:

* quadrature — leaf elimination over G_pi on a product grid sized to
  the total trigonometric degree, so the integral is exact up to
  roundoff (cost k * (grid size)^2 instead of (grid size)^(k/2+1));
* fourier-lattice — for pure-Fourier kernels only, the exact rational
  finite sum over integer step labels with zero sum on every part,
  contracted over the tree by convolution messages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactnum import CRat
from .kernel import Kernel, grid_weights, kernel_grid_matrix

__all__ = [
    "WignerPartition",
    "enumerate_wigner_partitions",
    "canonical_permutations",
    "tree_integral",
    "moments_by_enumeration",
]

KMAX_GUARD = 16


@dataclass(frozen=True)
class WignerPartition:
    """A Wigner set partition with its tree and walk permutations.

    k:     even number of walk steps;
    parts: tuple of tuples of 1-based step indices, ordered by minimum;
    edges: tuple of (parent_part, child_part) index pairs, k/2 of them;
    sigma: pairing permutation as a tuple of length k+1 (entry 0 unused);
    tau:   part-cycling permutation, same layout.
    """

    k: int
    parts: tuple
    edges: tuple
    sigma: tuple
    tau: tuple

    @property
    def part_of(self) -> tuple:
        """part_of[i] = index of the part containing step i (entry 0 unused)."""
        out = [0] * (self.k + 1)
        for p, members in enumerate(self.parts):
            for i in members:
                out[i] = p
        return tuple(out)

    def degrees(self) -> list:
        deg = [0] * len(self.parts)
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg


def _dyck_paths(half: int):
    """All Dyck paths with `half` up-steps, as tuples of +1/-1."""
    path = []

    def rec(ups, downs):
        if ups == 0 and downs == 0:
            yield tuple(path)
            return
        if ups > 0:
            path.append(+1)
            yield from rec(ups - 1, downs + 1)
            path.pop()
        if downs > 0:
            path.append(-1)
            yield from rec(ups, downs - 1)
            path.pop()

    yield from rec(half, 0)


def _partition_from_path(path) -> WignerPartition:
    k = len(path)
    part_steps = [[] for _ in range(k // 2 + 1)]
    edges = []
    stack = [0]
    next_vertex = 1
    for step, updown in enumerate(path, start=1):
        here = stack[-1]
        part_steps[here].append(step)
        if updown == +1:
            edges.append((here, next_vertex))
            stack.append(next_vertex)
            next_vertex += 1
        else:
            stack.pop()
    assert stack == [0] and next_vertex == k // 2 + 1
    parts = tuple(tuple(p) for p in part_steps)
    tau, sigma = _perms_from_parts(k, parts)
    return WignerPartition(k=k, parts=parts, edges=tuple(edges),
                           sigma=sigma, tau=tau)


def _perms_from_parts(k: int, parts) -> tuple:
    tau = [0] * (k + 1)
    for members in parts:
        for a, b in zip(members, members[1:]):
            tau[a] = b
        tau[members[-1]] = members[0]
    # sigma = eta^{-1} tau, with eta the cycle i -> i+1 mod k on {1..k}
    sigma = [0] * (k + 1)
    for i in range(1, k + 1):
        t = tau[i]
        sigma[i] = t - 1 if t > 1 else k
    return tuple(tau), tuple(sigma)


def enumerate_wigner_partitions(k: int) -> list:
    """All Wigner partitions of {1..k}, lexicographic by part-of-index sequence.

    Empty for odd k; Catalan(k/2) partitions for even k.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k % 2 == 1:
        return []
    out = [_partition_from_path(p) for p in _dyck_paths(k // 2)]
    out.sort(key=lambda w: w.part_of)
    for w in out:
        _check_partition(w)
    return out


def _check_partition(w: WignerPartition):
    k = w.k
    assert len(w.parts) == k // 2 + 1 and len(w.edges) == k // 2
    po = w.part_of
    for i in range(1, k + 1):
        nxt = i + 1 if i < k else 1
        assert po[i] != po[nxt], "consecutive walk steps share a part"
    for i in range(1, k + 1):
        s = w.sigma[i]
        assert s != i, "sigma has a fixed point"
        assert w.sigma[s] == i, "sigma is not an involution"
    # each edge is crossed by exactly the two sigma-paired steps
    seen = {}
    for i in range(1, k + 1):
        e = frozenset((po[i], po[w.sigma[i]]))
        seen.setdefault(e, set()).add(i)
    assert len(seen) == len(w.edges)
    for e, steps in seen.items():
        assert len(steps) == 2
        a, b = sorted(steps)
        assert w.sigma[a] == b


def canonical_permutations(w: WignerPartition) -> tuple:
    """(tau, sigma) recomputed from the parts, with the involution asserted."""
    tau, sigma = _perms_from_parts(w.k, w.parts)
    for i in range(1, w.k + 1):
        if sigma[i] == i:
            raise AssertionError(f"sigma fixes {i}: not a Wigner partition")
        if sigma[sigma[i]] != i:
            raise AssertionError("sigma does not square to the identity")
    return tau, sigma


# ---------------------------------------------------------------------------
# tree integrals
# ---------------------------------------------------------------------------

def tree_integral(kern: Kernel, w: WignerPartition, mode: str = "quadrature",
                  exact: bool = False):
    """E M_pi = E prod over tree edges of s(color_A, color_B).

    mode "quadrature": leaf elimination on an angular grid of size
    >= 2*K*k + 1 per circle (exact for the total trigonometric degree)
    with exact interval weights; returns a float.

    mode "fourier-lattice": pure-Fourier kernels only; the exact finite
    sum over integer step labels f with sum zero on every part of
    prod_{i < sigma(i)} s_{f(i), f(sigma(i))}.  Returns a float, or the
    exact Fraction when exact=True.
    """
    if mode == "fourier-lattice":
        val = _tree_integral_lattice(kern, w)
        return val if exact else float(val)
    if mode == "quadrature":
        if exact:
            raise ValueError("exact values require mode='fourier-lattice'")
        return _tree_integral_quadrature(kern, w)
    raise ValueError(f"unknown tree integral mode {mode!r}")


def _tree_integral_quadrature(kern: Kernel, w: WignerPartition) -> float:
    T = max(2 * kern.band * w.k + 1, 1)
    S = kernel_grid_matrix(kern, T)
    wts = grid_weights(kern, T)
    nv = len(w.parts)

    adj = {v: set() for v in range(nv)}
    for a, b in w.edges:
        adj[a].add(b)
        adj[b].add(a)

    # integrate leaves out one at a time; each elimination is one matvec
    funcs = {v: None for v in range(nv)}  # None = constant 1
    alive = set(range(nv))
    while len(alive) > 1:
        leaf = next(v for v in alive if len(adj[v]) == 1 and v != 0)
        (parent,) = adj[leaf]
        g = funcs[leaf]
        msg = S @ wts if g is None else S @ (wts * g)
        funcs[parent] = msg if funcs[parent] is None else funcs[parent] * msg
        adj[parent].discard(leaf)
        adj[leaf].clear()
        alive.discard(leaf)

    root = alive.pop()
    g = funcs[root]
    return float(np.sum(wts)) if g is None else float(wts @ g)


def _tree_integral_lattice(kern: Kernel, w: WignerPartition) -> Fraction:
    if not kern.is_pure_fourier:
        raise ValueError("fourier-lattice mode needs a single-interval kernel")
    K = kern.band

    def s(i, j):
        return kern.coeff(i, j, 0, 0)

    children = {v: [] for v in range(len(w.parts))}
    for a, b in w.edges:
        children[a].append(b)

    def label_distribution(vertex) -> dict:
        """Sum-of-child-edge-labels distribution at `vertex` (a convolution)."""
        dist = {0: CRat(1)}
        for child in children[vertex]:
            msg = up_message(child)
            new = {}
            for tot, acc in dist.items():
                for j, m in msg.items():
                    key = tot + j
                    cur = new.get(key)
                    new[key] = acc * m if cur is None else cur + acc * m
            dist = new
        return dist

    def up_message(child) -> dict:
        """Message over the parent-side label of the edge into `child`.

        The up-step into the child precedes its partner, so the edge
        weight is s_{parent label, child label} in that order.
        """
        dist = label_distribution(child)
        out = {}
        for jp in range(-K, K + 1):
            acc = CRat(0)
            for jc in range(-K, K + 1):
                coeff = s(jp, jc)
                if coeff == 0:
                    continue
                part = dist.get(-jc)
                if part is not None:
                    acc = acc + coeff * part
            if acc != 0:
                out[jp] = acc
        return out

    total = label_distribution(0).get(0, CRat(0))
    if total.im != 0:
        raise ValueError("tree integral came out non-real")
    return total.re


def moments_by_enumeration(kern: Kernel, kmax: int, mode: str | None = None,
                           exact: bool = False) -> list:
    """m_k = sum over Wigner partitions of E M_pi, for k = 1..kmax.

    Odd moments are exactly zero.  mode defaults to fourier-lattice on
    pure-Fourier kernels (exact-capable) and quadrature otherwise.
    """
    if kmax > KMAX_GUARD:
        raise ValueError(f"kmax > {KMAX_GUARD}: Catalan growth makes this a desk-scale ceiling")
    if mode is None:
        mode = "fourier-lattice" if kern.is_pure_fourier else "quadrature"
    if exact and mode != "fourier-lattice":
        raise ValueError("exact enumeration requires the fourier-lattice mode")

    out = []
    for k in range(1, kmax + 1):
        if k % 2 == 1:
            out.append(Fraction(0) if exact else 0.0)
            continue
        vals = [tree_integral(kern, w, mode=mode, exact=exact)
                for w in enumerate_wigner_partitions(k)]
        out.append(sum(vals, Fraction(0)) if exact else math.fsum(vals))
    return out
