"""Shared fixtures: the kernels and filters every suite leans on."""

import random
from fractions import Fraction

import pytest

from filtered_spectra.exactnum import CRat
from filtered_spectra.kernel import (IntervalPartition, Kernel,
                                     compass_filter, constant_kernel,
                                     kernel_from_filter)


@pytest.fixture(scope="session")
def compass():
    return compass_filter()


@pytest.fixture(scope="session")
def compass_kernel():
    return kernel_from_filter(compass_filter())


@pytest.fixture(scope="session")
def semicircle():
    return constant_kernel()


def rank_two_kernel() -> Kernel:
    """s(c,c') = f(c)f(c') + g(c)g(c') on two intervals, band 1.

    f(x,t) = a(x)(1 + cos t) with a = (1/2, 1/4); g(x,t) = b(x) with
    b = (1/3, 1).  Nonnegative by construction and genuinely rank two,
    so it exercises every code path the factorized kernels skip.
    """
    part = IntervalPartition((Fraction(0), Fraction(1, 3), Fraction(1)))
    a = (Fraction(1, 2), Fraction(1, 4))
    b = (Fraction(1, 3), Fraction(1))
    cos = {-1: Fraction(1, 2), 0: Fraction(1), 1: Fraction(1, 2)}
    coeffs = {}
    for ia in range(2):
        for ib in range(2):
            for i, ci in cos.items():
                for j, cj in cos.items():
                    coeffs[(i, j, ia, ib)] = CRat(a[ia] * a[ib] * ci * cj)
            key = (0, 0, ia, ib)
            coeffs[key] = coeffs[key] + CRat(b[ia] * b[ib])
    return Kernel(part, 1, coeffs)


def two_point_kernel() -> Kernel:
    """s(c,c') = f(x)f(x') with f = 0 on [0,1/2), 2 on [1/2,1]; band 0.

    The profile distribution of f is (delta_0 + delta_2)/2.
    """
    part = IntervalPartition((Fraction(0), Fraction(1, 2), Fraction(1)))
    f = (Fraction(0), Fraction(2))
    coeffs = {}
    for ia in range(2):
        for ib in range(2):
            v = f[ia] * f[ib]
            if v:
                coeffs[(0, 0, ia, ib)] = CRat(v)
    return Kernel(part, 0, coeffs)


def seeded_two_interval_kernel(seed: int = 20260819) -> Kernel:
    """A randomized valid two-interval kernel; fixed seed => deterministic.

    Built as f (x) f + g (x) g with f(x,t) = a(x)(1 + alpha cos t) and
    |alpha| <= 1, so every draw is exchange/conjugate symmetric and
    pointwise nonnegative whatever the dice say.
    """
    rng = random.Random(seed)

    def frac(lo_eighths, hi_eighths):
        return Fraction(rng.randint(lo_eighths, hi_eighths), 8)

    t = rng.choice([Fraction(1, 4), Fraction(1, 3), Fraction(2, 5),
                    Fraction(1, 2)])
    part = IntervalPartition((Fraction(0), t, Fraction(1)))
    a = (frac(1, 16), frac(1, 16))
    b = (frac(0, 12), frac(0, 12))
    alpha = frac(-8, 8)
    cos = {-1: alpha / 2, 0: Fraction(1), 1: alpha / 2}
    coeffs = {}
    for ia in range(2):
        for ib in range(2):
            for i, ci in cos.items():
                for j, cj in cos.items():
                    key = (i, j, ia, ib)
                    v = CRat(a[ia] * a[ib] * ci * cj)
                    coeffs[key] = coeffs.get(key, CRat(0)) + v
            key = (0, 0, ia, ib)
            coeffs[key] = coeffs[key] + CRat(b[ia] * b[ib])
    return Kernel(part, 1, coeffs)
