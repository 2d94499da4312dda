"""Filter/kernel construction, symmetry checks, grids, and JSON I/O."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from filtered_spectra.exactnum import CRat
from filtered_spectra.kernel import (Filter, IntervalPartition, Kernel,
                                     angular_grid, as_kernel, compass_filter,
                                     constant_kernel, grid_weights,
                                     kernel_from_filter, kernel_grid_matrix,
                                     read_color_document, unit_partition,
                                     validate_kernel)
from conftest import rank_two_kernel, seeded_two_interval_kernel, \
    two_point_kernel


def test_interval_partition_validation():
    with pytest.raises(ValueError):
        IntervalPartition((0,))
    with pytest.raises(ValueError):
        IntervalPartition((0, Fraction(1, 2)))
    with pytest.raises(ValueError):
        IntervalPartition((0, Fraction(2, 3), Fraction(1, 3), 1))
    p = IntervalPartition((0, Fraction(1, 3), 1))
    assert p.n == 2
    assert p.lengths == (Fraction(1, 3), Fraction(2, 3))
    assert p.locate(0) == 0
    assert p.locate(Fraction(1, 3)) == 1
    assert p.locate(1) == 1
    with pytest.raises(ValueError):
        p.locate(2)


def test_compass_filter_taps():
    h = compass_filter()
    assert h.K == 2
    assert h.l2_norm_sq() == 1
    assert h(1, 1) == Fraction(1, 2)
    assert h(1, -1) == Fraction(1, 2)
    assert h(0, 0) == 0
    assert h(2, 0) == 0


def test_filter_symmetry_enforced():
    with pytest.raises(ValueError, match="symmetry"):
        Filter({(1, 0): Fraction(1)})
    with pytest.raises(ValueError, match="zero"):
        Filter({(1, 1): 0})
    # h(-i,-j) = h(j,i) pairs the tap at (1,0) with the one at (0,-1)
    h = Filter({(1, 0): Fraction(1, 3), (0, -1): Fraction(1, 3)})
    assert h.K == 2


def test_compass_kernel_coefficients():
    k = kernel_from_filter(compass_filter())
    # s = 4 cos^2(t1) cos^2(t2) = (1 + cos 2t1)(1 + cos 2t2)
    assert k.band == 2
    assert k.coeff(0, 0, 0, 0) == CRat(1)
    for i, j, want in [(2, 0, Fraction(1, 2)), (0, -2, Fraction(1, 2)),
                       (2, 2, Fraction(1, 4)), (-2, 2, Fraction(1, 4)),
                       (1, 0, 0), (1, 1, 0)]:
        assert k.coeff(i, j, 0, 0) == CRat(want)
    assert k.l1_norm() == 1  # = ||h||_2^2
    assert k.sup_norm() == pytest.approx(4.0, abs=1e-12)
    assert k.amplitude() == pytest.approx(4.0, abs=1e-12)


def test_constant_kernel_basics():
    k = constant_kernel()
    assert k.band == 0
    assert k.is_pure_fourier
    assert k.sup_norm() == pytest.approx(1.0)
    assert k.amplitude() == pytest.approx(2.0)
    assert k.l1_norm() == 1


def test_validate_accepts_the_house_kernels():
    for k in (constant_kernel(), kernel_from_filter(compass_filter()),
              rank_two_kernel(), two_point_kernel(),
              seeded_two_interval_kernel()):
        report = validate_kernel(k)
        assert report.ok, report.messages
        assert report.l1_norm > 0


def test_validate_rejects_negative_kernel():
    bad = Kernel(unit_partition(), 0, {(0, 0, 0, 0): CRat(-1)})
    report = validate_kernel(bad)
    assert not report.ok
    assert not report.checks["nonnegative"]


def test_validate_rejects_asymmetric_kernel():
    bad = Kernel(unit_partition(), 1, {(1, 0, 0, 0): CRat(1),
                                       (0, 0, 0, 0): CRat(2)})
    report = validate_kernel(bad)
    assert not report.ok
    assert not report.checks["conjugate_symmetry"]


def test_validate_rejects_exchange_violation():
    # real and conjugate-symmetric but s_ij != s_ji with swapped intervals
    part = IntervalPartition((0, Fraction(1, 2), 1))
    bad = Kernel(part, 0, {(0, 0, 0, 1): CRat(1), (0, 0, 1, 0): CRat(2),
                           (0, 0, 0, 0): CRat(3), (0, 0, 1, 1): CRat(3)})
    report = validate_kernel(bad)
    assert not report.checks["exchange_symmetry"]


def test_grid_matrix_matches_coefficients():
    k = kernel_from_filter(compass_filter())
    T = 16
    grid = kernel_grid_matrix(k, T)
    th = angular_grid(T)
    want = 4.0 * np.cos(th[2]) ** 2 * np.cos(th[5]) ** 2
    assert grid[2, 5] == pytest.approx(want, abs=1e-12)
    wts = grid_weights(k, T)
    assert wts.sum() == pytest.approx(1.0)
    # integral of s against the product grid = l1 norm
    assert wts @ grid @ wts == pytest.approx(1.0, abs=1e-12)


def test_json_round_trip_filter():
    doc = {"type": "filter",
           "entries": [[1, -1, "1/2"], [1, 1, "1/2"],
                       [-1, 1, "1/2"], [-1, -1, "1/2"]]}
    h = read_color_document(doc)
    assert isinstance(h, Filter)
    assert h.taps == compass_filter().taps
    k = as_kernel(doc)
    assert k.coeffs == kernel_from_filter(h).coeffs


def test_json_round_trip_kernel():
    k = rank_two_kernel()
    doc = {"type": "kernel",
           "breakpoints": [str(b) for b in k.partition.breakpoints],
           "coeffs": [[i, j, a, b, str(v.re), str(v.im)]
                      for (i, j, a, b), v in k.coeffs.items()]}
    back = read_color_document(doc)
    assert back.band == k.band
    assert back.coeffs == k.coeffs
    assert read_color_document('{"type": "filter", "entries": [[0, 0, 1]]}') \
        .taps == {(0, 0): Fraction(1)}
    with pytest.raises(ValueError, match="unknown"):
        read_color_document({"type": "spline"})


@st.composite
def filters(draw):
    pairs = draw(st.lists(
        st.tuples(st.integers(-2, 2), st.integers(-2, 2),
                  st.fractions(min_value=Fraction(-1), max_value=Fraction(1),
                               max_denominator=4)),
        min_size=1, max_size=3))
    taps = {}
    for i, j, v in pairs:
        taps[(i, j)] = v
        taps[(-j, -i)] = v  # closes the h(-i,-j) = h(j,i) orbit
    if all(v == 0 for v in taps.values()):
        taps[(0, 0)] = Fraction(1)
    return Filter(taps)


@given(filters())
def test_filter_kernels_always_validate(h):
    k = kernel_from_filter(h)
    assert k.band == h.K
    report = validate_kernel(k)
    assert report.ok, report.messages
    assert Fraction(k.l1_norm()) == h.l2_norm_sq()
