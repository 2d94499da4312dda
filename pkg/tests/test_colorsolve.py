"""Color fixed point: known values, symmetries, densities, continuation."""

import cmath
import math

import numpy as np
import pytest

from filtered_spectra.colorsolve import (density_profile, rank_one_w,
                                         solve_color_fixed_point,
                                         stieltjes_path)
from filtered_spectra.kernel import compass_filter, constant_kernel, \
    kernel_from_filter
from conftest import rank_two_kernel, seeded_two_interval_kernel, \
    two_point_kernel

GOLDEN = (3.0 - math.sqrt(5.0)) / 2.0      # S(3) for the semicircle law


def _semicircle_S(lam: complex) -> complex:
    root = cmath.sqrt(lam * lam - 4.0)
    a, b = (lam + root) / 2.0, (lam - root) / 2.0
    if lam.imag != 0:
        return a if a.imag * lam.imag < 0 else b   # Im S opposes Im lambda
    return min(a, b, key=abs)                      # S ~ 1/lambda at infinity


def test_semicircle_value_at_three(semicircle):
    sol = solve_color_fixed_point(semicircle, 3.0)
    assert sol.stieltjes.real == pytest.approx(GOLDEN, abs=1e-10)
    assert abs(sol.stieltjes.imag) < 1e-12
    assert sol.residual < 1e-12


def test_semicircle_closed_form(semicircle):
    for lam in (2j, 1.0 + 1.0j, -2.5 + 0.3j, 0.5 + 2.0j, -3.2 + 0.0j):
        sol = solve_color_fixed_point(semicircle, lam)
        assert sol.stieltjes == pytest.approx(_semicircle_S(complex(lam)),
                                              abs=1e-10)


def test_residuals_on_accepted_solutions(compass_kernel):
    lams = [6.0 + 0.0j, 2.0 + 0.5j, -1.0 + 0.25j, 0.3 + 1.0j]
    for kern in (compass_kernel, rank_two_kernel(), two_point_kernel()):
        for sol in stieltjes_path(kern, lams):
            assert sol.residual < 1e-12


def test_imaginary_sign_and_conjugation(compass_kernel):
    for kern in (compass_kernel, seeded_two_interval_kernel()):
        up = solve_color_fixed_point(kern, 1.3 + 0.7j)
        dn = solve_color_fixed_point(kern, 1.3 - 0.7j)
        assert up.stieltjes.imag < 0
        assert dn.stieltjes == pytest.approx(up.stieltjes.conjugate(),
                                             abs=1e-11)


def test_stieltjes_is_odd_for_symmetric_law(compass_kernel):
    plus = solve_color_fixed_point(compass_kernel, 3.1 + 0.4j)
    minus = solve_color_fixed_point(compass_kernel, -3.1 + 0.4j)
    assert minus.stieltjes == pytest.approx(-plus.stieltjes.conjugate(),
                                            abs=1e-10)


def test_large_lambda_expansion(compass_kernel):
    # S(lambda) = 1/lambda + m_2/lambda^3 + O(lambda^-5)
    lam = 50.0 + 1.0j
    sol = solve_color_fixed_point(compass_kernel, lam)
    want = 1 / lam + 1 / lam ** 3
    assert abs(sol.stieltjes - want) < 2e-6


def test_psi_representation(compass_kernel):
    sol = solve_color_fixed_point(compass_kernel, 4.0 + 1.0j)
    assert sol.psi.degree <= compass_kernel.band
    grid = sol.psi.on_grid(64)
    assert grid.shape == (1, 64)
    # Psi inherits the Herglotz sign on the whole color space
    assert grid.imag.max() < 1e-12


def test_warm_start_agrees(compass_kernel):
    base = solve_color_fixed_point(compass_kernel, 4.0 + 0.5j)
    warm = solve_color_fixed_point(compass_kernel, 3.9 + 0.5j,
                                   warm_start=base)
    cold = solve_color_fixed_point(compass_kernel, 3.9 + 0.5j)
    assert warm.stieltjes == pytest.approx(cold.stieltjes, abs=1e-11)


def test_anchor_must_clear_spectrum(compass_kernel):
    with pytest.raises(ValueError, match="anchor"):
        stieltjes_path(compass_kernel, [5.0 + 1.0j], anchor=1.0j)


def test_semicircle_density_values(semicircle):
    grid = density_profile(semicircle, [0.0, 1.0, -1.0])
    assert grid.density[0] == pytest.approx(1.0 / math.pi, abs=1e-3)
    want = math.sqrt(3.0) / (2.0 * math.pi)
    assert grid.density[1] == pytest.approx(want, abs=1e-3)
    assert grid.density[2] == pytest.approx(want, abs=1e-3)
    assert all(grid.flags)


def test_semicircle_support(semicircle):
    xs = np.concatenate([np.arange(-2.12, -1.88, 0.005),
                         np.arange(1.88, 2.121, 0.005)])
    grid = density_profile(semicircle, xs, eps_pair=(1e-3, 5e-4))
    lo, hi = grid.support_estimate
    assert lo == pytest.approx(-2.0, abs=1e-2)
    assert hi == pytest.approx(2.0, abs=1e-2)


def test_density_outside_support_is_tiny(semicircle):
    grid = density_profile(semicircle, [2.5, 3.0, -4.0],
                           eps_pair=(1e-3, 5e-4))
    assert all(abs(d) < 1e-6 for d in grid.density)
    assert math.isnan(grid.support_estimate[0])


def test_eps_pair_validation(semicircle):
    with pytest.raises(ValueError):
        density_profile(semicircle, [0.0], eps_pair=(5e-3, 1e-2))
    with pytest.raises(ValueError):
        density_profile(semicircle, [0.0], eps_pair=(1e-2, 0.0))


def test_rank_one_w_master_identity(semicircle, compass_kernel):
    for kern, lam in ((semicircle, 3.0 + 0.0j), (semicircle, 1.0 + 1.0j),
                      (compass_kernel, 4.5 + 0.0j),
                      (two_point_kernel(), 5.0 + 0.5j)):
        sol = stieltjes_path(kern, [lam])[0]
        w = rank_one_w(kern, lam)
        assert lam * sol.stieltjes == pytest.approx(1 + w * w, abs=1e-8)


def test_rank_one_w_rejects_rank_two():
    with pytest.raises(ValueError, match="rank one"):
        rank_one_w(rank_two_kernel(), 5.0 + 1.0j)
