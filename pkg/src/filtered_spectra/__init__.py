"""Spectra of random matrices with finite-range correlated entries.

Three independent routes to the same limiting eigenvalue distribution —
combinatorial tree sums, a color-equation fixed point, and Monte Carlo
sampling — plus exact resultant algebra certifying that the Stieltjes
transform is algebraic for rank-one kernels.
"""

__version__ = "0.1.0"

from .kernel import (Filter, Kernel, IntervalPartition, compass_filter,
                     constant_kernel, kernel_from_filter, validate_kernel,
                     read_color_document, as_kernel)
from .combinat import (WignerPartition, enumerate_wigner_partitions,
                       tree_integral, moments_by_enumeration)
from .moments import NiceFunction, phi_psi_recursion, theoretical_moments
from .colorsolve import (ColorSolution, SpectralGrid, solve_color_fixed_point,
                         stieltjes_path, density_profile, rank_one_w)
from .algebra import (BivariatePolynomial, UnivariateRationalFunction,
                      resultant, auxiliary_resultant, discriminant,
                      real_roots, verify_curve, rank_one_eliminate,
                      random_walk_recursion_check)
from .matrixlab import (SampleConfig, ESD, EsdSummary, CovarianceReport,
                        sample_filtered_wigner, covariance_check,
                        sample_colored_gaussian, eigenvalues_symmetric,
                        esd_statistics)

__all__ = [
    "__version__",
    "Filter", "Kernel", "IntervalPartition", "compass_filter",
    "constant_kernel", "kernel_from_filter", "validate_kernel",
    "read_color_document", "as_kernel",
    "WignerPartition", "enumerate_wigner_partitions", "tree_integral",
    "moments_by_enumeration",
    "NiceFunction", "phi_psi_recursion", "theoretical_moments",
    "ColorSolution", "SpectralGrid", "solve_color_fixed_point",
    "stieltjes_path", "density_profile", "rank_one_w",
    "BivariatePolynomial", "UnivariateRationalFunction", "resultant",
    "auxiliary_resultant", "discriminant", "real_roots", "verify_curve",
    "rank_one_eliminate", "random_walk_recursion_check",
    "SampleConfig", "ESD", "EsdSummary", "CovarianceReport",
    "sample_filtered_wigner", "covariance_check", "sample_colored_gaussian",
    "eigenvalues_symmetric", "esd_statistics",
]
