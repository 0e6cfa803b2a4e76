"""speclab: Laplace spectra and uncertainty inequalities on model manifolds.

The library builds model compact manifolds (metric circles, flat and warped
2-tori, the round sphere) with spectrally accurate quadrature, enumerates
their Laplace (and 1-D Schrodinger) eigenpairs, and measures every quantity
of the associated uncertainty inequalities: concentration levels, defect
factors, Fourier ratios, Weyl counting remainders, restriction norms, and
the equatorial-band sharpness construction on the sphere.
"""

__version__ = "0.1.0"

from ._util import NumericalError, make_rng
from .manifolds import (ArcsRegion, ArcLengthReparam, Circle1D, FlatTorus2D, FullRegion,
                        ManifoldModel, MetricProfile1D, ProductRegion, QuadratureGrid,
                        RegionSpec, Sphere2, WarpedTorus2D, arc_length_reparam, circle_of_length,
                        equatorial_band, flat_profile, neighborhood, profile_from_expression,
                        rect_region, sine_profile, sphere_band)
from .spectra import (DiscretizedCircleBasis, EigenPair, PotentialProfile, SpectralBasis,
                      circle_basis, fd_eigensolve_circle, normalized_legendre, sphere_basis,
                      torus_basis, zero_potential)
from .uncertainty import (Field, InequalityViolation, SpectralWindow, UncertaintyCertificate,
                          certify, concentration_field, concentration_levels, fourier_ratio,
                          fourier_support_product, window_defect, window_from_groups,
                          window_from_indices, window_from_interval)
from .weyl import (HomogeneityDefect, WeylReport, WindowCheck, counting_scan,
                   homogeneity_defect, remainder_fit, unit_ball_volume,
                   window_difference_coefficients, window_uncertainty_check)
from .sphere_sharp import (BandRegion, HighestWeight, band_mass, find_half_mass_constant,
                           sharpness_product, sharpness_sweep, wallis_norm)
from .restriction import (CurveSpec, RatioScan, TubularReport, circle_curve, circle_tube_measure,
                          curve_ratio_scan, holder_chain_check, log_factor, restriction_exponent,
                          restriction_norm, tube_measure, tubular_certificate)

__all__ = [name for name in dir() if not name.startswith("_")]
