"""Highest-weight concentration on the sphere and the sharpness product.

The degree-l highest-weight harmonic c_l * exp(i*l*phi) * sin(theta)^l
concentrates on an equatorial band of angular half-width ~ 1/sqrt(l).  This
module computes the exact Wallis normalization, band masses, the half-mass
band constant, and the product |E_l| * sup_{E_l} |f_l|^2 that stays bounded
above and below as l grows.

All sin(theta)^l powers go through exp(l * log sin(theta)) with an explicit
underflow floor; Wallis factors are evaluated in log space (double
factorials overflow long before l = 256).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln

from ._util import write_csv

UNDERFLOW_EXPONENT = -700.0
FOUR_PI = 4.0 * math.pi


def wallis_integral_log(l: int) -> float:
    """log of W(l) = integral over [0, pi] of sin(theta)^(2l+1)."""
    if l < 0:
        raise ValueError("degree must be nonnegative")
    # W(l) = 2 * (2l)!! / (2l+1)!!,  (2l)!! = 2^l l!,  (2l+1)!! = (2l+1)!/(2^l l!)
    return math.log(2.0) + 2 * l * math.log(2.0) + 2 * gammaln(l + 1) - gammaln(2 * l + 2)


def wallis_integral_exact(l: int) -> Fraction:
    """Exact rational W(l) = 2 * (2l)!! / (2l+1)!!; cross-checks the
    log-space path for small l."""
    num, den = 2, 1
    for k in range(1, l + 1):
        num *= 2 * k
        den *= 2 * k + 1
    return Fraction(num, den)


def wallis_norm(l: int) -> float:
    """Squared normalization constant: 2*pi * c_l^2 * W(l) = 1."""
    if l < 1:
        raise ValueError("degree must be >= 1")
    return math.exp(-math.log(2.0 * math.pi) - wallis_integral_log(l))


def sin_power(theta, l: int) -> np.ndarray:
    """sin(theta)^l, stable for large l (underflow floors to zero)."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    out = np.zeros_like(s)
    pos = s > 0
    with np.errstate(divide="ignore"):
        expo = l * np.log(np.where(pos, s, 1.0))
    keep = pos & (expo > UNDERFLOW_EXPONENT)
    out[keep] = np.exp(expo[keep])
    return out


@dataclass(frozen=True)
class HighestWeight:
    """Degree-l highest-weight harmonic with unit L^2 norm."""

    degree: int
    c_l_sq: float

    @classmethod
    def of_degree(cls, l: int) -> "HighestWeight":
        return cls(degree=l, c_l_sq=wallis_norm(l))

    def evaluate(self, theta, phi) -> np.ndarray:
        amp = math.sqrt(self.c_l_sq) * sin_power(theta, self.degree)
        return amp * np.exp(1j * self.degree * np.asarray(phi, dtype=float))

    def amplitude_sq(self, theta) -> np.ndarray:
        return self.c_l_sq * sin_power(theta, 2 * self.degree)

    @property
    def sup_sq(self) -> float:
        """Maximum of |f_l|^2, attained on the equator."""
        return self.c_l_sq


@dataclass(frozen=True)
class BandRegion:
    """Equatorial band |theta - pi/2| <= delta with delta = C / sqrt(l)."""

    degree: int
    band_constant: float
    delta: float
    measure: float

    @classmethod
    def for_degree(cls, l: int, band_constant: float) -> "BandRegion":
        delta = band_constant / math.sqrt(l)
        if delta > math.pi / 2:
            raise ValueError(
                f"band constant {band_constant:g} exceeds the hemisphere at degree {l}")
        return cls(degree=l, band_constant=band_constant, delta=delta,
                   measure=FOUR_PI * math.sin(delta))


def band_mass(l: int, band_constant: float) -> float:
    """Mass of |f_l|^2 inside the band: 2*pi*c_l^2 * band integral of sin^(2l+1)."""
    band = BandRegion.for_degree(l, band_constant)
    log_cl_sq = -math.log(2.0 * math.pi) - wallis_integral_log(l)

    def integrand(theta):
        s = math.sin(theta)
        if s <= 0.0:
            return 0.0
        expo = (2 * l + 1) * math.log(s) + log_cl_sq
        return 0.0 if expo < UNDERFLOW_EXPONENT else math.exp(expo)

    lo, hi = math.pi / 2 - band.delta, math.pi / 2 + band.delta
    val, _ = quad(integrand, lo, hi, limit=200)
    return min(1.0, 2.0 * math.pi * val)


def find_half_mass_constant(l: int, tol: float = 1e-6) -> float:
    """Smallest band constant whose band holds at least half the mass."""
    if l < 1:
        raise ValueError("degree must be >= 1")
    lo, hi = 0.0, (math.pi / 2) * math.sqrt(l)
    if band_mass(l, hi) < 0.5:
        raise ValueError("full hemisphere band below half mass; degree too small")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if band_mass(l, mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    return hi


def sharpness_product(l: int, band_constant: float) -> float:
    """measure(E_l) * sup over E_l of |f_l|^2 = 4*pi*sin(delta) * c_l^2."""
    band = BandRegion.for_degree(l, band_constant)
    return band.measure * wallis_norm(l)


@dataclass(frozen=True)
class SharpnessRow:
    degree: int
    band_constant: float
    band_measure: float
    c_l_sq: float
    mass: float
    product: float


def sharpness_sweep(degrees, band_constant: float | None = None,
                    reference_degree: int = 16) -> list:
    """Sweep the sharpness quantities over degrees.

    With no band constant given, the half-mass constant of the reference
    degree is used for every row (the masses then vary; the per-degree
    half-mass constants are available through find_half_mass_constant).
    """
    if band_constant is None:
        band_constant = find_half_mass_constant(reference_degree)
    rows = []
    for l in degrees:
        band = BandRegion.for_degree(l, band_constant)
        rows.append(SharpnessRow(
            degree=int(l), band_constant=band_constant, band_measure=band.measure,
            c_l_sq=wallis_norm(l), mass=band_mass(l, band_constant),
            product=sharpness_product(l, band_constant)))
    return rows


def sweep_to_csv(rows, path) -> None:
    write_csv(path, ("l", "C", "band_measure", "c_l_sq", "mass", "product"),
              [(r.degree, r.band_constant, r.band_measure, r.c_l_sq, r.mass, r.product)
               for r in rows])
