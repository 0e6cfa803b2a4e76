"""Global and pointwise eigenvalue counting with remainder diagnostics.

Counts are exact: on square flat tori they reduce to integer lattice
arithmetic, elsewhere to comparisons against closed-form eigenvalues.  The
leading term is (2*pi)^-n * omega_n * lambda^n * |M| with omega_n the volume
of the n-dimensional unit ball; remainder growth is measured by a log-log
fit over dyadic maxima, since raw lattice remainders oscillate through zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._util import write_csv
from .manifolds import QuadratureGrid, RegionSpec
from .spectra import FlatTorusBasis, SpectralBasis
from .uncertainty import VACUOUS_FLOOR, Field, SpectralWindow, concentration_levels


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in R^n."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def leading_term(lam, n: int, volume: float) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return (2.0 * math.pi) ** (-n) * unit_ball_volume(n) * lam ** n * volume


@dataclass
class WeylReport:
    """Counting scan: global counts, leading term, remainder, optional
    per-node counts (rows follow the scan values)."""

    lambdas: np.ndarray
    counts: np.ndarray
    leading: np.ndarray
    remainder: np.ndarray
    pointwise: np.ndarray | None
    grid: QuadratureGrid | None
    dimension: int
    volume: float
    fitted_exponent: float | None = None

    def to_csv(self, path) -> None:
        rows = [(self.lambdas[i], int(self.counts[i]), self.leading[i], self.remainder[i])
                for i in range(len(self.lambdas))]
        write_csv(path, ("lambda", "N", "leading", "remainder"), rows)


def counting_scan(basis: SpectralBasis, lambdas: Sequence[float],
                  grid: QuadratureGrid | None = None) -> WeylReport:
    """Counting function N(lambda) = #{j : lambda_j <= lambda} over a scan.

    With a grid, also tabulates the per-node counts sum_{lambda_j <= lambda}
    |e_j(x)|^2 (feasible only for moderate cutoffs).
    """
    lams = np.asarray(sorted(float(v) for v in lambdas))
    if lams.size == 0:
        raise ValueError("empty scan")
    if lams[-1] > basis.lam_max * (1 + 1e-12):
        raise ValueError(
            f"scan value {lams[-1]:g} beyond basis cutoff {basis.lam_max:g}")
    if isinstance(basis, FlatTorusBasis) and isinstance(basis.group_keys[0], int):
        qs = np.asarray(basis.group_keys, dtype=np.int64)
        scale_sq = (basis.kx) ** 2  # square torus: lam^2 = kx^2 * q
        counts = np.asarray([int(np.count_nonzero(qs * scale_sq <= lam * lam * (1 + 1e-14)))
                             for lam in lams])
    else:
        counts = np.searchsorted(basis.lams, lams * (1 + 1e-14), side="right")
    n = basis.manifold.dimension
    volume = basis.manifold.volume
    lead = leading_term(lams, n, volume)
    pointwise = None
    if grid is not None:
        pointwise = np.zeros((lams.size, grid.size))
        order = np.argsort(basis.lams, kind="stable")
        running = np.zeros(grid.size)
        pos = 0
        for si, lam in enumerate(lams):
            upto = np.searchsorted(basis.lams, lam * (1 + 1e-14), side="right")
            if upto > pos:
                running = running + basis.abs2_sum(order[pos:upto], grid.points)
                pos = upto
            pointwise[si] = running
    return WeylReport(lambdas=lams, counts=np.asarray(counts, dtype=np.int64),
                      leading=lead, remainder=counts - lead, pointwise=pointwise,
                      grid=grid, dimension=n, volume=volume)


def remainder_fit(report: WeylReport) -> float:
    """Least-squares slope of log(dyadic max |remainder|) against log(lambda)."""
    lams, rem = report.lambdas, np.abs(report.remainder)
    if lams.size < 10:
        raise ValueError("need at least 10 scan points")
    if lams[-1] < 4.0 * lams[0]:
        raise ValueError("scan must span at least two dyadic windows")
    lo = lams[0]
    xs, ys = [], []
    while lo < lams[-1]:
        hi = 2.0 * lo
        mask = (lams >= lo) & (lams < hi)
        if np.any(mask):
            peak = float(np.max(rem[mask]))
            if peak > 0.0:
                xs.append(math.log(math.sqrt(lo * hi)))
                ys.append(math.log(peak))
        lo = hi
    if len(xs) < 2:
        raise ValueError("not enough nonzero dyadic maxima to fit")
    slope = np.polyfit(xs, ys, 1)[0]
    report.fitted_exponent = float(slope)
    return float(slope)


# ---------------------------------------------------------------------------
# eigenspace slices


@dataclass(frozen=True)
class HomogeneityDefect:
    """How far one eigenspace's density sits from multiplicity / volume."""

    lam: float
    multiplicity: int
    eps1: float
    c1_sup: float
    relative_deviation: float


def homogeneity_defect(basis: SpectralBasis, lam: float,
                       grid: QuadratureGrid) -> HomogeneityDefect:
    """Deviation of sum_{lambda_j = lam} |e_j(x)|^2 from its mean value.

    eps1 is half the spectral gap below lam, so no eigenvalue sits in
    (lam - eps1, lam); the recovered linear-error coefficient c1(x, eps1) is
    reported through its sup norm.
    """
    distinct = basis.distinct_lambdas()
    pos = int(np.argmin(np.abs(distinct - lam)))
    if abs(distinct[pos] - lam) > 1e-9 * max(1.0, lam):
        raise ValueError(f"{lam:g} is not in the spectrum")
    if pos == 0:
        raise ValueError("no previous distinct eigenvalue below the smallest one")
    lam = float(distinct[pos])
    eps1 = 0.5 * (lam - float(distinct[pos - 1]))
    group = [g for g in basis.groups() if abs(basis.group_lambda(g) - lam) <= 1e-9 * max(1.0, lam)]
    indices = np.concatenate([basis.group_indices(g) for g in group])
    density = basis.abs2_sum(indices, grid.points)
    mean = indices.shape[0] / basis.manifold.volume
    deviation = density - mean
    sup_dev = float(np.max(np.abs(deviation)))
    return HomogeneityDefect(lam=lam, multiplicity=int(indices.shape[0]), eps1=eps1,
                             c1_sup=sup_dev / eps1, relative_deviation=sup_dev / mean)


def eigenspace_integral(basis: SpectralBasis, lam: float, grid: QuadratureGrid) -> float:
    """Integral over M of the eigenspace density; equals the multiplicity."""
    groups = [g for g in basis.groups() if abs(basis.group_lambda(g) - lam) <= 1e-9 * max(1.0, lam)]
    if not groups:
        raise ValueError(f"{lam:g} is not in the spectrum")
    indices = np.concatenate([basis.group_indices(g) for g in groups])
    density = basis.abs2_sum(indices, grid.points)
    return float(np.sum(grid.weights * density))


# ---------------------------------------------------------------------------
# window checks through the counting chain


@dataclass
class WindowCheck:
    """Certificate for a0 * (1-eps-eps')^2 <= (|E|/|M|) * #X_S."""

    a0: float
    epsilon: float
    epsilon_prime: float
    lhs: float
    rhs: float
    holds: bool
    vacuous: bool
    measured_constant: float
    concentration_integral: float
    min_lambda: float
    min_lambda_large: bool
    family: str


def window_uncertainty_check(basis: SpectralBasis, region: RegionSpec,
                             window: SpectralWindow, f: Field, a0: float,
                             large_threshold: float = 5.0) -> WindowCheck:
    """Check the window form of the uncertainty bound on one input.

    On homogeneous 2-D models the inequality holds with any fixed a0 < 1;
    in general the measured constant (1-eps-eps')^2 / rhs is reported, which
    for discretized Schrodinger spectra plays the role of the potential-
    dependent constant.  Also evaluates the intermediate chain quantity
    int_E sum_{X_S} |e_j|^2, which dominates (1-eps-eps')^2 on every valid
    input.

    Only smooth bounded potentials are in scope: no frequency threshold for
    singular potential classes is exercised here.
    """
    if not 0.0 < a0 < 1.0:
        raise ValueError("a0 must lie in (0, 1)")
    eps, eps_prime = concentration_levels(f, region, window)
    gap = 1.0 - eps - eps_prime
    rhs = (region.measure / basis.manifold.volume) * window.count
    density = basis.abs2_sum(window.indices, f.grid.points)
    mw = region.member_weights(f.grid)
    conc_integral = float(np.sum(mw * density))
    vacuous = gap <= VACUOUS_FLOOR
    lhs = 0.0 if vacuous else a0 * gap ** 2
    holds = True if vacuous else lhs <= rhs + 1e-9 * max(1.0, rhs)
    measured = 0.0 if vacuous or rhs == 0 else gap ** 2 / rhs
    min_lambda = float(min(window.lambdas))
    if basis.source == "discretized":
        family = "schrodinger-1d"
    elif basis.manifold.dimension == 2:
        family = "laplace-2d"
    else:
        family = "laplace-1d"
    return WindowCheck(a0=a0, epsilon=eps, epsilon_prime=eps_prime, lhs=lhs, rhs=rhs,
                       holds=bool(holds), vacuous=bool(vacuous), measured_constant=measured,
                       concentration_integral=conc_integral, min_lambda=min_lambda,
                       min_lambda_large=bool(min_lambda >= large_threshold), family=family)


# ---------------------------------------------------------------------------
# difference-expansion coefficients for higher dimensions


def window_difference_coefficients(n: int, eps1: float, c_value: float):
    """Coefficients of the two-term counting difference in dimension n >= 3.

    Writing N_x(lam) = a*lam^n + c*lam^(n-1) with a = (2*pi)^-n * omega_n,
    the difference N_x(lam) - N_x(lam - eps1) equals

        a*n*eps1*lam^(n-1) + sum_{k=0}^{n-2} coeff[k] * lam^k * eps1^(n-k-1),

    and this returns (leading a*n*eps1, [coeff[0], ..., coeff[n-2]]).
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    a = (2.0 * math.pi) ** (-n) * unit_ball_volume(n)
    leading = a * n * eps1
    coeffs = []
    for k in range(0, n - 1):
        sign = (-1.0) ** (n - 1 - k)
        coeffs.append(sign * (a * math.comb(n, k) * eps1 - c_value * math.comb(n - 1, k)))
    return leading, coeffs


def difference_expansion_terms(n: int):
    """Exact integer binomial content of the expansion above.

    Returns [(k, a_factor, c_factor)] so that coeff[k] =
    a_factor * a * eps1 + c_factor * c for each 0 <= k <= n-2.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    out = []
    for k in range(0, n - 1):
        sign = (-1) ** (n - 1 - k)
        out.append((k, sign * math.comb(n, k), -sign * math.comb(n - 1, k)))
    return out
