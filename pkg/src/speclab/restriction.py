"""Restriction norms on curves in the flat 2-torus and tube certificates.

A curve is a closed parameterization with nonvanishing geodesic curvature;
line integrals use the periodic trapezoidal rule (spectrally accurate for
the smooth integrands here) with a refinement-doubling convergence guard.
Tube measures are node counts against sampled curve distance; certificates
assemble both sides of the window/tube inequality so the uniform constant
can be measured across sweeps instead of asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ._util import NumericalError, canonical_json, jsonable, write_csv
from .manifolds import TWO_PI, FlatTorus2D, QuadratureGrid
from .uncertainty import SpectralWindow


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class CurveSpec:
    """Closed curve t -> (x(t), y(t)) on a flat torus, t in [0, 2*pi)."""

    x: Callable
    y: Callable
    dx: Callable
    dy: Callable
    ddx: Callable
    ddy: Callable
    manifold: FlatTorus2D
    name: str = "curve"

    def __post_init__(self):
        gap = math.hypot(float(self.x(TWO_PI)) - float(self.x(0.0)),
                         float(self.y(TWO_PI)) - float(self.y(0.0)))
        if gap > 1e-12:
            raise ValueError(f"curve endpoints differ by {gap:.3e}; not closed")

    def points(self, ts, offset: float = 0.0) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.stack([np.asarray(self.x(ts), dtype=float),
                         np.asarray(self.y(ts), dtype=float) + offset], axis=-1)

    def speed(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        return np.hypot(np.asarray(self.dx(ts), dtype=float),
                        np.asarray(self.dy(ts), dtype=float))

    def curvature(self, ts) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        xd, yd = np.asarray(self.dx(ts), float), np.asarray(self.dy(ts), float)
        xdd, ydd = np.asarray(self.ddx(ts), float), np.asarray(self.ddy(ts), float)
        return (xd * ydd - yd * xdd) / np.hypot(xd, yd) ** 3

    @property
    def curvature_ok(self) -> bool:
        ts = np.linspace(0.0, TWO_PI, 512, endpoint=False)
        return bool(np.min(np.abs(self.curvature(ts))) > 0.0)

    def min_curvature_radius(self) -> float:
        ts = np.linspace(0.0, TWO_PI, 512, endpoint=False)
        return float(1.0 / np.max(np.abs(self.curvature(ts))))

    def length(self, n: int = 2048) -> float:
        ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
        return float(np.sum(self.speed(ts)) * TWO_PI / n)


def circle_curve(center=(math.pi, math.pi), radius: float = 0.25,
                 manifold: FlatTorus2D | None = None) -> CurveSpec:
    """The default test curve: a circle, so curvature is constant and tube
    areas have a closed form."""
    cx, cy = float(center[0]), float(center[1])
    r = float(radius)
    if r <= 0:
        raise ValueError("radius must be positive")
    return CurveSpec(
        x=lambda t: cx + r * np.cos(t), y=lambda t: cy + r * np.sin(t),
        dx=lambda t: -r * np.sin(t), dy=lambda t: r * np.cos(t),
        ddx=lambda t: -r * np.cos(t), ddy=lambda t: -r * np.sin(t),
        manifold=manifold or FlatTorus2D(), name=f"circle(r={r:g})")


# ---------------------------------------------------------------------------
# line integrals


def restriction_norm(evaluate, curve: CurveSpec, offset: float = 0.0, q=2,
                     n_start: int = 256, rel_tol: float = 1e-9) -> float:
    """L^2 or L^inf norm of a function restricted to the offset curve.

    ``evaluate`` maps an (N, 2) array of torus points to complex values.
    The L^2 case integrates |f|^2 against arc length, doubling the node
    count until two refinements agree.
    """
    if q == math.inf or q == "inf":
        ts = np.linspace(0.0, TWO_PI, 8192, endpoint=False)
        return float(np.max(np.abs(evaluate(curve.points(ts, offset)))))
    if q != 2:
        raise ValueError(f"only q = 2 or inf supported, got {q}")
    prev = None
    n = n_start
    while n <= 65536:
        ts = np.linspace(0.0, TWO_PI, n, endpoint=False)
        vals = np.abs(evaluate(curve.points(ts, offset))) ** 2
        integral = float(np.sum(vals * curve.speed(ts)) * TWO_PI / n)
        if prev is not None and abs(integral - prev) <= rel_tol * max(abs(integral), 1e-30):
            return math.sqrt(integral)
        prev = integral
        n *= 2
    raise NumericalError("line quadrature did not converge between refinements")


# ---------------------------------------------------------------------------
# tubes


def tube_measure(curve: CurveSpec, r: float, grid: QuadratureGrid | None = None,
                 n_curve: int = 1024) -> float:
    """Measure of the tube of radius r around the curve by distance sampling.

    With a grid, counts the weight of grid nodes within distance r (wrap
    aware).  Without one, samples a local two-stage refined lattice around
    the curve, which stays accurate for tubes far thinner than any
    affordable global grid cell.
    """
    if r <= 0:
        raise ValueError("tube radius must be positive")
    limit = 0.5 * curve.min_curvature_radius()
    if r > limit * (1 + 1e-12):
        raise ValueError(
            f"tube radius {r:g} exceeds half the curvature radius {limit:g}; tube would self-overlap")
    if grid is None:
        return _tube_measure_local(curve, r)
    ts = np.linspace(0.0, TWO_PI, n_curve, endpoint=False)
    cpts = curve.points(ts)
    lx, ly = curve.manifold.lx, curve.manifold.ly
    pts, wts = grid.points, grid.weights
    margin = r + TWO_PI * float(np.max(curve.speed(ts))) / n_curve
    keep = np.ones(pts.shape[0], dtype=bool)
    for axis, period in ((0, lx), (1, ly)):
        lo, hi = float(np.min(cpts[:, axis])), float(np.max(cpts[:, axis]))
        half = 0.5 * (hi - lo) + margin
        if 2 * half < 0.9 * period:
            mid = 0.5 * (lo + hi)
            d = np.abs(pts[:, axis] - mid)
            keep &= np.minimum(d, period - d) <= half
    pts, wts = pts[keep], wts[keep]
    total = 0.0
    chunk = max(1, 8_000_000 // n_curve)
    for start in range(0, pts.shape[0], chunk):
        block = pts[start:start + chunk]
        dx = np.abs(block[:, None, 0] - cpts[None, :, 0])
        dy = np.abs(block[:, None, 1] - cpts[None, :, 1])
        dx = np.minimum(dx, lx - dx)
        dy = np.minimum(dy, ly - dy)
        dist_sq = np.min(dx * dx + dy * dy, axis=1)
        total += float(np.sum(wts[start:start + chunk][dist_sq <= r * r]))
    return total


def _tube_measure_local(curve: CurveSpec, r: float) -> float:
    """Two-stage counting on a local lattice: coarse cells wholly inside the
    tube count in full, cells crossing the boundary are refined."""
    from scipy.spatial import cKDTree

    ts = np.linspace(0.0, TWO_PI, 4096, endpoint=False)
    cpts = curve.points(ts)
    lx, ly = curve.manifold.lx, curve.manifold.ly
    lo = cpts.min(axis=0) - 2 * r
    hi = cpts.max(axis=0) + 2 * r
    if hi[0] - lo[0] > 0.9 * lx or hi[1] - lo[1] > 0.9 * ly:
        raise ValueError("tube does not fit a local box; supply a grid")
    tree = cKDTree(cpts)
    big_h = max(r, min(hi - lo) / 512)
    refine = int(min(96, max(16, math.ceil(16.0 * big_h / r))))
    xs = np.arange(lo[0] + big_h / 2, hi[0], big_h)
    ys = np.arange(lo[1] + big_h / 2, hi[1], big_h)
    nodes = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
    dist, _ = tree.query(nodes, workers=-1)
    circum = big_h * math.sqrt(0.5)
    total = float(np.count_nonzero(dist <= r - circum)) * big_h ** 2
    edge = nodes[np.abs(dist - r) <= circum]
    if edge.shape[0]:
        small_h = big_h / refine
        offs = (np.arange(refine) + 0.5) * small_h - big_h / 2
        sub = (edge[:, None, None, :]
               + np.stack(np.meshgrid(offs, offs, indexing="ij"), axis=-1)[None, :, :, :])
        sub = sub.reshape(-1, 2)
        sub_dist, _ = tree.query(sub, workers=-1)
        total += float(np.count_nonzero(sub_dist <= r)) * small_h ** 2
    return total


def circle_tube_measure(radius: float, r: float) -> float:
    """Exact annulus area of the tube around a circle of the given radius."""
    if r > radius:
        raise ValueError("tube thicker than the circle radius")
    return math.pi * ((radius + r) ** 2 - (radius - r) ** 2)


# ---------------------------------------------------------------------------
# exponents


def restriction_exponent(k: int, p_tilde: float, n: int):
    """Exponent delta(k, p) of the submanifold restriction estimates.

    Returns (delta, log_flag); log_flag marks the (k, p) = (n-2, 2) pair
    that carries a half-power of log(lambda).
    """
    if n < 2:
        raise ValueError("ambient dimension must be >= 2")
    if not 1 <= k <= n - 1:
        raise ValueError(f"submanifold dimension k must lie in [1, {n - 1}]")
    if p_tilde < 2:
        raise ValueError("exponent must satisfy p >= 2")
    inv_p = 0.0 if math.isinf(p_tilde) else 1.0 / p_tilde
    log_flag = (k == n - 2) and (p_tilde == 2)
    if k == n - 1:
        crossover = 2.0 * n / (n - 1)
        if p_tilde <= crossover:
            delta = (n - 1) / 4.0 - (n - 2) / 2.0 * inv_p
        else:
            delta = (n - 1) / 2.0 - (n - 1) * inv_p
    else:
        delta = (n - 1) / 2.0 - k * inv_p
    return delta, log_flag


def log_factor(lam: float, k: int, p: float, q: float, n: int) -> tuple:
    """The log(lambda) factor class of the tube inequality.

    Returns (value, class_name) with class_name in {"1", "sqrt_log",
    "log"} according to whether (k, pq) and/or (k, q) hit (n-2, 2).
    """
    pq = math.inf if math.isinf(p) or math.isinf(q) else p * q
    _, flag_pq = restriction_exponent(k, pq, n)
    _, flag_q = restriction_exponent(k, q, n)
    if flag_pq and flag_q:
        return math.log(lam), "log"
    if flag_pq or flag_q:
        return math.sqrt(math.log(lam)), "sqrt_log"
    return 1.0, "1"


# ---------------------------------------------------------------------------
# tube certificates


@dataclass
class TubularReport:
    lam: float
    scale_r: float
    window_distinct: int
    window_count: int
    tube_measure: float
    a_value: float
    p: float
    q: float
    r: float
    lhs: float
    rhs: float
    ratio: float
    mode: str
    window_kind: str
    log_factor_class: str
    vacuous: bool
    provenance: dict

    def to_json_dict(self) -> dict:
        return jsonable({
            "lambda": self.lam, "R": self.scale_r,
            "window_distinct": self.window_distinct, "window_count": self.window_count,
            "tube_measure": self.tube_measure, "a_value": self.a_value,
            "p": None if math.isinf(self.p) else self.p, "q": self.q, "r": self.r,
            "lhs": self.lhs, "rhs": self.rhs, "ratio": self.ratio,
            "mode": self.mode, "window_kind": self.window_kind,
            "log_factor_class": self.log_factor_class, "vacuous": self.vacuous,
            "provenance": self.provenance,
        })

    def to_json(self) -> str:
        return canonical_json(self.to_json_dict())


def tubular_certificate(window: SpectralWindow, curve: CurveSpec, lam: float, scale_r: float,
                        p: float, q: float, r: float, a_value: float,
                        grid: QuadratureGrid | None = None,
                        tube_measure_value: float | None = None,
                        mode: str = "generic", window_kind: str = "unit",
                        eps_loss: float = 0.0, k_dim: int = 1) -> TubularReport:
    """Both sides of the window/tube inequality for one (lambda, R).

    The hypothesis constant ``a_value`` is supplied by the caller (it is an
    assumption on the function class, e.g. sqrt(R) for translate-stable
    curves on the flat 2-torus).  ``mode="generic"`` uses the generic
    lambda^delta operator bounds with the log table; ``mode="translate-stable"``
    replaces them by translate-stability constants (an arbitrarily small
    lambda^eps_loss in the sup bound, 1 in the L^2 bound).  The summation
    window kind adds the extra lambda powers of the [0, lambda_0] variant.
    """
    if not 1 <= scale_r <= lam:
        raise ValueError(f"need 1 <= R <= lambda, got R={scale_r:g}, lambda={lam:g}")
    if r <= 1:
        raise ValueError("r must exceed 1")
    if q < 2:
        raise ValueError("q must be >= 2")
    if a_value <= 0:
        raise ValueError("a_value must be positive")
    n_dim = 2
    vacuous = window.count == 0
    if tube_measure_value is not None:
        tube = float(tube_measure_value)
    else:
        if grid is None:
            grid = curve.manifold.build_grid(256)
        tube = tube_measure(curve, 1.0 / scale_r, grid)
    p_conj = 1.0 if math.isinf(p) else (math.inf if p == 1.0 else p / (p - 1.0))
    lhs_tube_exp = 0.0 if math.isinf(p_conj) else 1.0 / (p_conj * q)
    lhs = window.distinct_count ** (1.0 / (r - 1.0)) * tube ** lhs_tube_exp
    r_exp = ((n_dim - k_dim) / q) * ((0.0 if math.isinf(p) else 1.0 / p) + 1.0 / (r - 1.0))
    if mode == "translate-stable":
        lam_exp = eps_loss
        bfac, bclass = 1.0, "1"
    elif mode == "generic":
        pq = math.inf if math.isinf(p) else p * q
        d_pq, _ = restriction_exponent(k_dim, pq, n_dim)
        d_q, _ = restriction_exponent(k_dim, q, n_dim)
        if window_kind == "summation":
            lam_exp = d_pq + (d_q + r) / (r - 1.0)
        elif window_kind == "unit":
            lam_exp = d_pq + d_q / (r - 1.0)
        else:
            raise ValueError(f"unknown window kind {window_kind!r}")
        bfac, bclass = log_factor(lam, k_dim, p, q, n_dim)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rhs = scale_r ** r_exp / (a_value ** (r / (r - 1.0)) * lam ** lam_exp * bfac)
    return TubularReport(
        lam=lam, scale_r=scale_r, window_distinct=window.distinct_count,
        window_count=window.count, tube_measure=tube, a_value=a_value, p=p, q=q, r=r,
        lhs=lhs, rhs=rhs, ratio=lhs / rhs, mode=mode, window_kind=window_kind,
        log_factor_class=bclass, vacuous=vacuous,
        provenance={"curve": curve.name, "grid": None if grid is None else grid.size})


def sweep_to_csv(reports: Sequence[TubularReport], path) -> None:
    write_csv(path, ("lambda", "R", "window_distinct", "tube_measure", "lhs", "rhs", "ratio"),
              [(t.lam, t.scale_r, t.window_distinct, t.tube_measure, t.lhs, t.rhs, t.ratio)
               for t in reports])


# ---------------------------------------------------------------------------
# curve restriction ratio scans


@dataclass
class RatioScan:
    offsets: tuple
    min_ratio: float
    max_ratio: float
    base_interval: tuple
    full_interval: tuple
    widening: float
    function_count: int

    def to_json_dict(self) -> dict:
        return jsonable({
            "offsets": list(self.offsets), "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio, "base_interval": list(self.base_interval),
            "full_interval": list(self.full_interval), "widening": self.widening,
            "function_count": self.function_count,
        })


def _lattice_orbit_reps(basis, group_id) -> list:
    """One representative of each antipodal lattice pair in the eigenspace."""
    reps, seen = [], set()
    for i in basis.group_indices(group_id):
        m, n = int(basis.ms[i]), int(basis.ns[i])
        key = (m, n) if (m, n) >= (-m, -n) else (-m, -n)
        if key not in seen and key != (0, 0):
            seen.add(key)
            reps.append(key)
    return reps


def curve_ratio_scan(basis, curve: CurveSpec, offsets: Sequence[float],
                     lam_lo: float, lam_hi: float, rng: np.random.Generator | None = None,
                     extra_combos: int = 1, n_quad: int = 1024) -> RatioScan:
    """Restriction-to-global L^2 ratios of real eigenfunctions on the curve.

    Scans every eigenspace with eigenvalue in [lam_lo, lam_hi]; the observed
    [min, max] interval at offset zero and its widening under the full
    offset list are reported.
    """
    offsets = tuple(float(o) for o in offsets)
    if 0.0 not in offsets:
        offsets = (0.0,) + offsets
    groups = [g for g in basis.groups()
              if lam_lo <= basis.group_lambda(g) <= lam_hi and basis.group_lambda(g) > 0]
    if not groups:
        raise ValueError(f"no eigenvalues in [{lam_lo:g}, {lam_hi:g}]")
    ts = np.linspace(0.0, TWO_PI, n_quad, endpoint=False)
    speed = curve.speed(ts)
    step = TWO_PI / n_quad
    per_offset: dict = {o: [] for o in offsets}
    count = 0
    amp = math.sqrt(2.0 / basis.manifold.volume)
    for g in sorted(groups, key=lambda g: basis.group_lambda(g)):
        reps = _lattice_orbit_reps(basis, g)
        if not reps:
            continue
        combos = []
        if rng is not None:
            for _ in range(extra_combos):
                coeffs = rng.normal(size=2 * len(reps))
                combos.append(coeffs / np.linalg.norm(coeffs))
        mvec = np.asarray([m for m, _ in reps], dtype=float)
        nvec = np.asarray([n for _, n in reps], dtype=float)
        for off in offsets:
            pts = curve.points(ts, off)
            phases = np.outer(mvec, pts[:, 0]) + np.outer(nvec, pts[:, 1])
            stacked = amp * np.concatenate([np.cos(phases), np.sin(phases)], axis=0)
            norms_sq = (stacked ** 2) @ (speed * step)
            per_offset[off].extend(np.sqrt(norms_sq).tolist())
            for coeffs in combos:
                mixed = coeffs @ stacked
                per_offset[off].append(math.sqrt(float(np.sum(mixed ** 2 * speed * step))))
        count += 2 * len(reps) + len(combos)
    base = per_offset[0.0]
    base_interval = (min(base), max(base))
    all_vals = [v for vals in per_offset.values() for v in vals]
    full_interval = (min(all_vals), max(all_vals))
    widening = (full_interval[1] / full_interval[0]) / (base_interval[1] / base_interval[0])
    return RatioScan(offsets=offsets, min_ratio=full_interval[0], max_ratio=full_interval[1],
                     base_interval=base_interval, full_interval=full_interval,
                     widening=widening, function_count=count)


# ---------------------------------------------------------------------------
# slice-decomposition consistency


def holder_chain_check(evaluate, curve: CurveSpec, scale_r: float, p: float, q: float,
                       n_offsets: int = 21) -> tuple:
    """Direct check of the slice Hoelder step of the tube estimate.

    Compares the sliced q-th power integral over offsets |y| <= 1/R with
    sup_y |Sigma_y|^(1/p') times the integrated L^(pq) slice norms; returns
    (lhs, rhs, holds).
    """
    offsets = np.linspace(-1.0 / scale_r, 1.0 / scale_r, n_offsets)
    ts = np.linspace(0.0, TWO_PI, 1024, endpoint=False)
    speed = curve.speed(ts)
    step = TWO_PI / 1024
    length = float(np.sum(speed) * step)
    lhs_slices, rhs_slices = [], []
    for off in offsets:
        vals = np.abs(evaluate(curve.points(ts, off)))
        lq_q = float(np.sum(vals ** q * speed) * step)
        if math.isinf(p):
            pq_norm_q = float(np.max(vals)) ** q
            sigma_exp = 1.0
        else:
            pq_norm_q = float(np.sum(vals ** (p * q) * speed) * step) ** (1.0 / p)
            sigma_exp = 1.0 - 1.0 / p
        lhs_slices.append(lq_q)
        rhs_slices.append(length ** sigma_exp * pq_norm_q)
    dy = offsets[1] - offsets[0]
    lhs = float(np.trapezoid(lhs_slices, dx=dy))
    rhs = float(np.trapezoid(rhs_slices, dx=dy))
    return lhs, rhs, bool(lhs <= rhs * (1 + 1e-9))
