"""Model manifolds, quadrature grids, and measurable regions.

The model families are a metric circle (a 2*pi-periodic conformal factor
h(t) on [-pi, pi]), flat and warped 2-tori, and the round 2-sphere.  Each
manifold builds tensor-product quadrature grids: uniform nodes in periodic
directions (trapezoidal, spectrally accurate for the smooth integrands used
here) and Gauss-Legendre nodes in cos(theta) on the sphere.

Regions are stored analytically (interval/band unions); grid membership and
per-node measure apportionment are derived from the analytic description, so
region measures are exact rather than grid-quantized.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from ._util import NumericalError

TWO_PI = 2.0 * math.pi

DEFAULT_CIRCLE_RESOLUTION = 512
DEFAULT_TORUS_RESOLUTION = 128
DEFAULT_SPHERE_RESOLUTION = 128

_GL7_NODES, _GL7_WEIGHTS = np.polynomial.legendre.leggauss(7)


# ---------------------------------------------------------------------------
# metric profiles


@dataclass(frozen=True)
class MetricProfile1D:
    """Positive 2*pi-periodic metric coefficient h on [-pi, pi]."""

    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "h"

    def __post_init__(self):
        ts = np.linspace(-math.pi, math.pi, 2048)
        vals = self(ts)
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"metric profile {self.name!r} is not finite on [-pi, pi]")
        if np.min(vals) <= 0.0:
            raise ValueError(f"metric profile {self.name!r} must be strictly positive")
        scale = float(np.max(vals))
        if abs(float(vals[0]) - float(vals[-1])) > 1e-10 * scale:
            raise ValueError(f"metric profile {self.name!r} is not 2*pi-periodic")

    def __call__(self, t) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)

    def sqrt(self, t) -> np.ndarray:
        return np.sqrt(self(t))


def flat_profile(value: float = 1.0) -> MetricProfile1D:
    v = float(value)
    if v <= 0:
        raise ValueError("flat profile value must be positive")
    return MetricProfile1D(lambda t: np.full_like(t, v, dtype=float), name=f"{v:g}")


def sine_profile(offset: float = 2.0, amplitude: float = 1.0) -> MetricProfile1D:
    """The model profile offset + amplitude*sin(t)."""
    if offset - abs(amplitude) <= 0:
        raise ValueError("profile must stay positive: need offset > |amplitude|")
    label = f"{offset:g}+sin" if amplitude == 1.0 else f"{offset:g}+{amplitude:g}*sin"
    return MetricProfile1D(lambda t: offset + amplitude * np.sin(t), name=label)


_EXPR_TOKEN = re.compile(r"[A-Za-z_]+|\d+\.?\d*(?:[eE][+-]?\d+)?|\*\*|[+\-*/().,]|\s+")
_EXPR_NAMES = {"sin", "cos", "exp", "sqrt", "abs", "pi", "t"}


def profile_from_expression(expr: str) -> MetricProfile1D:
    """Parse a metric expression such as ``"2+sin"`` or ``"3+cos(2*t)"``.

    Allowed names: sin, cos, exp, sqrt, abs, pi and the variable t; bare
    ``sin``/``cos`` are shorthand for ``sin(t)``/``cos(t)``.
    """
    text = expr.strip()
    if not text:
        raise ValueError("empty metric expression")
    pos = 0
    for match in _EXPR_TOKEN.finditer(text):
        if match.start() != pos:
            raise ValueError(f"bad metric expression {expr!r}: unexpected {text[pos]!r}")
        token = match.group()
        if token.strip() and token[0].isalpha() and token not in _EXPR_NAMES:
            raise ValueError(f"bad metric expression {expr!r}: unknown name {token!r}")
        pos = match.end()
    if pos != len(text):
        raise ValueError(f"bad metric expression {expr!r}: unexpected {text[pos]!r}")
    text = re.sub(r"\b(sin|cos)\b(?!\s*\()", r"\1(t)", text)
    env = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt,
           "abs": np.abs, "pi": math.pi, "__builtins__": {}}
    try:
        code = compile(text, "<metric>", "eval")
    except SyntaxError as exc:
        raise ValueError(f"bad metric expression {expr!r}: {exc.msg}") from exc

    def fn(t):
        return np.broadcast_to(np.asarray(eval(code, env, {"t": t}), dtype=float), np.shape(t)).copy()

    try:
        return MetricProfile1D(fn, name=expr.strip())
    except ValueError:
        raise
    except Exception as exc:
        raise ValueError(f"bad metric expression {expr!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# arc-length reparameterization


@dataclass(frozen=True)
class ArcLengthReparam:
    """Monotone change of variables s(x) with s(-pi) = 0 and s(pi) = L."""

    length: float
    x_nodes: np.ndarray
    s_nodes: np.ndarray
    _fwd: CubicHermiteSpline = field(repr=False)
    _inv: CubicHermiteSpline = field(repr=False)

    def s_of_x(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        k = np.floor((x + math.pi) / TWO_PI)
        return self._fwd(x - TWO_PI * k) + self.length * k

    def x_of_s(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        k = np.floor(s / self.length)
        return self._inv(s - self.length * k) + TWO_PI * k


def arc_length_reparam(profile: MetricProfile1D, resolution: int = DEFAULT_CIRCLE_RESOLUTION) -> ArcLengthReparam:
    """Tabulate s(x) = integral of sqrt(h) from -pi to x and its inverse.

    Uses composite 7-point Gauss-Legendre quadrature per cell for the
    cumulative table and cubic Hermite interpolation with the exact slopes
    sqrt(h) and 1/sqrt(h), which keeps the round trip x -> s -> x below
    1e-9 at the default resolution.
    """
    if resolution < 64:
        raise ValueError(f"resolution must be >= 64, got {resolution}")
    xs = np.linspace(-math.pi, math.pi, resolution + 1)
    mid = 0.5 * (xs[:-1] + xs[1:])
    half = 0.5 * (xs[1] - xs[0])
    samples = profile.sqrt(mid[:, None] + half * _GL7_NODES[None, :])
    cell = half * samples @ _GL7_WEIGHTS
    if np.min(cell) <= 0.0:
        raise NumericalError("arc-length table is not strictly increasing")
    s = np.concatenate([[0.0], np.cumsum(cell)])
    slopes = profile.sqrt(xs)
    fwd = CubicHermiteSpline(xs, s, slopes)
    inv = CubicHermiteSpline(s, xs, 1.0 / slopes)
    rep = ArcLengthReparam(length=float(s[-1]), x_nodes=xs, s_nodes=s, _fwd=fwd, _inv=inv)
    probe = np.linspace(-math.pi, math.pi, 4 * resolution + 1)
    if np.any(np.diff(rep.s_of_x(probe)) <= 0.0):
        raise NumericalError("arc-length reparameterization lost monotonicity")
    if float(np.max(np.abs(rep.x_of_s(rep.s_of_x(probe)) - probe))) > 1e-9:
        raise NumericalError("arc-length round trip exceeds 1e-9")
    return rep


# ---------------------------------------------------------------------------
# quadrature grids


@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes and positive weights realizing the Riemannian volume integral.

    ``axes`` holds per-axis node coordinates of the tensor-product grid and
    ``cell_edges`` the matching cell boundaries (length n+1 per axis); 2-D
    nodes are flattened in row-major order over the axes.
    """

    points: np.ndarray
    weights: np.ndarray
    axes: tuple
    cell_edges: tuple
    axis_names: tuple

    def __post_init__(self):
        if np.min(self.weights) <= 0:
            raise NumericalError("quadrature weights must be positive")

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, samples: np.ndarray) -> complex:
        return complex(np.sum(self.weights * np.asarray(samples)))


def _uniform_axis(lo: float, period: float, n: int):
    step = period / n
    nodes = lo + step * np.arange(n)
    edges = lo - 0.5 * step + step * np.arange(n + 1)
    return nodes, edges, step


# ---------------------------------------------------------------------------
# manifolds


class Circle1D:
    """Circle with metric h(x) dx^2 on [-pi, pi); Riemannian volume is L."""

    kind = "circle"
    dimension = 1

    def __init__(self, profile: MetricProfile1D, resolution: int = DEFAULT_CIRCLE_RESOLUTION):
        self.profile = profile
        self.reparam = arc_length_reparam(profile, resolution)
        self.volume = self.reparam.length

    @property
    def length(self) -> float:
        return self.volume

    def build_grid(self, resolution: int = DEFAULT_CIRCLE_RESOLUTION) -> QuadratureGrid:
        if resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {resolution}")
        xs, edges, step = _uniform_axis(-math.pi, TWO_PI, resolution)
        weights = self.profile.sqrt(xs) * step
        return QuadratureGrid(points=xs[:, None], weights=weights, axes=(xs,),
                              cell_edges=(edges,), axis_names=("x",))

    def default_grid(self) -> QuadratureGrid:
        return self.build_grid(DEFAULT_CIRCLE_RESOLUTION)

    def describe(self) -> str:
        return f"circle(h={self.profile.name}, L={self.volume:.12g})"


def circle_of_length(length: float) -> Circle1D:
    """Flat circle of a given circumference (constant profile)."""
    if length <= 0:
        raise ValueError("length must be positive")
    return Circle1D(flat_profile((length / TWO_PI) ** 2), resolution=64)


class FlatTorus2D:
    """Flat torus [0, lx) x [0, ly) with the Euclidean metric."""

    kind = "torus2-flat"
    dimension = 2

    def __init__(self, lx: float = TWO_PI, ly: float = TWO_PI):
        if lx <= 0 or ly <= 0:
            raise ValueError("side lengths must be positive")
        self.lx = float(lx)
        self.ly = float(ly)
        self.volume = self.lx * self.ly

    def build_grid(self, resolution: int = DEFAULT_TORUS_RESOLUTION) -> QuadratureGrid:
        if resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {resolution}")
        xs, xe, dx = _uniform_axis(0.0, self.lx, resolution)
        ys, ye, dy = _uniform_axis(0.0, self.ly, resolution)
        pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
        weights = np.full(pts.shape[0], dx * dy)
        return QuadratureGrid(points=pts, weights=weights, axes=(xs, ys),
                              cell_edges=(xe, ye), axis_names=("x", "y"))

    def default_grid(self) -> QuadratureGrid:
        return self.build_grid(DEFAULT_TORUS_RESOLUTION)

    def describe(self) -> str:
        return f"flat torus({self.lx:.12g} x {self.ly:.12g})"


class WarpedTorus2D:
    """Product torus with metric dx^2 + h(y) dy^2, x in [0, 2*pi), y in [-pi, pi)."""

    kind = "torus2-warped"
    dimension = 2

    def __init__(self, profile: MetricProfile1D, resolution: int = DEFAULT_CIRCLE_RESOLUTION):
        self.profile = profile
        self.reparam = arc_length_reparam(profile, resolution)
        self.length_y = self.reparam.length
        self.volume = TWO_PI * self.length_y

    def build_grid(self, resolution: int = DEFAULT_TORUS_RESOLUTION) -> QuadratureGrid:
        if resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {resolution}")
        xs, xe, dx = _uniform_axis(0.0, TWO_PI, resolution)
        ys, ye, dy = _uniform_axis(-math.pi, TWO_PI, resolution)
        pts = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
        wy = self.profile.sqrt(ys) * dy
        weights = (np.full(xs.shape, dx)[:, None] * wy[None, :]).reshape(-1)
        return QuadratureGrid(points=pts, weights=weights, axes=(xs, ys),
                              cell_edges=(xe, ye), axis_names=("x", "y"))

    def default_grid(self) -> QuadratureGrid:
        return self.build_grid(DEFAULT_TORUS_RESOLUTION)

    def describe(self) -> str:
        return f"warped torus(h={self.profile.name}, |M|={self.volume:.12g})"


class Sphere2:
    """Round unit 2-sphere, coordinates (theta, phi) with area 4*pi."""

    kind = "sphere"
    dimension = 2

    def __init__(self):
        self.volume = 4.0 * math.pi

    def build_grid(self, resolution: int = DEFAULT_SPHERE_RESOLUTION) -> QuadratureGrid:
        """Gauss-Legendre in cos(theta) (``resolution`` nodes) x uniform phi."""
        if resolution < 16:
            raise ValueError(f"resolution must be >= 16, got {resolution}")
        u, wu = np.polynomial.legendre.leggauss(resolution)
        order = np.argsort(-u)  # theta ascending
        u, wu = u[order], wu[order]
        thetas = np.arccos(u)
        # cell edges in theta from cumulative Gauss-Legendre weights in u
        u_edges = np.concatenate([[1.0], 1.0 - np.cumsum(wu)])
        u_edges[-1] = -1.0
        theta_edges = np.arccos(np.clip(u_edges, -1.0, 1.0))
        nphi = 2 * resolution
        phis, phi_edges, dphi = _uniform_axis(0.0, TWO_PI, nphi)
        pts = np.stack(np.meshgrid(thetas, phis, indexing="ij"), axis=-1).reshape(-1, 2)
        weights = (wu[:, None] * np.full(nphi, dphi)[None, :]).reshape(-1)
        return QuadratureGrid(points=pts, weights=weights, axes=(thetas, phis),
                              cell_edges=(theta_edges, phi_edges), axis_names=("theta", "phi"))

    def default_grid(self) -> QuadratureGrid:
        return self.build_grid(DEFAULT_SPHERE_RESOLUTION)

    def describe(self) -> str:
        return "sphere"


ManifoldModel = Circle1D | FlatTorus2D | WarpedTorus2D | Sphere2


# ---------------------------------------------------------------------------
# interval utilities (all half-open [a, b) semantics, lengths positive)


def merge_circle_intervals(intervals: Sequence[tuple], period: float) -> list:
    """Canonicalize a union of arcs on a circle of the given circumference.

    Returns disjoint arcs (start, length) with start in [0, period); at most
    one arc wraps (start + length > period).  Full coverage collapses to
    [(0, period)].
    """
    if period <= 0:
        raise ValueError("period must be positive")
    pieces = []
    for a, ln in intervals:
        ln = float(ln)
        if ln <= 0:
            continue
        if ln >= period:
            return [(0.0, period)]
        a = float(a) % period
        if a + ln <= period:
            pieces.append((a, a + ln))
        else:
            pieces.append((a, period))
            pieces.append((0.0, a + ln - period))
    merged = merge_line_intervals(pieces, 0.0, period)
    if not merged:
        return []
    if len(merged) == 1 and merged[0][0] <= 0.0 and merged[0][1] >= period:
        return [(0.0, period)]
    # rejoin a piece ending at period with a piece starting at 0
    if len(merged) >= 2 and merged[0][0] <= 0.0 and merged[-1][1] >= period:
        a, _ = merged[-1]
        _, b = merged[0]
        merged = merged[1:-1] + [(a, period + b)]
    return sorted((a, b - a) for a, b in merged)


def circle_overlap(arcs: Sequence[tuple], lo: float, hi: float, period: float) -> float:
    """Length of the intersection of a canonical arc union with [lo, hi)."""
    if hi <= lo:
        return 0.0
    total = 0.0
    for a, ln in arcs:
        for shift in (-period, 0.0, period, 2 * period):
            a0 = a + shift
            total += max(0.0, min(a0 + ln, hi) - max(a0, lo))
    return total


def merge_line_intervals(intervals: Sequence[tuple], lo: float, hi: float) -> list:
    """Clip intervals (a, b) to [lo, hi] and merge overlaps."""
    clipped = sorted((max(lo, float(a)), min(hi, float(b))) for a, b in intervals if b > a)
    merged = []
    for a, b in clipped:
        if b <= a:
            continue
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def line_overlap(intervals: Sequence[tuple], lo: float, hi: float) -> float:
    return sum(max(0.0, min(b, hi) - max(a, lo)) for a, b in intervals)


# ---------------------------------------------------------------------------
# regions


class ArcsRegion:
    """Union of arcs on a circle, stored in arc-length coordinates."""

    def __init__(self, manifold: Circle1D, arcs: Sequence[tuple]):
        self.manifold = manifold
        self.arcs = merge_circle_intervals(arcs, manifold.length)
        self.measure = sum(ln for _, ln in self.arcs)
        self.description = "arcs[" + ", ".join(f"({a:.6g},{ln:.6g})" for a, ln in self.arcs) + "]"

    def indicator(self, points: np.ndarray) -> np.ndarray:
        s = np.asarray(self.manifold.reparam.s_of_x(np.asarray(points).reshape(-1))) % self.manifold.length
        mask = np.zeros(s.shape, dtype=bool)
        L = self.manifold.length
        for a, ln in self.arcs:
            mask |= ((s - a) % L) < ln
        return mask

    def member_weights(self, grid: QuadratureGrid) -> np.ndarray:
        L = self.manifold.length
        s_edges = np.asarray(self.manifold.reparam.s_of_x(grid.cell_edges[0]))
        out = np.empty(grid.size)
        for i in range(grid.size):
            ov = circle_overlap(self.arcs, s_edges[i] % L, s_edges[i] % L + (s_edges[i + 1] - s_edges[i]), L)
            out[i] = min(grid.weights[i], ov)
        return out

    def boundary_points(self, grid: QuadratureGrid | None = None) -> np.ndarray:
        ends = []
        for a, ln in self.arcs:
            if ln < self.manifold.length:
                ends.extend([a, a + ln])
        if not ends:
            return np.empty((0, 1))
        xs = np.asarray(self.manifold.reparam.x_of_s(np.asarray(ends) % self.manifold.length))
        return xs.reshape(-1, 1)


class _Axis1D:
    """One factor of a product region: interval union plus its measure map."""

    def __init__(self, intervals, lo, hi, periodic, measure_fn):
        if periodic:
            self.intervals = merge_circle_intervals([(a, b - a) for a, b in intervals], hi - lo)
            self.intervals = [(lo + a, lo + a + ln) for a, ln in self.intervals]
        else:
            self.intervals = merge_line_intervals(intervals, lo, hi)
        self.lo, self.hi, self.periodic = lo, hi, periodic
        self.measure_fn = measure_fn
        self.measure = sum(measure_fn(a, b) for a, b in self.intervals)

    def contains(self, values: np.ndarray) -> np.ndarray:
        v = np.asarray(values, dtype=float)
        if self.periodic:
            period = self.hi - self.lo
            v = self.lo + (v - self.lo) % period
        mask = np.zeros(v.shape, dtype=bool)
        period = self.hi - self.lo
        for a, b in self.intervals:
            mask |= (v >= a) & (v < b)
            if self.periodic and b > self.hi:
                mask |= v < (self.lo + (b - self.hi) % period)
        return mask

    def cell_overlap_measure(self, lo: float, hi: float) -> float:
        total = 0.0
        shifts = (0.0,)
        if self.periodic:
            period = self.hi - self.lo
            shifts = (-period, 0.0, period)
        for a, b in self.intervals:
            for sh in shifts:
                x0, x1 = max(a + sh, lo), min(b + sh, hi)
                if x1 > x0:
                    total += self.measure_fn(x0, x1)
        return total

    def endpoints(self) -> list:
        out = []
        for a, b in self.intervals:
            out.extend([a, b])
        return out


class ProductRegion:
    """Axis-aligned product region on a 2-D model (rectangle or band union)."""

    def __init__(self, manifold, axis0: _Axis1D, axis1: _Axis1D, description: str):
        self.manifold = manifold
        self.axis0 = axis0
        self.axis1 = axis1
        self.measure = axis0.measure * axis1.measure
        self.description = description

    def indicator(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points)
        return self.axis0.contains(pts[:, 0]) & self.axis1.contains(pts[:, 1])

    def member_weights(self, grid: QuadratureGrid) -> np.ndarray:
        e0, e1 = grid.cell_edges
        m0 = np.array([self.axis0.cell_overlap_measure(e0[i], e0[i + 1]) for i in range(len(e0) - 1)])
        m1 = np.array([self.axis1.cell_overlap_measure(e1[j], e1[j + 1]) for j in range(len(e1) - 1)])
        mw = (m0[:, None] * m1[None, :]).reshape(-1)
        return np.minimum(grid.weights, mw)

    def boundary_points(self, grid: QuadratureGrid | None = None) -> np.ndarray:
        n = 256 if grid is None else max(len(grid.axes[0]), len(grid.axes[1]))
        pts = []
        for a in self.axis0.endpoints():
            for c, d in self.axis1.intervals:
                ts = np.linspace(c, d, n)
                pts.append(np.stack([np.full(n, a), ts], axis=-1))
        for b in self.axis1.endpoints():
            for c, d in self.axis0.intervals:
                ts = np.linspace(c, d, n)
                pts.append(np.stack([ts, np.full(n, b)], axis=-1))
        if not pts:
            return np.empty((0, 2))
        return np.concatenate(pts, axis=0)


def rect_region(manifold, x_intervals: Sequence[tuple], y_intervals: Sequence[tuple]) -> ProductRegion:
    """Product of interval unions on a flat or warped torus."""
    if isinstance(manifold, FlatTorus2D):
        ax = _Axis1D(x_intervals, 0.0, manifold.lx, True, lambda a, b: b - a)
        ay = _Axis1D(y_intervals, 0.0, manifold.ly, True, lambda a, b: b - a)
    elif isinstance(manifold, WarpedTorus2D):
        rep = manifold.reparam
        ax = _Axis1D(x_intervals, 0.0, TWO_PI, True, lambda a, b: b - a)
        ay = _Axis1D(y_intervals, -math.pi, math.pi, True,
                     lambda a, b: float(rep.s_of_x(b) - rep.s_of_x(a)))
    else:
        raise ValueError(f"rect_region expects a torus, got {manifold.kind}")
    return ProductRegion(manifold, ax, ay, f"rect(x={list(ax.intervals)}, y={list(ay.intervals)})")


def sphere_band(manifold: Sphere2, theta_intervals: Sequence[tuple],
                phi_intervals: Sequence[tuple] | None = None) -> ProductRegion:
    """Union of latitude bands, optionally cut to azimuthal sectors."""
    if not isinstance(manifold, Sphere2):
        raise ValueError("sphere_band expects the sphere")
    a_theta = _Axis1D(theta_intervals, 0.0, math.pi, False,
                      lambda a, b: math.cos(a) - math.cos(b))
    if phi_intervals is None:
        phi_intervals = [(0.0, TWO_PI)]
    a_phi = _Axis1D(phi_intervals, 0.0, TWO_PI, True, lambda a, b: b - a)
    return ProductRegion(manifold, a_theta, a_phi,
                         f"band(theta={list(a_theta.intervals)}, phi={list(a_phi.intervals)})")


def equatorial_band(manifold: Sphere2, half_width: float) -> ProductRegion:
    """Band |theta - pi/2| <= half_width; measure 4*pi*sin(half_width)."""
    if not 0 < half_width <= math.pi / 2:
        raise ValueError("half_width must lie in (0, pi/2]")
    return sphere_band(manifold, [(math.pi / 2 - half_width, math.pi / 2 + half_width)])


class FullRegion:
    """The whole manifold."""

    def __init__(self, manifold):
        self.manifold = manifold
        self.measure = manifold.volume
        self.description = "full"

    def indicator(self, points: np.ndarray) -> np.ndarray:
        return np.ones(np.asarray(points).shape[0], dtype=bool)

    def member_weights(self, grid: QuadratureGrid) -> np.ndarray:
        return grid.weights.copy()

    def boundary_points(self, grid: QuadratureGrid | None = None) -> np.ndarray:
        dim = getattr(self.manifold, "dimension", 1)
        return np.empty((0, dim))


RegionSpec = ArcsRegion | ProductRegion | FullRegion


def neighborhood(region: ArcsRegion, r: float) -> ArcsRegion:
    """The r-neighborhood of an arc union, with exact overlap merging."""
    if r <= 0:
        raise ValueError(f"neighborhood radius must be positive, got {r}")
    if not isinstance(region, ArcsRegion):
        raise ValueError("neighborhood is defined for circle arc regions")
    grown = [(a - r, ln + 2 * r) for a, ln in region.arcs]
    return ArcsRegion(region.manifold, grown)
