"""Reproducible experiment suites behind the CLI subcommands.

Every suite takes a seed and draws through a counter-based generator, one
stream per draw, so reports are identical across runs and platforms for the
same configuration.  Draw order within a stream is part of the contract:
do not reorder the rng calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import jsonable, make_rng, parallel_map
from . import manifolds as mf
from . import restriction as rn
from . import spectra as sp
from . import uncertainty as un

BUMP_CENTER = 1.0


# ---------------------------------------------------------------------------
# randomized uncertainty certificates


@dataclass
class _SuiteContext:
    kind: str
    manifold: object
    basis: sp.SpectralBasis
    grid: mf.QuadratureGrid


def _build_context(kind: str) -> _SuiteContext:
    if kind == "circle":
        manifold = mf.Circle1D(mf.sine_profile())
        basis = sp.circle_basis(manifold, 16)
        grid = manifold.build_grid(512)
    elif kind == "torus2-flat":
        manifold = mf.FlatTorus2D()
        basis = sp.torus_basis(manifold, 8.0)
        grid = manifold.build_grid(64)
    elif kind == "torus2-warped":
        manifold = mf.WarpedTorus2D(mf.sine_profile())
        basis = sp.torus_basis(manifold, 6.0)
        grid = manifold.build_grid(96)
    elif kind == "sphere":
        manifold = mf.Sphere2()
        basis = sp.sphere_basis(10)
        grid = manifold.build_grid(48)
    else:
        raise ValueError(f"unknown manifold kind {kind!r}")
    return _SuiteContext(kind=kind, manifold=manifold, basis=basis, grid=grid)


def _random_region(ctx: _SuiteContext, rng: np.random.Generator):
    if ctx.kind == "circle":
        length = ctx.manifold.length
        k = int(rng.integers(1, 4))
        arcs = [(rng.uniform(0.0, length), rng.uniform(0.05, 0.5) * length / k)
                for _ in range(k)]
        return mf.ArcsRegion(ctx.manifold, arcs)
    if ctx.kind in ("torus2-flat", "torus2-warped"):
        if ctx.kind == "torus2-flat":
            lx, ly, y_lo = ctx.manifold.lx, ctx.manifold.ly, 0.0
        else:
            lx, ly, y_lo = mf.TWO_PI, mf.TWO_PI, -math.pi
        k = int(rng.integers(1, 3))
        xs, ys = [], []
        for _ in range(k):
            x0 = rng.uniform(0.0, lx)
            y0 = y_lo + rng.uniform(0.0, ly)
            xs.append((x0, x0 + rng.uniform(0.1, 0.6) * lx / k))
            ys.append((y0, y0 + rng.uniform(0.1, 0.6) * ly / k))
        return mf.rect_region(ctx.manifold, xs, ys)
    theta0 = rng.uniform(0.2, math.pi - 1.2)
    width = rng.uniform(0.2, 1.0)
    phi_intervals = None
    if rng.random() < 0.5:
        phi0 = rng.uniform(0.0, mf.TWO_PI)
        phi_intervals = [(phi0, phi0 + rng.uniform(0.5, mf.TWO_PI))]
    return mf.sphere_band(ctx.manifold, [(theta0, theta0 + width)], phi_intervals)


def _random_window(ctx: _SuiteContext, rng: np.random.Generator) -> un.SpectralWindow:
    group_list = list(ctx.basis.groups().keys())
    n_groups = int(rng.integers(1, 4))
    chosen = rng.choice(len(group_list), size=min(n_groups, len(group_list)), replace=False)
    window = un.window_from_groups(ctx.basis, [group_list[i] for i in sorted(chosen)])
    if rng.random() < 0.25 and window.count > 1:
        take = int(rng.integers(1, window.count + 1))
        picked = rng.choice(window.indices, size=take, replace=False)
        window = un.window_from_indices(ctx.basis, picked)
    return window


def _random_field(ctx: _SuiteContext, window: un.SpectralWindow,
                  region, rng: np.random.Generator) -> un.Field:
    mode = rng.random()
    coeffs = np.zeros(ctx.basis.size, dtype=complex)
    in_window = rng.normal(size=window.count) + 1j * rng.normal(size=window.count)
    coeffs[window.indices] = in_window
    if mode < 0.5:
        return un.Field.from_coefficients(ctx.basis, ctx.grid, coeffs)
    if mode < 0.85:
        noise = rng.normal(size=ctx.basis.size) + 1j * rng.normal(size=ctx.basis.size)
        coeffs = coeffs + 0.3 * noise / math.sqrt(ctx.basis.size)
        return un.Field.from_coefficients(ctx.basis, ctx.grid, coeffs)
    samples = region.indicator(ctx.grid.points).astype(float)
    if float(np.sum(ctx.grid.weights * samples ** 2)) <= 0.0:
        return un.Field.from_coefficients(ctx.basis, ctx.grid, coeffs)
    return un.Field.from_samples(ctx.basis, ctx.grid, samples)


DEFAULT_SUITE_KINDS = ("circle", "torus2-flat", "torus2-warped", "sphere")


def randomized_certificate_suite(kinds=DEFAULT_SUITE_KINDS, draws: int = 100,
                                 seed: int = 0, keep_certificates: bool = True) -> dict:
    """Randomized (f, E, S) certificates; the quantitative bound must hold
    on every non-vacuous draw.  Returns a JSON-ready report."""
    contexts = [_build_context(k) for k in kinds]
    valid = 0
    vacuous = 0
    attempts = 0
    violations = []
    certificates = []
    min_margin = math.inf
    max_attempts = 4 * draws
    while valid < draws and attempts < max_attempts:
        ctx = contexts[attempts % len(contexts)]
        rng = make_rng(seed, stream=attempts + 1)
        attempts += 1
        window = _random_window(ctx, rng)
        region = _random_region(ctx, rng)
        f = _random_field(ctx, window, region, rng)
        cert = un.certify(f, region, window, provenance={
            "suite_draw": attempts - 1, "seed": seed, "kind": ctx.kind})
        if cert.vacuous:
            vacuous += 1
        else:
            valid += 1
            min_margin = min(min_margin, cert.rhs_quant - cert.lhs)
            if not cert.holds_quant:
                violations.append({
                    "draw": attempts - 1, "seed": seed, "kind": ctx.kind,
                    "window": window.description, "region": region.description,
                    "lhs": cert.lhs, "rhs_quant": cert.rhs_quant})
        if keep_certificates:
            certificates.append(cert.to_json_dict())
    return jsonable({
        "seed": seed,
        "manifolds": list(kinds),
        "requested": draws,
        "valid": valid,
        "vacuous": vacuous,
        "attempts": attempts,
        "violations": violations,
        "all_hold": not violations,
        "min_margin": None if valid == 0 else min_margin,
        "certificates": certificates,
    })


# ---------------------------------------------------------------------------
# bump-function Fourier ratio sweep


def smooth_bump_samples(s: np.ndarray, center: float, width: float) -> np.ndarray:
    """C-infinity bump supported exactly on [center - width/2, center + width/2]."""
    u = 2.0 * (np.asarray(s, dtype=float) - center) / width
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def bump_fourier_sweep(k_min: int = 3, k_max: int = 7) -> dict:
    """Fourier-ratio / support products for bumps of width 2^-k at scale 2^k.

    Works on the flat circle of circumference 2*pi; the ratio column is
    FR_R(f) * sqrt(R * |E^(1/R)|), whose sweep minimum is the measured
    stand-in for the unspecified constant of the support bound.
    """
    if not 1 <= k_min <= k_max:
        raise ValueError("need 1 <= k_min <= k_max")
    rows = []
    for k in range(k_min, k_max + 1):
        scale = float(2 ** k)
        width = 2.0 ** (-k)
        manifold = mf.circle_of_length(mf.TWO_PI)
        resolution = max(2048, 1024 * 2 ** max(0, k - 3))
        grid = manifold.build_grid(resolution)
        basis = sp.circle_basis(manifold, int(scale))
        s_vals = np.asarray(manifold.reparam.s_of_x(grid.points[:, 0]))
        samples = smooth_bump_samples(s_vals, BUMP_CENTER, width)
        f = un.Field.from_samples(basis, grid, samples)
        region = mf.ArcsRegion(manifold, [(BUMP_CENTER - width / 2, width)])
        fr = un.fourier_ratio(f, scale)
        ratio = un.fourier_support_product(f, region, scale)
        rows.append({
            "k": k, "R": scale, "width": width,
            "neighborhood_measure": mf.neighborhood(region, 1.0 / scale).measure,
            "fourier_ratio": fr, "ratio": ratio, "resolution": resolution,
        })
    return jsonable({
        "k_min": k_min, "k_max": k_max, "rows": rows,
        "min_ratio": min(r["ratio"] for r in rows),
        "max_ratio": max(r["ratio"] for r in rows),
    })


# ---------------------------------------------------------------------------
# tubular certificate sweep


def tubular_sweep(lam_lo: float = 20.0, lam_hi: float = 60.0,
                  radii=(8.0, 16.0, 32.0), max_eigenvalues: int = 60,
                  grid_resolution: int = 256, seed: int = 0) -> dict:
    """Singleton-window tube certificates over lattice eigenvalues.

    Uses the translate-stability mode with hypothesis constant sqrt(R); the
    uniform constant is measured as the sweep minimum of lhs/rhs and the
    lambda-growth exponent is fitted per R.
    """
    manifold = mf.FlatTorus2D()
    basis = sp.torus_basis(manifold, lam_hi + 1.0)
    curve = rn.circle_curve(manifold=manifold)
    grid = manifold.build_grid(grid_resolution)
    qs = sorted({int(g) for g in basis.groups()
                 if lam_lo <= basis.group_lambda(g) <= lam_hi})
    if len(qs) > max_eigenvalues:
        pick = np.linspace(0, len(qs) - 1, max_eigenvalues).round().astype(int)
        qs = [qs[i] for i in sorted(set(pick.tolist()))]
    tube_cache = {float(R): rn.tube_measure(curve, 1.0 / R, grid) for R in radii}
    reports = []

    def one(args):
        q, R = args
        lam = math.sqrt(q)
        window = un.window_from_groups(basis, [q])
        return rn.tubular_certificate(
            window, curve, lam=lam, scale_r=float(R), p=math.inf, q=2.0, r=3.0,
            a_value=math.sqrt(R), tube_measure_value=tube_cache[float(R)],
            mode="translate-stable", window_kind="unit")

    # the hypothesis needs R <= lambda, so each R only sweeps its admissible tail
    jobs = [(q, R) for R in radii for q in qs if math.sqrt(q) >= R]
    if not jobs:
        raise ValueError("no admissible (lambda, R) pairs: every R exceeds the eigenvalue range")
    reports = parallel_map(one, jobs)
    slopes = {}
    for R in radii:
        sel = [t for t in reports if t.scale_r == float(R)]
        xs = [math.log(t.lam) for t in sel]
        ys = [math.log(t.ratio) for t in sel]
        slopes[float(R)] = float(np.polyfit(xs, ys, 1)[0]) if len(sel) >= 2 else 0.0
    return jsonable({
        "seed": seed, "lam_lo": lam_lo, "lam_hi": lam_hi, "radii": list(radii),
        "grid_resolution": grid_resolution,
        "eigenvalue_count": len(qs),
        "tube_measures": {f"{R:g}": tube_cache[float(R)] for R in radii},
        "min_ratio": min(t.ratio for t in reports),
        "max_ratio": max(t.ratio for t in reports),
        "fitted_exponents": {f"{R:g}": slopes[float(R)] for R in radii},
        "max_fitted_exponent": max(abs(s) for s in slopes.values()),
        "reports": [t.to_json_dict() for t in reports],
    })


# ---------------------------------------------------------------------------
# curve restriction ratio scan


def curve_offset_scan(lam_lo: float = 10.0, lam_hi: float = 50.0, offset_scale: float = 32.0,
                      n_offsets: int = 3, seed: int = 0, extra_combos: int = 1) -> dict:
    """Restriction-ratio intervals for real eigenfunctions under offsets."""
    manifold = mf.FlatTorus2D()
    basis = sp.torus_basis(manifold, lam_hi + 0.5)
    curve = rn.circle_curve(manifold=manifold)
    step = 1.0 / (offset_scale * n_offsets)
    offsets = [i * step for i in range(-n_offsets, n_offsets + 1)]
    scan = rn.curve_ratio_scan(basis, curve, offsets, lam_lo, lam_hi,
                               rng=make_rng(seed, stream=9000), extra_combos=extra_combos)
    payload = scan.to_json_dict()
    payload.update({"seed": seed, "lam_lo": lam_lo, "lam_hi": lam_hi,
                    "offset_scale": offset_scale, "curve": curve.name})
    return jsonable(payload)
