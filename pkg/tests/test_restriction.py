import math

import numpy as np
import pytest

import speclab.manifolds as mf
import speclab.restriction as rn
import speclab.spectra as sp
import speclab.uncertainty as un
from speclab._util import make_rng

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def curve(flat_torus):
    return rn.circle_curve(manifold=flat_torus)


@pytest.fixture(scope="module")
def flat_torus():
    return mf.FlatTorus2D()


# ---------------------------------------------------------------------------
# curves


def test_default_curve_geometry(curve):
    assert curve.curvature_ok
    assert curve.length() == pytest.approx(math.pi / 2, rel=1e-12)
    assert curve.min_curvature_radius() == pytest.approx(0.25, rel=1e-12)
    ts = np.linspace(0, TWO_PI, 64)
    assert np.allclose(np.abs(curve.curvature(ts)), 4.0)


def test_open_curve_rejected(flat_torus):
    with pytest.raises(ValueError, match="not closed"):
        rn.CurveSpec(x=lambda t: t, y=lambda t: 0 * t,
                     dx=lambda t: np.ones_like(t), dy=lambda t: 0 * t,
                     ddx=lambda t: 0 * t, ddy=lambda t: 0 * t, manifold=flat_torus)


# ---------------------------------------------------------------------------
# restriction norms


def test_constant_eigenfunction_norm(curve, flat_torus):
    basis = sp.torus_basis(flat_torus, 2.0)
    e0 = basis.pairs[0]
    got = rn.restriction_norm(e0.evaluate, curve)
    expected = math.sqrt(curve.length()) / math.sqrt(flat_torus.volume)
    assert got == pytest.approx(expected, rel=1e-10)


def test_exponential_modulus_one_norm(curve, flat_torus):
    # |exp(i(mx+ny))| = 1 makes every restricted L^2 norm equal
    basis = sp.torus_basis(flat_torus, 4.0)
    expected = math.sqrt(curve.length()) / (2 * math.pi)
    for j in (1, 5, 11):
        pair = basis.pairs[j]
        got = rn.restriction_norm(pair.evaluate, curve)
        assert got == pytest.approx(expected, rel=1e-8)


def test_real_eigenfunction_norm_against_refined_quadrature(curve, flat_torus):
    m, n = 3, 2
    amp = math.sqrt(2.0) / (2 * math.pi)

    def f(points):
        return amp * np.cos(m * points[:, 0] + n * points[:, 1])

    got = rn.restriction_norm(f, curve)
    ts = np.linspace(0, TWO_PI, 20480, endpoint=False)
    vals = np.abs(f(curve.points(ts))) ** 2 * curve.speed(ts)
    oracle = math.sqrt(float(np.sum(vals)) * TWO_PI / len(ts))
    assert got == pytest.approx(oracle, rel=1e-6)


def test_sup_norm_on_curve(curve, flat_torus):
    def f(points):
        return np.cos(points[:, 0])

    got = rn.restriction_norm(f, curve, q=math.inf)
    # curve spans x in [pi - 1/4, pi + 1/4]; |cos| peaks at x = pi
    assert got == pytest.approx(1.0, rel=1e-6)


# ---------------------------------------------------------------------------
# tube measures


def test_tube_exact_annulus(curve, flat_torus):
    grid = flat_torus.build_grid(512)
    for r in (0.05, 0.02):
        got = rn.tube_measure(curve, r, grid)
        assert got == pytest.approx(rn.circle_tube_measure(0.25, r), rel=0.02)
        assert got == pytest.approx(2 * r * curve.length(), rel=0.1)


def test_tube_thin_limit(curve):
    r = 1e-3
    got = rn.tube_measure(curve, r)
    assert got / (2 * r * curve.length()) == pytest.approx(1.0, abs=0.02)


def test_tube_rejects_fat_radius(curve, flat_torus):
    with pytest.raises(ValueError, match="self-overlap"):
        rn.tube_measure(curve, 0.2, flat_torus.build_grid(64))


# ---------------------------------------------------------------------------
# exponent table


def test_delta_exponent_surface_cases():
    delta, flag = rn.restriction_exponent(1, 2.0, 2)
    assert delta == pytest.approx(0.25) and not flag
    delta, flag = rn.restriction_exponent(1, math.inf, 2)
    assert delta == pytest.approx(0.5) and not flag


def test_delta_exponent_codim2_log_case():
    delta, flag = rn.restriction_exponent(1, 2.0, 3)
    assert delta == pytest.approx(0.5) and flag


def test_delta_exponent_branch_continuity():
    for n in (2, 3, 4, 5):
        p_star = 2.0 * n / (n - 1)
        lo = (n - 1) / 4.0 - (n - 2) / (2.0 * p_star)
        hi = (n - 1) / 2.0 - (n - 1) / p_star
        assert lo == pytest.approx(hi, abs=1e-14)
        delta, _ = rn.restriction_exponent(n - 1, p_star, n)
        assert delta == pytest.approx(lo, abs=1e-14)


def test_delta_exponent_rejects():
    with pytest.raises(ValueError):
        rn.restriction_exponent(0, 2.0, 2)
    with pytest.raises(ValueError):
        rn.restriction_exponent(1, 1.0, 2)


def test_log_factor_table():
    assert rn.log_factor(10.0, 1, 2.0, 2.0, 2)[1] == "1"
    assert rn.log_factor(10.0, 1, 1.0, 2.0, 3)[1] == "log"
    val, cls = rn.log_factor(10.0, 1, 2.0, 2.0, 3)
    # (k, q) = (n-2, 2) but pq = 4 != 2
    assert cls == "sqrt_log" and val == pytest.approx(math.sqrt(math.log(10.0)))


# ---------------------------------------------------------------------------
# tubular certificates


def test_certificate_reproduces_reference_arithmetic(curve, flat_torus):
    # (p, q, r) = (inf, 2, 3), singleton window, injected tube measure 2/R:
    # lhs = sqrt(2/R), rhs without constant = 1/(lambda^eps * sqrt(R))
    basis = sp.torus_basis(flat_torus, 8.0)
    window = un.window_from_groups(basis, [25])
    R = 4.0
    lam = 5.0
    rep = rn.tubular_certificate(window, curve, lam=lam, scale_r=R, p=math.inf, q=2.0,
                                 r=3.0, a_value=math.sqrt(R), tube_measure_value=2.0 / R,
                                 mode="translate-stable")
    assert rep.lhs == pytest.approx(math.sqrt(2.0 / R), rel=1e-12)
    assert rep.rhs == pytest.approx(1.0 / math.sqrt(R), rel=1e-12)
    assert rep.ratio == pytest.approx(math.sqrt(2.0), rel=1e-12)
    # with an explicit eps loss the ratio gains exactly lambda^eps
    rep_eps = rn.tubular_certificate(window, curve, lam=lam, scale_r=R, p=math.inf, q=2.0,
                                     r=3.0, a_value=math.sqrt(R), tube_measure_value=2.0 / R,
                                     mode="translate-stable", eps_loss=0.1)
    assert rep_eps.ratio == pytest.approx(math.sqrt(2.0) * lam ** 0.1, rel=1e-12)


def test_certificate_r_exponent(curve, flat_torus):
    basis = sp.torus_basis(flat_torus, 8.0)
    window = un.window_from_groups(basis, [25])
    rep = rn.tubular_certificate(window, curve, lam=5.0, scale_r=4.0, p=math.inf, q=2.0,
                                 r=3.0, a_value=1.0, tube_measure_value=0.5, mode="generic")
    # R exponent (1/2)*(0 + 1/2) = 1/4; lambda exponent 1/2 + (1/4)/2 = 5/8
    assert rep.rhs == pytest.approx(4.0 ** 0.25 / 5.0 ** 0.625, rel=1e-12)


def test_certificate_summation_window_exponent(curve, flat_torus):
    basis = sp.torus_basis(flat_torus, 8.0)
    window = un.window_from_interval(basis, 0.0, 5.0)
    rep = rn.tubular_certificate(window, curve, lam=5.0, scale_r=4.0, p=math.inf, q=2.0,
                                 r=3.0, a_value=1.0, tube_measure_value=0.5, mode="generic",
                                 window_kind="summation")
    # summation variant: lambda exponent delta(1,inf) + (delta(1,2) + r)/(r-1)
    lam_exp = 0.5 + (0.25 + 3.0) / 2.0
    assert rep.rhs == pytest.approx(4.0 ** 0.25 / 5.0 ** lam_exp, rel=1e-12)


def test_certificate_requires_admissible_r(curve, flat_torus):
    basis = sp.torus_basis(flat_torus, 8.0)
    window = un.window_from_groups(basis, [25])
    with pytest.raises(ValueError):
        rn.tubular_certificate(window, curve, lam=5.0, scale_r=8.0, p=math.inf, q=2.0,
                               r=3.0, a_value=1.0)


def test_certificate_json(curve, flat_torus):
    basis = sp.torus_basis(flat_torus, 8.0)
    window = un.window_from_groups(basis, [25])
    rep = rn.tubular_certificate(window, curve, lam=5.0, scale_r=4.0, p=math.inf, q=2.0,
                                 r=3.0, a_value=2.0, tube_measure_value=0.5)
    payload = rep.to_json_dict()
    assert payload["p"] is None  # infinity marker
    assert payload["window_distinct"] == 1
    assert isinstance(rep.to_json(), str)


def test_tubular_sweep_flat_exponent():
    from speclab.suites import tubular_sweep

    report = tubular_sweep(lam_lo=20.0, lam_hi=40.0, radii=(8.0, 16.0),
                           max_eigenvalues=25, grid_resolution=128)
    assert report["min_ratio"] > 0
    assert report["max_fitted_exponent"] < 0.2


# ---------------------------------------------------------------------------
# ratio scans


def test_pure_exponential_ratio_constant(curve, flat_torus):
    basis = sp.torus_basis(flat_torus, 4.0)
    expected = math.sqrt(curve.length()) / (2 * math.pi)
    for j in (1, 3, 9):
        pair = basis.pairs[j]
        got = rn.restriction_norm(pair.evaluate, curve)
        assert got == pytest.approx(expected, rel=1e-9)


def test_curve_ratio_scan_interval(curve, flat_torus):
    basis = sp.torus_basis(flat_torus, 12.5)
    scan = rn.curve_ratio_scan(basis, curve, [1.0 / 64, -1.0 / 64], 5.0, 12.0,
                               rng=make_rng(3), extra_combos=1)
    assert scan.min_ratio > 0
    assert scan.max_ratio < math.inf
    assert scan.base_interval[0] <= scan.full_interval[1]
    assert scan.widening < 2.0


def test_offset_scan_suite():
    from speclab.suites import curve_offset_scan

    report = curve_offset_scan(lam_lo=10.0, lam_hi=25.0, offset_scale=32.0, seed=11)
    assert report["min_ratio"] > 0
    assert report["widening"] < 2.0


# ---------------------------------------------------------------------------
# slice Hoelder chain


@pytest.mark.parametrize("p,q", [(math.inf, 2.0), (2.0, 2.0), (3.0, 2.0)])
def test_holder_chain(curve, flat_torus, p, q):
    basis = sp.torus_basis(flat_torus, 6.0)
    grid = flat_torus.build_grid(48)
    rng = make_rng(9)
    window = un.window_from_interval(basis, 2.0, 5.0)
    coeffs = np.zeros(basis.size, dtype=complex)
    coeffs[window.indices] = rng.normal(size=window.count) + 1j * rng.normal(size=window.count)
    f = un.Field.from_coefficients(basis, grid, coeffs)

    def evaluate(points):
        return basis.evaluate(window.indices, points).T @ coeffs[window.indices]

    lhs, rhs, holds = rn.holder_chain_check(evaluate, curve, 16.0, p, q)
    assert holds
    assert lhs <= rhs * (1 + 1e-9)
