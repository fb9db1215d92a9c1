import math

import numpy as np
import pytest

from polya.bounds import rhombus_lambda_lower
from polya.errors import DomainNotSupported, NonConvergence
from polya.interval import Interval, bessel_zero_enclosure
from polya.oracle import (
    disc_mask,
    extrapolate,
    fd_lambda,
    fd_torsion,
    mask_factory,
    polygon_mask,
    rect_mask,
    rect_series,
    rhombus_mask,
    richardson,
    sector_mask,
    solve,
    triangle_mask,
)
from polya.shapes import parse_shape


def test_richardson_exact_for_pure_power():
    # f(h) = 3 + 5 h^2 at h = 0.1 and 0.05
    r = richardson(3 + 5 * 0.01, 3 + 5 * 0.0025, p=2)
    assert abs(r.extrapolated - 3.0) < 1e-14
    assert abs(r.error_indicator - 5 * 0.0025) < 1e-14
    r1 = richardson(2 + 0.1, 2 + 0.05, p=1)
    assert abs(r1.extrapolated - 2.0) < 1e-14
    with pytest.raises(ValueError):
        richardson(math.nan, 1.0)


def test_square_eigenvalue_converges():
    errs = [abs(fd_lambda(rect_mask(1.0, 1.0, n)) - 2 * math.pi**2) for n in (16, 32, 64)]
    assert errs[0] > errs[1] > errs[2]
    # second order: each halving gains about a factor 4
    assert 3.5 < errs[0] / errs[1] < 4.5 and 3.5 < errs[1] / errs[2] < 4.5


def test_square_torsion_matches_series():
    exact = rect_series(1.0, 1.0)
    sol = solve(rect_mask(1.0, 1.0, 256))
    assert abs(sol.T_est - exact.T) < 0.005 * exact.T
    assert abs(sol.M_est - exact.M) < 0.005 * exact.M
    assert sol.residual <= 1e-10


def test_rect_series_limits():
    r = rect_series(1.0, 1.0)
    # classical values for the unit square
    assert abs(r.T - 0.0351442) < 1e-6
    assert abs(r.M - 0.0736713) < 1e-6
    thin = rect_series(1000.0, 1.0)
    assert abs(thin.T / 1000 - 1 / 12) < 1e-3
    assert abs(thin.M - 1 / 8) <= thin.M_tail
    assert rect_series(2.0, 1.0).T == pytest.approx(rect_series(1.0, 2.0).T, rel=1e-15)
    with pytest.raises(ValueError):
        rect_series(0.0, 1.0)


def test_rect_series_tail_bounds():
    ref = rect_series(1.0, 3.0, terms=2000)
    for terms in (1, 3, 10):
        r = rect_series(1.0, 3.0, terms=terms)
        assert abs(r.T - ref.T) <= r.T_tail
        assert abs(r.M - ref.M) <= r.M_tail


def test_disc_against_exact():
    R = 1.0
    j0 = bessel_zero_enclosure(0)
    ext = extrapolate(lambda n: disc_mask(R, 1 / (64 * n)), 1)
    assert abs(ext.M.extrapolated - 0.25) < 3e-3
    assert abs(ext.T.extrapolated - math.pi / 8) < 5e-3
    assert abs(ext.lam.extrapolated - (j0 * j0).mid) < 0.02
    # the lambda M indicator tracks the actual error within a factor 5
    err = abs(ext.lambda_M - (j0 * j0).mid / 4)
    assert ext.lambda_M_indicator / 5 < err < 5 * ext.lambda_M_indicator
    assert abs(ext.M.extrapolated - 0.25) <= ext.M.error_indicator


def test_rhombus_square_case_near_lower_bound():
    lam = fd_lambda(rhombus_mask(2.0, 64))
    lower = rhombus_lambda_lower(Interval(2.0))
    # the d = 2 rhombus is the square of side sqrt 2, so the Steiner bound is attained
    assert abs(lam - lower.mid) < 1e-3 * lower.mid
    assert lower.contains(math.pi**2)


def test_equilateral_triangle_exact_values():
    H = math.sqrt(3.0)
    ext = extrapolate(lambda n: triangle_mask(1.0, H, n), 32)
    # side 2: lambda = 16 pi^2 / (3 s^2) = 4 pi^2 / 3, M = s^2 / 36 (scaled to side 2 gives 1/9)
    assert abs(ext.lam.extrapolated - 4 * math.pi**2 / 3) < 1e-3
    assert abs(ext.M.extrapolated - 1 / 9) < 1e-4
    # T = sqrt(3) s^4 / 320
    assert abs(ext.T.extrapolated - math.sqrt(3) * 16 / 320) < 1e-4


@pytest.mark.parametrize(
    "mask",
    [
        triangle_mask(1.0, 0.7, 20),
        rhombus_mask(1.3, 20),
        rect_mask(2.0, 1.0, 20),
        disc_mask(1.0, 0.05),
        sector_mask(1.0, 0.8, 0.05),
        polygon_mask([(0, 0), (2, 0), (1.5, 1), (0.2, 1.2)], 0.05),
    ],
    ids=["triangle", "rhombus", "rect", "disc", "sector", "polygon"],
)
def test_mask_invariants(mask):
    xs, ys = mask.points()
    assert mask.n_interior >= 10 and len(xs) == mask.n_interior
    verts = mask.vertices
    if verts:
        for (x1, y1), (x2, y2) in zip(verts, verts[1:] + verts[:1]):
            # strictly left of every directed edge
            assert ((x2 - x1) * (ys - y1) - (y2 - y1) * (xs - x1) > 0).all()
    sol = fd_torsion(mask)
    assert (sol.field >= 0).all() and sol.residual <= 1e-10
    assert sol.M_est == pytest.approx(sol.field.max())


def test_domain_monotonicity():
    # sector S(1, alpha) inside the triangle (0, 0), (1, -tan(alpha/2)), (1, tan(alpha/2));
    # both lattices pass through the origin, so the discrete domains are nested too
    h = 1 / 128
    alpha = 0.9
    t = math.tan(alpha / 2)
    tri = solve(polygon_mask([(0.0, 0.0), (1.0, -t), (1.0, t)], h))
    sec = solve(sector_mask(1.0, alpha, h))
    assert sec.T_est < tri.T_est
    assert sec.M_est < tri.M_est
    assert sec.lambda_est > tri.lambda_est


def test_cg_variants_agree():
    m = rhombus_mask(1.0, 24)
    vals = [fd_torsion(m, method=k).T_est for k in ("cg", "cg-plain", "direct")]
    assert max(vals) - min(vals) < 1e-10 * vals[0]
    with pytest.raises(ValueError):
        fd_torsion(m, method="jacobi")


def test_nonconvergence_on_tiny_cap():
    with pytest.raises(NonConvergence):
        fd_torsion(rect_mask(1.0, 1.0, 64), method="cg-plain", maxiter=2)
    with pytest.raises(NonConvergence):
        fd_lambda(rect_mask(1.0, 1.0, 16), maxiter=1)


def test_polygon_mask_errors():
    with pytest.raises(DomainNotSupported):
        polygon_mask([(0, 0), (0, 1), (1, 0)], 0.1)  # clockwise
    with pytest.raises(DomainNotSupported):
        polygon_mask([(0, 0), (2, 0), (1, 0.2), (1, 1)], 0.1)  # reflex vertex
    with pytest.raises(DomainNotSupported):
        polygon_mask([(0, 0), (1, 0), (0, 1)], 0.5)  # too few points
    with pytest.raises(DomainNotSupported):
        triangle_mask(1.0, 1.0, 2)


def test_mask_factory_spacing():
    for spec in ("triangle:beta=0.7", "rhombus:d=1.5", "rect:a=2,b=1"):
        make, n = mask_factory(parse_shape(spec), 0.02)
        assert make(n).h <= 0.02 + 1e-15
    make, n = mask_factory(parse_shape("disc:r=1"), 0.05)
    assert n == 1 and make(2).h == pytest.approx(0.025)
    with pytest.raises(DomainNotSupported):
        mask_factory(parse_shape("slab:m=2,w=0.1,rho=1"), 0.1)


def test_summary_json():
    sol = solve(rect_mask(1.0, 1.0, 16))
    doc = sol.summary()
    assert doc["ratio"] == pytest.approx(sol.lambda_est * sol.T_est)
    assert np.isfinite(doc["residual"])
    assert '"shape": "rect"' in sol.to_json()
