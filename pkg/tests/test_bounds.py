import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sy

from polya.bounds import (
    G_enclosure,
    G_torsion_lower,
    Kind,
    Quantity,
    auxiliary_published_bounds,
    certified_sandwich,
    denominator_lemma_margin,
    e26_simplification_margin,
    rhombus_lambda_lower,
    rhombus_lower_excess,
    rhombus_ratio_lower,
    rhombus_ratio_upper,
    rhombus_torsion_lower,
    rhombus_upper_chain,
    sector_torsion_enclosure,
    sector_torsion_pointwise,
    t11_margin,
    theorem1_upper,
    triangle_ratio_lower_G,
    triangle_ratio_lower_narrow,
    triangle_ratio_lower_wide,
    triangle_ratio_upper,
    triangle_upper_chain,
)
from polya.certifier import certify_predicate
from polya.errors import DomainNotSupported, UnsupportedOrder
from polya.interval import Interval, constants, midrad, pi_enclosure, rational_pow, sqrt
from polya.oracle import rhombus_mask, sector_mask, solve, triangle_mask
from polya.shapes import ConvexSlabSpec, Sector, rhombus_from_beta, rhombus_from_d, triangle_from_alpha, triangle_from_beta

PI = pi_enclosure()
PI2_24 = PI * PI / 24
mpmath.mp.dps = 40


def fd_triangle_ratio(beta: float, n: int = 48) -> float:
    return solve(triangle_mask(1.0, math.tan(beta), n)).ratio


def fd_rhombus_ratio(d: float, n: int = 48) -> float:
    return solve(rhombus_mask(d, n)).ratio


# -- test-function integrals behind the lower bounds -------------------------------


def test_rhombus_test_function_integral():
    # rhombus with vertices (0, 0), (1, +-d/2), (2, 0); v = d^2 x^2/4 - y^2 on the
    # left half, reflected across the minor diagonal x = 1
    x, y, d = sy.symbols("x y d", positive=True)
    u = d**2 * x**2 / 4 - y**2
    ymax = d * x / 2
    grad2 = sy.diff(u, x) ** 2 + sy.diff(u, y) ** 2
    num = 4 * sy.integrate(sy.integrate(grad2, (y, 0, ymax)), (x, 0, 1))
    den = (4 * sy.integrate(sy.integrate(u, (y, 0, ymax)), (x, 0, 1))) ** 2
    # T >= (int u)^2 / int |Du|^2
    lower = sy.simplify(den / num)
    assert sy.simplify(lower - d**3 / (24 + 18 * d**2)) == 0
    for dv in (0.3, 1.0, 2.0):
        assert rhombus_torsion_lower(Interval(dv)).contains(float(lower.subs(d, dv)))


def test_steiner_rectangle_eigenvalue():
    d = sy.symbols("d", positive=True)
    side = sy.sqrt(1 + d**2 / 4)
    height = d / side
    lam = sy.pi**2 / side**2 + sy.pi**2 / height**2
    target = sy.pi**2 * (16 + 24 * d**2 + d**4) / (d**2 * (16 + 4 * d**2))
    assert sy.simplify(lam - target) == 0
    for dv in (0.5, 1.0, 2.0):
        assert rhombus_lambda_lower(Interval(dv)).contains(float(target.subs(d, dv)))


def test_rhombus_excess_forms_agree():
    for dv in (0.1, 0.7, 1.5, 1.99):
        d = Interval(dv)
        assert rhombus_lower_excess(d).lo > 0.0
    assert rhombus_lower_excess(Interval(2.0)).contains(0.0)


# -- sector torsion ---------------------------------------------------------------


def test_sector_pointwise_boundary_and_apex():
    beta = Interval(0.6)
    assert sector_torsion_pointwise(Interval(1.0), Interval(0.3), beta).contains(0.0)
    assert sector_torsion_pointwise(Interval(1.0), Interval(-0.3), beta).contains(0.0)
    assert sector_torsion_pointwise(Interval(0.0), Interval(0.1), beta) == Interval(0.0)
    with pytest.raises(DomainNotSupported):
        sector_torsion_pointwise(Interval(1.0), Interval(0.4), beta)


def test_sector_pointwise_dominates_finite_sector():
    # the finite sector's torsion function lies below the infinite one, up to the
    # one-cell boundary shift of the grid, and matches it near the apex
    rho, alpha = 1.0, 0.6
    apex_err = []
    for h in (1 / 128, 1 / 256):
        mask = sector_mask(rho, alpha, h)
        sol = solve(mask, keep_field=True)
        xs, ys = mask.points()
        vals = sol.field[mask.inside]
        r = np.hypot(xs, ys)
        phi = np.arctan2(ys, xs)
        exact = (r**2 / 4) * (np.cos(2 * phi) / math.cos(alpha) - 1)
        grad_bound = rho * math.tan(alpha) / 2  # |Dw| on the sector, attained on the sides at r = rho
        assert (vals - exact).max() <= h * grad_bound
        near = r < 0.3 * rho
        apex_err.append(abs(vals[near] - exact[near]).max())
    assert apex_err[1] < apex_err[0] / 1.5
    assert apex_err[1] < 0.05 * exact[near].max()


def test_sector_enclosure_scaling_and_G_consistency():
    a = Interval(0.5)
    t1 = sector_torsion_enclosure(Sector(Interval(1.0), a))
    t2 = sector_torsion_enclosure(Sector(Interval(2.0), a))
    assert (16 * t1).overlaps(t2)
    # at rho = 1 the lower endpoint of the two-sided enclosure is G's torsion factor
    cell = Interval.from_fraction(Fraction(33, 100))
    g = G_torsion_lower(cell, 10)
    s = sector_torsion_enclosure(Sector(Interval(1.0), cell), 10)
    assert g.overlaps(Interval(s.lo))


def test_sector_enclosure_brackets_fd():
    s = sector_torsion_enclosure(Sector(Interval(1.0), PI / 3))
    fd = [solve(sector_mask(1.0, math.pi / 3, h)).T_est for h in (1 / 64, 1 / 128)]
    extrapolated = 2 * fd[1] - fd[0]  # first order
    assert abs(extrapolated - s.mid) < 0.01 * s.mid


def test_denominator_lemma():
    # equality at n = 1 and alpha = pi/3: (5/3)^2 (1/3) = 25/27
    assert denominator_lemma_margin(1).contains(0.0)
    for n in (3, 5, 7, 21):
        assert denominator_lemma_margin(n).lo > 0.0


# -- triangle upper bound -----------------------------------------------------------


def test_e28_value_at_quarter_pi():
    b = triangle_ratio_upper(triangle_from_beta(PI / 4))
    assert b.equation_tag == "e28" and b.valid and b.kind is Kind.UPPER
    assert b.quantity is Quantity.POLYA_RATIO
    assert b.value.overlaps(PI2_24 * 82)


def test_e28_monotone_and_above_fd():
    vals = [triangle_ratio_upper(triangle_from_beta(Interval(x))).value for x in (0.2, 0.5, 0.8, 1.0)]
    assert all(p.hi < q.lo for p, q in zip(vals, vals[1:]))
    assert vals[1].lo > fd_triangle_ratio(0.5)


def test_e28_outside_hypothesis():
    b = triangle_ratio_upper(triangle_from_beta(Interval(1.1)))
    assert not b.valid and b.reason
    assert triangle_ratio_upper(triangle_from_beta(Interval(1.0))).valid
    assert triangle_ratio_upper(triangle_from_beta(PI / 3)).valid


def test_triangle_chain_is_dominated_by_closed_form():
    # (pi^2/24)(1 + d^2)^2 (1 + 7 (d/2)^(2/3)) <= (pi^2/24)(1 + 81 d^(2/3)), 0 < d <= sqrt 3
    def margin(d):
        return PI2_24 * (1 + 81 * rational_pow(d, 2, 3)) - triangle_upper_chain(d)

    cert = certify_predicate("triangle-chain", margin, (Interval(1e-6), sqrt(Interval(3.0))), 0.0)
    assert cert.passed, cert.failures[:3]


def test_triangle_cubic_torsion_step():
    for x in (0.1, 0.5, 1.0):
        parts = triangle_ratio_upper(triangle_from_beta(Interval(x))).parts
        assert parts["torsion_upper_e31"].hi <= parts["torsion_upper_e31_cubic"].lo
        assert parts["ratio_direct"].hi <= parts["ratio_chain"].lo


# -- rhombus bounds ------------------------------------------------------------------


def test_e28a_value_at_third_pi():
    r = rhombus_from_beta(PI / 3)
    b = rhombus_ratio_upper(r)
    assert b.valid and b.equation_tag == "e28a"
    expected = PI2_24 * (1 + 15 * rational_pow(Interval(3.0), 1, 3))
    assert b.value.overlaps(expected)
    assert b.value.lo > fd_rhombus_ratio(r.d.mid)


def test_e28a_above_fd():
    r = rhombus_from_beta(Interval(0.4))
    assert rhombus_ratio_upper(r).value.lo > fd_rhombus_ratio(r.d.mid)
    assert not rhombus_ratio_upper(rhombus_from_beta(Interval(1.2))).valid


def test_rhombus_final_form_dominates_chain():
    # the closed form in tan(beta) = 4d/(4 - d^2) dominates the product chain
    def margin(d):
        tb = 4 * d / (4 - d * d)
        return PI2_24 * (1 + 15 * rational_pow(tb, 2, 3)) - rhombus_upper_chain(d)

    top = 2 / sqrt(Interval(3.0))
    cert = certify_predicate("rhombus-chain", margin, (Interval(1e-6), top), 0.0)
    assert cert.passed, cert.failures[:3]


def test_rhombus_half_diagonal_intermediate_fails_near_top():
    # the intermediate form 1 + 15 (d/2)^(2/3) does not dominate the chain at
    # d = 2/sqrt(3); only the tan(beta) form does
    d = 2 / sqrt(Interval(3.0))
    chain = rhombus_upper_chain(d) / PI2_24
    half = 1 + 15 * rational_pow(d / 2, 2, 3)
    assert chain.lo > half.hi
    d_small = Interval(0.5)
    assert (rhombus_upper_chain(d_small) / PI2_24).hi < (1 + 15 * rational_pow(d_small / 2, 2, 3)).lo


def test_e28b_square_and_interior():
    sq = rhombus_ratio_lower(rhombus_from_d(Interval(2.0)))
    assert sq.kind is Kind.LOWER and sq.equation_tag == "e28b"
    assert sq.value.overlaps(PI2_24)
    b = rhombus_ratio_lower(rhombus_from_d(Interval(1.0)))
    assert b.parts["factor"].lo > 1.0
    assert b.value.hi < fd_rhombus_ratio(1.0)


def test_rhombus_sandwich_is_ordered():
    for x in (0.1, 0.5, 0.9, 1.0):
        lo, up = certified_sandwich(rhombus_from_beta(Interval(x)))
        assert lo is not None and up is not None
        assert lo.value.hi <= up.value.hi


# -- triangle lower bounds ------------------------------------------------------


def test_wide_lower_bound():
    b = triangle_ratio_lower_wide(triangle_from_beta(Interval(0.8)))
    assert b.valid and b.value.overlaps(PI2_24)
    one = triangle_ratio_lower_wide(triangle_from_beta(PI / 4))
    assert one.parts["lambda_factor"].overlaps(2 * PI * PI)
    assert one.parts["l1_branch_gap"].lo > 0.0
    equi = triangle_ratio_lower_wide(triangle_from_beta(PI / 3))
    assert equi.parts["l1_branch_gap"].contains(0.0)
    steep = triangle_ratio_lower_wide(triangle_from_beta(Interval(1.2)))
    assert steep.parts["l1_branch_gap"].hi < 0.0 and not steep.valid


def test_wide_lower_bound_below_fd():
    for x in (0.3, 0.8, 1.0):
        b = triangle_ratio_lower_wide(triangle_from_beta(Interval(x)))
        assert b.value.hi < fd_triangle_ratio(x)


def test_t11_margin_signs():
    assert t11_margin(Interval(1e-9)).lo > 0.0
    assert t11_margin(Interval.from_fraction(Fraction(33, 100))).lo > 0.0
    assert t11_margin(Interval(1.0)).hi < 0.0


def test_narrow_lower_bound_validity():
    b = triangle_ratio_lower_narrow(Interval(0.2))
    assert b.valid and b.equation_tag == "finalestimate"
    assert b.value.hi < fd_triangle_ratio(math.pi / 2 - 0.1)
    assert not triangle_ratio_lower_narrow(Interval(0.5)).valid


def _G_mpmath(alpha: float, terms: int = 10) -> mpmath.mpf:
    a = mpmath.mpf(alpha)
    pi = mpmath.pi
    C = (9 * pi / 8) ** (mpmath.mpf(2) / 3) / mpmath.cbrt(2)
    pa = pi / a
    lam = mpmath.cos(a / 2) ** 2 * (a / mpmath.sin(a)) * (pa + C * mpmath.cbrt(pa)) ** 2
    u = 2 * a / pi
    s = sum(1 / ((2 * n + 1) ** 2 * (2 * n + 1 + u) ** 2 * (2 * n + 1 - u)) for n in range(terms + 1))
    s += mpmath.mpf(1) / (2**7 * terms**4)
    tor = (mpmath.tan(a) - a) / 16 - 8 * a**4 / pi**5 * s
    return 24 / pi**2 * lam * tor / mpmath.tan(a / 2)


@pytest.mark.parametrize("alpha", [0.33, 0.5, 0.8, 1.04])
def test_G_thin_cell_brackets_mpmath(alpha):
    g = G_enclosure(midrad(alpha, 1e-12))
    ref = _G_mpmath(alpha)
    assert g.lo <= ref <= g.hi
    assert g.width < 1e-8


def test_G_result_wrapper():
    b = triangle_ratio_lower_G(triangle_from_alpha(Interval(0.5)))
    assert b.valid and b.equation_tag == "G"
    assert b.value.hi < fd_triangle_ratio(math.pi / 2 - 0.25)


# -- thin convex sets and published bounds --------------------------------------------


def test_theorem1_d2_constant():
    b = theorem1_upper(ConvexSlabSpec(2, Interval(0.1), Interval(1.0)))
    assert b.parts["d_m"].overlaps(7 * rational_pow(Interval(3.0), 4, 3) / 4)
    assert b.quantity is Quantity.LAMBDA_M and b.equation_tag == "e15"


def test_theorem1_unsupported_order():
    with pytest.raises(UnsupportedOrder):
        theorem1_upper(ConvexSlabSpec(5, Interval(0.1), Interval(1.0)))


def test_theorem1_thin_limit():
    target = PI * PI / 8
    prev = None
    for w in (1e-2, 1e-4, 1e-6, 1e-9):
        v = theorem1_upper(ConvexSlabSpec(3, Interval(w), Interval(1.0))).value
        assert v.lo >= target.lo
        if prev is not None:
            assert v.hi < prev.hi
        prev = v
    assert prev.hi - target.hi < 1e-4


@pytest.mark.parametrize("m", [2, 3, 4])
def test_e26_simplification(m):
    assert e26_simplification_margin(m).lo >= 0.0


def test_published_e11_and_e33():
    e11 = auxiliary_published_bounds("e11_slab", n=1)
    assert e11.value.overlaps(PI * PI / 8 + Interval.from_fraction(Fraction(3, 8)))
    e33 = auxiliary_published_bounds("e33_lambda_upper", d=2)
    assert e33.value.overlaps(PI * PI / 4 * 8)
    with pytest.raises(DomainNotSupported):
        auxiliary_published_bounds("e11_slab", n=0.5)
    with pytest.raises(ValueError):
        auxiliary_published_bounds("nope")


def test_published_e4_against_mpmath():
    e4 = auxiliary_published_bounds("e4_cm", m=2)
    ref = (2 + mpmath.sqrt(5 * (4 + mpmath.log(2))) * mpmath.sqrt(2) + 8) / 8
    assert e4.value.lo <= ref <= e4.value.hi


def test_e33_dominates_fd_triangle_lambda():
    for x in (0.3, 0.8):
        d = math.tan(x)
        lam = solve(triangle_mask(1.0, d, 48)).lambda_est
        assert auxiliary_published_bounds("e33_lambda_upper", d=Interval(d)).value.lo > lam


def test_sandwich_rejects_other_shapes():
    with pytest.raises(DomainNotSupported):
        certified_sandwich(Sector(Interval(1.0), Interval(0.5)))


def test_bound_json_shape():
    doc = triangle_ratio_upper(triangle_from_beta(Interval(1.1))).to_json()
    assert set(doc) >= {"equation_tag", "kind", "quantity", "lo", "hi", "valid", "params", "reason"}
    assert doc["kind"] == "UpperBound" and doc["valid"] is False


def test_constants_feed_t11():
    c = constants()
    assert c.c1.overlaps(rational_pow(Interval(2.25), 2, 3))


def test_small_angle_limits():
    tiny = Interval(1e-9)
    assert rhombus_ratio_upper(rhombus_from_beta(tiny)).value.hi - PI2_24.hi < 1e-4
    f = rhombus_ratio_lower(rhombus_from_d(tiny)).parts["factor"]
    assert abs(f.mid - 1.0) < 1e-12
    prev = None
    for a in (1e-2, 1e-4, 1e-6, 1e-9):
        v = triangle_ratio_lower_narrow(Interval(a)).value
        assert v.lo > PI2_24.lo
        if prev is not None:
            assert v.hi < prev.hi
        prev = v
    assert prev.hi - PI2_24.hi < 1e-4


def test_upper_correction_factors_are_monotone():
    grid = [0.05 * k for k in range(1, 21)] + [PI / 3]
    for evaluate, make in ((triangle_ratio_upper, triangle_from_beta), (rhombus_ratio_upper, rhombus_from_beta)):
        vals = [evaluate(make(b if isinstance(b, Interval) else Interval(b))).value for b in grid]
        for p, q in zip(vals, vals[1:]):
            assert p.lo <= q.hi + p.width + q.width


def test_wide_bound_is_exact_cancellation():
    for x in (0.1, 0.6, 1.0):
        b = triangle_ratio_lower_wide(triangle_from_beta(Interval(x)))
        assert b.value == PI2_24
        assert (b.parts["torsion_factor"] * b.parts["lambda_factor"]).overlaps(PI2_24)


def test_G_first_and_last_cells():
    lo = Interval.from_fraction(Fraction(33, 100))
    hi = PI / 3
    delta = (hi - lo) / 1000
    assert G_enclosure(midrad(lo.mid, delta.hi)).lo > 1.01
    assert G_enclosure(midrad((hi - delta).mid, delta.hi)).lo > 1.01


def test_G_decomposition():
    from polya.bounds import G_area, G_lambda_lower

    for a in (0.33, 0.7, 1.0):
        x = Interval(a)
        composed = 24 / (PI * PI) * G_lambda_lower(x) * G_torsion_lower(x, 10) / G_area(x)
        assert G_enclosure(x, 10) == composed
        r = triangle_ratio_lower_G(triangle_from_alpha(x))
        assert (24 / (PI * PI) * r.value).overlaps(r.parts["G"])


@pytest.mark.parametrize("aspect", [2, 5, 20, 100, 1000])
def test_theorem1_dominates_rectangles(aspect):
    from polya.oracle import rect_series

    L = float(aspect)
    exact = rect_series(L, 1.0)
    lam_m = exact.lambda_exact * (exact.M + exact.M_tail)
    bound = theorem1_upper(ConvexSlabSpec(2, Interval(1.0), Interval(L / 2))).value
    assert bound.lo > lam_m
