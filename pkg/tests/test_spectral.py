import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import j1, jn_zeros

from obstacle_spectra.constants import analytic_2d
from obstacle_spectra.discretize import GridSpec, rasterize
from obstacle_spectra.eigensolver import solve
from obstacle_spectra.geometry import Shape, Translate
from obstacle_spectra.spectral import (
    beta,
    beta_inverse,
    check_main_bound,
    faber_krahn_margin,
    gradient_ratio,
    ground_state_lower_check,
    inscribed_fraction,
    max_set,
    rho,
)

SQUARE = Shape.rectangle(1, 1)
J01 = jn_zeros(0, 1)[0]


@pytest.fixture(scope="module")
def square64():
    return solve(rasterize(SQUARE, h=1 / 64))


def disc_square_overlap(cx, cy, r):
    """Area of B_r(c) ∩ [0,1]² by integrating chord lengths."""
    def chord(x):
        half = math.sqrt(max(r * r - (x - cx) ** 2, 0.0))
        return max(0.0, min(cy + half, 1.0) - max(cy - half, 0.0))
    lo, hi = max(0.0, cx - r), min(1.0, cx + r)
    return quad(chord, lo, hi, limit=200)[0] if hi > lo else 0.0


def test_max_set_of_square_is_central(square64):
    M = max_set(square64)
    assert np.allclose(M.center, [0.5, 0.5], atol=1e-12)
    assert M.diameter <= 2 * square64.h


def test_max_set_tolerance_guard(square64):
    with pytest.raises(ValueError):
        max_set(square64, rel_tol=0.5)


def test_max_set_grows_with_tolerance(square64):
    assert len(max_set(square64, 0.05)) > len(max_set(square64, 1e-4))


@pytest.mark.parametrize("center,r", [((0.5, 0.5), 1.0), ((0.5, 0.5), 0.6), ((0.2, 0.3), 0.4)])
def test_inscribed_fraction_against_exact_clipping(square64, center, r):
    frac = inscribed_fraction(square64, square64.mask, r, center=center)
    exact = disc_square_overlap(*center, r) / (math.pi * r * r)
    assert frac == pytest.approx(exact, abs=0.01)


def test_inscribed_fraction_fully_inside(square64):
    assert inscribed_fraction(square64, square64.mask, 0.2) == 1.0


def test_inscribed_fraction_center_guard(square64):
    with pytest.raises(ValueError):
        inscribed_fraction(square64, square64.mask, 0.2, center=(3.0, 3.0))


def test_beta_branches():
    c = analytic_2d()
    lam = 2 * math.pi ** 2
    assert beta(10.0, lam, c) == pytest.approx(c.beta0)
    small = 0.1
    assert beta(small, lam, c) == pytest.approx(c.c0 / (small ** 2 * lam))
    # continuity at the switch radius
    r_switch = c.r0 / math.sqrt(lam)
    assert beta(r_switch * (1 - 1e-12), lam, c) == pytest.approx(c.beta0, rel=1e-9)
    with pytest.raises(ValueError, match="rho_x must be positive"):
        beta(0.0, lam, c)


def test_beta_inverse_round_trip():
    c = analytic_2d()
    lam = 2 * math.pi ** 2
    for C in (c.beta0 * 1.5, 5.0, 20.0):
        r = beta_inverse(C, lam, c)
        assert beta(r, lam, c) == pytest.approx(C)


def test_rho_is_zero_when_obstacle_covers_max_point(square64):
    t = Translate(Shape.disc((0, 0), 0.1), (0.5, 0.5))
    assert rho(t, max_set(square64)) == 0.0
    assert rho(Translate(Shape.disc((0, 0), 0.1), (0.5, 0.2)), [[0.5, 0.5]]) == pytest.approx(0.2)


def test_main_bound_far_obstacle_applicable():
    g = GridSpec.covering(SQUARE, 1 / 48)
    dom = solve(rasterize(SQUARE, grid=g))
    t = Translate(Shape.disc((0, 0), 0.1), (0.15, 0.15))
    comp = solve(rasterize(SQUARE, t, grid=g))
    rep = check_main_bound(dom, comp, t, analytic_2d())
    assert rep.mechanism_applicable
    assert rep.mechanism_pass
    assert rep.stated_bound_pass


def test_main_bound_covered_max_point_raises():
    g = GridSpec.covering(SQUARE, 1 / 32)
    dom = solve(rasterize(SQUARE, grid=g))
    t = Translate(Shape.disc((0, 0), 0.2), (0.5, 0.5))
    comp = solve(rasterize(SQUARE, t, grid=g))
    with pytest.raises(ValueError, match="rho_x must be positive"):
        check_main_bound(dom, comp, t, analytic_2d())


def test_faber_krahn_margin_closed_forms():
    assert faber_krahn_margin(J01 ** 2 / 4, 4 * math.pi) == pytest.approx(1.0)
    assert faber_krahn_margin(2 * math.pi ** 2, 1.0) == pytest.approx(2 * math.pi / J01 ** 2)


def test_gradient_ratio_square(square64):
    # φ = sin(πx) sin(πy): sup |∇φ| = π at the edge midpoints, √λ = √2 π
    assert gradient_ratio(square64) == pytest.approx(1 / math.sqrt(2), rel=0.05)


def test_disc_gradient_sup_is_interior_bessel_maximum():
    # φ(r) = J0(j r)/J0(0): |∇φ|/√λ = J1(j r), largest where J1 peaks (r ≈ 0.766)
    res = solve(rasterize(Shape.disc((0, 0), 1), h=1 / 64))
    peak = max(j1(x) for x in np.linspace(0, J01, 20001))
    assert gradient_ratio(res) == pytest.approx(peak, rel=0.05)
    assert gradient_ratio(res) > j1(J01) * 1.05


def test_lower_check_holds_near_max(square64):
    chk = ground_state_lower_check(square64, (0.3, 0.4))
    assert chk.holds
    with pytest.raises(ValueError):
        ground_state_lower_check(square64, (1.5, 0.4))
