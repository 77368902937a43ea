"""Acceptance criteria 1-12, one verdict line each (see the summary section of the pytest run).

Run alone with ``pytest tests/test_acceptance.py -v``; the full set takes
several minutes on one core, dominated by the three obstacle sweeps.
"""
import math
import time
from functools import lru_cache

import numpy as np
import pytest
from scipy.special import j1, jn_zeros

from obstacle_spectra.constants import analytic_2d
from obstacle_spectra.discretize import DomainMask, GridSpec, StencilOperator, rasterize
from obstacle_spectra.eigensolver import dense_oracle, smallest_eigenpair, solve
from obstacle_spectra.geometry import Hyperplane2D, Shape, Translate, estimate_asymmetry, heart, l_shape
from obstacle_spectra.placement import bound_summary, hkk_check, localization_check, sweep
from obstacle_spectra.spectral import faber_krahn_margin, gradient_ratio, max_set
from obstacle_spectra.verify import acceptance_sweep, fk_shapes, random_mask

J01 = jn_zeros(0, 1)[0]
SQUARE = Shape.rectangle(1, 1)
DISC = Shape.disc((0, 0), 1)
RECT12 = Shape.rectangle(1, 2)
SCALENE = Shape.polygon([[0, 0], [4, 0], [1, 2]])
SHAPES = dict(fk_shapes())


@lru_cache(maxsize=None)
def solved(name: str, cells: int):
    """Solve on a grid with ``cells`` cells across the shape's shorter side."""
    shape = SHAPES[name]
    x0, y0, x1, y1 = shape.bounds
    h = min(x1 - x0, y1 - y0) / cells
    t = time.perf_counter()
    res = solve(rasterize(shape, h=h))
    return res, time.perf_counter() - t


def extrapolated(name: str) -> float:
    coarse, _ = solved(name, 64)
    fine, _ = solved(name, 128)
    return 2 * fine.eigenvalue - coarse.eigenvalue


# -- 1 -------------------------------------------------------------------------

@pytest.mark.parametrize("name,exact,rtol", [
    ("square", 2 * math.pi ** 2, 0.005),
    ("disc", J01 ** 2, 0.01),
    ("rectangle 1x2", math.pi ** 2 * 1.25, 0.005),
])
def test_c01_analytic_eigenvalues(name, exact, rtol, criterion_line):
    # unit disc: 128 cells across the shorter side is h = 1/64, so go one level finer
    cells = 256 if name == "disc" else 128
    coarse, t1 = solved(name, cells // 2)
    fine, t2 = solved(name, cells)
    lam = 2 * fine.eigenvalue - coarse.eigenvalue
    err = (lam - exact) / exact
    ok = abs(err) <= rtol and max(t1, t2) < 30
    criterion_line(f"1 analytic {name}", ok,
                   f"lambda1 = {lam:.5f} vs {exact:.5f} ({err:+.3%}), slowest solve {max(t1, t2):.2f} s")
    assert ok


# -- 2 -------------------------------------------------------------------------

def test_c02_oracle_equivalence(criterion_line):
    rng = np.random.default_rng(42)
    t = time.perf_counter()
    worst = 0.0
    for _ in range(30):
        op = StencilOperator(random_mask(rng, 2000))
        assert op.size <= 2000
        it = smallest_eigenpair(op).eigenvalue
        de = dense_oracle(op).eigenvalues[0]
        worst = max(worst, abs(it - de) / de)
    elapsed = time.perf_counter() - t
    ok = worst <= 1e-8 and elapsed < 60
    criterion_line("2 iterative vs dense", ok, f"max rel diff {worst:.2e} over 30 masks in {elapsed:.1f} s")
    assert ok


# -- 3 -------------------------------------------------------------------------

def test_c03_domain_monotonicity(criterion_line):
    rng = np.random.default_rng(42)
    grid = GridSpec((0.0, 0.0), 1 / 12, 12, 12)
    full = np.ones((12, 12), dtype=bool)
    lam_full = dense_oracle(StencilOperator(DomainMask(grid, full))).eigenvalues[0]
    decreases = 0
    for _ in range(50):
        keep = full & ~(rng.random((12, 12)) < rng.uniform(0.02, 0.5))
        if not keep.any():
            continue
        sub = DomainMask(grid, keep)
        if dense_oracle(StencilOperator(sub)).eigenvalues[0] < lam_full:
            decreases += 1
    g96 = GridSpec.covering(SQUARE, 1 / 96)
    base = solve(rasterize(SQUARE, grid=g96)).eigenvalue
    low = math.inf
    for _ in range(20):
        r = rng.uniform(0.03, 0.25)
        c = rng.uniform(0, 1, size=2)
        lam = solve(rasterize(SQUARE, Translate(Shape.disc((0, 0), r), tuple(c)), grid=g96)).eigenvalue
        low = min(low, lam / base)
    ok = decreases == 0 and low >= 0.98
    criterion_line("3 domain monotonicity", ok,
                   f"{decreases} decreases in 50 dense patterns; min placement ratio {low:.6f} (>= 0.98)")
    assert ok


# -- 4, 5 ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def square_sweep():
    t = time.perf_counter()
    land = acceptance_sweep(n_jobs=1)
    return land, time.perf_counter() - t


def test_c04_inscribed_ball_bound(square_sweep, criterion_line):
    land, elapsed = square_sweep
    d = bound_summary(land).details
    ok = d["mechanism_applicable"] > 0 and d["mechanism_failures"] == 0 and elapsed < 15 * 60
    criterion_line("4 inscribed-ball bound", ok,
                   f"{d['mechanism_applicable']} applicable of {d['checked']}, {d['mechanism_failures']} "
                   f"failures, worst margin {d['worst_mechanism_margin']:.3f}, sweep {elapsed:.0f} s on 1 worker")
    assert ok


def test_c05_hkk_symmetry(square_sweep, criterion_line):
    land, _ = square_sweep
    reps = [hkk_check(land, Hyperplane2D((1.0, 0.0), 0.5)), hkk_check(land, Hyperplane2D((0.0, 1.0), 0.5))]
    ok = all(r.passed and r.details["minimizers_touch_boundary"] for r in reps)
    criterion_line("5 symmetric placement", ok,
                   f"argmax {land.argmax_offsets.tolist()}, max line distance "
                   f"{max(r.details['max_distance_to_line'] for r in reps):.3g}, "
                   f"{len(land.argmin)} interior argmin(s) with boundary gap "
                   f"{reps[0].details['max_minimizer_gap']:.3g} (step {land.lattice_step})")
    assert ok


# -- 6 -------------------------------------------------------------------------

def test_c06_localization(criterion_line):
    consts = analytic_2d()
    land = sweep(SQUARE, Shape.disc((0, 0), 0.45), 0.05, h=1 / 64, consts=consts)
    rep = localization_check(land)
    d = rep.details
    ok = rep.status == "pass" and d["ratio"] > consts.localization_threshold
    criterion_line("6 localization", ok,
                   f"ratio {d['ratio']:.3f} > threshold {consts.localization_threshold:.3f}; "
                   f"rho {d.get('rho_max', float('nan')):.4f} <= bound {d.get('bound', float('nan')):.4f}")
    assert ok


# -- 7 -------------------------------------------------------------------------

def test_c07_convex_obstacle_covers_max(criterion_line):
    land = sweep(SQUARE, Shape.rectangle(0.6, 0.6, (-0.3, -0.3)), 0.05, h=1 / 64)
    rhos = [float(land.translate(k).distance(land.max_set.points).max()) for k in land.argmax]
    ok = max(rhos) <= land.h
    criterion_line("7 convex obstacle contains max point", ok,
                   f"{len(rhos)} argmax, max rho {max(rhos):.3g} <= h = {land.h:.4g}")
    assert ok


# -- 8 -------------------------------------------------------------------------

def test_c08_max_point_in_heart(criterion_line):
    tol = 1e-3
    worst = []
    ok = True
    for name, shape in (("square", SQUARE), ("disc", DISC), ("rectangle 1x2", RECT12), ("scalene", SCALENE)):
        h = shape.diameter / 128
        M = max_set(solve(rasterize(shape, h=h)))
        H = heart(shape, 360, tol)
        d = float(H.distance(M.points).max())
        ok &= d <= h + tol
        worst.append(f"{name} {d:.2g}/{h + tol:.2g}")
    sq = heart(SQUARE, 360, tol)
    centre_ok = sq.diameter <= 2 * tol and float(np.hypot(*(sq.centroid - 0.5))) <= 2 * tol
    ok &= centre_ok
    criterion_line("8 max point in heart", ok,
                   "distance/allowed: " + ", ".join(worst) + f"; square heart diameter {sq.diameter:.2g}")
    assert ok


# -- 9 -------------------------------------------------------------------------

def test_c09_faber_krahn(criterion_line):
    margins = {name: faber_krahn_margin(extrapolated(name), SHAPES[name].area) for name in SHAPES}
    ok = len(margins) == 10 and min(margins.values()) >= 0.99 and 0.99 <= margins["disc"] <= 1.01
    criterion_line("9 Faber-Krahn margins", ok,
                   f"min {min(margins.values()):.4f}, disc {margins['disc']:.4f}, "
                   f"max {max(margins.values()):.4f} over {len(margins)} shapes")
    assert ok


# -- 10 ------------------------------------------------------------------------

def test_c10_unique_maximum(criterion_line):
    worst, name_w = 0.0, ""
    for name, shape in SHAPES.items():
        if not shape.is_convex:
            continue
        for cells in (64, 128):
            res, _ = solved(name, cells)
            ratio = max_set(res).diameter / res.h
            if ratio > worst:
                worst, name_w = ratio, f"{name} at {cells} cells"
    ok = worst <= 2
    criterion_line("10 unique maximum", ok, f"largest max-set diameter {worst:.3f} h ({name_w})")
    assert ok


# -- 11 ------------------------------------------------------------------------

def test_c11a_gradient_ratio_square(criterion_line):
    res, _ = solved("square", 128)
    g = gradient_ratio(res)
    ok = abs(g - 1 / math.sqrt(2)) <= 0.05 / math.sqrt(2)
    criterion_line("11a gradient ratio square", ok, f"{g:.4f} vs 1/sqrt(2) = {1 / math.sqrt(2):.4f}")
    assert ok


def test_c11b_gradient_ratio_disc(criterion_line):
    # stated target is |J0'(j01)| = J1(j01), the boundary slope; h = 1/128
    res, _ = solved("disc", 256)
    g = gradient_ratio(res)
    target = j1(J01)
    ok = abs(g - target) <= 0.05 * target
    interior = max(j1(x) for x in np.linspace(0, J01, 20001))
    criterion_line("11b gradient ratio disc", ok,
                   f"{g:.4f} vs stated {target:.4f} ({(g - target) / target:+.1%}); "
                   f"sup of J1 on [0, j01] is {interior:.4f}")
    assert ok


def test_c11c_gradient_ratio_rectangles(criterion_line):
    vals = {}
    for aspect in (1, 1.5, 2, 3, 4):
        shape = Shape.rectangle(1, aspect)
        vals[aspect] = gradient_ratio(solve(rasterize(shape, h=1 / 64)))
    ok = max(vals.values()) <= 2
    criterion_line("11c gradient ratio rectangles", ok,
                   ", ".join(f"{a}: {v:.3f}" for a, v in vals.items()) + " (all <= 2)")
    assert ok


# -- 12 ------------------------------------------------------------------------

def test_c12_asymmetry(criterion_line):
    kw = dict(n_boundary=200, n_radii=20, n_samples=4000, seed=42)
    a_sq = estimate_asymmetry(SQUARE, **kw)
    a_disc = estimate_asymmetry(DISC, **kw)
    a_l = estimate_asymmetry(l_shape(), **kw)
    again = estimate_asymmetry(l_shape(), **kw)
    ok = 0.48 <= a_sq <= 0.60 and 0.48 <= a_disc <= 0.60 and a_l <= 0.30 and again == a_l
    criterion_line("12 asymmetry", ok,
                   f"square {a_sq:.4f}, disc {a_disc:.4f}, L-shape {a_l:.4f}, repeat identical {again == a_l}")
    assert ok
