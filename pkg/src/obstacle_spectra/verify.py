"""Named property suites behind ``obstacle-spectra verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .constants import analytic_2d
from .discretize import DomainMask, GridSpec, StencilOperator, rasterize
from .eigensolver import dense_oracle, smallest_eigenpair, solve
from .geometry import Shape, Translate, heart, l_shape, symmetry_axes
from .placement import PlacementLandscape, bound_summary, heart_membership_check, hkk_check, sweep
from .spectral import faber_krahn_margin, max_set

SUITES = ("oracle", "monotonicity", "bounds", "hkk", "heart", "faber-krahn")


@dataclass
class Line:
    suite: str
    name: str
    passed: bool
    detail: str


def random_mask(rng: np.random.Generator, max_cells: int = 2000) -> DomainMask:
    """Random blob: a box with a random fraction of cells knocked out."""
    while True:
        nx, ny = rng.integers(4, 45, size=2)
        if nx * ny > max_cells:
            continue
        active = rng.random((ny, nx)) > rng.uniform(0.0, 0.35)
        if active.any():
            return DomainMask(GridSpec((0.0, 0.0), 1.0 / max(nx, ny), int(nx), int(ny)), active)


def suite_oracle(seed: int = 42, n: int = 30, **_) -> list[Line]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        op = StencilOperator(random_mask(rng))
        it = smallest_eigenpair(op).eigenvalue
        de = dense_oracle(op).eigenvalues[0]
        worst = max(worst, abs(it - de) / de)
    return [Line("oracle", f"{n} random masks, iterative vs dense", worst <= 1e-8, f"max rel diff {worst:.2e}")]


def suite_monotonicity(seed: int = 42, **_) -> list[Line]:
    rng = np.random.default_rng(seed)
    grid = GridSpec((0.0, 0.0), 1 / 12, 12, 12)
    full = DomainMask(grid, np.ones((12, 12), dtype=bool))
    lam_full = dense_oracle(StencilOperator(full)).eigenvalues[0]
    worst = math.inf
    for _ in range(50):
        off = rng.random((12, 12)) < rng.uniform(0.02, 0.5)
        keep = full.active & ~off
        if not keep.any():
            continue
        lam = dense_oracle(StencilOperator(DomainMask(grid, keep))).eigenvalues[0]
        worst = min(worst, lam - lam_full)
    lines = [Line("monotonicity", "50 random deactivations on 12x12", worst >= -1e-9 * lam_full,
                  f"min increase {worst:.3e}")]
    sq = Shape.rectangle(1, 1)
    grid = GridSpec.covering(sq, 1 / 96)
    base = solve(rasterize(sq, grid=grid)).eigenvalue
    low = math.inf
    for _ in range(20):
        r = rng.uniform(0.03, 0.25)
        c = rng.uniform(0, 1, size=2)
        lam = solve(rasterize(sq, Translate(Shape.disc((0, 0), r), tuple(c)), grid=grid)).eigenvalue
        low = min(low, lam / base)
    lines.append(Line("monotonicity", "20 disc placements at h=1/96", low >= 0.98, f"min ratio {low:.5f}"))
    return lines


_SWEEP_CACHE: dict = {}


def acceptance_sweep(n_jobs: int = 1) -> PlacementLandscape:
    """Unit square with a disc of radius 0.15, lattice 0.05, h = 1/96."""
    if "square" not in _SWEEP_CACHE:
        _SWEEP_CACHE["square"] = sweep(Shape.rectangle(1, 1), Shape.disc((0, 0), 0.15), 0.05,
                                       h=1 / 96, n_jobs=n_jobs, consts=analytic_2d())
    return _SWEEP_CACHE["square"]


def suite_bounds(n_jobs: int = 1, **_) -> list[Line]:
    rep = bound_summary(acceptance_sweep(n_jobs))
    d = rep.details
    return [Line("bounds", "inscribed-ball bound over the square sweep", rep.passed,
                 f"{d['mechanism_applicable']} applicable, {d['mechanism_failures']} failures, "
                 f"worst margin {d['worst_mechanism_margin']:.3g}")]


def suite_hkk(n_jobs: int = 1, **_) -> list[Line]:
    land = acceptance_sweep(n_jobs)
    lines = []
    for H in symmetry_axes(land.domain, land.h):
        rep = hkk_check(land, H)
        lines.append(Line("hkk", f"axis normal={tuple(round(float(v), 3) for v in H.normal)}", rep.passed,
                          f"max dist {rep.details['max_distance_to_line']:.3g}, "
                          f"min gap {rep.details['max_minimizer_gap']:.3g}"))
    return lines


def heart_cases() -> list[tuple[str, Shape]]:
    return [
        ("square", Shape.rectangle(1, 1)),
        ("disc", Shape.disc((0, 0), 1)),
        ("rectangle 1x2", Shape.rectangle(1, 2)),
        ("scalene triangle", Shape.polygon([[0, 0], [4, 0], [1, 2]])),
    ]


def suite_heart(h: float = 1 / 64, tol: float = 1e-3, n_directions: int = 360, **_) -> list[Line]:
    lines = []
    for name, shape in heart_cases():
        hh = h * shape.diameter / math.sqrt(2)
        res = solve(rasterize(shape, h=hh))
        H = heart(shape, n_directions, tol)
        rep = heart_membership_check(max_set(res), H, hh + tol)
        lines.append(Line("heart", f"max point in heart: {name}", rep.passed,
                          f"distance {rep.details['max_distance']:.3g} <= {hh + tol:.3g}"))
    sq = heart(Shape.rectangle(1, 1), n_directions, tol)
    ok = sq.diameter <= 2 * tol and np.hypot(*(sq.centroid - 0.5)) <= tol
    lines.append(Line("heart", "square heart collapses to the centre", bool(ok), f"diameter {sq.diameter:.3g}"))
    return lines


def fk_shapes() -> list[tuple[str, Shape]]:
    return [
        ("disc", Shape.disc((0, 0), 1)),
        ("square", Shape.rectangle(1, 1)),
        ("rectangle 1x2", Shape.rectangle(1, 2)),
        ("rectangle 1x4", Shape.rectangle(1, 4)),
        ("equilateral triangle", Shape.polygon([[0, 0], [1, 0], [0.5, math.sqrt(3) / 2]])),
        ("scalene triangle", Shape.polygon([[0, 0], [4, 0], [1, 2]])),
        ("regular hexagon", Shape.regular_polygon(6)),
        ("regular pentagon", Shape.regular_polygon(5)),
        ("L-shape", l_shape()),
        ("right triangle", Shape.polygon([[0, 0], [1, 0], [0, 1]])),
    ]


def extrapolated_eigenvalue(shape: Shape, cells: int = 64) -> float:
    """Two-level extrapolated λ₁ with about ``cells`` cells across the smaller side."""
    x0, y0, x1, y1 = shape.bounds
    h = min(x1 - x0, y1 - y0) / cells
    lam_h = solve(rasterize(shape, h=h)).eigenvalue
    lam_h2 = solve(rasterize(shape, h=h / 2)).eigenvalue
    return 2 * lam_h2 - lam_h


def suite_faber_krahn(**_) -> list[Line]:
    lines = []
    for name, shape in fk_shapes():
        m = faber_krahn_margin(extrapolated_eigenvalue(shape), shape.area)
        ok = m >= 0.99 and (name != "disc" or m <= 1.01)
        lines.append(Line("faber-krahn", f"margin {name}", ok, f"{m:.4f}"))
    return lines


_RUNNERS: dict[str, Callable[..., list[Line]]] = {
    "oracle": suite_oracle,
    "monotonicity": suite_monotonicity,
    "bounds": suite_bounds,
    "hkk": suite_hkk,
    "heart": suite_heart,
    "faber-krahn": suite_faber_krahn,
}


def run_suite(name: str, seed: int = 42, n_jobs: int = 1) -> list[Line]:
    if name == "all":
        return [line for s in SUITES for line in _RUNNERS[s](seed=seed, n_jobs=n_jobs)]
    if name not in _RUNNERS:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES + ('all',))}")
    return _RUNNERS[name](seed=seed, n_jobs=n_jobs)


def format_table(lines: list[Line]) -> str:
    w = max([len(f"{ln.suite}: {ln.name}") for ln in lines] + [10])
    rows = [f"{'check':<{w}}  result  detail", "-" * (w + 24)]
    for ln in lines:
        rows.append(f"{ln.suite + ': ' + ln.name:<{w}}  {'PASS' if ln.passed else 'FAIL':<6}  {ln.detail}")
    return "\n".join(rows) + "\n"


def summary(lines: list[Line], suite: Optional[str] = None) -> dict:
    return {
        "suite": suite,
        "passed": bool(all(ln.passed for ln in lines)),
        "checks": [{"suite": ln.suite, "name": ln.name, "passed": bool(ln.passed), "detail": ln.detail} for ln in lines],
    }
