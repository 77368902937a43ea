"""Quantities derived from ground states: maximum points, the placement bound
and its inscribed-ball mechanism, Faber-Krahn margins and gradient ratios."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .constants import J01, ConstantsProfile
from .discretize import DomainMask
from .eigensolver import SpectralResult
from .geometry import Translate

DEFAULT_MAX_REL_TOL = 1e-3


@dataclass
class MaxSet:
    """Cells where the ground state is within ``rel_tol`` of its maximum."""

    points: np.ndarray
    rel_tol: float
    diameter: float
    indices: np.ndarray

    def __len__(self) -> int:
        return len(self.points)

    @property
    def center(self) -> np.ndarray:
        return self.points.mean(axis=0)


def default_max_tol(result: SpectralResult) -> float:
    """``min(1e-3, 0.05 λ h²)``.

    One cell away from a smooth maximum the ground state drops by roughly
    ``λ h² / 4`` or less along flat directions; the threshold has to stay
    well below that on fine grids while sitting far above the solver error.
    """
    return min(DEFAULT_MAX_REL_TOL, 0.05 * result.eigenvalue * result.h ** 2)


def max_set(result: SpectralResult, rel_tol: Optional[float] = None) -> MaxSet:
    if rel_tol is None:
        rel_tol = default_max_tol(result)
    if not 0 < rel_tol <= 0.1:
        raise ValueError("rel_tol must lie in (0, 0.1]")
    phi = result.ground_state
    idx = np.flatnonzero(phi >= (1 - rel_tol) * phi.max())
    pts = result.mask.points[idx]
    if len(pts) > 1:
        d = pts[:, None, :] - pts[None, :, :]
        diam = float(np.sqrt((d ** 2).sum(-1)).max())
    else:
        diam = 0.0
    return MaxSet(pts, float(rel_tol), diam, idx)


def rho(t: Translate, M) -> float:
    """Largest distance from a maximum point to the closed translate."""
    pts = M.points if isinstance(M, MaxSet) else np.asarray(M, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("maximum set is empty")
    return float(t.distance(pts).max())


def beta(rho_x: float, lam_domain: float, consts: ConstantsProfile) -> float:
    """Bound factor on λ₁(Ω \\ (x+D)) / λ₁(Ω); flat at ``beta0 = c0/r0²`` beyond one wavelength radius."""
    if not rho_x > 0:
        raise ValueError("rho_x must be positive for the bound")
    if rho_x * math.sqrt(lam_domain) > consts.r0:
        return consts.beta0
    return consts.c0 / (rho_x ** 2 * lam_domain)


def beta_inverse(C: float, lam_domain: float, consts: ConstantsProfile) -> float:
    """Distance at which the decreasing branch of :func:`beta` equals ``C`` (needs ``C > beta0``)."""
    if not C > consts.beta0:
        raise ValueError("beta only takes values above beta0 on its decreasing branch")
    return math.sqrt(consts.c0 / (C * lam_domain))


def ball_cells(mask: DomainMask, center, r: float) -> np.ndarray:
    """Boolean grid of cells whose centres lie in the closed ball."""
    g = mask.grid
    dx = g.xc[None, :] - center[0]
    dy = g.yc[:, None] - center[1]
    return dx * dx + dy * dy <= r * r


@dataclass
class BoundReport:
    lambda1_domain: float
    lambda1_complement: float
    rho_x: float
    rho0: float
    beta: float
    ball_bound: float
    mechanism_applicable: bool
    mechanism_pass: Optional[bool]
    stated_bound_pass: bool
    slack_mechanism: Optional[float]
    slack_stated: float
    ball_center: Optional[tuple] = None

    def to_record(self) -> dict:
        d = asdict(self)
        if d["ball_center"] is not None:
            d["ball_center"] = [float(x) for x in d["ball_center"]]
        return d


def check_main_bound(domain: SpectralResult, complement: SpectralResult, t: Translate,
                     consts: ConstantsProfile, M: Optional[MaxSet] = None,
                     slack: float = 0.02) -> BoundReport:
    """Test λ₁(Ω \\ (x+D)) against the inscribed-ball and β bounds.

    The inscribed-ball mechanism compares the complement eigenvalue with
    ``c0 / rho0²`` for a ball of radius ``rho0 = min(r0/√λ₁(Ω), ρ_x)`` around
    a maximum point, provided that ball rasterises entirely inside the
    complement mask; otherwise the mechanism is reported as not applicable.
    Both comparisons allow a relative ``slack`` for discretisation error.
    """
    if M is None:
        M = max_set(domain)
    lam_d, lam_c = domain.eigenvalue, complement.eigenvalue
    dists = t.distance(M.points)
    rho_x = float(dists.max())
    if not rho_x > 0:
        raise ValueError("rho_x must be positive for the bound")
    rho0 = min(consts.r0 / math.sqrt(lam_d), rho_x)
    b = beta(rho_x, lam_d, consts)
    ball_bound = consts.c0 / rho0 ** 2

    center = None
    for k in np.argsort(-dists, kind="stable"):
        if dists[k] < rho0:
            break
        cells = ball_cells(complement.mask, M.points[k], rho0)
        if not np.any(cells & ~complement.mask.active):
            center = tuple(M.points[k])
            break
    applicable = center is not None
    mech_pass = bool(lam_c <= (1 + slack) * ball_bound) if applicable else None
    stated = b * lam_d
    return BoundReport(
        lambda1_domain=lam_d,
        lambda1_complement=lam_c,
        rho_x=rho_x,
        rho0=rho0,
        beta=b,
        ball_bound=ball_bound,
        mechanism_applicable=applicable,
        mechanism_pass=mech_pass,
        stated_bound_pass=bool(lam_c <= (1 + slack) * stated),
        slack_mechanism=(ball_bound - lam_c) if applicable else None,
        slack_stated=stated - lam_c,
        ball_center=center,
    )


def _lattice_count(center, r: float, grid):
    """Centres of all lattice cells (extended beyond the grid) within ``r`` of ``center``."""
    h = grid.h
    x0, y0 = grid.origin
    c_lo = math.floor((center[0] - r - x0) / h) - 1
    c_hi = math.ceil((center[0] + r - x0) / h) + 1
    r_lo = math.floor((center[1] - r - y0) / h) - 1
    r_hi = math.ceil((center[1] + r - y0) / h) + 1
    cols = np.arange(c_lo, c_hi + 1)
    rows = np.arange(r_lo, r_hi + 1)
    xs = x0 + (2 * cols + 1) * (h / 2)
    ys = y0 + (2 * rows + 1) * (h / 2)
    inside = (xs[None, :] - center[0]) ** 2 + (ys[:, None] - center[1]) ** 2 <= r * r
    return rows, cols, inside


def inscribed_fraction(result: SpectralResult, mask: DomainMask, r: float,
                       center=None) -> float:
    """Fraction of the lattice cells in ``B_r(x0)`` that are active.

    ``x0`` defaults to the first maximum point. Cells are counted on the
    lattice extended past the grid, whose cells are all outside the domain.
    """
    if not r > 0:
        raise ValueError("r must be positive")
    if center is None:
        center = max_set(result).points[0]
    if not mask.grid.contains_point(center):
        raise ValueError("ball centre lies outside the grid box")
    rows, cols, inside = _lattice_count(center, r, mask.grid)
    total = int(inside.sum())
    if total == 0:
        return 1.0
    g = mask.grid
    rr, cc = np.meshgrid(rows, cols, indexing="ij")
    in_grid = (rr >= 0) & (rr < g.ny) & (cc >= 0) & (cc < g.nx)
    hit = np.zeros_like(inside)
    hit[in_grid] = mask.active[rr[in_grid], cc[in_grid]]
    return float((hit & inside).sum()) / total


def faber_krahn_margin(lam: float, area: float) -> float:
    """λ₁ |Ω| / (π j₀,₁²); at least 1 in the plane, equal for a disc."""
    if not area > 0:
        raise ValueError("area must be positive")
    return lam * area / (math.pi * J01 ** 2)


def gradient_field(result: SpectralResult) -> np.ndarray:
    """|∇φ| per active cell: central differences, one-sided next to inactive cells."""
    a = result.mask.active
    f = result.field()
    h = result.h
    pad_a = np.pad(a, 1)
    pad_f = np.pad(f, 1)

    def component(axis: int) -> np.ndarray:
        sl_plus = [slice(1, -1), slice(1, -1)]
        sl_minus = [slice(1, -1), slice(1, -1)]
        sl_plus[axis] = slice(2, None)
        sl_minus[axis] = slice(None, -2)
        ap, am = pad_a[tuple(sl_plus)], pad_a[tuple(sl_minus)]
        fp, fm = pad_f[tuple(sl_plus)], pad_f[tuple(sl_minus)]
        g = np.zeros_like(f)
        both = ap & am
        g[both] = (fp[both] - fm[both]) / (2 * h)
        only_p = ap & ~am
        g[only_p] = (fp[only_p] - f[only_p]) / h
        only_m = am & ~ap
        g[only_m] = (f[only_m] - fm[only_m]) / h
        return g

    gx, gy = component(1), component(0)
    return np.hypot(gx, gy)[a]


def gradient_ratio(result: SpectralResult) -> float:
    """sup |∇φ| / √λ₁ for the sup-normalised ground state."""
    return float(gradient_field(result).max() / math.sqrt(result.eigenvalue))


@dataclass
class LowerCheck:
    value: float
    bound: float
    distance_to_max: float
    holds: bool


def ground_state_lower_check(result: SpectralResult, x, M: Optional[MaxSet] = None,
                             ratio: Optional[float] = None) -> LowerCheck:
    """φ(x) against the Lipschitz bound ``1 - ratio * √λ₁ * dist(x, M)``."""
    g = result.mask.grid
    row, col = g.cell_of(x)
    if not (0 <= row < g.ny and 0 <= col < g.nx) or not result.mask.active[row, col]:
        raise ValueError("point lies outside the active mask")
    if M is None:
        M = max_set(result)
    if ratio is None:
        ratio = gradient_ratio(result)
    value = float(result.ground_state[result.mask.index[row, col]])
    dist = float(np.hypot(*(M.points - np.asarray(x, dtype=float)).T).min())
    bound = 1 - ratio * math.sqrt(result.eigenvalue) * dist
    return LowerCheck(value, bound, dist, value >= bound - 1e-12)


def distance_to_boundary_scaled(result: SpectralResult, domain, point) -> float:
    """dist(point, ∂Ω) · √λ₁, the wavelength-scaled depth of a point."""
    return float(domain.boundary_distance(point)[0]) * math.sqrt(result.eigenvalue)
