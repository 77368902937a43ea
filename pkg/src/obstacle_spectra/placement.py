"""Sweeps of obstacle translates and the checks run on the resulting landscape."""
from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .constants import ConstantsProfile, analytic_2d
from .discretize import DomainMask, EmptyDomainError, GridSpec, StencilOperator, obstacle_cells, rasterize
from .eigensolver import SpectralResult, smallest_eigenpair
from .geometry import DISC, ConvexRegion, GeometryError, Hyperplane2D, Shape, Translate, is_symmetric
from .spectral import MaxSet, check_main_bound, max_set


class PlacementError(ValueError):
    pass


def placement_lattice(domain: Shape, obstacle: Shape, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Lattice axes centred on the domain's bounding box, covering every offset
    whose obstacle bounding box meets the domain's."""
    if not step > 0:
        raise PlacementError("lattice_step must be positive")
    dx0, dy0, dx1, dy1 = domain.bounds
    ox0, oy0, ox1, oy1 = obstacle.bounds
    axes = []
    for c, lo, hi in (((dx0 + dx1) / 2, dx0 - ox1, dx1 - ox0), ((dy0 + dy1) / 2, dy0 - oy1, dy1 - oy0)):
        k0 = math.ceil((lo - c) / step - 1e-9)
        k1 = math.floor((hi - c) / step + 1e-9)
        # rounding keeps mirror offsets exact mirrors of each other
        axes.append(np.round(c + step * np.arange(k0, k1 + 1), 12))
    return axes[0], axes[1]


@dataclass
class OffsetOutcome:
    lambda1: float
    admissible: bool
    connected: bool
    removed: int
    bound: Optional[dict] = None


# worker state for the process pool; set once per process by _init_worker
_CTX: dict = {}


def _init_worker(ctx: dict) -> None:
    _CTX.clear()
    _CTX.update(ctx)


def _evaluate(offset) -> OffsetOutcome:
    ctx = _CTX
    base: DomainMask = ctx["mask"]
    t = Translate(ctx["obstacle"], (float(offset[0]), float(offset[1])))
    removed = obstacle_cells(base.grid, t) & base.active
    n_removed = int(removed.sum())
    if n_removed == 0:
        comp = ctx["domain_result"]
    else:
        try:
            mask = base.without(removed)
        except EmptyDomainError:
            return OffsetOutcome(float("nan"), False, False, n_removed)
        comp = smallest_eigenpair(StencilOperator(mask), tol=ctx["tol"])
    bound = None
    M: MaxSet = ctx["max_set"]
    if float(t.distance(M.points).max()) > 0:
        bound = check_main_bound(ctx["domain_result"], comp, t, ctx["consts"], M=M).to_record()
    return OffsetOutcome(comp.eigenvalue, True, comp.connected, n_removed, bound)


def _run(ctx: dict, offsets: np.ndarray, n_jobs: int) -> list[OffsetOutcome]:
    if n_jobs <= 1 or len(offsets) < 2:
        _init_worker(ctx)
        return [_evaluate(o) for o in offsets]
    chunk = max(1, len(offsets) // (8 * n_jobs))
    with ProcessPoolExecutor(max_workers=n_jobs, initializer=_init_worker, initargs=(ctx,)) as pool:
        # map preserves input order, so the reduction below never sees scheduling
        return list(pool.map(_evaluate, offsets, chunksize=chunk))


@dataclass(eq=False)
class PlacementLandscape:
    """λ₁(Ω \\ (x+D)) over a lattice of offsets ``x``, lexicographic in (x, y)."""

    domain: Shape
    obstacle: Shape
    grid: GridSpec
    lattice_step: float
    tol: float
    offsets: np.ndarray
    values: np.ndarray
    admissible: np.ndarray
    connected: np.ndarray
    interior: np.ndarray
    domain_result: SpectralResult
    max_set: MaxSet
    consts: ConstantsProfile
    bounds: list = field(default_factory=list)

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def lambda_domain(self) -> float:
        return self.domain_result.eigenvalue

    @property
    def mu(self) -> float:
        return float(np.max(self.values[self.admissible]))

    @property
    def ratio(self) -> float:
        """μ_Ω / λ₁(Ω)."""
        return self.mu / self.lambda_domain

    @property
    def argmax(self) -> np.ndarray:
        """Indices of admissible offsets within solver tolerance of μ_Ω."""
        v = np.where(self.admissible, self.values, -np.inf)
        return np.flatnonzero(v >= self.mu * (1 - self.tol))

    @property
    def argmin(self) -> np.ndarray:
        """Minimisers among offsets with the obstacle inside the closed domain."""
        ok = self.admissible & self.interior
        if not ok.any():
            return np.array([], dtype=int)
        v = np.where(ok, self.values, np.inf)
        low = float(v.min())
        return np.flatnonzero(v <= low * (1 + self.tol))

    @property
    def argmax_offsets(self) -> np.ndarray:
        return self.offsets[self.argmax]

    def value_at(self, offset) -> float:
        d = np.abs(self.offsets - np.asarray(offset, dtype=float)).max(axis=1)
        k = int(np.argmin(d))
        if d[k] > 1e-9:
            raise KeyError(f"offset {tuple(offset)} is not on the lattice")
        return float(self.values[k])

    def translate(self, k: int) -> Translate:
        return Translate(self.obstacle, tuple(float(v) for v in self.offsets[k]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x_offset,y_offset,lambda1,admissible,connected\n")
        for (x, y), lam, adm, con in zip(self.offsets, self.values, self.admissible, self.connected):
            lam_s = repr(float(lam)) if adm else "nan"
            buf.write(f"{float(x)!r},{float(y)!r},{lam_s},{int(adm)},{int(con)}\n")
        return buf.getvalue()

    def grid_values(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(xs, ys, Z) with Z[j, i] the value at (xs[i], ys[j]); NaN where inadmissible."""
        xs = np.unique(self.offsets[:, 0])
        ys = np.unique(self.offsets[:, 1])
        Z = np.full((len(ys), len(xs)), np.nan)
        ix = np.searchsorted(xs, self.offsets[:, 0])
        iy = np.searchsorted(ys, self.offsets[:, 1])
        Z[iy, ix] = np.where(self.admissible, self.values, np.nan)
        return xs, ys, Z


def sweep(domain: Shape, obstacle: Shape, lattice_step: float, grid: Optional[GridSpec] = None,
          h: Optional[float] = None, tol: float = 1e-8, n_jobs: int = 1,
          consts: Optional[ConstantsProfile] = None, offsets: Optional[np.ndarray] = None) -> PlacementLandscape:
    """Solve for every lattice offset and collect the landscape.

    Offsets whose obstacle removes no cell reuse the unobstructed solve
    (the mask is identical). The result does not depend on ``n_jobs``.
    """
    if grid is None:
        if h is None:
            raise PlacementError("give either a grid or a spacing h")
        grid = GridSpec.covering(domain, h)
    if lattice_step < grid.h * (1 - 1e-9):
        raise PlacementError("lattice_step must be at least the grid spacing")
    consts = consts or analytic_2d()
    base = rasterize(domain, grid=grid)
    domain_result = smallest_eigenpair(StencilOperator(base), tol=tol)
    M = max_set(domain_result)
    if offsets is None:
        xs, ys = placement_lattice(domain, obstacle, lattice_step)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        offsets = np.column_stack([X.ravel(), Y.ravel()])
    offsets = np.asarray(offsets, dtype=float).reshape(-1, 2)
    ctx = {"mask": base, "obstacle": obstacle, "tol": tol, "domain_result": domain_result,
           "max_set": M, "consts": consts}
    outcomes = _run(ctx, offsets, n_jobs)
    admissible = np.array([o.admissible for o in outcomes])
    if not admissible.any():
        raise PlacementError("every offset leaves an empty complement")
    interior = np.array([obstacle.translated(o).within(domain) for o in offsets])
    return PlacementLandscape(
        domain=domain, obstacle=obstacle, grid=grid, lattice_step=float(lattice_step), tol=tol,
        offsets=offsets,
        values=np.array([o.lambda1 for o in outcomes]),
        admissible=admissible,
        connected=np.array([o.connected for o in outcomes]),
        interior=interior,
        domain_result=domain_result, max_set=M, consts=consts,
        bounds=[o.bound for o in outcomes],
    )


def evaluate_offsets(landscape: PlacementLandscape, offsets) -> np.ndarray:
    """Complement eigenvalues at arbitrary offsets on the landscape's grid (NaN if empty)."""
    base = rasterize(landscape.domain, grid=landscape.grid)
    ctx = {"mask": base, "obstacle": landscape.obstacle, "tol": landscape.tol,
           "domain_result": landscape.domain_result, "max_set": landscape.max_set,
           "consts": landscape.consts}
    outs = _run(ctx, np.asarray(offsets, dtype=float).reshape(-1, 2), 1)
    return np.array([o.lambda1 for o in outs])


def refine_maximizer(landscape: PlacementLandscape, shrink: float = 0.5, levels: int = 2) -> np.ndarray:
    """Pattern search around the coarse maximiser.

    Each level evaluates the 3x3 stencil of step ``shrink`` times the
    previous step around the incumbent and moves to the best point. Ties
    anywhere go to the lexicographically smallest offset.
    """
    if not 0 < shrink < 1:
        raise PlacementError("shrink must lie in (0, 1)")
    idx = landscape.argmax
    cand = landscape.offsets[idx]
    order = np.lexsort((cand[:, 1], cand[:, 0]))
    best = cand[order[0]].copy()
    xs = np.unique(landscape.offsets[:, 0])
    ys = np.unique(landscape.offsets[:, 1])
    if best[0] in (xs[0], xs[-1]) or best[1] in (ys[0], ys[-1]):
        raise PlacementError("maximiser lies on the lattice boundary; expand lattice")
    best_val = landscape.mu
    step = landscape.lattice_step
    for _ in range(levels):
        step *= shrink
        ring = np.array([(best[0] + i * step, best[1] + j * step)
                         for i in (-1, 0, 1) for j in (-1, 0, 1) if (i, j) != (0, 0)])
        vals = evaluate_offsets(landscape, ring)
        for k in np.lexsort((ring[:, 1], ring[:, 0])):
            v = vals[k]
            if np.isfinite(v) and (v > best_val * (1 + landscape.tol)
                                   or (abs(v - best_val) <= best_val * landscape.tol
                                       and tuple(ring[k]) < tuple(best))):
                best, best_val = ring[k].copy(), float(v)
    return best


@dataclass
class CheckReport:
    name: str
    status: str  # pass | fail | vacuous | comparable | not-applicable
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def to_record(self) -> dict:
        return {"name": self.name, "status": self.status, "passed": self.passed, **self.details}


def _rho_per_argmax(landscape: PlacementLandscape, M: MaxSet) -> np.ndarray:
    return np.array([float(landscape.translate(k).distance(M.points).max()) for k in landscape.argmax])


def hkk_check(landscape: PlacementLandscape, H: Hyperplane2D) -> CheckReport:
    """Maximisers centred on the symmetry line, interior minimisers touching the boundary."""
    dom, obs = landscape.domain, landscape.obstacle
    if not dom.is_convex:
        raise GeometryError("symmetry check needs a convex domain")
    if obs.kind != DISC:
        raise GeometryError("symmetry check needs a disc obstacle")
    if not is_symmetric(dom, H, landscape.h):
        raise GeometryError("domain is not symmetric about the given line")
    step = landscape.lattice_step
    slack = 1e-9 * step
    centers_max = landscape.offsets[landscape.argmax] + obs.center
    dist_h = np.abs(H.signed_distance(centers_max))
    part_a = bool(np.all(dist_h <= step + slack))
    amin = landscape.argmin
    if len(amin):
        centers_min = landscape.offsets[amin] + obs.center
        gap = dom.boundary_distance(centers_min) - obs.radius
        part_b = bool(np.all(gap <= step + slack))
        max_gap = float(gap.max())
    else:
        part_b, max_gap = None, None
    ok = part_a and part_b is not False
    return CheckReport("hkk", "pass" if ok else "fail", {
        "line": {"normal": list(H.normal), "offset": H.offset},
        "max_distance_to_line": float(dist_h.max()),
        "max_minimizer_gap": max_gap,
        "maximizers_on_line": part_a,
        "minimizers_touch_boundary": part_b,
        "lattice_step": step,
    })


def localization_check(landscape: PlacementLandscape, M: Optional[MaxSet] = None,
                       consts: Optional[ConstantsProfile] = None) -> CheckReport:
    """ρ at every maximiser against √(c0 / (C λ₁(Ω))) with C = μ_Ω / λ₁(Ω)."""
    M = M or landscape.max_set
    consts = consts or landscape.consts
    C = landscape.ratio
    details = {"ratio": C, "threshold": consts.localization_threshold}
    if C <= consts.localization_threshold:
        return CheckReport("localization", "vacuous", details)
    bound = math.sqrt(consts.c0 / (C * landscape.lambda_domain))
    rhos = _rho_per_argmax(landscape, M)
    slack = bound - float(rhos.max())
    details.update({"bound": bound, "rho_max": float(rhos.max()), "slack": slack})
    return CheckReport("localization", "pass" if slack >= 0 else "fail", details)


def convex_containment_check(landscape: PlacementLandscape, M: Optional[MaxSet] = None,
                             consts: Optional[ConstantsProfile] = None) -> CheckReport:
    """When μ_Ω ≥ C0 λ₁(Ω), every maximiser must contain the maximum points (one-cell tolerance)."""
    if not landscape.obstacle.is_convex:
        raise GeometryError("containment check needs a convex obstacle")
    M = M or landscape.max_set
    consts = consts or landscape.consts
    C = landscape.ratio
    rhos = _rho_per_argmax(landscape, M)
    details = {"ratio": C, "C0": consts.C0, "rho_max": float(rhos.max()), "h": landscape.h}
    if C < consts.C0:
        return CheckReport("convex_containment", "comparable", details)
    ok = bool(np.all(rhos <= landscape.h))
    return CheckReport("convex_containment", "pass" if ok else "fail", details)


def heart_membership_check(M: MaxSet, heart_region: ConvexRegion, tol: float) -> CheckReport:
    d = heart_region.distance(M.points)
    ok = bool(np.all(d <= tol))
    return CheckReport("heart_membership", "pass" if ok else "fail",
                       {"max_distance": float(d.max()), "tol": tol})


def bound_summary(landscape: PlacementLandscape, slack: float = 0.02) -> CheckReport:
    """Aggregate the per-offset inscribed-ball reports of a sweep."""
    recs = [b for b in landscape.bounds if b is not None]
    applicable = [b for b in recs if b["mechanism_applicable"]]
    failures = [b for b in applicable if not b["mechanism_pass"]]
    stated_fail = [b for b in recs if not b["stated_bound_pass"]]
    worst = min((b["ball_bound"] * (1 + slack) - b["lambda1_complement"] for b in applicable), default=None)
    return CheckReport("inscribed_ball_bound", "fail" if failures or stated_fail else "pass", {
        "checked": len(recs), "mechanism_applicable": len(applicable),
        "mechanism_failures": len(failures), "stated_failures": len(stated_fail),
        "worst_mechanism_margin": worst,
    })


class ObstaclePlacement(BaseEstimator):
    """Find the translate of ``obstacle`` maximising λ₁(Ω \\ (x+D)).

    ``fit(domain)`` sweeps the lattice and exposes ``landscape_``, ``mu_``
    and ``argmax_offsets_``; ``predict(offsets)`` returns complement
    eigenvalues at arbitrary offsets on the same grid.
    """

    def __init__(self, obstacle: Optional[Shape] = None, h: float = 1 / 64, lattice_step: float = 0.05,
                 tol: float = 1e-8, n_jobs: int = 1, constants: Optional[ConstantsProfile] = None):
        self.obstacle = obstacle
        self.h = h
        self.lattice_step = lattice_step
        self.tol = tol
        self.n_jobs = n_jobs
        self.constants = constants

    def fit(self, X: Shape, y=None):
        if not isinstance(X, Shape):
            raise TypeError(f"expected a domain Shape, got {type(X).__name__}")
        if not isinstance(self.obstacle, Shape):
            raise ValueError("obstacle must be a Shape")
        self.landscape_ = sweep(X, self.obstacle, self.lattice_step, h=self.h, tol=self.tol,
                                n_jobs=self.n_jobs, consts=self.constants)
        self.mu_ = self.landscape_.mu
        self.argmax_offsets_ = self.landscape_.argmax_offsets
        self.max_set_ = self.landscape_.max_set
        return self

    def predict(self, X: Sequence) -> np.ndarray:
        check_is_fitted(self, "landscape_")
        return evaluate_offsets(self.landscape_, X)
