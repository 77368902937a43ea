"""Empirical calibration of the constants that have no closed form."""
from __future__ import annotations

import math
from typing import Optional, Sequence

from .constants import ANALYTIC, CALIBRATED, J01, ConstantsProfile, analytic_2d
from .discretize import rasterize
from .eigensolver import solve
from .geometry import Shape, inradius
from .placement import sweep
from .spectral import max_set

MIN_FAMILY = 5


def default_family() -> list[Shape]:
    return [
        Shape.rectangle(1.0, 1.0),
        Shape.disc((0.0, 0.0), 1.0),
        Shape.rectangle(1.0, 2.0),
        Shape.rectangle(1.0, 4.0),
        Shape.polygon([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]]),
    ]


def default_cases() -> list[dict]:
    sq = Shape.rectangle(1.0, 1.0)
    tri = Shape.polygon([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    return [
        {"domain": sq, "obstacle": Shape.disc((0, 0), 0.15), "lattice_step": 0.05},
        {"domain": sq, "obstacle": Shape.disc((0, 0), 0.3), "lattice_step": 0.05},
        {"domain": sq, "obstacle": Shape.rectangle(0.3, 0.3, (-0.15, -0.15)), "lattice_step": 0.05},
        {"domain": Shape.rectangle(1.0, 2.0), "obstacle": Shape.disc((0, 0), 0.2), "lattice_step": 0.05},
        {"domain": tri, "obstacle": Shape.disc((0, 0), 0.1), "lattice_step": 0.05},
    ]


def family_record(shape: Shape, h: float, tol: float = 1e-8) -> dict:
    """Wavelength-scaled depth of the maximum point and inradius for one shape."""
    res = solve(rasterize(shape, h=h), tol=tol)
    M = max_set(res)
    # the member nearest the cluster centre stands for the maximum point
    k = int(((M.points - M.center) ** 2).sum(axis=1).argmin())
    x0 = M.points[k]
    root = math.sqrt(res.eigenvalue)
    depth = float(shape.boundary_distance(x0)[0])
    inr, _ = inradius(shape, h)
    return {
        "shape": shape.to_dict(),
        "lambda1": res.eigenvalue,
        "max_point": [float(x0[0]), float(x0[1])],
        "depth_scaled": depth * root,
        "inradius_scaled": inr * root,
    }


def case_record(case: dict, h: float, tol: float, n_jobs: int) -> dict:
    land = sweep(case["domain"], case["obstacle"], case["lattice_step"], h=h, tol=tol, n_jobs=n_jobs)
    rhos = [float(land.translate(k).distance(land.max_set.points).max()) for k in land.argmax]
    return {
        "domain": case["domain"].to_dict(),
        "obstacle": case["obstacle"].to_dict(),
        "lattice_step": case["lattice_step"],
        "ratio": land.ratio,
        "rho_max": max(rhos),
        "contained": max(rhos) <= land.h,
    }


def calibrate(family: Sequence[Shape], h: float = 1 / 64, tol: float = 1e-8,
              cases: Optional[Sequence[dict]] = None, case_h: float = 1 / 48,
              n_jobs: int = 1) -> tuple[ConstantsProfile, dict]:
    """Fit r0, C1, C2 over a family of convex shapes and C0 over obstacle sweeps.

    r0 is the smallest wavelength-scaled depth of a maximum point, C1 and C2
    the extreme wavelength-scaled inradii. C0 is the smallest ratio above
    every sweep whose maximiser missed the maximum points, or 1 if none did.
    Without ``cases`` C0 is kept from the frozen profile.
    """
    if len(family) < MIN_FAMILY:
        raise ValueError(f"calibration family needs at least {MIN_FAMILY} shapes, got {len(family)}")
    if not all(s.is_convex for s in family):
        raise ValueError("calibration family must be convex")
    members = [family_record(s, h, tol) for s in family]
    r0 = min(m["depth_scaled"] for m in members)
    C1 = min(m["inradius_scaled"] for m in members)
    C2 = max(m["inradius_scaled"] for m in members)
    base = analytic_2d()
    provenance = {"c0": ANALYTIC, "omega_n": ANALYTIC, "r0": CALIBRATED, "C1": CALIBRATED, "C2": CALIBRATED}
    case_recs = []
    if cases:
        case_recs = [case_record(c, case_h, tol, n_jobs) for c in cases]
        misses = [c["ratio"] for c in case_recs if not c["contained"]]
        C0 = max([1.0] + [m * (1 + 1e-9) for m in misses])
    else:
        C0 = base.C0
    provenance["C0"] = CALIBRATED
    profile = ConstantsProfile(n=2, c0=J01 ** 2, r0=r0, C0=C0, C1=C1, C2=C2,
                               omega_n=math.pi, provenance=provenance)
    manifest = {"h": h, "case_h": case_h, "tol": tol, "members": members, "cases": case_recs}
    return profile, manifest
