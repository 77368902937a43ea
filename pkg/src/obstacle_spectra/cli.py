"""Command-line front end: ``obstacle-spectra <command> <config>``."""
from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .calibration import calibrate
from .config import ConfigError, ExperimentConfig, load_config, output_dir
from .discretize import EmptyDomainError, GridSpec, rasterize, write_pgm
from .eigensolver import SolverError, refine_extrapolate, solve
from .geometry import GeometryError, Translate, estimate_asymmetry, heart, symmetry_axes
from .placement import (PlacementError, bound_summary, convex_containment_check, heart_membership_check,
                        hkk_check, localization_check, sweep)
from .spectral import max_set
from .svg import heatmap
from .verify import SUITES, format_table, run_suite, summary

EXIT_OK, EXIT_CHECK, EXIT_USAGE = 0, 1, 2


def _plain(obj):
    """numpy scalars and arrays as plain JSON values."""
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


class Run:
    """Collects outputs and timings, then writes the run manifest."""

    def __init__(self, out: Path, command: str, cfg: Optional[ExperimentConfig] = None):
        self.out = out
        self.command = command
        self.cfg = cfg
        self.outputs: list[str] = []
        self.timings: dict[str, float] = {}
        out.mkdir(parents=True, exist_ok=True)

    @contextmanager
    def timed(self, name: str):
        t = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = round(time.perf_counter() - t, 6)

    def write_text(self, name: str, text: str) -> Path:
        p = self.out / name
        with open(p, "w", newline="\n") as fh:
            fh.write(text)
        self.outputs.append(name)
        return p

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, json.dumps(obj, indent=2, sort_keys=True, default=_plain) + "\n")

    def finish(self) -> Path:
        manifest = {
            "command": self.command,
            "version": __version__,
            "config_sha256": self.cfg.digest if self.cfg else None,
            "timings": self.timings,
            "outputs": self.outputs + ["manifest.json"],
        }
        return self.write_json("manifest.json", manifest)


def _field_svg(result, domain, title: str, markers=(), outline=None) -> str:
    F = result.field(fill=np.nan)
    peak = np.nanmax(F)
    return heatmap(F / peak, result.mask.grid.box, title=title, markers=markers,
                   levels=[0.2, 0.4, 0.6, 0.8], outline=domain.as_polygon() if outline is None else outline)


def _pgm(result) -> str:
    F = result.field(fill=0.0)
    return write_pgm(F / F.max(), result.mask.grid, comment="ground state scaled to max 1")


def run_solve(cfg: ExperimentConfig, run: Run) -> int:
    domain = cfg.require_domain()
    obstacle = Translate(cfg.obstacle, cfg.obstacle_offset) if cfg.obstacle is not None else None
    grid = GridSpec.covering(domain, cfg.h)
    with run.timed("solve_h"):
        coarse = solve(rasterize(domain, obstacle, grid=grid), tol=cfg.tol)
    with run.timed("solve_h2"):
        fine = solve(rasterize(domain, obstacle, grid=grid.refined()), tol=cfg.tol)
    extrap, _ = refine_extrapolate(coarse.eigenvalue, fine.eigenvalue)
    M = max_set(fine)
    record = {
        **fine.to_record(),
        "lambda1": extrap,
        "lambda1_h": coarse.eigenvalue,
        "lambda1_h2": fine.eigenvalue,
        "h_coarse": coarse.h,
        "max_point": [float(v) for v in M.center],
        "max_set_diameter": M.diameter,
    }
    run.write_json("solve.json", record)
    run.write_text("phi.pgm", _pgm(fine))
    run.write_text("mask.pgm", fine.mask.to_pgm())
    run.write_text("phi.svg", _field_svg(fine, domain, f"ground state, lambda1 = {extrap:.6g}", [M.center]))
    print(f"lambda1 = {extrap:.8g} (h: {coarse.eigenvalue:.8g}, h/2: {fine.eigenvalue:.8g})")
    return EXIT_OK


def _sweep_reports(land, cfg: ExperimentConfig) -> list:
    dom, obs = land.domain, land.obstacle
    reports = []
    if dom.is_convex and obs.kind == "disc":
        reports += [hkk_check(land, H) for H in symmetry_axes(dom, land.h)]
    reports.append(localization_check(land))
    if obs.is_convex:
        reports.append(convex_containment_check(land))
    if dom.is_convex:
        H = heart(dom, cfg.n_directions, cfg.heart_tol)
        reports.append(heart_membership_check(land.max_set, H, land.h + cfg.heart_tol))
    reports.append(bound_summary(land))
    return reports


def run_sweep(cfg: ExperimentConfig, run: Run, n_jobs: int) -> int:
    domain = cfg.require_domain()
    if cfg.obstacle is None:
        raise ConfigError("obstacle: sweep needs an [obstacle] table")
    if cfg.obstacle.area >= domain.area:
        # no placement can leave the obstacle inside; edge offsets would only graze
        raise PlacementError("obstacle is not smaller than the domain; every placement is inadmissible")
    with run.timed("sweep"):
        land = sweep(domain, cfg.obstacle, cfg.lattice_step, h=cfg.h, tol=cfg.tol,
                     n_jobs=n_jobs, consts=cfg.profile())
    with run.timed("checks"):
        reports = _sweep_reports(land, cfg)
    run.write_text("landscape.csv", land.to_csv())
    xs, ys, Z = land.grid_values()
    step = land.lattice_step
    extent = (xs[0] - step / 2, ys[0] - step / 2, xs[-1] + step / 2, ys[-1] + step / 2)
    run.write_text("landscape.svg", heatmap(Z, extent, title=f"lambda1 by offset, mu = {land.mu:.6g}",
                                            markers=land.argmax_offsets))
    doc = {
        "lambda1_domain": land.lambda_domain,
        "mu": land.mu,
        "ratio": land.ratio,
        "argmax": land.argmax_offsets.tolist(),
        "argmin": land.offsets[land.argmin].tolist(),
        "admissible": int(land.admissible.sum()),
        "offsets": len(land.offsets),
        "reports": [r.to_record() for r in reports],
        "bounds": land.bounds,
    }
    run.write_json("reports.json", doc)
    failed = [r.name for r in reports if not r.passed]
    print(f"mu = {land.mu:.8g}, ratio = {land.ratio:.6g}, {len(land.argmax)} maximiser(s)")
    for r in reports:
        print(f"  {r.name:<22} {r.status}")
    return EXIT_CHECK if failed else EXIT_OK


def run_heart(cfg: ExperimentConfig, run: Run) -> int:
    domain = cfg.require_domain()
    with run.timed("heart"):
        H = heart(domain, cfg.n_directions, cfg.heart_tol)
    with run.timed("solve"):
        res = solve(rasterize(domain, h=cfg.h), tol=cfg.tol)
    M = max_set(res)
    rep = heart_membership_check(M, H, res.h + cfg.heart_tol)
    run.write_json("heart.json", {
        "vertices": H.vertices.tolist(),
        "degenerate": H.degenerate,
        "diameter": H.diameter,
        "centroid": H.centroid.tolist(),
        "n_directions": cfg.n_directions,
        "tol": cfg.heart_tol,
        "max_point": M.center.tolist(),
        "membership": rep.to_record(),
    })
    run.write_text("heart.svg", _field_svg(res, domain, "ground state with heart outline", [M.center],
                                           outline=H.vertices))
    print(f"heart: {len(H.vertices)} vertices, diameter {H.diameter:.4g}"
          f"{' (degenerate)' if H.degenerate else ''}; membership {rep.status}")
    return EXIT_OK if rep.passed else EXIT_CHECK


def run_asymmetry(cfg: ExperimentConfig, run: Run) -> int:
    domain = cfg.require_domain()
    with run.timed("asymmetry"):
        alpha = estimate_asymmetry(domain, cfg.n_boundary, cfg.n_radii, cfg.n_samples, seed=cfg.seed)
    run.write_json("asymmetry.json", {
        "alpha": alpha, "n_boundary": cfg.n_boundary, "n_radii": cfg.n_radii,
        "n_samples": cfg.n_samples, "seed": cfg.seed,
    })
    print(f"alpha = {alpha:.6f}")
    return EXIT_OK


def run_calibrate(cfg: ExperimentConfig, run: Run, n_jobs: int) -> int:
    with run.timed("calibrate"):
        try:
            profile, manifest = calibrate(cfg.family, h=cfg.h, tol=cfg.tol, cases=cfg.cases or None,
                                          n_jobs=n_jobs)
        except ValueError as exc:
            raise ConfigError(f"family: {exc}") from None
    run.write_json("constants.json", profile.to_dict())
    run.write_json("family.json", manifest)
    print(f"r0 = {profile.r0:.6g}, C0 = {profile.C0:.6g}, C1 = {profile.C1:.6g}, C2 = {profile.C2:.6g}")
    return EXIT_OK


def run_verify(suite: str, out: Path, seed: int, n_jobs: int) -> int:
    if suite not in SUITES + ("all",):
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    run = Run(out, f"verify {suite}")
    with run.timed(suite):
        lines = run_suite(suite, seed=seed, n_jobs=n_jobs)
    table = format_table(lines)
    run.write_text("verify.txt", table)
    run.write_json("verify.json", summary(lines, suite))
    run.finish()
    sys.stdout.write(table)
    return EXIT_OK if all(ln.passed for ln in lines) else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="obstacle-spectra",
                                description="Dirichlet eigenvalues of planar domains with a translated obstacle.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("solve", "ground state of a domain, optionally with a placed obstacle"),
                       ("sweep", "obstacle placement landscape and checks"),
                       ("heart", "heart of a convex domain and max-point membership"),
                       ("asymmetry", "Monte-Carlo asymmetry coefficient"),
                       ("calibrate", "fit the empirical constants over a shape family")):
        sp = sub.add_parser(name, help=text)
        sp.add_argument("config", help="TOML experiment file")
    sp = sub.add_parser("verify", help="run a property suite")
    sp.add_argument("suite", help=f"one of {', '.join(SUITES + ('all',))}")
    for sp in sub.choices.values():
        sp.add_argument("--out", help="output directory (overrides config and environment)")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
        sp.add_argument("--seed", type=int, help="override the config seed")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "verify":
            cfg = ExperimentConfig(output="verify-out")
            return run_verify(args.suite, output_dir(cfg, args.out),
                              args.seed if args.seed is not None else cfg.seed, args.jobs)
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        run = Run(output_dir(cfg, args.out), args.command, cfg)
        if args.command == "solve":
            code = run_solve(cfg, run)
        elif args.command == "sweep":
            code = run_sweep(cfg, run, args.jobs)
        elif args.command == "heart":
            code = run_heart(cfg, run)
        elif args.command == "asymmetry":
            code = run_asymmetry(cfg, run)
        else:
            code = run_calibrate(cfg, run, args.jobs)
        run.finish()
        return code
    except (ConfigError, GeometryError, PlacementError, EmptyDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
