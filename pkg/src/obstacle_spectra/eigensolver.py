"""Ground state of the masked Dirichlet Laplacian.

Inverse power iteration with conjugate-gradient inner solves, a dense
diagonalisation used as an oracle on small masks, and first-order Richardson
extrapolation across grid refinements.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .discretize import DomainMask, StencilOperator

DENSE_LIMIT = 2000


class SolverError(RuntimeError):
    """Eigensolver failure; ``best`` holds the last iterate when there is one."""

    def __init__(self, message: str, best: Optional["SpectralResult"] = None):
        super().__init__(message)
        self.best = best


class ConvergenceError(SolverError):
    pass


class CGBreakdown(SolverError):
    pass


@dataclass(eq=False)
class SpectralResult:
    """Smallest eigenvalue and ground state on a mask.

    ``ground_state`` is indexed by active cell, positive, with sup-norm 1. On
    a disconnected mask it is supported on the component with the smallest
    eigenvalue and zero elsewhere.
    """

    eigenvalue: float
    ground_state: np.ndarray
    residual: float
    iterations: int
    mask: DomainMask
    n_components: int = 1
    tol: float = 1e-8
    extra: dict = field(default_factory=dict)

    @property
    def connected(self) -> bool:
        return self.n_components == 1

    @property
    def h(self) -> float:
        return self.mask.h

    @property
    def relative_residual(self) -> float:
        return self.residual / self.eigenvalue

    def field(self, fill: float = 0.0) -> np.ndarray:
        return self.mask.to_field(self.ground_state, fill)

    def to_record(self) -> dict:
        return {
            "lambda1": self.eigenvalue,
            "residual": self.residual,
            "iterations": self.iterations,
            "h": self.h,
            "active_cells": self.mask.count,
            "connected": self.connected,
        }


def conjugate_gradient(matvec: Callable[[np.ndarray], np.ndarray], b: np.ndarray, x0: np.ndarray,
                       rtol: float, maxiter: int) -> tuple[np.ndarray, int, bool]:
    """Plain CG on an SPD operator. Returns (x, iterations, converged)."""
    x = x0.copy()
    r = b - matvec(x)
    p = r.copy()
    rr = float(r @ r)
    target = (rtol * float(np.linalg.norm(b))) ** 2
    it = 0
    while rr > target:
        if it >= maxiter:
            return x, it, False
        Ap = matvec(p)
        pAp = float(p @ Ap)
        if not pAp > 0:
            raise CGBreakdown(f"CG breakdown: p·Ap = {pAp:.3e} at iteration {it}")
        alpha = rr / pAp
        x += alpha * p
        r -= alpha * Ap
        rr_new = float(r @ r)
        p *= rr_new / rr
        p += r
        rr = rr_new
        it += 1
    return x, it, True


def _normalise(phi: np.ndarray) -> np.ndarray:
    if phi.sum() < 0:
        phi = -phi
    return phi / np.abs(phi).max()


def _inverse_iteration(A: sp.csr_matrix, tol: float, max_iter: int, residual_tol: float):
    n = A.shape[0]
    phi = np.ones(n) / math.sqrt(n)
    lam = float(phi @ (A @ phi))
    shift = 0.0
    prev_change = 0.0
    cg_maxiter = max(200, 10 * n)
    inner = 0
    for k in range(1, max_iter + 1):
        if shift:
            def mv(v, s=shift):
                return A @ v - s * v
        else:
            mv = A.__matmul__
        # w ≈ phi / (lam - shift) is an excellent warm start near convergence
        w, its, ok = conjugate_gradient(mv, phi, phi / (lam - shift), tol / 10, cg_maxiter)
        inner += its
        if not ok:
            if shift:
                raise CGBreakdown("CG stagnated after the shifted restart")
            shift = 0.9 * lam
            continue
        phi = w / np.linalg.norm(w)
        Aphi = A @ phi
        new = float(phi @ Aphi)
        res = float(np.linalg.norm(Aphi - new * phi))
        change = abs(new - lam)
        # geometric tail of the remaining Rayleigh-quotient decrease
        # (q >= 1 means the changes are inner-solve noise, i.e. converged)
        q = change / prev_change if prev_change > 0 else 0.0
        tail = change * q / (1 - q) if q < 1 else 0.0
        done = change < tol * new and tail < 0.1 * tol * new and res <= residual_tol * new and k > 1
        prev_change = change
        lam = new
        if done:
            return lam, phi, res, k, inner
    raise ConvergenceError(f"inverse iteration did not converge in {max_iter} steps",
                           best=(lam, phi, res, max_iter, inner))


def smallest_eigenpair(op: StencilOperator, tol: float = 1e-8, max_iter: int = 2000,
                       residual_tol: Optional[float] = None) -> SpectralResult:
    """Smallest eigenpair by inverse power iteration.

    Each step solves ``L w = phi`` by CG to relative tolerance ``tol/10``.
    Iteration stops once the Rayleigh quotient moves by less than
    ``tol * lambda``, the geometric extrapolation of the remaining movement
    is below ``tol * lambda / 10`` (this matters when the spectral gap is
    small), and the relative residual is below ``residual_tol``
    (default ``sqrt(tol)/10``); the Rayleigh-quotient test alone leaves the
    vector accurate only to about ``sqrt(tol)``, too coarse for locating
    maxima. Disconnected masks are solved per component and the smallest
    eigenvalue wins.
    """
    if not 0 < tol <= 1e-4:
        raise ValueError("tol must lie in (0, 1e-4]")
    if residual_tol is None:
        residual_tol = math.sqrt(tol) / 10
    mask = op.mask
    labels, n_comp = mask.components()
    if n_comp == 1:
        groups = [np.arange(mask.count)]
    else:
        comp = labels[mask.active]
        groups = [np.flatnonzero(comp == c) for c in range(1, n_comp + 1)]

    best = None
    for cells in groups:
        A = op.matrix if n_comp == 1 else op.restricted(cells)
        try:
            lam, phi, res, its, inner = _inverse_iteration(A, tol, max_iter, residual_tol)
        except ConvergenceError as exc:
            lam, phi, res, its, inner = exc.best
            full = np.zeros(mask.count)
            full[cells] = _normalise(phi)
            raise ConvergenceError(str(exc), best=SpectralResult(
                lam, full, res, its, mask, n_comp, tol)) from None
        if best is None or lam < best[0]:
            best = (lam, cells, phi, res, its, inner)

    lam, cells, phi, res, its, inner = best
    full = np.zeros(mask.count)
    full[cells] = _normalise(phi)
    # ‖Lφ − λφ‖/‖φ‖ is scale invariant, so the unit-norm residual carries over
    return SpectralResult(lam, full, res, its, mask, n_comp, tol, extra={"cg_iterations": inner})


@dataclass
class DenseSpectrum:
    eigenvalues: np.ndarray
    ground_state: np.ndarray


def dense_oracle(op: StencilOperator) -> DenseSpectrum:
    """Full spectrum by dense diagonalisation; for masks of at most 2000 cells."""
    if op.size > DENSE_LIMIT:
        raise ValueError(f"dense oracle limited to {DENSE_LIMIT} cells, mask has {op.size}")
    w, v = scipy.linalg.eigh(op.dense())
    return DenseSpectrum(w, _normalise(v[:, 0]))


def refine_extrapolate(lam_h: float, lam_h2: float, lam_h4: Optional[float] = None):
    """Richardson extrapolation for a first-order boundary error.

    Returns ``(2*lam_h2 - lam_h, order)`` from the two coarsest levels given,
    or from the finest two when a third is supplied. ``order`` is
    ``log2`` of the ratio of successive differences and is ``None`` without
    a third level or when the differences vanish.
    """
    if lam_h4 is None:
        return 2 * lam_h2 - lam_h, None
    d1, d2 = lam_h - lam_h2, lam_h2 - lam_h4
    order = math.log2(d1 / d2) if d1 != 0 and d2 != 0 and d1 / d2 > 0 else None
    return 2 * lam_h4 - lam_h2, order


def observed_order(errors) -> list[float]:
    """log2 ratios of successive errors against a known limit."""
    e = np.abs(np.asarray(errors, dtype=float))
    return [math.log2(a / b) for a, b in zip(e[:-1], e[1:])]


class DirichletEigensolver(BaseEstimator):
    """Estimator wrapper around :func:`smallest_eigenpair`.

    ``fit`` takes a :class:`DomainMask` (or a ready :class:`StencilOperator`)
    and stores ``eigenvalue_``, ``ground_state_``, ``n_iter_`` and the full
    ``result_``.
    """

    def __init__(self, tol: float = 1e-8, max_iter: int = 2000):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        op = X if isinstance(X, StencilOperator) else StencilOperator(_check_mask(X))
        self.result_ = smallest_eigenpair(op, tol=self.tol, max_iter=self.max_iter)
        self.eigenvalue_ = self.result_.eigenvalue
        self.ground_state_ = self.result_.ground_state
        self.n_iter_ = self.result_.iterations
        return self

    def transform(self, X=None):
        """Ground state on the full grid (zeros off the mask)."""
        check_is_fitted(self, "result_")
        return self.result_.field()

    def score(self, X=None, y=None) -> float:
        check_is_fitted(self, "result_")
        return -self.result_.relative_residual


def _check_mask(X) -> DomainMask:
    if not isinstance(X, DomainMask):
        raise TypeError(f"expected a DomainMask, got {type(X).__name__}")
    return X


def solve(mask: DomainMask, tol: float = 1e-8, max_iter: int = 2000) -> SpectralResult:
    return smallest_eigenpair(StencilOperator(mask), tol=tol, max_iter=max_iter)
