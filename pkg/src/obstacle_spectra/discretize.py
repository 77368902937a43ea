"""Cell-centred rasterisation and the 5-point Dirichlet Laplacian."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy import ndimage

from .geometry import Shape, Translate


class EmptyDomainError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``nx`` by ``ny`` cells of side ``h`` starting at ``origin``."""

    origin: tuple[float, float]
    h: float
    nx: int
    ny: int

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs at least one cell per axis")

    @classmethod
    def covering(cls, shape: Shape, h: float) -> "GridSpec":
        """Smallest grid anchored at the lower-left bounding-box corner that covers ``shape``."""
        x0, y0, x1, y1 = shape.bounds
        # tolerance keeps 1/h-aligned boxes (the unit square at h = 1/128) exact
        nx = max(1, math.ceil((x1 - x0) / h - 1e-9))
        ny = max(1, math.ceil((y1 - y0) / h - 1e-9))
        return cls((float(x0), float(y0)), float(h), nx, ny)

    @property
    def box(self) -> tuple[float, float, float, float]:
        x0, y0 = self.origin
        return x0, y0, x0 + self.nx * self.h, y0 + self.ny * self.h

    def refined(self) -> "GridSpec":
        return GridSpec(self.origin, self.h / 2, 2 * self.nx, 2 * self.ny)

    @cached_property
    def xc(self) -> np.ndarray:
        return self.origin[0] + (2 * np.arange(self.nx) + 1) * (self.h / 2)

    @cached_property
    def yc(self) -> np.ndarray:
        return self.origin[1] + (2 * np.arange(self.ny) + 1) * (self.h / 2)

    def centers(self) -> np.ndarray:
        """(ny * nx, 2) array of cell centres, row-major in (y, x)."""
        X, Y = np.meshgrid(self.xc, self.yc)
        return np.column_stack([X.ravel(), Y.ravel()])

    def cell_of(self, p) -> tuple[int, int]:
        """(row, col) of the cell containing ``p``; may fall outside the grid."""
        x0, y0 = self.origin
        return int(math.floor((p[1] - y0) / self.h)), int(math.floor((p[0] - x0) / self.h))

    def contains_point(self, p) -> bool:
        x0, y0, x1, y1 = self.box
        return x0 <= p[0] <= x1 and y0 <= p[1] <= y1


@dataclass(eq=False)
class DomainMask:
    """Active cells of Ω minus an optional obstacle translate."""

    grid: GridSpec
    active: np.ndarray  # bool, shape (ny, nx)

    def __post_init__(self):
        if self.active.shape != (self.grid.ny, self.grid.nx):
            raise ValueError("mask shape does not match the grid")
        if not self.active.any():
            raise EmptyDomainError("empty discretized domain")

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def count(self) -> int:
        return int(self.active.sum())

    @property
    def area(self) -> float:
        return self.count * self.grid.h ** 2

    @cached_property
    def index(self) -> np.ndarray:
        """Active-cell number per grid cell, -1 where inactive."""
        idx = np.full(self.active.shape, -1, dtype=np.int64)
        idx[self.active] = np.arange(self.count)
        return idx

    @cached_property
    def points(self) -> np.ndarray:
        """Centres of the active cells in active-cell order."""
        rows, cols = np.nonzero(self.active)
        return np.column_stack([self.grid.xc[cols], self.grid.yc[rows]])

    def components(self) -> tuple[np.ndarray, int]:
        """4-connected component label per grid cell (0 = inactive) and their number."""
        labels, n = ndimage.label(self.active)
        return labels, int(n)

    def to_field(self, values: np.ndarray, fill: float = 0.0) -> np.ndarray:
        out = np.full(self.active.shape, fill, dtype=float)
        out[self.active] = values
        return out

    def without(self, removed: np.ndarray) -> "DomainMask":
        return DomainMask(self.grid, self.active & ~removed)

    def to_pgm(self) -> str:
        return write_pgm(self.active.astype(float), self.grid, comment="mask 0=inactive 255=active")


def write_pgm(values: np.ndarray, grid: GridSpec, comment: str = "") -> str:
    """Plain (P2) grey map, top row = largest y. ``values`` are scaled from [0, 1]."""
    g = np.clip(np.rint(np.nan_to_num(values) * 255), 0, 255).astype(int)[::-1]
    x0, y0, x1, y1 = grid.box
    lines = ["P2", f"# h={grid.h!r}", f"# box={x0!r},{y0!r},{x1!r},{y1!r}"]
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"{grid.nx} {grid.ny}")
    lines.append("255")
    lines.extend(" ".join(str(v) for v in row) for row in g)
    return "\n".join(lines) + "\n"


def read_pgm(text: str) -> tuple[np.ndarray, dict]:
    """Parse a P2 grey map written by :func:`write_pgm` into values in [0, 1]."""
    meta: dict = {}
    tokens: list[str] = []
    for line in text.splitlines():
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k] = v
            continue
        tokens.extend(line.split())
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, hgt, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:4 + w * hgt]], dtype=float).reshape(hgt, w)
    return data[::-1] / maxval, meta


def obstacle_cells(grid: GridSpec, obstacle: Translate) -> np.ndarray:
    """Cells whose centres lie in the closed translate; only its bounding window is tested."""
    out = np.zeros((grid.ny, grid.nx), dtype=bool)
    x0, y0, x1, y1 = obstacle.shape().bounds
    h = grid.h
    c0 = max(0, int(math.floor((x0 - grid.origin[0]) / h)) - 1)
    c1 = min(grid.nx, int(math.ceil((x1 - grid.origin[0]) / h)) + 1)
    r0 = max(0, int(math.floor((y0 - grid.origin[1]) / h)) - 1)
    r1 = min(grid.ny, int(math.ceil((y1 - grid.origin[1]) / h)) + 1)
    if c0 >= c1 or r0 >= r1:
        return out
    X, Y = np.meshgrid(grid.xc[c0:c1], grid.yc[r0:r1])
    inside = obstacle.contains(np.column_stack([X.ravel(), Y.ravel()]))
    out[r0:r1, c0:c1] = inside.reshape(r1 - r0, c1 - c0)
    return out


def rasterize(domain: Shape, obstacle: Optional[Translate] = None, grid: Optional[GridSpec] = None,
              h: Optional[float] = None) -> DomainMask:
    """A cell is active iff its centre is in Ω and not in the closed obstacle translate."""
    if grid is None:
        if h is None:
            raise ValueError("give either a grid or a spacing h")
        grid = GridSpec.covering(domain, h)
    bx0, by0, bx1, by1 = grid.box
    dx0, dy0, dx1, dy1 = domain.bounds
    slack = 1e-9 * grid.h
    if dx0 < bx0 - slack or dy0 < by0 - slack or dx1 > bx1 + slack or dy1 > by1 + slack:
        raise ValueError("grid box does not contain the domain")
    active = domain.contains(grid.centers()).reshape(grid.ny, grid.nx)
    if obstacle is not None:
        active &= ~obstacle_cells(grid, obstacle)
    return DomainMask(grid, active)


class StencilOperator:
    """5-point −Δ on the active cells; inactive neighbours are Dirichlet zeros.

    The operator is kept as a CSR matrix, which is the fastest way to apply a
    fixed stencil from numpy; nothing outside this class depends on that.
    """

    def __init__(self, mask: DomainMask):
        self.mask = mask
        self.matrix = _assemble(mask)

    @property
    def size(self) -> int:
        return self.mask.count

    @property
    def h(self) -> float:
        return self.mask.h

    def apply(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.size,):
            raise ValueError(f"field has length {u.shape}, operator acts on {self.size} cells")
        return self.matrix @ u

    __matmul__ = apply

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def restricted(self, cells: np.ndarray) -> sp.csr_matrix:
        """Principal submatrix on the given active-cell indices."""
        return self.matrix[cells][:, cells].tocsr()


def _assemble(mask: DomainMask) -> sp.csr_matrix:
    a, idx = mask.active, mask.index
    ny, nx = a.shape
    rows, cols = [], []
    for dy, dx in ((0, 1), (1, 0)):
        pair = a[: ny - dy, : nx - dx] & a[dy:, dx:]
        i = idx[: ny - dy, : nx - dx][pair]
        j = idx[dy:, dx:][pair]
        rows += [i, j]
        cols += [j, i]
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    n = mask.count
    inv_h2 = 1.0 / mask.h ** 2
    off = sp.csr_matrix((np.full(len(r), -inv_h2), (r, c)), shape=(n, n))
    return (off + sp.identity(n, format="csr") * (4 * inv_h2)).tocsr()


def apply(op: StencilOperator, u: np.ndarray) -> np.ndarray:
    return op.apply(u)


def save_pgm(path, text: str) -> Path:
    p = Path(path)
    p.write_text(text)
    return p
