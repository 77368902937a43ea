"""Planar shapes used as domains and obstacles.

Discs and simple polygons, with the vectorised predicates the rest of the
package leans on (containment, boundary distance), plus the inradius,
asymmetry coefficient estimator, interior reflections and the heart of a
convex shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

DISC = "disc"
CONVEX_POLYGON = "convex_polygon"
POLYGON = "polygon"
KINDS = (DISC, CONVEX_POLYGON, POLYGON)

# relative slack for boundary-inclusive predicates
_EPS = 1e-12
# polygon used to stand in for a disc in exact polygon computations
_DISC_SIDES = 256


class GeometryError(ValueError):
    """Raised for invalid shapes or geometric preconditions."""


def _as_points(p) -> np.ndarray:
    pts = np.asarray(p, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[-1] != 2:
        raise GeometryError(f"points must have 2 coordinates, got shape {pts.shape}")
    return pts


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    """Proper or touching intersection of two closed segments."""

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    def on_seg(a, b, c):
        return (min(a[0], b[0]) - 1e-15 <= c[0] <= max(a[0], b[0]) + 1e-15
                and min(a[1], b[1]) - 1e-15 <= c[1] <= max(a[1], b[1]) + 1e-15)

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return ((d1 == 0 and on_seg(q1, q2, p1)) or (d2 == 0 and on_seg(q1, q2, p2))
            or (d3 == 0 and on_seg(p1, p2, q1)) or (d4 == 0 and on_seg(p1, p2, q2)))


def _is_simple(v: np.ndarray) -> bool:
    n = len(v)
    for i in range(n):
        a1, a2 = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            # adjacent edges share a vertex by construction
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(a1, a2, v[j], v[(j + 1) % n]):
                return False
    return True


def _is_convex(v: np.ndarray) -> bool:
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
    scale = float(np.max(np.abs(e)) ** 2)
    return bool(np.all(cross >= -_EPS * scale))


def _segment_distances(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each point to every closed segment a[k]-b[k]; returns (n_pts,)."""
    out = np.full(len(pts), np.inf)
    for ak, bk in zip(a, b):
        d = bk - ak
        dd = float(d @ d)
        rel = pts - ak
        s = np.clip((rel @ d) / dd, 0.0, 1.0) if dd > 0 else np.zeros(len(pts))
        diff = rel - s[:, None] * d
        np.minimum(out, np.hypot(diff[:, 0], diff[:, 1]), out=out)
    return out


@dataclass(frozen=True, eq=False)
class Shape:
    """A disc or a simple polygon with counter-clockwise vertices.

    Use :meth:`disc` and :meth:`polygon` rather than the constructor; both
    validate their input.
    """

    kind: str
    center: Optional[np.ndarray] = None
    radius: Optional[float] = None
    vertices: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def disc(cls, center=(0.0, 0.0), radius: float = 1.0) -> "Shape":
        radius = float(radius)
        if not radius > 0:
            raise GeometryError("disc radius must be positive")
        c = np.asarray(center, dtype=float).reshape(2)
        c.setflags(write=False)
        return cls(DISC, center=c, radius=radius)

    @classmethod
    def polygon(cls, vertices, convex: Optional[bool] = None) -> "Shape":
        """Build a polygon; ``convex=None`` picks the variant from the vertices."""
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise GeometryError("polygon needs at least 3 vertices given as [x, y] pairs")
        area = _signed_area(v)
        if abs(area) <= _EPS * float(np.ptp(v, axis=0).max()) ** 2:
            raise GeometryError("polygon has zero area")
        if area < 0:
            v = v[::-1].copy()
        if not _is_simple(v):
            raise GeometryError("polygon is self-intersecting")
        is_convex = _is_convex(v)
        if convex is None:
            convex = is_convex
        elif convex and not is_convex:
            raise GeometryError("vertices do not describe a convex polygon")
        v.setflags(write=False)
        return cls(CONVEX_POLYGON if convex else POLYGON, vertices=v)

    @classmethod
    def rectangle(cls, width: float, height: float, origin=(0.0, 0.0)) -> "Shape":
        x0, y0 = origin
        return cls.polygon([[x0, y0], [x0 + width, y0], [x0 + width, y0 + height], [x0, y0 + height]])

    @classmethod
    def regular_polygon(cls, n: int, circumradius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> "Shape":
        t = phase + 2 * np.pi * np.arange(n) / n
        c = np.asarray(center, dtype=float)
        return cls.polygon(c + circumradius * np.column_stack([np.cos(t), np.sin(t)]))

    # -- serialisation -------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "Shape":
        if "kind" not in data:
            raise GeometryError("shape is missing required key 'kind'")
        kind = data["kind"]
        if kind == DISC:
            for key in ("center", "radius"):
                if key not in data:
                    raise GeometryError(f"disc shape is missing required key '{key}'")
            return cls.disc(data["center"], data["radius"])
        if kind in (CONVEX_POLYGON, POLYGON):
            if "vertices" not in data:
                raise GeometryError(f"{kind} shape is missing required key 'vertices'")
            return cls.polygon(data["vertices"], convex=True if kind == CONVEX_POLYGON else None)
        raise GeometryError(f"unknown shape kind {kind!r}; expected one of {KINDS}")

    def to_dict(self) -> dict:
        if self.kind == DISC:
            return {"kind": DISC, "center": [float(x) for x in self.center], "radius": self.radius}
        return {"kind": self.kind, "vertices": [[float(x), float(y)] for x, y in self.vertices]}

    # -- basic properties ----------------------------------------------

    @property
    def is_convex(self) -> bool:
        return self.kind in (DISC, CONVEX_POLYGON)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax)."""
        if self.kind == DISC:
            (cx, cy), r = self.center, self.radius
            return cx - r, cy - r, cx + r, cy + r
        lo, hi = self.vertices.min(axis=0), self.vertices.max(axis=0)
        return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])

    @property
    def area(self) -> float:
        if self.kind == DISC:
            return float(np.pi * self.radius ** 2)
        return _signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        if self.kind == DISC:
            return float(2 * np.pi * self.radius)
        e = np.roll(self.vertices, -1, axis=0) - self.vertices
        return float(np.hypot(e[:, 0], e[:, 1]).sum())

    @property
    def diameter(self) -> float:
        if self.kind == DISC:
            return 2 * self.radius
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    @property
    def centroid(self) -> np.ndarray:
        if self.kind == DISC:
            return np.array(self.center)
        v, w = self.vertices, np.roll(self.vertices, -1, axis=0)
        cross = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
        return ((v + w) * cross[:, None]).sum(axis=0) / (6 * self.area)

    @property
    def scale(self) -> float:
        x0, y0, x1, y1 = self.bounds
        return max(x1 - x0, y1 - y0, abs(x0), abs(x1), abs(y0), abs(y1))

    def as_polygon(self) -> np.ndarray:
        """Vertex array; discs are replaced by an inscribed regular polygon."""
        if self.kind == DISC:
            t = 2 * np.pi * np.arange(_DISC_SIDES) / _DISC_SIDES
            return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])
        return np.array(self.vertices)

    def translated(self, offset) -> "Shape":
        o = np.asarray(offset, dtype=float).reshape(2)
        if self.kind == DISC:
            return Shape.disc(self.center + o, self.radius)
        v = self.vertices + o
        v.setflags(write=False)
        return Shape(self.kind, vertices=v)

    def reflected(self, plane: "Hyperplane2D") -> "Shape":
        if self.kind == DISC:
            return Shape.disc(plane.reflect(self.center)[0], self.radius)
        return Shape.polygon(plane.reflect(self.vertices))

    # -- predicates ----------------------------------------------------

    def contains(self, points) -> np.ndarray:
        """Closed-region membership for an (n, 2) array of points."""
        pts = _as_points(points)
        tol = _EPS * self.scale
        if self.kind == DISC:
            d = pts - self.center
            return np.hypot(d[:, 0], d[:, 1]) <= self.radius + tol
        return _polygon_contains(self.vertices, pts, tol)

    def boundary_distance(self, points) -> np.ndarray:
        """Unsigned distance from each point to the boundary curve."""
        pts = _as_points(points)
        if self.kind == DISC:
            d = pts - self.center
            return np.abs(np.hypot(d[:, 0], d[:, 1]) - self.radius)
        v = self.vertices
        return _segment_distances(pts, v, np.roll(v, -1, axis=0))

    def distance(self, points) -> np.ndarray:
        """Distance from each point to the closed region (0 inside)."""
        pts = _as_points(points)
        if self.kind == DISC:
            d = pts - self.center
            return np.maximum(np.hypot(d[:, 0], d[:, 1]) - self.radius, 0.0)
        out = self.boundary_distance(pts)
        out[self.contains(pts)] = 0.0
        return out

    def boundary_points(self, s) -> np.ndarray:
        """Points at arclength fractions ``s`` in [0, 1) along the boundary."""
        s = np.asarray(s, dtype=float)
        if self.kind == DISC:
            t = 2 * np.pi * s
            return self.center + self.radius * np.column_stack([np.cos(t), np.sin(t)])
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(e[:, 0], e[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        target = s * cum[-1]
        k = np.clip(np.searchsorted(cum, target, side="right") - 1, 0, len(v) - 1)
        frac = (target - cum[k]) / lengths[k]
        return v[k] + frac[:, None] * e[k]

    def within(self, outer: "Shape") -> bool:
        """True if this closed shape lies inside ``outer`` (closed)."""
        if self.kind == DISC:
            if not outer.contains(self.center)[0]:
                return False
            if outer.kind == DISC:
                return bool(np.hypot(*(self.center - outer.center)) + self.radius
                            <= outer.radius + _EPS * outer.scale)
            return bool(outer.boundary_distance(self.center)[0] >= self.radius - _EPS * outer.scale)
        if not np.all(outer.contains(self.vertices)):
            return False
        if outer.kind == CONVEX_POLYGON or outer.kind == DISC:
            return True
        # a reflex vertex of a non-convex outer may poke into this polygon
        inner_open = self.contains(outer.vertices) & (self.boundary_distance(outer.vertices) > _EPS * self.scale)
        if np.any(inner_open):
            return False
        dense = self.boundary_points(np.arange(2048) / 2048)
        return bool(np.all(outer.contains(dense)))


def _polygon_contains(v: np.ndarray, pts: np.ndarray, tol: float) -> np.ndarray:
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    on_edge = np.zeros(len(pts), dtype=bool)
    w = np.roll(v, -1, axis=0)
    for (x1, y1), (x2, y2) in zip(v, w):
        straddle = (y1 > y) != (y2 > y)
        if np.any(straddle):
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= straddle & (x < xint)
        dx, dy = x2 - x1, y2 - y1
        dd = dx * dx + dy * dy
        s = np.clip(((x - x1) * dx + (y - y1) * dy) / dd, 0.0, 1.0)
        on_edge |= np.hypot(x - x1 - s * dx, y - y1 - s * dy) <= tol
    return inside | on_edge


@dataclass(frozen=True)
class Translate:
    """An obstacle shifted by ``offset``; the removed set is Ω ∩ (offset + D)."""

    obstacle: Shape
    offset: tuple[float, float] = (0.0, 0.0)

    def shape(self) -> Shape:
        return self.obstacle.translated(self.offset)

    def contains(self, points) -> np.ndarray:
        return self.obstacle.contains(_as_points(points) - np.asarray(self.offset, dtype=float))

    def distance(self, points) -> np.ndarray:
        return self.obstacle.distance(_as_points(points) - np.asarray(self.offset, dtype=float))


@dataclass(frozen=True)
class Hyperplane2D:
    """The line {p : p·normal = offset} with a unit normal."""

    normal: tuple[float, float]
    offset: float

    def __post_init__(self):
        u = np.asarray(self.normal, dtype=float)
        if u.shape != (2,) or abs(float(np.hypot(*u)) - 1.0) > 1e-12:
            raise GeometryError("hyperplane normal must be a unit vector")

    @classmethod
    def from_angle(cls, theta: float, offset: float) -> "Hyperplane2D":
        return cls((float(np.cos(theta)), float(np.sin(theta))), float(offset))

    @classmethod
    def through(cls, point, normal) -> "Hyperplane2D":
        u = np.asarray(normal, dtype=float)
        u = u / np.hypot(*u)
        return cls((float(u[0]), float(u[1])), float(np.dot(u, point)))

    def flipped(self) -> "Hyperplane2D":
        return Hyperplane2D((-self.normal[0], -self.normal[1]), -self.offset)

    def signed_distance(self, points) -> np.ndarray:
        return _as_points(points) @ np.asarray(self.normal) - self.offset

    def reflect(self, points) -> np.ndarray:
        pts = _as_points(points)
        return pts - 2.0 * self.signed_distance(pts)[:, None] * np.asarray(self.normal)


# -- operations ---------------------------------------------------------


def contains(shape: Shape, p) -> bool:
    return bool(shape.contains(p)[0])


def distance_to_translate(p, t: Translate) -> float:
    return float(t.distance(p)[0])


def inradius(shape: Shape, resolution: float) -> tuple[float, np.ndarray]:
    """Largest distance to the complement over a grid of candidate centres.

    Returns ``(r, c)``. Candidates sit on a lattice of spacing ``resolution``
    over the bounding box, so ``r`` is within one step of the true inradius
    for convex shapes.
    """
    if not resolution > 0:
        raise GeometryError("resolution must be positive")
    if shape.area < resolution ** 2:
        raise GeometryError("shape is degenerate at this resolution")
    x0, y0, x1, y1 = shape.bounds
    xs = np.arange(x0 + resolution / 2, x1, resolution)
    ys = np.arange(y0 + resolution / 2, y1, resolution)
    X, Y = np.meshgrid(xs, ys)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[shape.contains(pts)]
    if len(pts) == 0:
        raise GeometryError("shape is degenerate at this resolution")
    d = shape.boundary_distance(pts)
    k = int(np.argmax(d))
    return float(d[k]), pts[k]


def chebyshev_center(shape: Shape) -> tuple[float, np.ndarray]:
    """Exact inradius and centre of a convex polygon by linear programming."""
    from scipy.optimize import linprog

    if shape.kind == DISC:
        return shape.radius, np.array(shape.center)
    if shape.kind != CONVEX_POLYGON:
        raise GeometryError("chebyshev_center needs a convex shape")
    v = shape.vertices
    e = np.roll(v, -1, axis=0) - v
    # outward normal of a CCW edge is (ey, -ex)
    n = np.column_stack([e[:, 1], -e[:, 0]])
    n /= np.hypot(n[:, 0], n[:, 1])[:, None]
    b = (n * v).sum(axis=1)
    A = np.column_stack([n, np.ones(len(n))])
    res = linprog([0, 0, -1], A_ub=A, b_ub=b, bounds=[(None, None), (None, None), (0, None)])
    if not res.success:
        raise GeometryError(f"Chebyshev LP failed: {res.message}")
    return float(res.x[2]), res.x[:2]


def estimate_asymmetry(shape: Shape, n_boundary: int = 200, n_radii: int = 20, n_samples: int = 4000,
                       seed: int = 42, resolution: Optional[float] = None) -> float:
    """Monte-Carlo estimate of the asymmetry coefficient.

    Minimum over boundary points ``x`` and radii ``r`` of the fraction of
    ``B_r(x)`` lying outside the shape. Polygon vertices are always among the
    boundary points; the remaining points and the radii (log-uniform in
    ``[resolution, diameter]``) are drawn from independent streams of
    ``seed`` and one set of unit-disc samples is reused for every ball.
    Larger counts therefore only add candidates, and the estimate can only
    go down. Being a minimum over a finite sample it over-estimates the true
    coefficient.
    """
    if min(n_boundary, n_radii, n_samples) < 1:
        raise GeometryError("sample counts must be >= 1")
    diam = shape.diameter
    if resolution is None:
        resolution = diam / 256
    rng_b, rng_r, rng_s = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))
    pts = shape.boundary_points(rng_b.random(n_boundary))
    if shape.kind != DISC:
        pts = np.vstack([shape.vertices, pts])
    radii = resolution * (diam / resolution) ** rng_r.random(n_radii)
    rho = np.sqrt(rng_s.random(n_samples))
    theta = 2 * np.pi * rng_s.random(n_samples)
    unit = np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])

    best = 1.0
    for x in pts:
        # all radii for one boundary point in a single vectorised call
        cloud = x + (radii[:, None, None] * unit[None, :, :]).reshape(-1, 2)
        outside = ~shape.contains(cloud)
        frac = outside.reshape(n_radii, n_samples).mean(axis=1)
        best = min(best, float(frac.min()))
    return best


# -- interior reflection and the heart ---------------------------------


def _require_convex(shape: Shape):
    if not shape.is_convex:
        raise GeometryError("operation requires a convex shape")


def reflect_contained(shape: Shape, h: Hyperplane2D) -> bool:
    """Whether the cap {p·u > t} reflected across the line lands inside ``shape``.

    Exact for polygons: the reflected cap is the hull of the reflected cap
    vertices and the crossing points (which stay fixed), so checking the
    reflected vertices suffices for a convex container.
    """
    _require_convex(shape)
    u = np.asarray(h.normal)
    tol = 1e-10 * shape.scale
    if shape.kind == DISC:
        c = float(np.dot(shape.center, u))
        if not (c - shape.radius < h.offset < c + shape.radius):
            raise GeometryError("hyperplane does not meet the interior of the shape")
        return h.offset >= c - tol
    v = shape.vertices
    s = v @ u - h.offset
    if s.max() <= tol or s.min() >= -tol:
        raise GeometryError("hyperplane does not meet the interior of the shape")
    cap = v[s > tol]
    return bool(np.all(_convex_contains(v, h.reflect(cap), tol)))


def _convex_contains(v: np.ndarray, pts: np.ndarray, tol: float) -> np.ndarray:
    e = np.roll(v, -1, axis=0) - v
    n = np.column_stack([e[:, 1], -e[:, 0]])
    n /= np.hypot(n[:, 0], n[:, 1])[:, None]
    slack = pts @ n.T - (n * v).sum(axis=1)
    return np.all(slack <= tol, axis=1)


def _support(shape: Shape, u: np.ndarray) -> float:
    if shape.kind == DISC:
        return float(np.dot(shape.center, u) + shape.radius)
    return float((shape.vertices @ u).max())


def clip_halfplane(poly: np.ndarray, u: np.ndarray, t: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon to {p·u <= t}."""
    if len(poly) == 0:
        return poly
    s = poly @ u - t
    out = []
    n = len(poly)
    for i in range(n):
        j = (i + 1) % n
        a, b, sa, sb = poly[i], poly[j], s[i], s[j]
        if sa <= 0:
            out.append(a)
        if (sa < 0 < sb) or (sb < 0 < sa):
            out.append(a + (sa / (sa - sb)) * (b - a))
    return np.array(out).reshape(-1, 2)


@dataclass
class ConvexRegion:
    """Vertices of a convex polygon that may have collapsed to a segment or point."""

    vertices: np.ndarray
    degenerate: bool = False
    offsets: Optional[np.ndarray] = None

    @property
    def diameter(self) -> float:
        v = self.vertices
        if len(v) < 2:
            return 0.0
        d = v[:, None, :] - v[None, :, :]
        return float(np.sqrt((d ** 2).sum(-1)).max())

    @property
    def centroid(self) -> np.ndarray:
        return self.vertices.mean(axis=0)

    def distance(self, points) -> np.ndarray:
        pts = _as_points(points)
        v = self.vertices
        if len(v) == 1:
            return np.hypot(*(pts - v[0]).T)
        if len(v) >= 3 and abs(_signed_area(v)) > 0:
            inside = _convex_contains(v, pts, 0.0)
        else:
            inside = np.zeros(len(pts), dtype=bool)
        d = _segment_distances(pts, v, np.roll(v, -1, axis=0))
        d[inside] = 0.0
        return d


def interior_reflection_offset(shape: Shape, u, tol: float) -> float:
    """Smallest ``t`` with the reflected cap {p·u > t} inside ``shape``, from above.

    Bisection keeps ``hi`` on the contained side and stops at width
    ``tol/4``; the result is padded by ``tol/8`` so it lies strictly above
    the true offset by at most ``3 tol / 8``.
    """
    u = np.asarray(u, dtype=float)
    hi = _support(shape, u)
    lo = -_support(shape, -u)
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if reflect_contained(shape, Hyperplane2D((float(u[0]), float(u[1])), mid)):
            hi = mid
        else:
            lo = mid
    return hi + tol / 8


def heart(shape: Shape, n_directions: int = 360, tol: float = 1e-3) -> ConvexRegion:
    """Over-approximate the heart of a convex shape.

    The result is flagged ``degenerate`` when it collapses to within ``2 tol``
    (a point at the working tolerance) or when the clipping came out empty,
    in which case the centroid of the last non-empty intersection is
    returned.

    ``n_directions`` angles evenly spaced on [0, π) are used in both
    orientations. For each direction the minimal interior-reflection offset
    is found by bisection, and the heart is the intersection of the
    resulting half-planes with the shape. Direction sets for ``n`` are
    contained in those for ``2n``, so refinement can only shrink the result.
    """
    _require_convex(shape)
    if n_directions < 8:
        raise GeometryError("n_directions must be at least 8")
    if not tol > 0:
        raise GeometryError("tol must be positive")
    angles = np.pi * np.arange(n_directions) / n_directions
    half = np.column_stack([np.cos(angles), np.sin(angles)])
    # u and -u interleaved so an emptied clip still leaves a localised fallback
    dirs = np.stack([half, -half], axis=1).reshape(-1, 2)
    offsets = np.array([interior_reflection_offset(shape, u, tol) for u in dirs])

    poly = shape.as_polygon()
    last = poly
    for u, t in zip(dirs, offsets):
        poly = clip_halfplane(poly, u, t)
        if len(poly) == 0:
            return ConvexRegion(last.mean(axis=0)[None, :], degenerate=True, offsets=offsets)
        last = poly
    region = ConvexRegion(poly, offsets=offsets)
    # collapsed at the tolerance scale, e.g. the square's heart is its centre
    degenerate = len(poly) < 3 or region.diameter <= 2 * tol
    return ConvexRegion(poly, degenerate=bool(degenerate), offsets=offsets)


def symmetry_axes(shape: Shape, tol: float) -> list[Hyperplane2D]:
    """Reflection-symmetry lines of a polygon, found among lines through its
    centroid and a vertex or an edge midpoint."""
    if shape.kind == DISC:
        c = shape.center
        return [Hyperplane2D.through(c, (1.0, 0.0)), Hyperplane2D.through(c, (0.0, 1.0))]
    v = shape.vertices
    c = shape.centroid
    anchors = np.vstack([v, 0.5 * (v + np.roll(v, -1, axis=0))])
    axes: list[Hyperplane2D] = []
    for a in anchors:
        d = a - c
        if np.hypot(*d) <= tol:
            continue
        plane = Hyperplane2D.through(c, (-d[1], d[0]))
        if is_symmetric(shape, plane, tol) and not any(
                abs(abs(np.dot(plane.normal, q.normal)) - 1) < 1e-9 for q in axes):
            axes.append(plane)
    return axes


def is_symmetric(shape: Shape, plane: Hyperplane2D, tol: float) -> bool:
    if shape.kind == DISC:
        return abs(float(plane.signed_distance(shape.center)[0])) <= tol
    v = shape.vertices
    r = plane.reflect(v)
    d = np.sqrt(((r[:, None, :] - v[None, :, :]) ** 2).sum(-1))
    return bool(np.all(d.min(axis=1) <= tol) and np.all(d.min(axis=0) <= tol))


def l_shape(size: float = 1.0) -> Shape:
    """Unit square with its upper-right quarter removed."""
    s, m = size, size / 2
    return Shape.polygon([[0, 0], [s, 0], [s, m], [m, m], [m, s], [0, s]])


def unit_square() -> Shape:
    return Shape.rectangle(1.0, 1.0)


def shapes_from_dicts(items: Iterable[dict]) -> list[Shape]:
    return [Shape.from_dict(d) for d in items]


__all__: Sequence[str] = [
    "Shape", "Translate", "Hyperplane2D", "ConvexRegion", "GeometryError",
    "contains", "distance_to_translate", "inradius", "chebyshev_center",
    "estimate_asymmetry", "reflect_contained", "interior_reflection_offset",
    "heart", "clip_halfplane", "symmetry_axes", "is_symmetric", "l_shape", "unit_square",
]
