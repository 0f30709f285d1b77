"""Planar polygon primitives used by the layout genome and the wind raster.

Coordinates are local planar meters.  Polygons are simple, hole-free and
stored counter-clockwise.  Every predicate here uses closed-set semantics:
touching boundaries count as contact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

Point2 = tuple[float, float]


class GeometryError(ValueError):
    """Raised for degenerate, non-simple or non-finite polygons."""


def _cross(o: Point2, a: Point2, b: Point2) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _on_segment(p: Point2, a: Point2, b: Point2) -> bool:
    # assumes p is collinear with a-b
    return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))


def segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool:
    """Closed segment intersection, collinear overlaps and touching included."""
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and \
            ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    if d1 == 0 and _on_segment(p1, q1, q2):
        return True
    if d2 == 0 and _on_segment(p2, q1, q2):
        return True
    if d3 == 0 and _on_segment(q1, p1, p2):
        return True
    if d4 == 0 and _on_segment(q2, p1, p2):
        return True
    return False


def _signed_area(vs: Sequence[Point2]) -> float:
    s = 0.0
    n = len(vs)
    for i in range(n):
        x1, y1 = vs[i]
        x2, y2 = vs[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def _is_simple(vs: Sequence[Point2]) -> bool:
    n = len(vs)
    edges = [(vs[i], vs[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a1, a2 = edges[i]
        for j in range(i + 1, n):
            b1, b2 = edges[j]
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if adjacent:
                # neighbours share exactly one vertex; a collinear fold-back is a spike
                shared = a2 if j == i + 1 else a1
                other_a = a1 if j == i + 1 else a2
                other_b = b2 if j == i + 1 else b1
                if _cross(shared, other_a, other_b) == 0:
                    va = (other_a[0] - shared[0], other_a[1] - shared[1])
                    vb = (other_b[0] - shared[0], other_b[1] - shared[1])
                    if va[0] * vb[0] + va[1] * vb[1] > 0:
                        return False
                continue
            if segments_intersect(a1, a2, b1, b2):
                return False
    return True


@dataclass(frozen=True)
class Polygon:
    """Simple polygon; vertices are normalized to counter-clockwise order.

    A repeated closing vertex and consecutive duplicates are dropped, so GeoJSON
    rings can be passed directly.
    """

    vertices: tuple[Point2, ...]

    def __post_init__(self) -> None:
        vs = [(float(x), float(y)) for x, y in self.vertices]
        for x, y in vs:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise GeometryError("polygon vertex is not finite")
        cleaned: list[Point2] = []
        for v in vs:
            if not cleaned or cleaned[-1] != v:
                cleaned.append(v)
        if len(cleaned) > 1 and cleaned[0] == cleaned[-1]:
            cleaned.pop()
        if len(cleaned) < 3:
            raise GeometryError(f"polygon needs at least 3 distinct vertices, got {len(cleaned)}")
        a = _signed_area(cleaned)
        if a == 0:
            raise GeometryError("polygon has zero area")
        if a < 0:
            cleaned.reverse()
        if not _is_simple(cleaned):
            raise GeometryError("polygon is self-intersecting")
        object.__setattr__(self, "vertices", tuple(cleaned))

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "Polygon":
        return cls(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))

    @cached_property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @cached_property
    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax)"""
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    @cached_property
    def centroid(self) -> Point2:
        return centroid(self)

    def __len__(self) -> int:
        return len(self.vertices)


def polygon_area(p: Polygon) -> float:
    """Shoelace area; always positive for an accepted polygon."""
    return p.area


def bounding_box(p: Polygon) -> tuple[float, float, float, float]:
    return p.bounds


def translate(p: Polygon, d: Point2) -> Polygon:
    dx, dy = d
    return Polygon(tuple((x + dx, y + dy) for x, y in p.vertices))


def centroid(p: Polygon) -> Point2:
    """Area-weighted centroid, computed relative to the first vertex for stability."""
    vs = p.vertices
    ox, oy = vs[0]
    cx = cy = a2 = 0.0
    n = len(vs)
    for i in range(n):
        x1, y1 = vs[i][0] - ox, vs[i][1] - oy
        x2, y2 = vs[(i + 1) % n][0] - ox, vs[(i + 1) % n][1] - oy
        c = x1 * y2 - x2 * y1
        a2 += c
        cx += (x1 + x2) * c
        cy += (y1 + y2) * c
    return (ox + cx / (3.0 * a2), oy + cy / (3.0 * a2))


def point_in_polygon(pt: Point2, p: Polygon) -> bool:
    """Crossing-number test; points on the boundary count as inside."""
    x, y = pt
    vs = p.vertices
    n = len(vs)
    inside = False
    for i in range(n):
        x1, y1 = vs[i]
        x2, y2 = vs[(i + 1) % n]
        if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) == 0 and \
                min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2):
            return True
        if (y1 > y) != (y2 > y):
            if x < (x2 - x1) * (y - y1) / (y2 - y1) + x1:
                inside = not inside
    return inside


def points_in_polygon(xs: np.ndarray, ys: np.ndarray, p: Polygon) -> np.ndarray:
    """Vectorized :func:`point_in_polygon` with identical boundary semantics."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    inside = np.zeros(np.broadcast(xs, ys).shape, dtype=bool)
    boundary = np.zeros_like(inside)
    vs = p.vertices
    n = len(vs)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(n):
            x1, y1 = vs[i]
            x2, y2 = vs[(i + 1) % n]
            on_line = (x2 - x1) * (ys - y1) - (y2 - y1) * (xs - x1) == 0
            boundary |= on_line & (min(x1, x2) <= xs) & (xs <= max(x1, x2)) \
                & (min(y1, y2) <= ys) & (ys <= max(y1, y2))
            straddles = (y1 > ys) != (y2 > ys)
            if y1 != y2:
                hit = straddles & (xs < (x2 - x1) * (ys - y1) / (y2 - y1) + x1)
                inside ^= hit
    return inside | boundary


def bboxes_touch(a: tuple[float, float, float, float],
                 b: tuple[float, float, float, float]) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def polygons_intersect(a: Polygon, b: Polygon) -> bool:
    """True if the closed polygons share any point (overlap, touching edge or vertex)."""
    if not bboxes_touch(a.bounds, b.bounds):
        return False
    va, vb = a.vertices, b.vertices
    na, nb = len(va), len(vb)
    for i in range(na):
        p1, p2 = va[i], va[(i + 1) % na]
        for j in range(nb):
            if segments_intersect(p1, p2, vb[j], vb[(j + 1) % nb]):
                return True
    # no boundary contact: either disjoint or one strictly contains the other
    return point_in_polygon(va[0], b) or point_in_polygon(vb[0], a)


def polygon_within(inner: Polygon, outer: Polygon) -> bool:
    """True if ``inner`` lies inside the closed region of ``outer``.

    Boundary contact is allowed.  Checks that all vertices of ``inner`` are
    inside ``outer`` and that no edge of ``inner`` properly crosses an edge of
    ``outer``; for the rectilinear and convex plots used in practice this is
    exact.
    """
    ib, ob = inner.bounds, outer.bounds
    if ib[0] < ob[0] or ib[1] < ob[1] or ib[2] > ob[2] or ib[3] > ob[3]:
        return False
    if not all(point_in_polygon(v, outer) for v in inner.vertices):
        return False
    vi, vo = inner.vertices, outer.vertices
    ni, no = len(vi), len(vo)
    for i in range(ni):
        p1, p2 = vi[i], vi[(i + 1) % ni]
        for j in range(no):
            q1, q2 = vo[j], vo[(j + 1) % no]
            d1 = _cross(q1, q2, p1)
            d2 = _cross(q1, q2, p2)
            d3 = _cross(p1, p2, q1)
            d4 = _cross(p1, p2, q2)
            if d1 * d2 < 0 and d3 * d4 < 0:
                return False
        mid = ((p1[0] + p2[0]) / 2, (p1[1] + p2[1]) / 2)
        if not point_in_polygon(mid, outer):
            return False
    return True


@dataclass(eq=False)
class Grid:
    """Axis-aligned raster; ``values[ix, iy]`` is the cell whose lower-left corner
    is ``origin + (ix, iy) * cell_size``."""

    origin: Point2
    cell_size: float
    nx: int
    ny: int
    values: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.origin = (float(self.origin[0]), float(self.origin[1]))
        self.cell_size = float(self.cell_size)
        if not self.cell_size > 0:
            raise GeometryError("grid cell_size must be positive")
        if self.nx < 1 or self.ny < 1:
            raise GeometryError("grid needs at least one cell per axis")
        if self.values is None:
            self.values = np.zeros((self.nx, self.ny))
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.nx, self.ny):
            raise GeometryError(
                f"grid values shape {self.values.shape} != ({self.nx}, {self.ny})")

    @classmethod
    def covering(cls, bounds: tuple[float, float, float, float], cell_size: float) -> "Grid":
        x0, y0, x1, y1 = bounds
        # rounding guards against 400/4 evaluating to 100.00000000000001
        nx = max(1, math.ceil(round((x1 - x0) / cell_size, 9)))
        ny = max(1, math.ceil(round((y1 - y0) / cell_size, 9)))
        return cls((x0, y0), cell_size, nx, ny)

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinate arrays, each of shape (nx, ny)."""
        xs = self.origin[0] + (np.arange(self.nx) + 0.5) * self.cell_size
        ys = self.origin[1] + (np.arange(self.ny) + 0.5) * self.cell_size
        return np.meshgrid(xs, ys, indexing="ij")

    def same_frame(self, other: "Grid") -> bool:
        return (self.origin == other.origin and self.cell_size == other.cell_size
                and self.nx == other.nx and self.ny == other.ny)


def rasterize_window(p: Polygon, grid: Grid) -> tuple[int, int, np.ndarray]:
    """Cell-center coverage of ``p`` restricted to its bounding window.

    Returns ``(i0, j0, sub)`` where ``sub[a, b]`` covers cell ``(i0 + a, j0 + b)``;
    ``sub`` is empty when the polygon misses the grid.  Results are memoized
    and ``sub`` is read-only.
    """
    return _window(p, grid.origin, grid.cell_size, grid.nx, grid.ny)


@lru_cache(maxsize=65536)
def _window(p: Polygon, origin: Point2, c: float, nx: int, ny: int) -> tuple[int, int, np.ndarray]:
    xmin, ymin, xmax, ymax = p.bounds
    ox, oy = origin
    # candidate index window from the bounding box, padded by one cell
    i0 = max(0, math.floor((xmin - ox) / c - 0.5) - 1)
    i1 = min(nx, math.ceil((xmax - ox) / c - 0.5) + 2)
    j0 = max(0, math.floor((ymin - oy) / c - 0.5) - 1)
    j1 = min(ny, math.ceil((ymax - oy) / c - 0.5) + 2)
    if i0 >= i1 or j0 >= j1:
        sub = np.zeros((0, 0), dtype=bool)
        i0 = j0 = 0
    else:
        xs = ox + (np.arange(i0, i1) + 0.5) * c
        ys = oy + (np.arange(j0, j1) + 0.5) * c
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        sub = points_in_polygon(gx, gy, p)
    sub.flags.writeable = False
    return i0, j0, sub


def rasterize_mask(p: Polygon, grid: Grid) -> np.ndarray:
    """Boolean (nx, ny) mask of cells whose center is inside or on ``p``."""
    mask = np.zeros((grid.nx, grid.ny), dtype=bool)
    i0, j0, sub = rasterize_window(p, grid)
    mask[i0:i0 + sub.shape[0], j0:j0 + sub.shape[1]] = sub
    return mask


def rasterize(p: Polygon, grid: Grid) -> set[tuple[int, int]]:
    """Indices ``(ix, iy)`` of the cells covered by ``p`` (cell-center rule)."""
    ii, jj = np.nonzero(rasterize_mask(p, grid))
    return set(zip(ii.tolist(), jj.tolist()))


def union_bounds(polys: Iterable[Polygon]) -> tuple[float, float, float, float]:
    bs = [p.bounds for p in polys]
    return (min(b[0] for b in bs), min(b[1] for b in bs),
            max(b[2] for b in bs), max(b[3] for b in bs))
