"""The layout genome: a plot, its buildings and the cell grid used for blending."""
from __future__ import annotations

from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .geometry import Polygon, polygon_within, polygons_intersect, translate

HEIGHT_MIN = 4.0
HEIGHT_MAX = 100.0
DEFAULT_CELL_GRID = (6, 6)

CellIndex = tuple[int, int]  # (row, col); row 0 is the southern-most band


class LayoutError(ValueError):
    """A layout breaks one of its invariants."""

    def __init__(self, message: str, violations: Sequence["Violation"] = ()):
        super().__init__(message)
        self.violations = list(violations)


class OperatorContractError(RuntimeError):
    """A variation operator produced input that breaks a layout precondition."""


@dataclass(frozen=True)
class Building:
    id: int
    footprint: Polygon
    height: float
    static: bool = False

    @property
    def centroid(self) -> tuple[float, float]:
        return self.footprint.centroid

    def moved(self, d: tuple[float, float], new_id: int) -> "Building":
        return Building(new_id, translate(self.footprint, d), self.height, self.static)


@dataclass(frozen=True)
class Violation:
    kind: str  # "overlap", "out_of_plot", "height", "duplicate_id"
    ids: tuple[int, ...]
    detail: str = ""

    def __str__(self) -> str:
        ids = ",".join(str(i) for i in self.ids)
        return f"{self.kind}[{ids}]" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class UrbanLayout:
    """Immutable genome.  Buildings are kept sorted by id so equal layouts compare equal."""

    plot: Polygon
    buildings: tuple[Building, ...] = ()
    cell_grid_shape: tuple[int, int] = DEFAULT_CELL_GRID
    origin: tuple[float, float] = (0.0, 0.0)
    _boxes: np.ndarray = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        bs = tuple(sorted(self.buildings, key=lambda b: b.id))
        object.__setattr__(self, "buildings", bs)
        object.__setattr__(self, "cell_grid_shape", tuple(int(v) for v in self.cell_grid_shape))
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        boxes = np.array([b.footprint.bounds for b in bs], dtype=float).reshape(-1, 4)
        object.__setattr__(self, "_boxes", boxes)

    def __hash__(self) -> int:
        return hash((self.plot, self.buildings, self.cell_grid_shape))

    @property
    def plot_area(self) -> float:
        return self.plot.area

    def by_id(self) -> dict[int, Building]:
        return {b.id: b for b in self.buildings}

    def statics(self) -> tuple[Building, ...]:
        return tuple(b for b in self.buildings if b.static)

    def mutable(self) -> tuple[Building, ...]:
        return tuple(b for b in self.buildings if not b.static)

    def next_id(self) -> int:
        return max((b.id for b in self.buildings), default=-1) + 1

    def with_buildings(self, buildings: Iterable[Building]) -> "UrbanLayout":
        return replace(self, buildings=tuple(buildings))

    def candidates_touching(self, poly: Polygon) -> list[int]:
        """Indices into ``buildings`` whose bounding box touches ``poly``'s."""
        if not len(self.buildings):
            return []
        x0, y0, x1, y1 = poly.bounds
        bx = self._boxes
        hit = (bx[:, 0] <= x1) & (x0 <= bx[:, 2]) & (bx[:, 1] <= y1) & (y0 <= bx[:, 3])
        return np.nonzero(hit)[0].tolist()


# -- cell grid -------------------------------------------------------------

def cell_edges(layout: UrbanLayout, rows: int | None = None,
               cols: int | None = None) -> tuple[list[float], list[float]]:
    """Column (x) and row (y) boundaries of the uniform grid over the plot bbox."""
    r, c = layout.cell_grid_shape if rows is None else (rows, cols)
    x0, y0, x1, y1 = layout.plot.bounds
    xs = [x0 + k * (x1 - x0) / c for k in range(c)] + [x1]
    ys = [y0 + k * (y1 - y0) / r for k in range(r)] + [y1]
    return xs, ys


def cell_of_point(pt: tuple[float, float], xs: Sequence[float],
                  ys: Sequence[float]) -> CellIndex:
    """Cell containing ``pt``; a point on an interior boundary goes to the lower index."""
    # bisect_left counts interior boundaries strictly below the coordinate
    col = bisect_left(xs, pt[0], 1, len(xs) - 1) - 1
    row = bisect_left(ys, pt[1], 1, len(ys) - 1) - 1
    return row, col


def cell_rect(layout: UrbanLayout, cell: CellIndex) -> tuple[float, float, float, float]:
    xs, ys = cell_edges(layout)
    r, c = cell
    return float(xs[c]), float(ys[r]), float(xs[c + 1]), float(ys[r + 1])


def cell_assignment(layout: UrbanLayout, rows: int | None = None,
                    cols: int | None = None) -> dict[int, CellIndex]:
    xs, ys = cell_edges(layout, rows, cols)
    return {b.id: cell_of_point(b.centroid, xs, ys) for b in layout.buildings}


def split_into_cells(layout: UrbanLayout, rows: int | None = None,
                     cols: int | None = None) -> dict[CellIndex, list[int]]:
    """Partition building ids by the cell that holds each footprint centroid.

    Every cell of the ``rows x cols`` grid appears as a key, empty or not.
    """
    r, c = layout.cell_grid_shape if rows is None else (rows, cols)
    if r < 2 or c < 2:
        raise ValueError(f"cell grid must be at least 2x2, got {r}x{c}")
    cells: dict[CellIndex, list[int]] = {(i, j): [] for i in range(r) for j in range(c)}
    for bid, cell in cell_assignment(layout, r, c).items():
        cells[cell].append(bid)
    return cells


# -- validation ------------------------------------------------------------

def overlapping_pairs(layout: UrbanLayout) -> list[tuple[int, int]]:
    bs = layout.buildings
    boxes = layout._boxes
    pairs = []
    for i in range(len(bs)):
        b = boxes[i]
        rest = boxes[i + 1:]
        near = np.nonzero((rest[:, 0] <= b[2]) & (b[0] <= rest[:, 2])
                          & (rest[:, 1] <= b[3]) & (b[1] <= rest[:, 3]))[0]
        for k in near:
            j = i + 1 + int(k)
            if polygons_intersect(bs[i].footprint, bs[j].footprint):
                pairs.append((bs[i].id, bs[j].id))
    return pairs


def validate(layout: UrbanLayout, height_min: float = HEIGHT_MIN,
             height_max: float = HEIGHT_MAX) -> list[Violation]:
    """Every invariant violation of ``layout``; an empty list means valid."""
    out: list[Violation] = []
    counts = Counter(b.id for b in layout.buildings)
    for bid, n in sorted(counts.items()):
        if n > 1:
            out.append(Violation("duplicate_id", (bid,), f"{n} buildings share this id"))
    for b in layout.buildings:
        if not (height_min <= b.height <= height_max):
            out.append(Violation("height", (b.id,),
                                 f"{b.height} outside [{height_min}, {height_max}]"))
        if not polygon_within(b.footprint, layout.plot):
            out.append(Violation("out_of_plot", (b.id,)))
    for a, b in overlapping_pairs(layout):
        out.append(Violation("overlap", (a, b)))
    return out


def is_valid(layout: UrbanLayout, **kw) -> bool:
    return not validate(layout, **kw)


def statics_preserved(initial: UrbanLayout, current: UrbanLayout) -> bool:
    """Static buildings of ``current`` are bit-identical to those of ``initial``."""
    return sorted(initial.statics(), key=lambda b: b.id) == \
        sorted(current.statics(), key=lambda b: b.id)


# -- editing -----------------------------------------------------------------

def _fits_against(layout: UrbanLayout, poly: Polygon, ignore: set[int]) -> bool:
    for k in layout.candidates_touching(poly):
        other = layout.buildings[k]
        if other.id in ignore:
            continue
        if polygons_intersect(poly, other.footprint):
            return False
    return True


def replace_cell(layout: UrbanLayout, cell: CellIndex,
                 new_buildings: Sequence[Building]) -> UrbanLayout:
    """Swap the mutable buildings of ``cell`` for ``new_buildings``.

    Static buildings of the cell are retained untouched; a static entry in
    ``new_buildings`` must be one of them and is ignored.
    """
    xs, ys = cell_edges(layout)
    assign = {b.id: cell_of_point(b.centroid, xs, ys) for b in layout.buildings}
    in_cell = {bid for bid, c in assign.items() if c == cell}
    current = layout.by_id()
    outside = {bid for bid in assign if bid not in in_cell}

    kept_static = [b for b in layout.buildings if b.id in in_cell and b.static]
    replaced = {bid for bid in in_cell if not current[bid].static}
    fresh: list[Building] = []
    for nb in new_buildings:
        if nb.static:
            if current.get(nb.id) != nb or nb.id not in in_cell:
                raise OperatorContractError(f"building {nb.id}: static buildings cannot be added")
            continue
        if cell_of_point(nb.centroid, xs, ys) != cell:
            raise OperatorContractError(f"building {nb.id}: centroid outside cell {cell}")
        if nb.id in outside or any(nb.id == f.id for f in fresh):
            raise OperatorContractError(f"building {nb.id}: duplicate id")
        if not (HEIGHT_MIN <= nb.height <= HEIGHT_MAX):
            raise OperatorContractError(f"building {nb.id}: height {nb.height} out of range")
        if not polygon_within(nb.footprint, layout.plot):
            raise OperatorContractError(f"building {nb.id}: footprint leaves the plot")
        if not _fits_against(layout, nb.footprint, ignore=replaced):
            raise OperatorContractError(
                f"building {nb.id}: intersects a retained building")
        if any(polygons_intersect(nb.footprint, f.footprint) for f in fresh):
            raise OperatorContractError(f"building {nb.id}: intersects another new building")
        fresh.append(nb)

    others = [b for b in layout.buildings if b.id not in in_cell]
    return layout.with_buildings(others + kept_static + fresh)
