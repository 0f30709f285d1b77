"""Pedestrian wind behaviour: a pluggable evaluator and a deterministic proxy.

The proxy rasterizes the layout and, for each of the four cardinal wind
directions, scales the storm inflow speed by two multipliers:

* wake: sheltering behind an upwind building of height ``h`` that decays
  linearly from ``wake_floor`` at the building to 1 at ``wake_length * h``;
* channel: acceleration in a cross-wind gap narrower than ``channel_gap_max``
  bounded by buildings on both sides.

Directions name where the wind comes *from* (an ``"N"`` wind blows south).
The per-direction fields are reduced to a :class:`BehaviorDescriptor` using
hour-normalized wind-rose weights.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol

import numpy as np

from .geometry import Grid, rasterize_mask, rasterize_window
from .layout import UrbanLayout

DIRECTIONS = ("N", "E", "S", "W")


class WindError(ValueError):
    pass


@dataclass(frozen=True)
class WindRose:
    """Annual hours per cardinal direction, stored in N, E, S, W order."""

    hours: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        entries = [(str(d).strip().upper(), float(h)) for d, h in self.hours]
        dirs = [d for d, _ in entries]
        if sorted(dirs) != sorted(DIRECTIONS):
            raise WindError(f"wind rose needs exactly one entry for each of N,E,S,W; got {dirs}")
        if any(not math.isfinite(h) or h < 0 for _, h in entries):
            raise WindError("wind rose hours must be finite and non-negative")
        if sum(h for _, h in entries) <= 0:
            raise WindError("wind rose hours sum to zero")
        lookup = dict(entries)
        object.__setattr__(self, "hours", tuple((d, lookup[d]) for d in DIRECTIONS))

    @classmethod
    def from_mapping(cls, m: Mapping[str, float]) -> "WindRose":
        return cls(tuple(m.items()))

    @classmethod
    def uniform(cls, total: float = 8760.0) -> "WindRose":
        return cls(tuple((d, total / 4) for d in DIRECTIONS))

    def as_dict(self) -> dict[str, float]:
        return dict(self.hours)

    def weights(self) -> dict[str, float]:
        total = sum(h for _, h in self.hours)
        return {d: h / total for d, h in self.hours}

    def scaled(self, factor: float) -> "WindRose":
        return WindRose(tuple((d, h * factor) for d, h in self.hours))


def load_wind_rose(path: str | Path) -> WindRose:
    """Read a ``direction,hours`` CSV with exactly four rows."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["direction", "hours"]:
            raise WindError(f"{path}: header must be 'direction,hours'")
        rows = [(r["direction"], r["hours"]) for r in reader]
    if len(rows) != 4:
        raise WindError(f"{path}: expected 4 rows, found {len(rows)}")
    try:
        return WindRose(tuple((d, float(h)) for d, h in rows))
    except ValueError as exc:
        raise WindError(f"{path}: {exc}") from exc


def save_wind_rose(rose: WindRose, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["direction", "hours"])
        for d, h in rose.hours:
            w.writerow([d, repr(h)])


@dataclass(frozen=True)
class WindConfig:
    inflow_speed: float = 17.0
    comfort_threshold: float = 6.0
    danger_threshold: float = 15.0
    raster_cell: float = 4.0
    wake_length: float = 5.0
    wake_floor: float = 0.3
    channel_gap_max: float = 20.0
    channel_gain: float = 0.4

    def __post_init__(self) -> None:
        peak = self.inflow_speed * (1.0 + self.channel_gain)
        if not (0 < self.comfort_threshold < self.danger_threshold < peak):
            raise WindError("need 0 < comfort_threshold < danger_threshold < inflow*(1+channel_gain)")
        if not self.raster_cell > 0:
            raise WindError("raster_cell must be positive")
        if not 0 <= self.wake_floor <= 1:
            raise WindError("wake_floor must be in [0, 1]")
        if not (self.wake_length > 0 and self.channel_gap_max > 0 and self.channel_gain >= 0):
            raise WindError("wake_length and channel_gap_max must be positive, channel_gain >= 0")


@dataclass(frozen=True)
class BehaviorDescriptor:
    b_c: float  # hour-weighted share of open space with comfortable sitting wind
    b_d: float  # hour-weighted open-space area (m2) with dangerous wind

    def as_tuple(self) -> tuple[float, float]:
        return (self.b_c, self.b_d)


class WindEvaluator(Protocol):
    """Anything mapping a layout to a descriptor; must be deterministic."""

    def evaluate(self, layout: UrbanLayout, wind_rose: WindRose,
                 config: WindConfig) -> BehaviorDescriptor: ...


@dataclass
class LayoutRaster:
    grid: Grid
    in_plot: np.ndarray  # bool (nx, ny)
    owner: np.ndarray    # int (nx, ny); index into heights, -1 where open
    heights: np.ndarray  # height of each building, in layout order
    boxes: np.ndarray    # (n, 4) inclusive covered index box i0, i1, j0, j1; -1 if uncovered

    @property
    def solid(self) -> np.ndarray:
        return self.owner >= 0

    @property
    def open(self) -> np.ndarray:
        return self.in_plot & (self.owner < 0)


def rasterize_layout(layout: UrbanLayout, cell: float) -> LayoutRaster:
    grid = Grid.covering(layout.plot.bounds, cell)
    in_plot = rasterize_mask(layout.plot, grid)
    if not in_plot.any():
        raise WindError("plot covers no raster cell")
    owner = np.full((grid.nx, grid.ny), -1, dtype=np.int64)
    boxes = np.full((len(layout.buildings), 4), -1, dtype=np.int64)
    for k, b in enumerate(layout.buildings):
        i0, j0, sub = rasterize_window(b.footprint, grid)
        if not sub.any():
            continue
        view = owner[i0:i0 + sub.shape[0], j0:j0 + sub.shape[1]]
        view[sub] = k
        ii = np.flatnonzero(sub.any(axis=1))
        jj = np.flatnonzero(sub.any(axis=0))
        boxes[k] = (i0 + ii[0], i0 + ii[-1], j0 + jj[0], j0 + jj[-1])
    heights = np.array([b.height for b in layout.buildings], dtype=float)
    return LayoutRaster(grid, in_plot, owner, heights, boxes)


# Views that make the wind blow toward increasing axis-0 index.
def _to_wind_frame(a: np.ndarray, direction: str) -> np.ndarray:
    if direction == "W":
        return a
    if direction == "E":
        return a[::-1, :]
    if direction == "S":
        return a.T
    if direction == "N":
        return a.T[::-1, :]
    raise WindError(f"unknown wind direction {direction!r}")


def _from_wind_frame(t: np.ndarray, direction: str) -> np.ndarray:
    if direction == "W":
        return t
    if direction == "E":
        return t[::-1, :]
    if direction == "S":
        return t.T
    return t[::-1, :].T


def _boxes_to_wind_frame(boxes: np.ndarray, shape: tuple[int, int],
                         direction: str) -> np.ndarray:
    nx, ny = shape
    i0, i1, j0, j1 = boxes.T
    if direction == "W":
        out = np.stack([i0, i1, j0, j1], axis=1)
    elif direction == "E":
        out = np.stack([nx - 1 - i1, nx - 1 - i0, j0, j1], axis=1)
    elif direction == "S":
        out = np.stack([j0, j1, i0, i1], axis=1)
    else:
        out = np.stack([ny - 1 - j1, ny - 1 - j0, i0, i1], axis=1)
    out[i0 < 0] = -1
    return out


def wake_multiplier(owner: np.ndarray, heights: np.ndarray, cell: float,
                    config: WindConfig, boxes: np.ndarray | None = None) -> np.ndarray:
    """Wake multiplier for an owner raster already in the wind frame.

    ``boxes`` holds each building's inclusive (row0, row1, col0, col1) extent
    in the same frame; it is derived from ``owner`` when omitted.
    """
    n0, n1 = owner.shape
    if boxes is None:
        boxes = np.full((len(heights), 4), -1, dtype=np.int64)
        for k in range(len(heights)):
            ii, jj = np.nonzero(owner == k)
            if ii.size:
                boxes[k] = (ii.min(), ii.max(), jj.min(), jj.max())
    wake = np.ones(owner.shape)
    solid = owner >= 0
    rows = np.arange(n0)
    floor = config.wake_floor
    for k, h in enumerate(heights):
        r0, r1, c0, c1 = (int(v) for v in boxes[k])
        if r0 < 0:
            continue
        c1 += 1
        reach_m = config.wake_length * h
        end = min(n0, r1 + math.ceil(reach_m / cell) + 2)
        sub = owner[r0:end, c0:c1] == k
        idx = np.where(sub, rows[r0:end, None], -1)
        last = np.maximum.accumulate(idx, axis=0)
        d = (rows[r0:end, None] - last) * cell
        hit = (last >= 0) & ~solid[r0:end, c0:c1] & (d <= reach_m)
        mult = floor + (1.0 - floor) * (d / reach_m)
        block = wake[r0:end, c0:c1]
        np.minimum(block, np.where(hit, mult, 1.0), out=block)
    return wake


def channel_multiplier(solid: np.ndarray, cell: float, config: WindConfig) -> np.ndarray:
    """Gap acceleration for a solid raster already in the wind frame (cross-wind = axis 1)."""
    n1 = solid.shape[1]
    cols = np.arange(n1)
    left = np.maximum.accumulate(np.where(solid, cols, -1), axis=1)
    right_src = np.where(solid, cols, n1)[:, ::-1]
    right = np.minimum.accumulate(right_src, axis=1)[:, ::-1]
    g = (right - left - 1) * cell
    gap_max = config.channel_gap_max
    hit = (left >= 0) & (right < n1) & ~solid & (g < gap_max)
    return np.where(hit, 1.0 + config.channel_gain * (1.0 - g / gap_max), 1.0)


def compute_wind_field(layout: UrbanLayout, direction: str, config: WindConfig = WindConfig(),
                       raster: LayoutRaster | None = None) -> Grid:
    """Pedestrian-level wind speed (m/s) on the raster for one direction.

    Building cells hold 0, cells outside the plot hold NaN.
    """
    if direction not in DIRECTIONS:
        raise WindError(f"unknown wind direction {direction!r}")
    if raster is None:
        raster = rasterize_layout(layout, config.raster_cell)
    cell = raster.grid.cell_size
    owner_t = _to_wind_frame(raster.owner, direction)
    boxes_t = _boxes_to_wind_frame(raster.boxes, raster.owner.shape, direction)
    wake = wake_multiplier(owner_t, raster.heights, cell, config, boxes_t)
    channel = channel_multiplier(owner_t >= 0, cell, config)
    speed = _from_wind_frame(config.inflow_speed * wake * channel, direction)
    speed = np.where(raster.solid, 0.0, speed)
    speed = np.where(raster.in_plot, speed, np.nan)
    g = raster.grid
    return Grid(g.origin, g.cell_size, g.nx, g.ny, speed)


def wind_fields(layout: UrbanLayout, config: WindConfig = WindConfig(),
                raster: LayoutRaster | None = None) -> dict[str, Grid]:
    if raster is None:
        raster = rasterize_layout(layout, config.raster_cell)
    return {d: compute_wind_field(layout, d, config, raster) for d in DIRECTIONS}


def descriptor_from_fields(fields: Mapping[str, Grid], wind_rose: WindRose,
                           layout: UrbanLayout, config: WindConfig = WindConfig(),
                           raster: LayoutRaster | None = None) -> BehaviorDescriptor:
    if set(fields) != set(DIRECTIONS):
        raise WindError(f"need one field per direction, got {sorted(fields)}")
    if raster is None:
        raster = rasterize_layout(layout, config.raster_cell)
    for d, f in fields.items():
        if not f.same_frame(raster.grid):
            raise WindError(f"field {d} is not on the layout raster")
    open_ = raster.open
    n_open = int(open_.sum())
    cell_area = raster.grid.cell_size ** 2
    b_c = 0.0
    b_d = 0.0
    for d, w in wind_rose.weights().items():
        v = fields[d].values
        comfortable = int(np.count_nonzero(open_ & (v < config.comfort_threshold)))
        dangerous = int(np.count_nonzero(open_ & (v > config.danger_threshold)))
        if n_open:
            b_c += w * (comfortable / n_open)
        b_d += w * (dangerous * cell_area)
    return BehaviorDescriptor(b_c, b_d)


def evaluate_proxy(layout: UrbanLayout, wind_rose: WindRose,
                   config: WindConfig = WindConfig()) -> BehaviorDescriptor:
    raster = rasterize_layout(layout, config.raster_cell)
    fields = wind_fields(layout, config, raster)
    return descriptor_from_fields(fields, wind_rose, layout, config, raster)


class ProxyEvaluator:
    """Wake/channel proxy behind the :class:`WindEvaluator` interface."""

    def evaluate(self, layout: UrbanLayout, wind_rose: WindRose,
                 config: WindConfig) -> BehaviorDescriptor:
        return evaluate_proxy(layout, wind_rose, config)
