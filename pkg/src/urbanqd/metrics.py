"""Density metrics: floor counts, Floor Space Index and summary statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .layout import UrbanLayout

FLOOR_HEIGHT = 4.0


@dataclass(frozen=True)
class UrbanStats:
    fsi: float
    open_space_ratio: float
    mean_height: float
    building_count: int
    footprint_area: float

    def as_dict(self) -> dict:
        return {
            "fsi": self.fsi,
            "open_space_ratio": self.open_space_ratio,
            "mean_height": self.mean_height,
            "building_count": self.building_count,
            "footprint_area": self.footprint_area,
        }


def floor_count(height: float, floor_height: float = FLOOR_HEIGHT) -> int:
    """Whole floors that fit in ``height``; at least one."""
    if not height >= floor_height:
        raise ValueError(f"height {height} m is below one floor ({floor_height} m)")
    return max(1, math.floor(height / floor_height))


def gross_floor_area(layout: UrbanLayout) -> float:
    return sum(floor_count(b.height) * b.footprint.area for b in layout.buildings)


def fsi(layout: UrbanLayout) -> float:
    """Gross floor area over plot area, static buildings included."""
    return gross_floor_area(layout) / layout.plot_area


def urban_stats(layout: UrbanLayout) -> UrbanStats:
    bs = layout.buildings
    footprint = sum(b.footprint.area for b in bs)
    mean_h = sum(b.height for b in bs) / len(bs) if bs else 0.0
    return UrbanStats(
        fsi=fsi(layout),
        open_space_ratio=1.0 - footprint / layout.plot_area,
        mean_height=mean_h,
        building_count=len(bs),
        footprint_area=footprint,
    )
