"""Synthetic grid-city fixture used throughout the tests and demos."""
from __future__ import annotations

from .geometry import Polygon
from .layout import Building, UrbanLayout


def grid_city(n: int = 10, pitch: float = 40.0, size: float = 20.0, height: float = 12.0,
              n_static: int = 0, cell_grid: tuple[int, int] = (6, 6)) -> UrbanLayout:
    """An ``n x n`` block grid on an ``n * pitch`` square plot.

    The default is a 400 x 400 m plot holding 100 buildings of 20 x 20 m at
    12 m.  ``n_static`` buildings, spread evenly by id, are flagged static.
    """
    extent = n * pitch
    plot = Polygon.rectangle(0.0, 0.0, extent, extent)
    margin = (pitch - size) / 2
    total = n * n
    static_ids = set()
    if n_static:
        step = total / n_static
        static_ids = {int(k * step) for k in range(n_static)}
    buildings = []
    for row in range(n):
        for col in range(n):
            bid = row * n + col
            x0 = col * pitch + margin
            y0 = row * pitch + margin
            buildings.append(Building(bid, Polygon.rectangle(x0, y0, x0 + size, y0 + size),
                                      height, bid in static_ids))
    return UrbanLayout(plot, tuple(buildings), cell_grid)


def empty_plot(extent: float = 400.0, cell_grid: tuple[int, int] = (6, 6)) -> UrbanLayout:
    return UrbanLayout(Polygon.rectangle(0.0, 0.0, extent, extent), (), cell_grid)
