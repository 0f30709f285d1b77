"""Slow, independent re-implementations used to check the fast code paths."""
import math

from urbanqd.geometry import point_in_polygon

# step toward where the wind comes from, in (ix, iy) raster units
UPWIND = {"N": (0, 1), "S": (0, -1), "E": (1, 0), "W": (-1, 0)}


def brute_raster(layout, cell):
    x0, y0, x1, y1 = layout.plot.bounds
    nx = math.ceil(round((x1 - x0) / cell, 9))
    ny = math.ceil(round((y1 - y0) / cell, 9))
    owner = [[-1] * ny for _ in range(nx)]
    in_plot = [[False] * ny for _ in range(nx)]
    for ix in range(nx):
        for iy in range(ny):
            pt = (x0 + (ix + 0.5) * cell, y0 + (iy + 0.5) * cell)
            in_plot[ix][iy] = point_in_polygon(pt, layout.plot)
            for k, b in enumerate(layout.buildings):
                bx0, by0, bx1, by1 = b.footprint.bounds
                if bx0 <= pt[0] <= bx1 and by0 <= pt[1] <= by1 and point_in_polygon(pt, b.footprint):
                    owner[ix][iy] = k
                    break
    return nx, ny, owner, in_plot


def brute_field(layout, direction, cfg, raster=None):
    """Speed per cell as nested lists; None outside the plot, 0.0 on buildings."""
    c = cfg.raster_cell
    nx, ny, owner, in_plot = raster or brute_raster(layout, c)
    heights = [b.height for b in layout.buildings]
    ux, uy = UPWIND[direction]
    px, py = uy, ux  # any cross-wind axis works: the gap is symmetric
    inside = lambda i, j: 0 <= i < nx and 0 <= j < ny  # noqa: E731
    out = [[None] * ny for _ in range(nx)]
    for ix in range(nx):
        for iy in range(ny):
            if not in_plot[ix][iy]:
                continue
            if owner[ix][iy] >= 0:
                out[ix][iy] = 0.0
                continue
            wake = 1.0
            seen = set()
            s = 1
            while inside(ix + s * ux, iy + s * uy):
                k = owner[ix + s * ux][iy + s * uy]
                if k >= 0 and k not in seen:
                    seen.add(k)
                    d = s * c
                    reach = cfg.wake_length * heights[k]
                    if d <= reach:
                        wake = min(wake, cfg.wake_floor + (1.0 - cfg.wake_floor) * (d / reach))
                s += 1
            sides = []
            for sign in (1, -1):
                s = 1
                found = None
                while inside(ix + sign * s * px, iy + sign * s * py):
                    if owner[ix + sign * s * px][iy + sign * s * py] >= 0:
                        found = s
                        break
                    s += 1
                sides.append(found)
            channel = 1.0
            if sides[0] is not None and sides[1] is not None:
                g = (sides[0] + sides[1] - 1) * c
                if g < cfg.channel_gap_max:
                    channel = 1.0 + cfg.channel_gain * (1.0 - g / cfg.channel_gap_max)
            out[ix][iy] = cfg.inflow_speed * wake * channel
    return out


def brute_descriptor(layout, rose, cfg):
    raster = brute_raster(layout, cfg.raster_cell)
    nx, ny, owner, in_plot = raster
    n_open = sum(1 for i in range(nx) for j in range(ny) if in_plot[i][j] and owner[i][j] < 0)
    total = sum(h for _, h in rose.hours)
    b_c = 0.0
    b_d = 0.0
    for d, h in rose.hours:
        w = h / total
        f = brute_field(layout, d, cfg, raster)
        comf = sum(1 for col in f for v in col if v is not None and v > 0 and v < cfg.comfort_threshold)
        dang = sum(1 for col in f for v in col if v is not None and v > cfg.danger_threshold)
        if n_open:
            b_c += w * (comf / n_open)
        b_d += w * (dang * cfg.raster_cell ** 2)
    return b_c, b_d


def brute_merge(maps):
    """Per-bin maximum fitness over all maps."""
    best = {}
    for m in maps:
        for b, e in m.cells.items():
            best[b] = max(best.get(b, -math.inf), e.fitness)
    return best
