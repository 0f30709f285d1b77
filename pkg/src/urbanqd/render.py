"""Plain SVG output for layouts and feature maps (no plotting backend needed)."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .archive import FeatureMap
from .layout import HEIGHT_MAX, HEIGHT_MIN, UrbanLayout

# viridis anchor colors
VIRIDIS = ((68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37))
MAGMA = ((0, 0, 4), (81, 18, 124), (183, 55, 121), (252, 137, 97), (252, 253, 191))


@dataclass(frozen=True)
class RenderSpec:
    width: int = 800
    height: int = 800
    margin: int = 40
    height_ramp: tuple[tuple[int, int, int], ...] = VIRIDIS
    fitness_ramp: tuple[tuple[int, int, int], ...] = MAGMA
    static_fill: str = "#9e9e9e"
    empty_fill: str = "#eeeeee"
    stroke_width: float = 1.0

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0 or self.margin < 0:
            raise ValueError("render dimensions must be positive")
        if 2 * self.margin >= min(self.width, self.height):
            raise ValueError("margin leaves no drawing area")


def ramp_color(t: float, ramp) -> str:
    t = float(np.clip(t, 0.0, 1.0)) * (len(ramp) - 1)
    k = min(int(t), len(ramp) - 2)
    f = t - k
    rgb = [round(a + (b - a) * f) for a, b in zip(ramp[k], ramp[k + 1])]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def layout_svg(layout: UrbanLayout, spec: RenderSpec = RenderSpec()) -> str:
    x0, y0, x1, y1 = layout.plot.bounds
    avail_w = spec.width - 2 * spec.margin
    avail_h = spec.height - 2 * spec.margin
    scale = min(avail_w / (x1 - x0), avail_h / (y1 - y0))

    def pts(poly) -> str:
        # y axis flipped: north is up
        return " ".join(f"{_fmt(spec.margin + (x - x0) * scale)},"
                        f"{_fmt(spec.height - spec.margin - (y - y0) * scale)}"
                        for x, y in poly.vertices)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
           f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
           f'<rect width="{spec.width}" height="{spec.height}" fill="white"/>',
           f'<polygon class="plot" points="{pts(layout.plot)}" fill="none" stroke="black" '
           f'stroke-width="{spec.stroke_width * 2}"/>']
    for b in layout.buildings:
        if b.static:
            fill = spec.static_fill
        else:
            fill = ramp_color((b.height - HEIGHT_MIN) / (HEIGHT_MAX - HEIGHT_MIN), spec.height_ramp)
        out.append(f'<polygon class="building" data-id="{b.id}" points="{pts(b.footprint)}" '
                   f'fill="{fill}" stroke="black" stroke-width="{spec.stroke_width}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def feature_map_svg(fmap: FeatureMap, spec: RenderSpec = RenderSpec()) -> str:
    """Fitness heatmap: comfort share on x, danger area on y (bin (0, 0) lower-left)."""
    cfg = fmap.config
    m = spec.margin
    cw = (spec.width - 2 * m) / cfg.bins_c
    ch = (spec.height - 2 * m) / cfg.bins_d
    fits = [e.fitness for _, e in fmap]
    lo, hi = (min(fits), max(fits)) if fits else (0.0, 1.0)
    span = hi - lo if hi > lo else 1.0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
           f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
           f'<rect width="{spec.width}" height="{spec.height}" fill="white"/>']
    for i in range(cfg.bins_c):
        for j in range(cfg.bins_d):
            e = fmap.get((i, j))
            x = m + i * cw
            y = spec.height - m - (j + 1) * ch
            if e is None:
                cls, fill, extra = "empty", spec.empty_fill, ""
            else:
                cls = "elite"
                fill = ramp_color((e.fitness - lo) / span, spec.fitness_ramp)
                extra = f' data-fitness="{e.fitness!r}"'
            out.append(f'<rect class="{cls}" data-bin="{i},{j}" x="{_fmt(x)}" y="{_fmt(y)}" '
                       f'width="{_fmt(cw)}" height="{_fmt(ch)}" fill="{fill}"{extra}/>')
    (c0, c1), (d0, d1) = cfg.range_c, cfg.range_d
    out += [
        f'<text x="{m}" y="{spec.height - m / 3:.2f}" font-size="12">B_c {c0:g}</text>',
        f'<text x="{spec.width - m}" y="{spec.height - m / 3:.2f}" font-size="12" '
        f'text-anchor="end">{c1:g}</text>',
        f'<text x="{m / 4:.2f}" y="{spec.height - m}" font-size="12">B_d {d0:g}</text>',
        f'<text x="{m / 4:.2f}" y="{m - 6}" font-size="12">{d1:g} m2</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"


def render_layout_svg(layout: UrbanLayout, spec: RenderSpec, path: str | Path) -> None:
    Path(path).write_text(layout_svg(layout, spec))


def render_feature_map_svg(fmap: FeatureMap, spec: RenderSpec, path: str | Path) -> None:
    Path(path).write_text(feature_map_svg(fmap, spec))
