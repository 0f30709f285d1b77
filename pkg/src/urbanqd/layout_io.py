"""GeoJSON layout documents and on-disk archive directories.

A layout document is a GeoJSON ``FeatureCollection`` in local planar meters:
one Polygon feature with ``{"role": "plot"}`` and one Polygon feature per
building with ``height`` (m) and optional ``static`` (default false).  The
top-level ``properties`` carry the local ``origin`` and the ``cell_grid``.

An archive directory holds::

    archive.csv         bin_c,bin_d,fitness,b_c,b_d,genome_file
    archive_meta.json   map config and per-bin provenance
    elites/*.geojson    one layout document per occupied bin
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

from .archive import Elite, FeatureMap, MapConfig
from .geometry import GeometryError, Polygon
from .layout import DEFAULT_CELL_GRID, Building, LayoutError, UrbanLayout, validate
from .wind import BehaviorDescriptor

PRECISION = 6
ARCHIVE_HEADER = ["bin_c", "bin_d", "fitness", "b_c", "b_d", "genome_file"]


class LayoutFormatError(ValueError):
    pass


def _num(v: float) -> float:
    # + 0.0 folds -0.0 into 0.0
    return round(float(v), PRECISION) + 0.0


def _ring(p: Polygon) -> list[list[float]]:
    pts = [[_num(x), _num(y)] for x, y in p.vertices]
    return pts + [pts[0]]


def layout_to_geojson(layout: UrbanLayout) -> dict:
    features = [{
        "type": "Feature",
        "properties": {"role": "plot"},
        "geometry": {"type": "Polygon", "coordinates": [_ring(layout.plot)]},
    }]
    for b in layout.buildings:
        features.append({
            "type": "Feature",
            "id": b.id,
            "properties": {"id": b.id, "height": _num(b.height), "static": bool(b.static)},
            "geometry": {"type": "Polygon", "coordinates": [_ring(b.footprint)]},
        })
    return {
        "type": "FeatureCollection",
        "properties": {"origin": [_num(v) for v in layout.origin],
                       "cell_grid": list(layout.cell_grid_shape)},
        "features": features,
    }


def dumps_layout(layout: UrbanLayout) -> str:
    """Deterministic text: one feature per line, ascending building id."""
    doc = layout_to_geojson(layout)
    feats = ",\n".join("  " + json.dumps(f, separators=(",", ":")) for f in doc["features"])
    props = json.dumps(doc["properties"], separators=(",", ":"))
    return ('{"type":"FeatureCollection",\n "properties":' + props
            + ',\n "features":[\n' + feats + "\n]}\n")


def save_layout(layout: UrbanLayout, path: str | Path) -> None:
    Path(path).write_text(dumps_layout(layout))


def _polygon_from_geometry(geom: dict, where: str) -> Polygon:
    if not isinstance(geom, dict) or geom.get("type") != "Polygon":
        raise LayoutFormatError(f"{where}: geometry must be a Polygon")
    rings = geom.get("coordinates")
    if not isinstance(rings, list) or not rings:
        raise LayoutFormatError(f"{where}: polygon has no coordinates")
    if len(rings) > 1:
        raise LayoutFormatError(f"{where}: polygons with holes are not supported")
    try:
        return Polygon(tuple((float(x), float(y)) for x, y, *_ in rings[0]))
    except (GeometryError, TypeError, ValueError) as exc:
        raise LayoutFormatError(f"{where}: {exc}") from exc


def layout_from_geojson(doc: dict, source: str = "<layout>") -> UrbanLayout:
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise LayoutFormatError(f"{source}: not a GeoJSON FeatureCollection")
    props = doc.get("properties") or {}
    origin = tuple(props.get("origin", (0.0, 0.0)))
    cell_grid = tuple(props.get("cell_grid", DEFAULT_CELL_GRID))
    plot = None
    buildings = []
    for k, feat in enumerate(doc.get("features", [])):
        where = f"{source}: feature {k}"
        fprops = feat.get("properties") or {}
        poly = _polygon_from_geometry(feat.get("geometry"), where)
        if fprops.get("role") == "plot":
            if plot is not None:
                raise LayoutFormatError(f"{where}: more than one plot feature")
            plot = poly
            continue
        if "height" not in fprops or not isinstance(fprops["height"], (int, float)) \
                or isinstance(fprops["height"], bool):
            raise LayoutFormatError(f"{where}: missing numeric 'height'")
        bid = fprops.get("id", feat.get("id", k))
        static = fprops.get("static", False)
        if not isinstance(static, bool):
            raise LayoutFormatError(f"{where}: 'static' must be a boolean")
        buildings.append(Building(int(bid), poly, float(fprops["height"]), static))
    if plot is None:
        raise LayoutFormatError(f"{source}: no feature with role 'plot'")
    layout = UrbanLayout(plot, tuple(buildings), cell_grid, origin)
    problems = validate(layout)
    if problems:
        raise LayoutError(f"{source}: invalid layout: " + "; ".join(str(v) for v in problems),
                          problems)
    return layout


def load_layout(path: str | Path) -> UrbanLayout:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise LayoutFormatError(f"{path}: not valid JSON: {exc}") from exc
    return layout_from_geojson(doc, str(path))


# -- archives --------------------------------------------------------------

def _map_config_dict(cfg: MapConfig) -> dict:
    return {"bins_c": cfg.bins_c, "bins_d": cfg.bins_d, "range_c": list(cfg.range_c),
            "range_d": list(cfg.range_d), "clamp": cfg.clamp}


def save_archive(fmap: FeatureMap, directory: str | Path) -> None:
    d = Path(directory)
    (d / "elites").mkdir(parents=True, exist_ok=True)
    for stale in (d / "elites").glob("*.geojson"):
        stale.unlink()
    provenance = {}
    with open(d / "archive.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ARCHIVE_HEADER)
        for (i, j), e in fmap:
            name = f"elites/elite_{i:02d}_{j:02d}.geojson"
            save_layout(e.genome, d / name)
            w.writerow([i, j, repr(e.fitness), repr(e.descriptor.b_c), repr(e.descriptor.b_d), name])
            provenance[f"{i},{j}"] = [e.run_id, e.eval_index, e.parent_index]
    meta = {"map_config": _map_config_dict(fmap.config), "provenance": provenance}
    (d / "archive_meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


def load_archive(directory: str | Path) -> FeatureMap:
    d = Path(directory)
    try:
        meta = json.loads((d / "archive_meta.json").read_text())
    except FileNotFoundError as exc:
        raise LayoutFormatError(f"{d}: not an archive directory (no archive_meta.json)") from exc
    mc = dict(meta["map_config"])
    mc["range_c"] = tuple(mc["range_c"])
    mc["range_d"] = tuple(mc["range_d"])
    fmap = FeatureMap(MapConfig(**mc))
    prov = meta.get("provenance", {})
    with open(d / "archive.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ARCHIVE_HEADER:
            raise LayoutFormatError(f"{d}/archive.csv: unexpected header {reader.fieldnames}")
        for row in reader:
            i, j = int(row["bin_c"]), int(row["bin_d"])
            run_id, eval_index, parent = prov.get(f"{i},{j}", [0, 0, None])
            genome = load_layout(d / row["genome_file"])
            fmap.cells[(i, j)] = Elite(genome, float(row["fitness"]),
                                       BehaviorDescriptor(float(row["b_c"]), float(row["b_d"])),
                                       run_id, eval_index, parent)
    return fmap
