"""
Accumulating several runs
=========================

Runs the search from several seeds, then merges the archives: each bin keeps
the best elite found by any run.  The command-line equivalent is::

    urbanqd run --layout city.geojson --config demos/benchmark_config.json \\
        --seed 1 --run-id 1 --out-dir runs/1
    urbanqd merge runs/* --out-dir merged
"""
from dataclasses import replace
from pathlib import Path

from urbanqd import archive, benchmark, engine, layout_io, render

out = Path("demo_out/merge")
out.mkdir(parents=True, exist_ok=True)

base = engine.RunConfig(
    selections=60,
    map=archive.MapConfig(range_c=(0.0, 1.0), range_d=(0.0, 160_000.0)),
)
city = benchmark.grid_city()

maps = []
for seed in range(1, 5):
    cfg = replace(base, seed=seed, run_id=seed)
    fmap, _ = engine.run(cfg, city)
    m = fmap.metrics()
    print(f"run {seed}: coverage {m.coverage:.4f}, QD-score {m.qd_score:.3f}")
    maps.append(fmap)

###############################################################################
# Merging never loses a bin and never lowers a bin's fitness.
merged = archive.merge(maps)
m = merged.metrics()
print(f"merged: coverage {m.coverage:.4f}, QD-score {m.qd_score:.3f}")
for b, e in merged:
    print(b, "from run", e.run_id, f"FSI {e.fitness:.3f}")

layout_io.save_archive(merged, out / "merged")
render.render_feature_map_svg(merged, render.RenderSpec(), out / "merged_map.svg")
