"""
Quickstart: one MAP-Elites run on the grid city
===============================================

Seeds the archive with the benchmark layout, runs a short search and writes
the archive, the run log and two SVG pictures to ``demo_out/quickstart``.
"""
from pathlib import Path

from urbanqd import archive, benchmark, engine, layout_io, render

out = Path("demo_out/quickstart")
out.mkdir(parents=True, exist_ok=True)

###############################################################################
# The default descriptor ranges are tuned for real districts; the synthetic
# city sits far outside them, so widen the map to the whole possible range.
cfg = engine.RunConfig(
    selections=100,
    seed=1,
    map=archive.MapConfig(range_c=(0.0, 1.0), range_d=(0.0, 160_000.0)),
)
fmap, runlog = engine.run(cfg, benchmark.grid_city())

m = fmap.metrics()
print(f"{runlog.evaluations} evaluations, {len(fmap)} elites")
print(f"coverage {m.coverage:.4f}, max FSI {m.max_fitness:.3f}, QD-score {m.qd_score:.3f}")

###############################################################################
# Every elite remembers where it came from.
for b, e in fmap:
    print(b, f"FSI {e.fitness:.3f}", f"b_c {e.descriptor.b_c:.3f}",
          f"b_d {e.descriptor.b_d:.0f}", "from eval", e.parent_index)

layout_io.save_archive(fmap, out / "archive")
runlog.to_csv(out / "runlog.csv")

best = max(fmap.elites(), key=lambda e: e.fitness)
render.render_layout_svg(best.genome, render.RenderSpec(), out / "best_layout.svg")
render.render_feature_map_svg(fmap, render.RenderSpec(), out / "feature_map.svg")
print("wrote", sorted(p.name for p in out.iterdir()))
