"""
Variation operators up close
============================

Geometric blending thins out one cell of a layout and copies buildings from
another cell into it; height mutation then perturbs the changed cell.
"""
import numpy as np

from urbanqd import benchmark, layout, operators

city = benchmark.grid_city(n_static=20)
cfg = operators.OperatorConfig()
rng = operators.make_rng(2)

###############################################################################
# A single blend, reported step by step.
res = operators.geometric_blend(city, rng, cfg)
print(f"cell {res.cell} after {res.attempts} attempt(s): "
      f"removed {list(res.removed)}, copied as {list(res.copied)}")
print("buildings:", len(city.buildings), "->", len(res.layout.buildings))

###############################################################################
# The polynomial mutation keeps heights inside [4, 100] m and concentrates
# its steps near the parent.  With eta = 20 most draws move a 52 m building
# by only a few meters.
u = rng.random(20_000)
h = np.array([operators.polynomial_mutate_height(52.0, x, cfg) for x in u])
print("52 m mutated: percentiles 5/50/95 =", np.percentile(h, [5, 50, 95]).round(2))

###############################################################################
# Offspring are two chained rounds of five steps.  Static buildings never move.
child1, child2 = operators.make_offspring(city, rng, cfg)
for name, c in (("child1", child1), ("child2", child2)):
    print(name, len(c.buildings), "buildings,",
          "valid" if layout.is_valid(c) else "INVALID",
          "statics kept" if layout.statics_preserved(city, c) else "STATICS CHANGED")
