"""Quality-diversity search over urban layouts.

MAP-Elites over building layouts: fitness is the Floor Space Index, and the
feature map spans the share of open space that is comfortable for sitting
against the open-space area that is dangerous in a storm.
"""
from .archive import Elite, FeatureMap, MapConfig, bin_of, merge, qd_metrics
from .benchmark import empty_plot, grid_city
from .engine import RunConfig, RunLog, initialize, run
from .geometry import Grid, Polygon, polygon_area, polygons_intersect, rasterize
from .layout import Building, UrbanLayout, replace_cell, split_into_cells, validate
from .layout_io import load_archive, load_layout, save_archive, save_layout
from .metrics import floor_count, fsi, urban_stats
from .operators import OperatorConfig, geometric_blend, make_offspring, make_rng
from .wind import (BehaviorDescriptor, ProxyEvaluator, WindConfig, WindRose,
                   evaluate_proxy, load_wind_rose)

__version__ = "0.1.0"
