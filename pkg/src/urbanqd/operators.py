"""Variation operators: geometric cell blending and bounded height mutation.

All randomness flows through an explicit ``numpy.random.Generator`` backed by
PCG64, so an operator chain is a pure function of (parent, seed, config).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Polygon, polygon_within, polygons_intersect, translate
from .layout import (HEIGHT_MAX, HEIGHT_MIN, Building, CellIndex, UrbanLayout,
                     cell_edges, cell_of_point, replace_cell, split_into_cells)


class OperatorInapplicable(RuntimeError):
    """The layout has nothing an operator may change."""


@dataclass(frozen=True)
class OperatorConfig:
    removal_min: float = 0.10
    removal_max: float = 0.50
    eta: float = 20.0
    mutation_prob: float = 1.0
    steps_per_offspring: int = 5
    max_pair_retries: int = 20
    height_min: float = HEIGHT_MIN
    height_max: float = HEIGHT_MAX

    def __post_init__(self) -> None:
        if not 0 <= self.removal_min <= self.removal_max <= 1:
            raise ValueError("need 0 <= removal_min <= removal_max <= 1")
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if not self.height_min < self.height_max:
            raise ValueError("height_min must be below height_max")
        if not 0 <= self.mutation_prob <= 1:
            raise ValueError("mutation_prob must be in [0, 1]")
        if self.steps_per_offspring < 0 or self.max_pair_retries < 1:
            raise ValueError("steps_per_offspring >= 0 and max_pair_retries >= 1 required")


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """PCG64 stream derived from ``seed`` and optional sub-stream keys."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *keys])))


# -- height mutation ---------------------------------------------------------

def polynomial_mutate_height(h: float, u: float, cfg: OperatorConfig = OperatorConfig()) -> float:
    """Bounded polynomial mutation of one height for a uniform draw ``u`` in [0, 1)."""
    lb, ub, eta = cfg.height_min, cfg.height_max, cfg.eta
    if not lb <= h <= ub:
        raise ValueError(f"height {h} outside [{lb}, {ub}]")
    span = ub - lb
    d1 = (h - lb) / span
    d2 = (ub - h) / span
    p = 1.0 / (eta + 1.0)
    if u <= 0.5:
        dq = (2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1) ** (eta + 1.0)) ** p - 1.0
    else:
        dq = 1.0 - (2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2) ** (eta + 1.0)) ** p
    return min(max(h + dq * span, lb), ub)


def mutate_cell_heights(layout: UrbanLayout, cell: CellIndex, rng: np.random.Generator,
                        cfg: OperatorConfig = OperatorConfig()) -> UrbanLayout:
    """Mutate the height of every mutable building in ``cell``, each with ``mutation_prob``."""
    xs, ys = cell_edges(layout)
    out = []
    changed = False
    for b in layout.buildings:
        if not b.static and cell_of_point(b.centroid, xs, ys) == cell:
            if rng.random() < cfg.mutation_prob:
                h = polynomial_mutate_height(b.height, rng.random(), cfg)
                if h != b.height:
                    b = Building(b.id, b.footprint, h, b.static)
                    changed = True
        out.append(b)
    return layout.with_buildings(out) if changed else layout


# -- geometric blending --------------------------------------------------------

@dataclass(frozen=True)
class BlendResult:
    layout: UrbanLayout
    cell: CellIndex | None  # None when every attempted pair failed
    removed: tuple[int, ...] = ()
    copied: tuple[int, ...] = ()
    attempts: int = 0

    @property
    def success(self) -> bool:
        return self.cell is not None


def _clear_of(layout: UrbanLayout, poly: Polygon, skip: set[int]) -> bool:
    for k in layout.candidates_touching(poly):
        other = layout.buildings[k]
        if other.id not in skip and polygons_intersect(poly, other.footprint):
            return False
    return True


def geometric_blend(layout: UrbanLayout, rng: np.random.Generator,
                    cfg: OperatorConfig = OperatorConfig()) -> BlendResult:
    """Thin out one cell and overlay the non-colliding buildings of another.

    A random pair of distinct cells (A, B) is drawn.  A random share of A's
    mutable buildings is removed, then B's mutable buildings, shifted by the
    offset between the cells' lower-left corners, are copied into A in id
    order whenever they clear every remaining building, every earlier copy
    and the plot boundary.  A pair that copies nothing is abandoned (the
    removal is not kept) and a new pair drawn, up to ``max_pair_retries``.
    """
    if not layout.mutable():
        raise OperatorInapplicable("layout has no mutable buildings")
    cells = split_into_cells(layout)
    keys = sorted(cells)
    n = len(keys)
    xs, ys = cell_edges(layout)
    by_id = layout.by_id()

    for attempt in range(1, cfg.max_pair_retries + 1):
        ia = int(rng.integers(n))
        ib = int(rng.integers(n - 1))
        if ib >= ia:
            ib += 1
        a, b = keys[ia], keys[ib]
        r = rng.uniform(cfg.removal_min, cfg.removal_max)

        mutable_a = [i for i in cells[a] if not by_id[i].static]
        n_remove = math.floor(r * len(mutable_a) + 0.5)
        removed = sorted(int(i) for i in rng.choice(mutable_a, n_remove, replace=False)) \
            if n_remove else []
        gone = set(removed)

        offset = (float(xs[a[1]] - xs[b[1]]), float(ys[a[0]] - ys[b[0]]))
        next_id = layout.next_id()
        copies: list[Building] = []
        for src_id in sorted(i for i in cells[b] if not by_id[i].static):
            moved = translate(by_id[src_id].footprint, offset)
            if cell_of_point(moved.centroid, xs, ys) != a:
                continue
            if not polygon_within(moved, layout.plot):
                continue
            if not _clear_of(layout, moved, gone):
                continue
            if any(polygons_intersect(moved, c.footprint) for c in copies):
                continue
            copies.append(Building(next_id, moved, by_id[src_id].height, False))
            next_id += 1

        if copies:
            kept = [by_id[i] for i in mutable_a if i not in gone]
            child = replace_cell(layout, a, kept + copies)
            return BlendResult(child, a, tuple(removed), tuple(c.id for c in copies), attempt)

    return BlendResult(layout, None, (), (), cfg.max_pair_retries)


# -- offspring -------------------------------------------------------------

def variation_step(layout: UrbanLayout, rng: np.random.Generator,
                   cfg: OperatorConfig = OperatorConfig()) -> BlendResult:
    """One blend followed by height mutation of the changed cell.

    When blending fails the mutation lands on a uniformly drawn cell instead.
    """
    res = geometric_blend(layout, rng, cfg)
    cell = res.cell
    if cell is None:
        rows, cols = layout.cell_grid_shape
        k = int(rng.integers(rows * cols))
        cell = (k // cols, k % cols)
    mutated = mutate_cell_heights(res.layout, cell, rng, cfg)
    return BlendResult(mutated, res.cell, res.removed, res.copied, res.attempts)


def apply_steps(layout: UrbanLayout, rng: np.random.Generator, cfg: OperatorConfig,
                steps: int) -> tuple[UrbanLayout, list[BlendResult]]:
    trace = []
    for _ in range(steps):
        res = variation_step(layout, rng, cfg)
        trace.append(res)
        layout = res.layout
    return layout, trace


def make_offspring(parent: UrbanLayout, rng: np.random.Generator,
                   cfg: OperatorConfig = OperatorConfig()) -> tuple[UrbanLayout, UrbanLayout]:
    """Two children: ``steps_per_offspring`` variation steps, then as many again on a copy."""
    child1, _ = apply_steps(parent, rng, cfg, cfg.steps_per_offspring)
    child2, _ = apply_steps(child1, rng, cfg, cfg.steps_per_offspring)
    return child1, child2
