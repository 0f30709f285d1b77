"""MAP-Elites feature map over the (comfort share, danger area) plane."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .layout import UrbanLayout
from .wind import BehaviorDescriptor

Bin = tuple[int, int]


@dataclass(frozen=True)
class MapConfig:
    bins_c: int = 20
    bins_d: int = 20
    range_c: tuple[float, float] = (0.7, 0.9)
    range_d: tuple[float, float] = (0.0, 8000.0)
    clamp: bool = True  # False rejects out-of-range descriptors instead

    def __post_init__(self) -> None:
        object.__setattr__(self, "range_c", tuple(float(v) for v in self.range_c))
        object.__setattr__(self, "range_d", tuple(float(v) for v in self.range_d))
        if self.bins_c < 1 or self.bins_d < 1:
            raise ValueError("bins must be >= 1")
        if not (self.range_c[0] < self.range_c[1] and self.range_d[0] < self.range_d[1]):
            raise ValueError("descriptor ranges need lo < hi")

    @property
    def n_bins(self) -> int:
        return self.bins_c * self.bins_d


@dataclass(frozen=True)
class Elite:
    genome: UrbanLayout
    fitness: float
    descriptor: BehaviorDescriptor
    run_id: int = 0
    eval_index: int = 0
    parent_index: int | None = None

    @property
    def provenance(self) -> tuple[int, int]:
        return (self.run_id, self.eval_index)


def _axis_bin(v: float, lo: float, hi: float, bins: int, clamp: bool) -> int | None:
    k = math.floor((v - lo) / (hi - lo) * bins)
    if k < 0 or k > bins - 1:
        if not clamp and not (v == hi):
            return None
        k = min(max(k, 0), bins - 1)
    return k


def bin_of(d: BehaviorDescriptor, cfg: MapConfig) -> Bin | None:
    """Bin ``(i, j)`` for a descriptor; the upper range edge maps to the last bin.

    Returns None only when ``cfg.clamp`` is False and the descriptor is out of range.
    """
    i = _axis_bin(d.b_c, cfg.range_c[0], cfg.range_c[1], cfg.bins_c, cfg.clamp)
    j = _axis_bin(d.b_d, cfg.range_d[0], cfg.range_d[1], cfg.bins_d, cfg.clamp)
    if i is None or j is None:
        return None
    return i, j


@dataclass(frozen=True)
class QDMetrics:
    coverage: float
    max_fitness: float
    qd_score: float


@dataclass
class FeatureMap:
    config: MapConfig = field(default_factory=MapConfig)
    cells: dict[Bin, Elite] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[tuple[Bin, Elite]]:
        return iter(sorted(self.cells.items()))

    def elites(self) -> list[Elite]:
        return [e for _, e in self]

    def get(self, b: Bin) -> Elite | None:
        return self.cells.get(b)

    def try_insert(self, candidate: Elite) -> bool:
        """Store ``candidate`` if its bin is empty or it strictly beats the incumbent."""
        b = bin_of(candidate.descriptor, self.config)
        if b is None:
            return False
        incumbent = self.cells.get(b)
        if incumbent is None or candidate.fitness > incumbent.fitness:
            self.cells[b] = candidate
            return True
        return False

    def select_uniform(self, rng: np.random.Generator) -> Elite:
        if not self.cells:
            raise ValueError("cannot select from an empty feature map")
        occupied = sorted(self.cells)
        return self.cells[occupied[int(rng.integers(len(occupied)))]]

    def metrics(self) -> QDMetrics:
        return qd_metrics(self)

    def fitness_array(self) -> np.ndarray:
        """(bins_c, bins_d) array of elite fitness, NaN where empty."""
        a = np.full((self.config.bins_c, self.config.bins_d), np.nan)
        for (i, j), e in self.cells.items():
            a[i, j] = e.fitness
        return a


def qd_metrics(fmap: FeatureMap) -> QDMetrics:
    fits = [e.fitness for _, e in fmap]
    if not fits:
        return QDMetrics(0.0, 0.0, 0.0)
    return QDMetrics(len(fits) / fmap.config.n_bins, max(fits), math.fsum(fits))


def _beats(a: Elite, b: Elite) -> bool:
    if a.fitness != b.fitness:
        return a.fitness > b.fitness
    return a.provenance < b.provenance


def merge(maps: Iterable[FeatureMap]) -> FeatureMap:
    """Per-bin best elite across ``maps``; equal fitness goes to the earliest (run, eval)."""
    maps = list(maps)
    if not maps:
        raise ValueError("nothing to merge")
    cfg = maps[0].config
    for m in maps[1:]:
        if m.config != cfg:
            raise ValueError("cannot merge feature maps with different configurations")
    out = FeatureMap(cfg)
    for m in maps:
        for b, e in m.cells.items():
            cur = out.cells.get(b)
            if cur is None or _beats(e, cur):
                out.cells[b] = e
    return out
