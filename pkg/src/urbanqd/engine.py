"""The MAP-Elites loop: seed with the real layout, then select, vary, evaluate, insert."""
from __future__ import annotations

import csv
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .archive import Elite, FeatureMap, MapConfig
from .layout import LayoutError, UrbanLayout, validate
from .metrics import fsi
from .operators import OperatorConfig, OperatorInapplicable, make_offspring, make_rng
from .wind import BehaviorDescriptor, ProxyEvaluator, WindConfig, WindEvaluator, WindRose

log = logging.getLogger(__name__)


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    selections: int = 2000
    seed: int = 0
    workers: int = 1
    run_id: int = 0
    operators: OperatorConfig = field(default_factory=OperatorConfig)
    map: MapConfig = field(default_factory=MapConfig)
    wind: WindConfig = field(default_factory=WindConfig)
    wind_rose: WindRose = field(default_factory=WindRose.uniform)

    def __post_init__(self) -> None:
        if self.selections < 0:
            raise ValueError("selections must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["map"]["range_c"] = list(self.map.range_c)
        d["map"]["range_d"] = list(self.map.range_d)
        d["wind_rose"] = self.wind_rose.as_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        kw = {k: d.pop(k) for k in ("selections", "seed", "workers", "run_id") if k in d}
        if "operators" in d:
            kw["operators"] = OperatorConfig(**d.pop("operators"))
        if "map" in d:
            m = dict(d.pop("map"))
            for key in ("range_c", "range_d"):
                if key in m:
                    m[key] = tuple(m[key])
            kw["map"] = MapConfig(**m)
        if "wind" in d:
            kw["wind"] = WindConfig(**d.pop("wind"))
        if "wind_rose" in d:
            kw["wind_rose"] = WindRose.from_mapping(d.pop("wind_rose"))
        if d:
            raise ValueError(f"unknown run config keys: {sorted(d)}")
        return cls(**kw)


@dataclass(frozen=True)
class LogRecord:
    selection: int
    inserted1: bool
    inserted2: bool
    coverage: float
    max_fitness: float
    qd_score: float
    ms: float
    noop: bool = False


@dataclass
class RunLog:
    records: list[LogRecord] = field(default_factory=list)
    evaluations: int = 0
    # eval index -> parent eval index, for every evaluated child
    parents: dict[int, int] = field(default_factory=dict)

    HEADER = ("selection", "inserted1", "inserted2", "coverage", "max_fitness", "qd_score", "ms")

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]

    def lineage(self, eval_index: int) -> list[int]:
        """Evaluation indices from ``eval_index`` back to the seed (index 0)."""
        chain = [eval_index]
        while chain[-1] != 0:
            chain.append(self.parents[chain[-1]])
        return chain

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.HEADER)
            for r in self.records:
                w.writerow([r.selection, int(r.inserted1), int(r.inserted2), repr(r.coverage),
                            repr(r.max_fitness), repr(r.qd_score), f"{r.ms:.3f}"])


class _CountingEvaluator:
    def __init__(self, inner: WindEvaluator):
        self.inner = inner
        self.calls = 0
        self._lock = threading.Lock()

    def __call__(self, layout: UrbanLayout, cfg: RunConfig, index: int
                 ) -> tuple[float, BehaviorDescriptor]:
        with self._lock:
            self.calls += 1
        try:
            return fsi(layout), self.inner.evaluate(layout, cfg.wind_rose, cfg.wind)
        except Exception as exc:
            raise EvaluationError(f"evaluation {index} failed: {exc}") from exc


def initialize(fmap: FeatureMap, initial_layout: UrbanLayout, evaluator: WindEvaluator,
               cfg: RunConfig) -> FeatureMap:
    """Evaluate the seed layout and make it the only elite of ``fmap``."""
    problems = validate(initial_layout, cfg.operators.height_min, cfg.operators.height_max)
    if problems:
        raise LayoutError("initial layout is invalid: " + "; ".join(map(str, problems[:5])),
                          problems)
    counting = evaluator if isinstance(evaluator, _CountingEvaluator) else _CountingEvaluator(evaluator)
    fit, desc = counting(initial_layout, cfg, 0)
    fmap.cells.clear()
    if not fmap.try_insert(Elite(initial_layout, fit, desc, cfg.run_id, 0, None)):
        raise ValueError(f"seed descriptor {desc} falls outside the feature map")
    return fmap


def run(cfg: RunConfig, initial_layout: UrbanLayout,
        evaluator: WindEvaluator | None = None) -> tuple[FeatureMap, RunLog]:
    """One MAP-Elites run: ``1 + 2 * cfg.selections`` evaluations.

    Each selection draws from its own PCG64 sub-stream keyed by
    ``(seed, selection)``, and offspring are inserted child1 then child2, so
    the archive does not depend on ``cfg.workers``.
    """
    counting = _CountingEvaluator(evaluator or ProxyEvaluator())
    fmap = initialize(FeatureMap(cfg.map), initial_layout, counting, cfg)
    runlog = RunLog()
    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        for s in range(cfg.selections):
            t0 = time.perf_counter()
            rng = make_rng(cfg.seed, s)
            parent = fmap.select_uniform(rng)
            noop = False
            try:
                children = make_offspring(parent.genome, rng, cfg.operators)
            except OperatorInapplicable as exc:
                log.info("selection %d: %s; evaluating unchanged copies", s, exc)
                children = (parent.genome, parent.genome)
                noop = True
            indices = (2 * s + 1, 2 * s + 2)
            for i in indices:
                runlog.parents[i] = parent.eval_index
            if pool is None:
                results = [counting(c, cfg, i) for c, i in zip(children, indices)]
            else:
                results = list(pool.map(lambda ci: counting(ci[0], cfg, ci[1]),
                                        zip(children, indices)))
            inserted = [
                fmap.try_insert(Elite(child, fit, desc, cfg.run_id, idx, parent.eval_index))
                for child, (fit, desc), idx in zip(children, results, indices)
            ]
            m = fmap.metrics()
            runlog.records.append(LogRecord(s, inserted[0], inserted[1], m.coverage,
                                            m.max_fitness, m.qd_score,
                                            (time.perf_counter() - t0) * 1000.0, noop))
    finally:
        if pool is not None:
            pool.shutdown()
    runlog.evaluations = counting.calls
    return fmap, runlog
