"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 runtime error.  Every failure prints a
single line starting with ``urbanqd: error:`` on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import archive as arc
from .benchmark import empty_plot, grid_city
from .engine import RunConfig, run
from .layout_io import load_archive, load_layout, save_archive, save_layout
from .metrics import fsi, urban_stats
from .render import RenderSpec, render_feature_map_svg, render_layout_svg
from .wind import ProxyEvaluator, load_wind_rose

PROG = "urbanqd"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2
        raise UsageError(message)


def _load_config(args) -> RunConfig:
    d = {}
    if getattr(args, "config", None):
        d = json.loads(Path(args.config).read_text())
    cfg = RunConfig.from_dict(d)
    overrides = {k: getattr(args, k) for k in ("seed", "selections", "workers", "run_id")
                 if getattr(args, k, None) is not None}
    if getattr(args, "windrose", None):
        overrides["wind_rose"] = load_wind_rose(args.windrose)
    return replace(cfg, **overrides)


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_run(args) -> int:
    cfg = _load_config(args)
    layout = load_layout(args.layout)
    fmap, runlog = run(cfg, layout, ProxyEvaluator())
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_archive(fmap, out)
    runlog.to_csv(out / "runlog.csv")
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    m = fmap.metrics()
    _print_json({"coverage": m.coverage, "max_fitness": m.max_fitness, "qd_score": m.qd_score,
                 "elites": len(fmap), "evaluations": runlog.evaluations})
    return 0


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    layout = load_layout(args.layout)
    desc = ProxyEvaluator().evaluate(layout, cfg.wind_rose, cfg.wind)
    _print_json({"fsi": fsi(layout), "b_c": desc.b_c, "b_d": desc.b_d,
                 "stats": urban_stats(layout).as_dict()})
    return 0


def cmd_render(args) -> int:
    spec = RenderSpec(width=args.width, height=args.height)
    if bool(args.layout) == bool(args.archive):
        raise UsageError("render needs exactly one of --layout or --archive")
    if args.layout:
        render_layout_svg(load_layout(args.layout), spec, args.out)
    else:
        render_feature_map_svg(load_archive(args.archive), spec, args.out)
    return 0


def cmd_merge(args) -> int:
    merged = arc.merge(load_archive(d) for d in args.archives)
    save_archive(merged, args.out_dir)
    m = merged.metrics()
    _print_json({"coverage": m.coverage, "max_fitness": m.max_fitness, "qd_score": m.qd_score,
                 "elites": len(merged)})
    return 0


def cmd_stats(args) -> int:
    m = load_archive(args.archive).metrics()
    _print_json({"coverage": m.coverage, "max_fitness": m.max_fitness, "qd_score": m.qd_score})
    return 0


def cmd_synth(args) -> int:
    layout = empty_plot() if args.empty else grid_city(n_static=args.statics)
    save_layout(layout, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog=PROG, description="Quality-diversity search over urban layouts.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    r = sub.add_parser("run", help="run MAP-Elites from a layout")
    r.add_argument("--layout", required=True)
    r.add_argument("--windrose")
    r.add_argument("--config", help="JSON run configuration")
    r.add_argument("--seed", type=int)
    r.add_argument("--selections", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--run-id", type=int, dest="run_id")
    r.add_argument("--out-dir", required=True)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("evaluate", help="fitness, descriptor and stats of one layout as JSON")
    e.add_argument("layout")
    e.add_argument("--windrose")
    e.add_argument("--config")
    e.set_defaults(func=cmd_evaluate)

    v = sub.add_parser("render", help="layout or archive to SVG")
    v.add_argument("--layout")
    v.add_argument("--archive")
    v.add_argument("--out", required=True)
    v.add_argument("--width", type=int, default=800)
    v.add_argument("--height", type=int, default=800)
    v.set_defaults(func=cmd_render)

    m = sub.add_parser("merge", help="accumulate archives into one")
    m.add_argument("archives", nargs="+")
    m.add_argument("--out-dir", required=True)
    m.set_defaults(func=cmd_merge)

    s = sub.add_parser("stats", help="coverage, max fitness and QD-score of an archive")
    s.add_argument("archive")
    s.set_defaults(func=cmd_stats)

    b = sub.add_parser("synth-benchmark", help="write the 10x10 grid-city fixture")
    b.add_argument("--out", required=True)
    b.add_argument("--statics", type=int, default=0)
    b.add_argument("--empty", action="store_true", help="plot with no buildings")
    b.set_defaults(func=cmd_synth)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"{PROG}: error: usage: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - every runtime failure maps to exit 2
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"{PROG}: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
