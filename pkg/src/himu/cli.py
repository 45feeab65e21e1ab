"""Command-line front door.

Four commands: validate a tree document, run selection end-to-end on a
bundle, generate synthetic artifacts from event scripts, and run the recall
benchmark. Selection emits four JSON artifacts (selection, curve,
attribution, stats) so external tools can plot curves and per-leaf
heatmaps without any plotting code here.

Exit codes: 0 success; 2 tree syntax; 3 schema; 4 arity; 5 inactive
expert; 1 any other failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from .cache import CacheKey, cache_root, disk_path, write_through
from .config import EngineConfig, config_from_obj, load_config
from .errors import (
    ArityError,
    HimuError,
    InactiveExpertError,
    SchemaError,
    TreeError,
    TreeSyntaxError,
)
from .experts.bundle import bundle_digest, load_ovd_source, loads_bundle
from .experts.scoring import ProviderCounters
from .pipeline import STRATEGIES, run_pipeline
from .tree import ExpertKind, parse_tree

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_SYNTAX = 2
EXIT_SCHEMA = 3
EXIT_ARITY = 4
EXIT_INACTIVE_EXPERT = 5

_SIGMA_FLAGS = {f"sigma_{kind.value.lower()}": kind for kind in ExpertKind}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("engine configuration")
    group.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    group.add_argument("--gamma", type=float, help="sigmoid sharpness for normalization")
    group.add_argument("--delta", type=float, help="scale guard added to the spread estimate")
    group.add_argument("--kappa", type=float, help="adjacency decay rate")
    for flag, kind in _SIGMA_FLAGS.items():
        group.add_argument(
            f"--{flag.replace('_', '-')}",
            type=float,
            dest=flag,
            help=f"smoothing bandwidth for {kind.value}",
        )
    group.add_argument(
        "--smoothing-mode",
        choices=("renormalized", "strict"),
        help="boundary handling for Gaussian smoothing",
    )
    group.add_argument(
        "--experts",
        help="comma-separated active expert set (default: all)",
    )
    group.add_argument(
        "--strict-schema",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="reject unknown fields in tree documents (default: strict)",
    )
    group.add_argument("--peaks", type=int, help="max peaks kept in phase 1")
    group.add_argument("--neighbors", type=int, help="neighbors added per peak in phase 2")
    group.add_argument("--window", type=int, help="neighbor window width")
    group.add_argument("--min-dist", type=int, help="minimum distance between peaks")


def _config_from_args(args) -> EngineConfig:
    config = EngineConfig()
    if getattr(args, "config", None):
        config = load_config(args.config, config)
    overrides: dict = {}
    for name in ("gamma", "delta", "kappa"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    sigmas = dict(config.sigma_by_expert)
    sigma_changed = False
    for flag, kind in _SIGMA_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            sigmas[kind] = value
            sigma_changed = True
    if sigma_changed:
        overrides["sigma_by_expert"] = sigmas
    if getattr(args, "smoothing_mode", None) is not None:
        overrides["smoothing_mode"] = args.smoothing_mode
    if getattr(args, "experts", None):
        names = [n for n in args.experts.split(",") if n.strip()]
        overrides["active_experts"] = frozenset(
            config_from_obj({"active_experts": names}).active_experts
        )
    if getattr(args, "strict_schema", None) is not None:
        overrides["strict_schema"] = args.strict_schema
    for flag, field in (
        ("peaks", "max_peaks"),
        ("neighbors", "neighbors_per_peak"),
        ("window", "window"),
        ("min_dist", "min_distance"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    return config.with_overrides(**overrides) if overrides else config


def _parse_tree_file(path, config: EngineConfig):
    document = Path(path).read_text(encoding="utf-8")
    return parse_tree(
        document,
        active_experts=config.active_experts,
        strict=config.strict_schema,
        max_depth=config.max_depth,
        max_leaves=config.max_leaves,
    )


def cmd_validate(args) -> int:
    config = _config_from_args(args)
    tree = _parse_tree_file(args.tree, config)
    experts = sorted({leaf.expert.value for leaf in tree.leaves})
    print(
        f"valid: depth {tree.depth}, leaves {tree.num_leaves}, "
        f"experts {','.join(experts)}"
    )
    return EXIT_OK


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _write_artifacts(out_dir: Path, artifacts: dict[str, str]) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for name, text in artifacts.items():
            path = out_dir / name
            path.write_text(text, encoding="utf-8")
            written.append(path)
    except BaseException:
        # Never leave a half-written artifact set behind.
        for path in written:
            path.unlink(missing_ok=True)
        raise
    return written


def cmd_select(args) -> int:
    config = _config_from_args(args)
    tree = _parse_tree_file(args.tree, config)
    bundle = loads_bundle(Path(args.bundle).read_text(encoding="utf-8"))
    ovd_source = load_ovd_source(args.ovd) if args.ovd else None

    ingested = 0
    disk_hit = False
    if not args.no_cache:
        key = CacheKey(bundle.video_id, bundle_digest(bundle))
        cached = disk_path(cache_root(), key)
        if cached.is_file():
            disk_hit = True
        else:
            write_through(bundle)
            ingested = 1

    counters = ProviderCounters()
    result = run_pipeline(
        tree,
        bundle,
        args.frames,
        config=config,
        ovd_source=ovd_source,
        counters=counters,
        strategy=args.strategy,
    )
    selection = result.selection

    selection_obj = {
        "video_id": bundle.video_id,
        "budget": args.frames,
        "strategy": selection.strategy,
        "frames": list(selection.frames),
        "phases": [
            {
                "frame": t,
                "phase": selection.phase[t].value,
                "score": selection.scores[i],
            }
            for i, t in enumerate(selection.frames)
        ],
        "peaks": list(selection.peaks),
    }
    curve_obj = {
        "video_id": bundle.video_id,
        "T": bundle.num_frames,
        "values": [float(v) for v in result.curve.values],
    }
    attribution_obj = {
        "video_id": bundle.video_id,
        "frames": list(selection.frames),
        "leaves": [
            {"leaf_id": leaf.leaf_id, "expert": leaf.expert.value, "query": leaf.query}
            for leaf in tree.leaves
        ],
        "matrix": [
            [float(v) for v in row]
            for row in result.attribution.restrict(selection.frames)
        ],
    }
    stats_obj = {
        "video_id": bundle.video_id,
        "providers": counters.snapshot(),
        "cache": {
            "bundle_ingested": ingested,
            "disk_hit": disk_hit,
            "disabled": bool(args.no_cache),
        },
    }

    out_dir = Path(args.out)
    written = _write_artifacts(
        out_dir,
        {
            "selection.json": _dump(selection_obj),
            "curve.json": _dump(curve_obj),
            "attribution.json": _dump(attribution_obj),
            "stats.json": _dump(stats_obj),
        },
    )
    frames_text = ",".join(str(t) for t in selection.frames)
    print(f"selected {len(selection.frames)} frames: {frames_text}")
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_gen(args) -> int:
    scripts = bench_mod.load_scripts(args.scripts)
    if args.seed is not None:
        scripts = [
            bench_mod.EventScript(
                script_id=s.script_id,
                num_frames=s.num_frames,
                events=s.events,
                noise_level=s.noise_level,
                seed=args.seed,
                frame_rate=s.frame_rate,
            )
            for s in scripts
        ]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    from .experts.bundle import dumps_bundle, dumps_ovd

    for script in scripts:
        instance = bench_mod.generate(script)
        (out_dir / f"{script.script_id}.bundle.json").write_text(
            dumps_bundle(instance.bundle), encoding="utf-8"
        )
        if instance.ovd_source is not None:
            (out_dir / f"{script.script_id}.ovd.json").write_text(
                dumps_ovd(instance.ovd_source), encoding="utf-8"
            )
        (out_dir / f"{script.script_id}.tree.json").write_text(
            bench_mod.matched_tree_document(script) + "\n", encoding="utf-8"
        )
        print(f"generated {script.script_id}: T={script.num_frames}, "
              f"events={len(script.events)}")
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _config_from_args(args)
    scripts = bench_mod.load_scripts(args.scripts)
    budgets = tuple(int(b) for b in args.budgets.split(","))
    selectors = tuple(s.strip() for s in args.selectors.split(",") if s.strip())
    for selector in selectors:
        if selector not in STRATEGIES:
            raise ValueError(f"unknown selector {selector!r}")
    report = bench_mod.run_benchmark(
        scripts, selectors=selectors, budgets=budgets, config=config
    )
    bench_mod.save_report(report, args.out)
    for entry in report.entries:
        print(
            f"{entry.selector:>8} K={entry.budget:<3} "
            f"recall={entry.event_recall:.3f} "
            f"relevant={entry.relevant_fraction:.3f}"
        )
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="himu",
        description=(
            "Query-aware frame selection: evaluate a fuzzy temporal-logic "
            "tree over per-frame expert signals and pick a budgeted frame set."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a tree document")
    p_validate.add_argument("--tree", required=True, help="tree JSON path")
    _add_config_flags(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    p_select = sub.add_parser("select", help="run selection on a bundle")
    p_select.add_argument("--tree", required=True, help="tree JSON path")
    p_select.add_argument("--bundle", required=True, help="expert bundle path")
    p_select.add_argument("--ovd", help="detection score source path")
    p_select.add_argument("--frames", type=int, required=True, metavar="K",
                          help="frame budget")
    p_select.add_argument("--strategy", choices=STRATEGIES, default="pass")
    p_select.add_argument("--out", default="himu-out", help="output directory")
    p_select.add_argument("--no-cache", action="store_true",
                          help="skip the on-disk bundle cache")
    _add_config_flags(p_select)
    p_select.set_defaults(func=cmd_select)

    p_gen = sub.add_parser("gen", help="generate synthetic artifacts from scripts")
    p_gen.add_argument("--scripts", required=True, help="event-script JSON path")
    p_gen.add_argument("--out", default="himu-gen", help="output directory")
    p_gen.add_argument("--seed", type=int, help="override every script's seed")
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="run the recall benchmark")
    p_bench.add_argument("--scripts", required=True, help="event-script JSON path")
    p_bench.add_argument("--out", default="report.json", help="report path")
    p_bench.add_argument("--budgets", default="8,16,32,64",
                         help="comma-separated frame budgets")
    p_bench.add_argument("--selectors", default="uniform,topk,pass",
                         help="comma-separated selector names")
    _add_config_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TreeSyntaxError as exc:
        print(f"error [syntax] at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_SYNTAX
    except ArityError as exc:
        print(f"error [arity] at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_ARITY
    except InactiveExpertError as exc:
        print(f"error [inactive-expert] at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_INACTIVE_EXPERT
    except SchemaError as exc:
        print(f"error [schema] at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except TreeError as exc:
        print(f"error [tree] at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except HimuError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
