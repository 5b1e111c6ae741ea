"""Command-line entry point exposing the pipeline stages as subcommands.

Progress goes to stderr as log lines; every subcommand can emit a
machine-readable summary JSON via --summary. Exit status: 0 on success,
1 on stage failure, 2 on usage errors. Log verbosity comes from the
AERIALSYNTH_LOG environment variable (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable

from . import compose as compose_mod
from . import kernels
from .errors import AerialSynthError, ConfigError
from .formats.coco import write_coco_dataset
from .formats.dota import discover_dataset, read_class_list
from .pool import ingest_pool, make_mock_pool
from .records import DatasetIndex
from .report import (
    build_report,
    diff_reports,
    diff_to_dict,
    render_diff_text,
    save_report,
)
from .roi import (
    SamplingConfig,
    extract_crops,
    load_crop_records,
    sample_finetune_set,
    save_crop_records,
    save_manifest,
)
from .seeding import derive_seed
from .stats import LongTailPolicy, compute_class_stats, load_stats, save_stats
from .tiling import TilingConfig, tile_dataset

log = logging.getLogger("aerialsynth")

CROPS_META_NAME = "crops.jsonl"


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--images-dir", default="images", help="images subdirectory name")
    parser.add_argument("--annotations-dir", default="annotations", help="annotations subdirectory name")
    parser.add_argument("--class-list", type=Path, default=None,
                        help="optional file pinning class order, one name per line")


def _discover(args: argparse.Namespace, root: Path) -> DatasetIndex:
    declared = read_class_list(args.class_list) if args.class_list else ()
    return discover_dataset(root, args.images_dir, args.annotations_dir, declared)


def _cmd_tile(args: argparse.Namespace) -> dict[str, Any]:
    cfg = TilingConfig(
        tile_size=args.tile_size,
        overlap=args.overlap,
        visibility_threshold=args.visibility_threshold,
        keep_empty_tiles=args.keep_empty_tiles,
    )
    ds = _discover(args, args.input)
    log.info("tiling %d images from %s", len(ds.images), args.input)
    result = tile_dataset(ds, cfg, args.output, jobs=args.jobs)
    log.info("wrote %d tiles to %s (%d errors)", len(result.index.images), args.output, len(result.errors))
    if args.coco:
        write_coco_dataset(result.index, args.coco)
    return {
        "input_images": len(ds.images),
        "tiles": len(result.index.images),
        "objects": result.index.total_objects,
        "errors": list(result.errors),
        "output": str(args.output),
    }


def _cmd_extract_rois(args: argparse.Namespace) -> dict[str, Any]:
    ds = _discover(args, args.input)
    result = extract_crops(ds, args.margin, args.output)
    meta_path = Path(args.output) / CROPS_META_NAME
    save_crop_records(result.crops, meta_path)
    log.info("extracted %d crops to %s (%d errors)", len(result.crops), args.output, len(result.errors))
    return {
        "crops": len(result.crops),
        "errors": list(result.errors),
        "crops_meta": str(meta_path),
        "output": str(args.output),
    }


def _cmd_sample_finetune(args: argparse.Namespace) -> dict[str, Any]:
    cfg = SamplingConfig(
        strategy=args.strategy, min_size=args.min_size, per_class_cap=args.cap, seed=args.seed
    )
    crops = load_crop_records(args.crops)
    manifest = sample_finetune_set(crops, cfg)
    save_manifest(manifest, args.output)
    per_class: dict[str, int] = {}
    for e in manifest.entries:
        per_class[e.class_name] = per_class.get(e.class_name, 0) + 1
    log.info("sampled %d entries across %d classes", len(manifest.entries), len(per_class))
    for warning in manifest.warnings:
        log.warning("%s", warning)
    return {
        "entries": len(manifest.entries),
        "per_class": per_class,
        "strategy": manifest.strategy,
        "seed": manifest.seed,
        "warnings": list(manifest.warnings),
        "output": str(args.output),
    }


def _cmd_mock_pool(args: argparse.Namespace) -> dict[str, Any]:
    classes = [c for c in args.classes.split(",") if c]
    index = make_mock_pool(classes, args.per_class, args.seed, args.output)
    log.info("mock pool of %d entries at %s", len(index.entries), args.output)
    return {
        "entries": len(index.entries),
        "per_class": index.per_class_counts(),
        "output": str(args.output),
    }


def _cmd_ingest_pool(args: argparse.Namespace) -> dict[str, Any]:
    index = ingest_pool(args.root)
    counts = index.per_class_counts()
    log.info("pool %s: %d entries, %d classes", args.root, len(index.entries), len(counts))
    for warning in index.warnings:
        log.warning("%s", warning)
    return {
        "entries": len(index.entries),
        "per_class": counts,
        "warnings": list(index.warnings),
        "root": str(args.root),
    }


def _cmd_compose(args: argparse.Namespace) -> dict[str, Any]:
    cfg = compose_mod.CompositionConfig(
        instances_per_image=(args.instances_min, args.instances_max),
        max_placement_attempts=args.max_placement_attempts,
        collision_iou_max=args.collision_iou_max,
        class_filter=frozenset(args.class_filter.split(",")) if args.class_filter else None,
        geometry_jitter=args.geometry_jitter,
        background_source=args.background_source,
        seed=args.seed,
    )
    ds = _discover(args, args.backgrounds)
    pool = ingest_pool(args.pool)
    stats = load_stats(args.stats)
    index = compose_mod.generate_synthetic_set(
        ds, pool, stats, cfg, args.count, args.output, jobs=args.jobs
    )
    log.info("composed %d images to %s (kernel backend: %s)", len(index.images), args.output, kernels.BACKEND)
    return {
        "images": len(index.images),
        "objects": index.total_objects,
        "audit_log": str(Path(args.output) / compose_mod.AUDIT_LOG_NAME),
        "output": str(args.output),
        "kernel_backend": kernels.BACKEND,
    }


def _cmd_report(args: argparse.Namespace) -> dict[str, Any]:
    ds = _discover(args, args.input)
    policy = LongTailPolicy(max_images=args.max_images)
    report = build_report(ds, policy, basis=args.basis)
    save_report(report, args.output)
    save_stats(compute_class_stats(ds), Path(args.output) / "stats.json")
    if args.coco:
        write_coco_dataset(ds, args.coco)
    long_tail = [r.class_name for r in report.rows if r.long_tail]
    log.info("report for %s: %d classes, %d long-tail", args.input, len(report.rows), len(long_tail))
    return {
        "classes": len(report.rows),
        "long_tail": long_tail,
        "total_images": report.total_images,
        "total_instances": report.total_instances,
        "output": str(args.output),
    }


DEFAULT_PIPELINE_CONFIG: dict[str, Any] = {
    "dataset_root": None,
    "output_root": None,
    "seed": 0,
    "images_dir": "images",
    "annotations_dir": "annotations",
    "class_list": None,
    "jobs": None,
    "stats_basis": "tiled",
    "tiling": {},
    "roi": {"margin": 10},
    "sampling": {},
    "pool": {"mock_per_class": 20},
    "composition": {},
    "count": 10,
    "report": {"max_images": 200},
}


def _pipeline_settings(args: argparse.Namespace) -> dict[str, Any]:
    settings = json.loads(json.dumps(DEFAULT_PIPELINE_CONFIG))
    if args.config:
        loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        unknown = set(loaded) - set(settings)
        if unknown:
            raise ConfigError(f"unknown pipeline config keys: {sorted(unknown)}")
        for key, value in loaded.items():
            if isinstance(settings.get(key), dict) and isinstance(value, dict):
                settings[key].update(value)
            else:
                settings[key] = value
    if args.dataset_root:
        settings["dataset_root"] = str(args.dataset_root)
    if args.output_root:
        settings["output_root"] = str(args.output_root)
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.count is not None:
        settings["count"] = args.count
    if not settings["dataset_root"] or not settings["output_root"]:
        raise ConfigError("pipeline requires dataset_root and output_root (config key or flag)")
    if settings["stats_basis"] not in ("tiled", "original"):
        raise ConfigError(f"stats_basis must be tiled or original, got {settings['stats_basis']!r}")
    return settings


def _pipeline_plan(settings: dict[str, Any]) -> dict[str, Any]:
    out = Path(settings["output_root"])
    master = int(settings["seed"])
    sampling = dict(settings["sampling"])
    sampling.setdefault("seed", derive_seed(master, "sampling"))
    composition = dict(settings["composition"])
    composition.setdefault("seed", derive_seed(master, "compose"))
    pool_cfg = settings["pool"]
    plan = {
        "dataset_root": str(settings["dataset_root"]),
        "stages": {
            "tile": {"output": str(out / "tiled"), "config": settings["tiling"]},
            "stats": {"basis": settings["stats_basis"]},
            "extract_rois": {"output": str(out / "crops"), "margin": settings["roi"]["margin"]},
            "sample_finetune": {"output": str(out / "manifest.jsonl"), "config": sampling},
            "pool": (
                {"source": "directory", "root": str(pool_cfg["dir"])}
                if "dir" in pool_cfg
                else {
                    "source": "mock",
                    "output": str(out / "pool"),
                    "per_class": pool_cfg.get("mock_per_class", 20),
                    "seed": derive_seed(master, "mock-pool"),
                }
            ),
            "compose": {"output": str(out / "synthetic"), "count": settings["count"], "config": composition},
            "report": {"output": str(out / "report"), "max_images": settings["report"]["max_images"]},
        },
        "seed": master,
        "jobs": settings["jobs"],
    }
    return plan


def _cmd_pipeline(args: argparse.Namespace) -> dict[str, Any]:
    settings = _pipeline_settings(args)
    plan = _pipeline_plan(settings)
    if args.dry_run:
        print(json.dumps(plan, indent=2))
        return {"dry_run": True, "plan": plan}

    jobs = settings["jobs"]
    declared = read_class_list(Path(settings["class_list"])) if settings["class_list"] else ()
    ds = discover_dataset(
        settings["dataset_root"], settings["images_dir"], settings["annotations_dir"], declared
    )
    log.info("pipeline: discovered %d images", len(ds.images))

    stages = plan["stages"]
    tiling_cfg = TilingConfig(**settings["tiling"])
    tiled = tile_dataset(ds, tiling_cfg, stages["tile"]["output"], jobs=jobs)
    log.info("pipeline: tiled to %d tiles", len(tiled.index.images))

    stats_source = tiled.index if settings["stats_basis"] == "tiled" else ds
    stats = compute_class_stats(stats_source)

    extraction = extract_crops(tiled.index, settings["roi"]["margin"], stages["extract_rois"]["output"])
    save_crop_records(extraction.crops, Path(stages["extract_rois"]["output"]) / CROPS_META_NAME)
    log.info("pipeline: extracted %d crops", len(extraction.crops))

    sampling_cfg = SamplingConfig(**stages["sample_finetune"]["config"])
    manifest = sample_finetune_set(list(extraction.crops), sampling_cfg)
    save_manifest(manifest, stages["sample_finetune"]["output"])
    log.info("pipeline: sampled %d manifest entries", len(manifest.entries))

    pool_stage = stages["pool"]
    if pool_stage["source"] == "directory":
        pool = ingest_pool(pool_stage["root"])
    else:
        composition_cfg_preview = compose_mod.CompositionConfig(**stages["compose"]["config"])
        if composition_cfg_preview.class_filter is not None:
            pool_classes = sorted(composition_cfg_preview.class_filter)
        else:
            pool_classes = [n for n, s in stats.items() if s.instance_count > 0]
        pool = make_mock_pool(
            pool_classes, pool_stage["per_class"], pool_stage["seed"], pool_stage["output"]
        )
    log.info("pipeline: pool ready with %d entries", len(pool.entries))

    comp_kwargs = dict(stages["compose"]["config"])
    if comp_kwargs.get("class_filter"):
        comp_kwargs["class_filter"] = frozenset(comp_kwargs["class_filter"])
    if comp_kwargs.get("instances_per_image"):
        comp_kwargs["instances_per_image"] = tuple(comp_kwargs["instances_per_image"])
    composition_cfg = compose_mod.CompositionConfig(**comp_kwargs)
    synthetic = compose_mod.generate_synthetic_set(
        tiled.index, pool, stats, composition_cfg, settings["count"], stages["compose"]["output"], jobs=jobs
    )
    log.info("pipeline: composed %d synthetic images", len(synthetic.images))

    policy = LongTailPolicy(max_images=stages["report"]["max_images"])
    report_dir = Path(stages["report"]["output"])
    tiled_report = build_report(tiled.index, policy, basis="tiled")
    save_report(tiled_report, report_dir, stem="report_tiled")
    save_stats(stats, report_dir / "stats.json")

    augmented = DatasetIndex.build(
        settings["output_root"],
        [*tiled.index.images, *synthetic.images],
        declared_classes=tiled.index.class_names,
    )
    augmented_report = build_report(augmented, policy, basis="augmented")
    save_report(augmented_report, report_dir, stem="report_augmented")

    diff = diff_reports(tiled_report, augmented_report)
    (report_dir / "diff.json").write_text(
        json.dumps(diff_to_dict(diff), indent=2) + "\n", encoding="utf-8"
    )
    (report_dir / "diff.txt").write_text(render_diff_text(diff), encoding="utf-8")

    return {
        "tiles": len(tiled.index.images),
        "crops": len(extraction.crops),
        "manifest_entries": len(manifest.entries),
        "pool_entries": len(pool.entries),
        "synthetic_images": len(synthetic.images),
        "synthetic_objects": synthetic.total_objects,
        "report_dir": str(report_dir),
        "errors": list(tiled.errors) + list(extraction.errors),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aerialsynth",
        description="Synthetic Copy-Paste augmentation pipeline for aerial object detection datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tile = sub.add_parser("tile", help="slice a dataset into overlapping tiles")
    p_tile.add_argument("--input", type=Path, required=True)
    p_tile.add_argument("--output", type=Path, required=True)
    _add_dataset_args(p_tile)
    p_tile.add_argument("--tile-size", type=int, default=512)
    p_tile.add_argument("--overlap", type=int, default=200)
    p_tile.add_argument("--visibility-threshold", type=float, default=0.5)
    p_tile.add_argument("--keep-empty-tiles", action=argparse.BooleanOptionalAction, default=True)
    p_tile.add_argument("--jobs", type=int, default=None)
    p_tile.add_argument("--coco", type=Path, default=None, help="also export COCO JSON here")
    p_tile.set_defaults(func=_cmd_tile)

    p_rois = sub.add_parser("extract-rois", help="crop ground-truth patches with margin")
    p_rois.add_argument("--input", type=Path, required=True)
    p_rois.add_argument("--output", type=Path, required=True)
    _add_dataset_args(p_rois)
    p_rois.add_argument("--margin", type=float, default=10.0)
    p_rois.set_defaults(func=_cmd_extract_rois)

    p_sample = sub.add_parser("sample-finetune", help="assemble the balanced finetune manifest")
    p_sample.add_argument("--crops", type=Path, required=True, help="crops.jsonl from extract-rois")
    p_sample.add_argument("--output", type=Path, required=True, help="manifest JSONL path")
    p_sample.add_argument("--strategy", choices=["uniform_sample", "min_res_control"],
                          default="min_res_control")
    p_sample.add_argument("--min-size", type=int, default=15)
    p_sample.add_argument("--cap", type=int, default=200)
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.set_defaults(func=_cmd_sample_finetune)

    p_mock = sub.add_parser("mock-pool", help="generate a deterministic mock instance pool")
    p_mock.add_argument("--classes", required=True, help="comma-separated class names")
    p_mock.add_argument("--per-class", type=int, required=True)
    p_mock.add_argument("--seed", type=int, default=0)
    p_mock.add_argument("--output", type=Path, required=True)
    p_mock.set_defaults(func=_cmd_mock_pool)

    p_ingest = sub.add_parser("ingest-pool", help="validate and index an instance pool")
    p_ingest.add_argument("--root", type=Path, required=True)
    p_ingest.set_defaults(func=_cmd_ingest_pool)

    p_compose = sub.add_parser("compose", help="paste pool instances onto backgrounds")
    p_compose.add_argument("--backgrounds", type=Path, required=True, help="background dataset root")
    p_compose.add_argument("--pool", type=Path, required=True)
    p_compose.add_argument("--stats", type=Path, required=True, help="stats.json from report")
    p_compose.add_argument("--count", type=int, required=True)
    p_compose.add_argument("--output", type=Path, required=True)
    _add_dataset_args(p_compose)
    p_compose.add_argument("--instances-min", type=int, default=1)
    p_compose.add_argument("--instances-max", type=int, default=5)
    p_compose.add_argument("--max-placement-attempts", type=int, default=50)
    p_compose.add_argument("--collision-iou-max", type=float, default=0.05)
    p_compose.add_argument("--class-filter", default=None, help="comma-separated class names")
    p_compose.add_argument("--geometry-jitter", type=float, default=0.10)
    p_compose.add_argument("--background-source", choices=["negatives_only", "all_tiles"],
                           default="negatives_only")
    p_compose.add_argument("--seed", type=int, default=0)
    p_compose.add_argument("--jobs", type=int, default=None)
    p_compose.set_defaults(func=_cmd_compose)

    p_report = sub.add_parser("report", help="class frequency report, long-tail flags, stats export")
    p_report.add_argument("--input", type=Path, required=True)
    p_report.add_argument("--output", type=Path, required=True, help="directory for report.{json,txt} and stats.json")
    _add_dataset_args(p_report)
    p_report.add_argument("--max-images", type=int, default=200)
    p_report.add_argument("--basis", choices=["original", "tiled", "augmented"], default="original")
    p_report.add_argument("--coco", type=Path, default=None, help="also export COCO JSON here")
    p_report.set_defaults(func=_cmd_report)

    p_pipe = sub.add_parser("pipeline", help="run tile, extract, sample, pool, compose, report")
    p_pipe.add_argument("--config", type=Path, default=None, help="pipeline config JSON")
    p_pipe.add_argument("--dataset-root", type=Path, default=None)
    p_pipe.add_argument("--output-root", type=Path, default=None)
    p_pipe.add_argument("--seed", type=int, default=None)
    p_pipe.add_argument("--count", type=int, default=None)
    p_pipe.add_argument("--dry-run", action="store_true")
    p_pipe.set_defaults(func=_cmd_pipeline)

    for sp in (p_tile, p_rois, p_sample, p_mock, p_ingest, p_compose, p_report, p_pipe):
        sp.add_argument("--summary", type=Path, default=None,
                        help="write a machine-readable run summary JSON here")

    return parser


def _write_summary(path: Path | None, payload: dict[str, Any]) -> None:
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=os.environ.get("AERIALSYNTH_LOG", "INFO").upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    handler: Callable[[argparse.Namespace], dict[str, Any]] = args.func
    started = time.perf_counter()
    try:
        result = handler(args)
    except AerialSynthError as exc:
        log.error("%s", exc)
        if not (args.command == "pipeline" and args.dry_run):
            _write_summary(args.summary, {"command": args.command, "status": "error", "error": str(exc)})
        return 1
    except Exception as exc:  # pragma: no cover - unexpected failure path
        log.exception("unexpected failure: %s", exc)
        return 1
    payload = {
        "command": args.command,
        "status": "ok",
        "elapsed_seconds": round(time.perf_counter() - started, 3),
        **result,
    }
    if not result.get("dry_run"):
        _write_summary(args.summary, payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
