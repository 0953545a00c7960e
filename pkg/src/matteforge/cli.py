"""Command-line entry points: ``matteforge segment`` and ``matteforge bench``.

Configuration merges in order: built-in defaults, then a flat YAML config
file (keys mirror flag names without the leading dashes), then explicit
flags. Exit codes: 0 success, 2 invalid arguments, 3 pipeline failure (the
message names the failing stage).
"""

from __future__ import annotations

import json
import os
import sys

import click
import yaml

from .bench import (
    BenchConfig,
    load_manifest,
    resolve_workers,
    run_benchmark,
    save_report,
)
from .errors import MatteforgeError
from .figureground import FgConfig
from .imaging import BoundingBox, load_image, save_mask_png
from .matting import MattingConfig, save_matte_png
from .multires import save_candidate_gallery
from .pipeline import PipelineConfig, segment_image
from .superpixel import MeanShiftConfig
from .trimap import save_trimap_png

_CONFIG_KEYS = {
    "spatial-bandwidth": float,
    "range-bandwidth": float,
    "min-area": int,
    "max-iters": int,
    "convergence-eps": float,
    "seed-outside-fraction": float,
    "min-patches": int,
    "fragment-fraction": float,
    "matting-window": int,
    "matting-epsilon": float,
    "matting-lambda": float,
    "solver-tol": float,
    "solver-max-iters": int,
    "band-scale": float,
    "factors": str,
}


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise click.UsageError(f"cannot read config file {path}: {exc}")
    if not isinstance(data, dict):
        raise click.UsageError(f"config file {path} must be a flat key/value map")
    unknown = set(data) - set(_CONFIG_KEYS)
    if unknown:
        raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
    return data


def _build_pipeline_config(cfg_file: dict, flags: dict) -> PipelineConfig:
    merged = dict(cfg_file)
    for key, value in flags.items():
        if value is not None:
            merged[key] = value
    try:
        ms = MeanShiftConfig(
            h_s=float(merged.get("spatial-bandwidth", 8.0)),
            h_r=float(merged.get("range-bandwidth", 8.0)),
            min_area=int(merged.get("min-area", 20)),
            max_iters=int(merged.get("max-iters", 50)),
            convergence_eps=float(merged.get("convergence-eps", 0.05)),
        )
        fg = FgConfig(
            seed_outside_fraction=float(merged.get("seed-outside-fraction", 0.5)),
            min_patches=int(merged.get("min-patches", 8)),
            fragment_area_fraction=float(merged.get("fragment-fraction", 0.05)),
        )
        matting = MattingConfig(
            window=int(merged.get("matting-window", 3)),
            epsilon=float(merged.get("matting-epsilon", 1e-5)),
            constraint_weight=float(merged.get("matting-lambda", 100.0)),
            solver_tol=float(merged.get("solver-tol", 1e-6)),
            solver_max_iters=int(merged.get("solver-max-iters", 2000)),
        )
        factors = merged.get("factors", "2,4,6,8,10")
        if isinstance(factors, str):
            factors = tuple(int(v) for v in factors.split(","))
        else:
            factors = tuple(int(v) for v in factors)
        return PipelineConfig(
            mean_shift=ms,
            fg=fg,
            matting=matting,
            factors=factors,
            band_scale=float(merged.get("band-scale", 1.0)),
        )
    except (TypeError, ValueError) as exc:
        raise click.UsageError(f"bad configuration value: {exc}")


def _config_flags(fn):
    for key, caster in reversed(list(_CONFIG_KEYS.items())):
        flag = f"--{key}"
        fn = click.option(flag, key.replace("-", "_"), type=str, default=None,
                          help=f"override config key '{key}'")(fn)
    return fn


def _collect_flag_overrides(kwargs: dict) -> dict:
    flags = {}
    for key in _CONFIG_KEYS:
        value = kwargs.pop(key.replace("-", "_"), None)
        if value is not None:
            flags[key] = value
    return flags


def _parse_bbox(text: str) -> BoundingBox:
    try:
        x, y, w, h = (int(v) for v in text.split(","))
    except ValueError:
        raise click.UsageError(f"--bbox must be X,Y,W,H integers, got {text!r}")
    return BoundingBox(x, y, w, h)


@click.group()
def main():
    """Foreground extraction via multi-resolution segmentation and matting."""


@main.command("segment")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--bbox", required=True, help="object box as X,Y,W,H")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--override-factor", type=int, default=None,
              help="use this resolution factor instead of the m-cut choice")
@click.option("--dump-intermediates", is_flag=True, default=False)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_config_flags
def cmd_segment(input_path, bbox, out_dir, override_factor, dump_intermediates,
                config_path, **kwargs):
    """Extract the object inside --bbox from --input into --out."""
    flags = _collect_flag_overrides(kwargs)
    cfg = _build_pipeline_config(_load_config_file(config_path), flags)
    img = load_image(input_path)
    box = _parse_bbox(bbox)
    try:
        box.validate(img.shape[1], img.shape[0])
    except MatteforgeError as exc:
        raise click.UsageError(f"invalid --bbox: {exc}")

    try:
        result = segment_image(img, box, cfg, override_factor=override_factor)
    except MatteforgeError as exc:
        stage = exc.stage or "pipeline"
        click.echo(f"error in stage '{stage}': {type(exc).__name__}: {exc}", err=True)
        sys.exit(3)

    os.makedirs(out_dir, exist_ok=True)
    save_mask_png(result.final_mask, os.path.join(out_dir, "final_mask.png"))
    if dump_intermediates:
        save_matte_png(result.matte, os.path.join(out_dir, "matte.png"))
        save_trimap_png(result.trimap, os.path.join(out_dir, "trimap.png"))
        save_mask_png(result.pre_refine_mask, os.path.join(out_dir, "pre_refine_mask.png"))
        save_candidate_gallery(result.candidates, os.path.join(out_dir, "candidates"))
    click.echo(
        f"selected 1/{result.candidates.selected.factor}; "
        f"wrote {os.path.join(out_dir, 'final_mask.png')}"
    )


@main.command("bench")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--strategies", default="full,no_refine,single_res",
              help="comma-separated strategy names")
@click.option("--looseness", default="1.0", help="comma-separated box dilation factors")
@click.option("--filter-cluttered", is_flag=True, default=False,
              help="evaluate only entries with > 300 patches in the box")
@click.option("--workers", type=int, default=1)
@click.option("--save-masks", is_flag=True, default=False)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_config_flags
def cmd_bench(manifest_path, out_dir, strategies, looseness, filter_cluttered,
              workers, save_masks, config_path, **kwargs):
    """Evaluate segmentation strategies against a dataset manifest."""
    flags = _collect_flag_overrides(kwargs)
    pipeline_cfg = _build_pipeline_config(_load_config_file(config_path), flags)
    try:
        entries = load_manifest(manifest_path)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise click.UsageError(f"bad manifest {manifest_path}: {exc}")
    try:
        strategy_tuple = tuple(s.strip() for s in strategies.split(",") if s.strip())
        looseness_tuple = tuple(float(v) for v in looseness.split(","))
    except ValueError as exc:
        raise click.UsageError(f"bad flag value: {exc}")

    cfg = BenchConfig(
        pipeline=pipeline_cfg,
        strategies=strategy_tuple,
        looseness=looseness_tuple,
        workers=resolve_workers(workers),
        filter_cluttered=filter_cluttered,
        save_masks_to=os.path.join(out_dir, "masks") if save_masks else None,
    )
    report = run_benchmark(entries, cfg=cfg)
    evaluated = sum(1 for e in report.entries if e.results)
    if filter_cluttered and evaluated == 0:
        click.echo("warning: no entry passed the cluttered filter", err=True)
    json_path, csv_path = save_report(report, out_dir)
    click.echo(f"wrote {json_path} and {csv_path} ({evaluated} entries evaluated)")


if __name__ == "__main__":
    main()
