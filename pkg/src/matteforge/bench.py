"""Dataset ingestion, clutter filtering, F-measure evaluation, reports.

A dataset is a manifest JSON listing image / ground-truth / box per entry;
boxes may be omitted and are then derived from the ground truth's tight box
dilated by a configurable looseness. Strategies share one pipeline run per
(entry, looseness): the full pipeline, the same run without refinement, and
plain single-resolution figure-ground.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionMismatch, MatteforgeError
from .figureground import classify
from .imaging import BoundingBox, load_image, load_mask, save_mask_png
from .pipeline import PipelineConfig, PipelineResult, segment_image
from .superpixel import MeanShiftConfig, count_patches_in_roi, segment
from .synthetic import tight_box

CLUTTER_PATCH_THRESHOLD = 300

STRATEGY_NAMES = ("full", "no_refine", "single_res")


@dataclass(frozen=True)
class DatasetEntry:
    """One evaluation image with ground truth and a bounding box."""

    image_path: str
    gt_path: str
    box: BoundingBox | None = None  # None: derive from ground truth at load


@dataclass(frozen=True)
class BenchConfig:
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    strategies: tuple[str, ...] = STRATEGY_NAMES
    looseness: tuple[float, ...] = (1.0,)
    workers: int = 1
    box_looseness: float = 1.2  # used when an entry carries no box
    filter_cluttered: bool = False
    clutter_threshold: int = CLUTTER_PATCH_THRESHOLD
    save_masks_to: str | None = None


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    looseness: float
    f_measure: float | None
    precision: float | None
    recall: float | None
    selected_factor: int | None
    patch_counts: list[int] | None
    timings_ms: dict[str, float] | None
    error: str | None = None


@dataclass(frozen=True)
class EntryReport:
    image: str
    gt: str
    box: list[int] | None
    cluttered: bool | None
    results: list[StrategyResult] = field(default_factory=list)
    error: str | None = None


@dataclass(frozen=True)
class Aggregate:
    strategy: str
    looseness: float
    mean_f: float
    mean_precision: float
    mean_recall: float
    n: int


@dataclass(frozen=True)
class EvalReport:
    entries: list[EntryReport]
    aggregates: list[Aggregate]
    config: dict


def f_measure(pred: np.ndarray, gt: np.ndarray) -> float:
    """Harmonic mean of foreground precision and recall.

    Both masks empty counts as a perfect 1.0; exactly one empty is 0.0.
    """
    p, r = precision_recall(pred, gt)
    if pred.sum() == 0 and gt.sum() == 0:
        return 1.0
    if p + r == 0.0:
        return 0.0
    return 2.0 * p * r / (p + r)


def precision_recall(pred: np.ndarray, gt: np.ndarray) -> tuple[float, float]:
    if pred.shape != gt.shape:
        raise DimensionMismatch(f"pred {pred.shape} vs gt {gt.shape}")
    inter = float(np.logical_and(pred, gt).sum())
    n_pred = float(pred.sum())
    n_gt = float(gt.sum())
    precision = inter / n_pred if n_pred > 0 else (1.0 if n_gt == 0 else 0.0)
    recall = inter / n_gt if n_gt > 0 else (1.0 if n_pred == 0 else 0.0)
    return precision, recall


def is_cluttered(
    img: np.ndarray,
    box: BoundingBox,
    ms_cfg: MeanShiftConfig = MeanShiftConfig(),
    threshold: int = CLUTTER_PATCH_THRESHOLD,
) -> bool:
    """True iff strictly more than ``threshold`` patches intersect the box."""
    pm = segment(img, ms_cfg)
    return count_patches_in_roi(pm, box) > threshold


class _EntryContext:
    """Caches the expensive shared computations across strategies."""

    def __init__(self, img: np.ndarray, box: BoundingBox, cfg: BenchConfig):
        self.img = img
        self.box = box
        self.cfg = cfg
        self._pipeline: dict[float, PipelineResult] = {}

    def boxed(self, looseness: float) -> BoundingBox:
        if looseness == 1.0:
            return self.box
        return self.box.dilate(looseness, self.img.shape[1], self.img.shape[0])

    def pipeline(self, looseness: float) -> PipelineResult:
        if looseness not in self._pipeline:
            self._pipeline[looseness] = segment_image(
                self.img, self.boxed(looseness), self.cfg.pipeline
            )
        return self._pipeline[looseness]


def _strategy_mask(ctx: _EntryContext, strategy: str, looseness: float):
    """Returns (mask, selected_factor, patch_counts, timings)."""
    if strategy == "full":
        res = ctx.pipeline(looseness)
        counts = [c.patch_count for c in res.candidates.candidates]
        return res.final_mask, res.candidates.selected.factor, counts, res.timings
    if strategy == "no_refine":
        res = ctx.pipeline(looseness)
        counts = [c.patch_count for c in res.candidates.candidates]
        return res.pre_refine_mask, res.candidates.selected.factor, counts, res.timings
    if strategy == "single_res":
        t0 = time.perf_counter()
        pm = segment(ctx.img, ctx.cfg.pipeline.mean_shift)
        labeling = classify(pm, ctx.boxed(looseness), ctx.cfg.pipeline.fg)
        ms = (time.perf_counter() - t0) * 1e3
        return labeling.mask, None, [pm.count], {"single_res": ms}
    raise ValueError(f"unknown strategy {strategy!r}")


def load_manifest(path: str) -> list[DatasetEntry]:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "entries" not in data:
        raise ValueError(f"manifest {path} must be an object with an 'entries' list")
    root = os.path.dirname(os.path.abspath(path))
    entries = []
    for rec in data["entries"]:
        box = None
        if rec.get("box") is not None:
            x, y, w, h = rec["box"]
            box = BoundingBox(int(x), int(y), int(w), int(h))
        entries.append(
            DatasetEntry(
                image_path=os.path.join(root, rec["image"]),
                gt_path=os.path.join(root, rec["gt"]),
                box=box,
            )
        )
    return entries


def import_grabcut_dir(
    images_dir: str,
    gts_dir: str,
    out_manifest: str,
    annotations_dir: str | None = None,
    box_looseness: float = 1.2,
) -> str:
    """Convert a grabcut-style dataset layout into a manifest.

    Images and ground truths pair by file stem. When ``annotations_dir`` is
    given, each entry's box is the tight box of the annotation raster's
    non-background pixels (covers both rectangle and lasso initializations,
    whose marked region contains the object); otherwise the box is derived
    from the ground truth's tight box dilated by ``box_looseness``. The box
    is clamped to the image margin either way.
    """
    from .imaging import load_image as _load_image

    def stems(d):
        return {
            os.path.splitext(f)[0]: os.path.join(d, f)
            for f in sorted(os.listdir(d))
            if os.path.splitext(f)[1].lower() in (".png", ".jpg", ".jpeg", ".bmp")
        }

    images = stems(images_dir)
    gts = stems(gts_dir)
    annotations = stems(annotations_dir) if annotations_dir else {}
    entries = []
    for stem in sorted(images):
        if stem not in gts:
            continue
        img = _load_image(images[stem])
        h, w = img.shape[:2]
        if stem in annotations:
            marked = load_mask(annotations[stem])
            box = tight_box(marked).dilate(1.0, w, h)
        else:
            box = tight_box(load_mask(gts[stem])).dilate(box_looseness, w, h)
        entries.append(
            {
                "image": os.path.relpath(images[stem], os.path.dirname(os.path.abspath(out_manifest))),
                "gt": os.path.relpath(gts[stem], os.path.dirname(os.path.abspath(out_manifest))),
                "box": [box.x, box.y, box.w, box.h],
            }
        )
    with open(out_manifest, "w") as fh:
        json.dump({"entries": entries}, fh, indent=2)
    return out_manifest


def resolve_workers(requested: int) -> int:
    """Apply the MATTEFORGE_THREADS cap to a requested worker count."""
    cap = os.environ.get("MATTEFORGE_THREADS")
    if cap:
        try:
            return max(1, min(requested, int(cap)))
        except ValueError:
            pass
    return max(1, requested)


def _evaluate_entry(entry: DatasetEntry, cfg: BenchConfig) -> EntryReport:
    try:
        img = load_image(entry.image_path)
        gt = load_mask(entry.gt_path)
        if gt.shape != img.shape[:2]:
            raise DimensionMismatch(
                f"ground truth {gt.shape} vs image {img.shape[:2]}"
            )
        box = entry.box
        if box is None:
            box = tight_box(gt).dilate(cfg.box_looseness, img.shape[1], img.shape[0])
        box.validate(img.shape[1], img.shape[0])
    except Exception as exc:
        return EntryReport(
            image=entry.image_path,
            gt=entry.gt_path,
            box=None,
            cluttered=None,
            results=[],
            error=f"{type(exc).__name__}: {exc}",
        )

    cluttered = None
    if cfg.filter_cluttered:
        cluttered = is_cluttered(img, box, cfg.pipeline.mean_shift, cfg.clutter_threshold)
        if not cluttered:
            return EntryReport(
                image=entry.image_path,
                gt=entry.gt_path,
                box=[box.x, box.y, box.w, box.h],
                cluttered=False,
                results=[],
            )

    ctx = _EntryContext(img, box, cfg)
    results = []
    for looseness in cfg.looseness:
        for strategy in cfg.strategies:
            try:
                mask, factor, counts, timings = _strategy_mask(ctx, strategy, looseness)
                p, r = precision_recall(mask, gt)
                f = f_measure(mask, gt)
                if cfg.save_masks_to:
                    stem = os.path.splitext(os.path.basename(entry.image_path))[0]
                    os.makedirs(cfg.save_masks_to, exist_ok=True)
                    save_mask_png(
                        mask,
                        os.path.join(
                            cfg.save_masks_to, f"{stem}_{strategy}_{looseness}.png"
                        ),
                    )
                results.append(
                    StrategyResult(
                        strategy=strategy,
                        looseness=looseness,
                        f_measure=f,
                        precision=p,
                        recall=r,
                        selected_factor=factor,
                        patch_counts=counts,
                        timings_ms=timings,
                    )
                )
            except (MatteforgeError, ValueError) as exc:
                results.append(
                    StrategyResult(
                        strategy=strategy,
                        looseness=looseness,
                        f_measure=None,
                        precision=None,
                        recall=None,
                        selected_factor=None,
                        patch_counts=None,
                        timings_ms=None,
                        error=f"{type(exc).__name__}: {exc}",
                    )
                )
    return EntryReport(
        image=entry.image_path,
        gt=entry.gt_path,
        box=[box.x, box.y, box.w, box.h],
        cluttered=cluttered,
        results=results,
    )


def run_benchmark(
    entries: list[DatasetEntry],
    strategies: tuple[str, ...] | None = None,
    cfg: BenchConfig = BenchConfig(),
) -> EvalReport:
    """Evaluate every strategy on every entry; failures stay per-entry."""
    if strategies is not None:
        cfg = replace(cfg, strategies=tuple(strategies))
    workers = resolve_workers(cfg.workers)
    if workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda e: _evaluate_entry(e, cfg), entries))
    else:
        reports = [_evaluate_entry(e, cfg) for e in entries]

    aggregates = []
    for looseness in cfg.looseness:
        for strategy in cfg.strategies:
            fs, ps, rs = [], [], []
            for rep in reports:
                for res in rep.results:
                    if (
                        res.strategy == strategy
                        and res.looseness == looseness
                        and res.error is None
                    ):
                        fs.append(res.f_measure)
                        ps.append(res.precision)
                        rs.append(res.recall)
            if fs:
                aggregates.append(
                    Aggregate(
                        strategy=strategy,
                        looseness=looseness,
                        mean_f=float(np.mean(fs)),
                        mean_precision=float(np.mean(ps)),
                        mean_recall=float(np.mean(rs)),
                        n=len(fs),
                    )
                )
    return EvalReport(entries=reports, aggregates=aggregates, config=_config_dict(cfg))


def _config_dict(cfg: BenchConfig) -> dict:
    p = cfg.pipeline
    return {
        "strategies": list(cfg.strategies),
        "looseness": list(cfg.looseness),
        "workers": cfg.workers,
        "box_looseness": cfg.box_looseness,
        "filter_cluttered": cfg.filter_cluttered,
        "clutter_threshold": cfg.clutter_threshold,
        "mean_shift": vars(p.mean_shift).copy(),
        "fg": vars(p.fg).copy(),
        "matting": vars(p.matting).copy(),
        "factors": list(p.factors),
        "band_scale": p.band_scale,
    }


def report_to_dict(report: EvalReport) -> dict:
    return {
        "config": report.config,
        "aggregates": [vars(a).copy() for a in report.aggregates],
        "entries": [
            {
                "image": e.image,
                "gt": e.gt,
                "box": e.box,
                "cluttered": e.cluttered,
                "error": e.error,
                "results": [
                    {
                        "strategy": r.strategy,
                        "looseness": r.looseness,
                        "f_measure": r.f_measure,
                        "precision": r.precision,
                        "recall": r.recall,
                        "selected_factor": r.selected_factor,
                        "patch_counts": r.patch_counts,
                        "timings_ms": r.timings_ms,
                        "error": r.error,
                    }
                    for r in e.results
                ],
            }
            for e in report.entries
        ],
    }


def save_report(report: EvalReport, out_dir, timings: bool = True) -> tuple[str, str]:
    """Write report.json and report.csv; returns both paths."""
    os.makedirs(out_dir, exist_ok=True)
    payload = report_to_dict(report)
    if not timings:
        for entry in payload["entries"]:
            for res in entry["results"]:
                res.pop("timings_ms", None)
    json_path = os.path.join(out_dir, "report.json")
    with open(json_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["image", "strategy", "looseness", "f_measure", "precision", "recall",
             "selected_factor", "error"]
        )
        for entry in report.entries:
            if entry.error:
                writer.writerow([entry.image, "", "", "", "", "", "", entry.error])
                continue
            for r in entry.results:
                writer.writerow(
                    [
                        entry.image,
                        r.strategy,
                        r.looseness,
                        "" if r.f_measure is None else f"{r.f_measure:.6f}",
                        "" if r.precision is None else f"{r.precision:.6f}",
                        "" if r.recall is None else f"{r.recall:.6f}",
                        "" if r.selected_factor is None else r.selected_factor,
                        r.error or "",
                    ]
                )
    return json_path, csv_path
