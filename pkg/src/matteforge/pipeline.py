"""End-to-end orchestration: candidates -> selection -> trimap -> matting ->
binarize -> fragment-removal refinement.

Every intermediate is kept on the result so callers (CLI, HTTP service, UI)
can inspect the candidate gallery, trimap and matte, and so the selection
can be re-run from a manually chosen resolution without recomputing the
candidates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ImageTooSmall, MatteforgeError
from .figureground import FgConfig, classify_from_seeds
from .imaging import BoundingBox, validate_image
from .matting import MattingConfig, binarize, build_laplacian, solve_alpha
from .multires import (
    CandidateSet,
    DEFAULT_FACTORS,
    generate_candidates,
    override_selection,
    select,
)
from .superpixel import MeanShiftConfig, segment
from .trimap import build_trimap


@dataclass(frozen=True)
class PipelineConfig:
    """All stage configurations in one place."""

    mean_shift: MeanShiftConfig = field(default_factory=MeanShiftConfig)
    fg: FgConfig = field(default_factory=FgConfig)
    matting: MattingConfig = field(default_factory=MattingConfig)
    factors: tuple[int, ...] = DEFAULT_FACTORS
    band_scale: float = 1.0


@dataclass(frozen=True)
class PipelineResult:
    """Final mask plus every intermediate and per-stage timings (ms)."""

    final_mask: np.ndarray
    candidates: CandidateSet
    trimap: np.ndarray
    matte: np.ndarray
    pre_refine_mask: np.ndarray
    timings: dict[str, float]


def _staged(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except MatteforgeError as exc:
        exc.stage = stage
        raise


def build_candidates(
    img: np.ndarray,
    box: BoundingBox,
    cfg: PipelineConfig = PipelineConfig(),
    override_factor: int | None = None,
) -> CandidateSet:
    """Candidate generation plus selection, with stage-tagged errors."""
    cs = _staged(
        "candidates", generate_candidates, img, box, cfg.mean_shift, cfg.fg, cfg.factors
    )
    if override_factor is None:
        idx = _staged("selection", select, cs)
    else:
        idx = _staged("selection", cs.index_of_factor, override_factor)
    return _staged("selection", override_selection, cs, idx)


def refine_mask(
    img: np.ndarray,
    matting_mask: np.ndarray,
    box: BoundingBox,
    cfg: PipelineConfig = PipelineConfig(),
) -> np.ndarray:
    """Re-run figure-ground on the full image, seeded by the matting result.

    Patches whose pixel majority lies in matting-background become the
    background seeds; the usual classification steps then remove fragments.
    Best-effort: if the full-resolution image yields too few patches (or no
    usable seed split), the matting mask is returned unchanged.
    """
    try:
        pm = segment(img, cfg.mean_shift)
    except ImageTooSmall:
        return matting_mask
    if pm.count < cfg.fg.min_patches:
        return matting_mask
    bg = ~matting_mask
    bg_inside = np.bincount(pm.labels.ravel(), weights=bg.ravel(), minlength=pm.count)
    bg_fraction = bg_inside / pm.areas()
    seed = bg_fraction > 0.5
    if not seed.any():
        return matting_mask
    labeling = classify_from_seeds(pm, seed, cfg.fg)
    return labeling.mask


def run_matting_stage(
    img: np.ndarray,
    box: BoundingBox,
    cs: CandidateSet,
    cfg: PipelineConfig = PipelineConfig(),
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, dict[str, float]]:
    """Trimap + matting + refinement from an already-selected candidate set.

    Returns (trimap, matte, pre_refine_mask, final_mask, timings). Used both
    by segment_image and by the service's manual-override path, which must
    not recompute candidates.
    """
    h, w = img.shape[:2]
    chosen = cs.selected
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    tri = _staged(
        "trimap", build_trimap, chosen.labeling.mask, w, h, chosen.factor, cfg.band_scale
    )
    timings["trimap"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    L = _staged("matting", build_laplacian, img, cfg.matting)
    matte = _staged("matting", solve_alpha, L, tri, cfg.matting)
    pre_refine = binarize(matte)
    timings["matting"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    refined = _staged("refine", refine_mask, img, pre_refine, box, cfg)
    final = _drop_rejected_fragments(pre_refine, refined, cfg.fg.fragment_area_fraction)
    timings["refine"] = (time.perf_counter() - t0) * 1e3

    return tri, matte, pre_refine, final, timings


def _drop_rejected_fragments(
    pre_refine: np.ndarray, refined: np.ndarray, fragment_fraction: float
) -> np.ndarray:
    """Remove tiny matting components the refine classification votes against.

    The matte stays authoritative for boundary shape; the patch-level pass
    only gets to veto fragments. An 8-connected foreground component of the
    matting mask is dropped iff it is below ``fragment_fraction`` of the
    largest component AND fewer than half its pixels are refined-foreground.
    The result is therefore a subset of the matting foreground.
    """
    from scipy.ndimage import label as cc_label

    comps, n = cc_label(pre_refine, structure=np.ones((3, 3), dtype=int))
    if n == 0:
        return pre_refine.copy()
    votes = np.bincount(comps.ravel(), weights=refined.ravel(), minlength=n + 1)
    sizes = np.bincount(comps.ravel(), minlength=n + 1)
    largest = sizes[1:].max()
    keep = (sizes >= fragment_fraction * largest) | (votes >= 0.5 * sizes)
    keep[0] = False
    return keep[comps]


def segment_image(
    img: np.ndarray,
    box: BoundingBox,
    cfg: PipelineConfig = PipelineConfig(),
    override_factor: int | None = None,
) -> PipelineResult:
    """Run the full extraction pipeline on one image."""
    validate_image(img)
    h, w = img.shape[:2]
    box.validate(w, h)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    cs = _staged(
        "candidates", generate_candidates, img, box, cfg.mean_shift, cfg.fg, cfg.factors
    )
    timings["candidates"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    if override_factor is None:
        idx = _staged("selection", select, cs)
    else:
        idx = _staged("selection", cs.index_of_factor, override_factor)
    cs = _staged("selection", override_selection, cs, idx)
    timings["selection"] = (time.perf_counter() - t0) * 1e3

    tri, matte, pre_refine, final, stage_times = run_matting_stage(img, box, cs, cfg)
    timings.update(stage_times)

    return PipelineResult(
        final_mask=final,
        candidates=cs,
        trimap=tri,
        matte=matte,
        pre_refine_mask=pre_refine,
        timings=timings,
    )
