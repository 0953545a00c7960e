"""Multi-resolution candidate generation and maxmin-cut selection.

The image is reduced to 1/2, 1/4, 1/6, 1/8 and 1/10 of its size; each
reduction is segmented and classified independently. A candidate whose
reduction is too small, produces too few patches, or yields a one-sided
labeling is recorded as skipped (score -inf) instead of failing the run.
The winner maximizes the m-cut score; ties go to the finer resolution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    DegenerateSegmentation,
    ImageTooSmall,
    InvalidBoundingBox,
    InvalidOverride,
    NoViableCandidate,
    TooFewPatches,
)
from .figureground import FgConfig, FgLabeling, classify, mcut_score
from .imaging import BoundingBox, downsample
from .superpixel import MeanShiftConfig, PatchMap, segment

DEFAULT_FACTORS = (2, 4, 6, 8, 10)


@dataclass(frozen=True)
class Candidate:
    """One resolution's segmentation attempt."""

    factor: int
    image: np.ndarray | None  # downsampled image, None if reduction failed
    patch_map: PatchMap | None
    box: BoundingBox | None  # box rescaled to this resolution
    patch_count: int
    labeling: FgLabeling | None  # None when skipped
    score: float  # -inf when skipped

    @property
    def skipped(self) -> bool:
        return self.labeling is None


@dataclass(frozen=True)
class CandidateSet:
    """All resolution candidates, ordered by factor, plus the selection."""

    candidates: tuple[Candidate, ...]
    selected_index: int | None = None

    def index_of_factor(self, factor: int) -> int:
        for i, cand in enumerate(self.candidates):
            if cand.factor == factor:
                return i
        raise InvalidOverride(f"no candidate with factor {factor}")

    @property
    def selected(self) -> Candidate:
        if self.selected_index is None:
            raise NoViableCandidate("no candidate selected yet")
        return self.candidates[self.selected_index]


def scale_box(box: BoundingBox, k: int, down_w: int, down_h: int) -> BoundingBox:
    """Map a box to a 1/k reduction: round corners, clamp to keep the margin."""

    def half_up(v: float) -> int:
        return int(np.floor(v + 0.5))

    x1 = half_up(box.x / k)
    y1 = half_up(box.y / k)
    x2 = half_up((box.x + box.w) / k)
    y2 = half_up((box.y + box.h) / k)
    x1 = min(max(x1, 1), down_w - 2)
    y1 = min(max(y1, 1), down_h - 2)
    x2 = min(max(x2, x1 + 1), down_w - 1)
    y2 = min(max(y2, y1 + 1), down_h - 1)
    scaled = BoundingBox(x1, y1, x2 - x1, y2 - y1)
    scaled.validate(down_w, down_h)
    return scaled


def generate_candidates(
    img: np.ndarray,
    box: BoundingBox,
    ms_cfg: MeanShiftConfig = MeanShiftConfig(),
    fg_cfg: FgConfig = FgConfig(),
    factors: tuple[int, ...] = DEFAULT_FACTORS,
) -> CandidateSet:
    """Segment + classify each reduction independently.

    Per-factor failures degrade to skipped candidates; only when every
    factor is skipped does the whole call raise NoViableCandidate.
    """
    box.validate(img.shape[1], img.shape[0])
    results = []
    for k in sorted(factors):
        small = None
        pm = None
        sbox = None
        patch_count = 0
        labeling = None
        score = float("-inf")
        try:
            small = downsample(img, k)
            sbox = scale_box(box, k, small.shape[1], small.shape[0])
            pm = segment(small, ms_cfg)
            patch_count = pm.count
            labeling = classify(pm, sbox, fg_cfg)
            score = mcut_score(labeling, pm)
        except (ImageTooSmall, InvalidBoundingBox, TooFewPatches, DegenerateSegmentation):
            labeling = None
            score = float("-inf")
        results.append(
            Candidate(
                factor=k,
                image=small,
                patch_map=pm,
                box=sbox,
                patch_count=patch_count,
                labeling=labeling,
                score=score,
            )
        )
    cs = CandidateSet(candidates=tuple(results))
    if all(c.skipped for c in cs.candidates):
        raise NoViableCandidate(
            "every resolution skipped; patch counts: "
            + ", ".join(f"1/{c.factor}: {c.patch_count}" for c in cs.candidates)
        )
    return cs


def select(cs: CandidateSet) -> int:
    """Index of the maximal-score candidate; ties go to the smaller factor."""
    best = None
    for i, cand in enumerate(cs.candidates):
        if cand.skipped:
            continue
        if best is None or cand.score > cs.candidates[best].score:
            best = i
    if best is None:
        raise NoViableCandidate("all candidates skipped")
    return best


def override_selection(cs: CandidateSet, i: int) -> CandidateSet:
    """Pin the selection to candidate i (must not be skipped)."""
    if not (0 <= i < len(cs.candidates)):
        raise InvalidOverride(f"index {i} out of range")
    if cs.candidates[i].skipped:
        raise InvalidOverride(
            f"candidate 1/{cs.candidates[i].factor} was skipped "
            f"({cs.candidates[i].patch_count} patches)"
        )
    return replace(cs, selected_index=i)


def save_candidate_gallery(cs: CandidateSet, out_dir) -> None:
    """Write per-candidate mask PNGs and a JSON manifest into a directory."""
    import os

    from .imaging import save_mask_png

    os.makedirs(out_dir, exist_ok=True)
    manifest = []
    for i, cand in enumerate(cs.candidates):
        entry = {
            "factor": cand.factor,
            "patch_count": cand.patch_count,
            "score": None if cand.skipped else cand.score,
            "skipped": cand.skipped,
            "selected": i == cs.selected_index,
        }
        if not cand.skipped:
            name = f"candidate_{cand.factor}.png"
            save_mask_png(cand.labeling.mask, os.path.join(out_dir, name))
            entry["mask"] = name
        manifest.append(entry)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2)
