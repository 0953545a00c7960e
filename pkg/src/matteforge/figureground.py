"""Patch-level foreground/background classification and the m-cut score.

Classification is a deterministic five-step rule:

1. every patch with less than ``seed_outside_fraction`` of its pixels inside
   the bounding box becomes a background seed,
2. each remaining patch gets d_bg = min mean-Lab distance to any seed,
3. the remaining patches split by scalar 2-means on d_bg (centers
   initialized at min and max); the far group is foreground,
4. foreground components (in patch adjacency) touching the image border flip
   to background,
5. foreground components smaller than a fraction of the largest one flip to
   background.

The m-cut score of a labeling is the minimum mean-Lab distance between any
foreground patch and any background patch; higher is better.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateSegmentation, InvalidBoundingBox, TooFewPatches
from .imaging import BoundingBox
from .superpixel import PatchMap, adjacency_pairs, border_patch_ids


@dataclass(frozen=True)
class FgConfig:
    """Knobs for the figure-ground rule."""

    seed_outside_fraction: float = 0.5  # rho: overlap below this seeds background
    min_patches: int = 8
    fragment_area_fraction: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.seed_outside_fraction <= 1.0):
            raise ValueError(f"seed_outside_fraction must be in (0, 1]: {self}")
        if not (0.0 < self.fragment_area_fraction < 1.0):
            raise ValueError(f"fragment_area_fraction must be in (0, 1): {self}")
        if self.min_patches < 1:
            raise ValueError(f"min_patches must be >= 1: {self}")


@dataclass(frozen=True)
class FgLabeling:
    """Per-patch foreground flags plus the derived pixel mask."""

    patch_foreground: np.ndarray  # (count,) bool
    mask: np.ndarray  # (H, W) bool, mask[p] == patch_foreground[labels[p]]

    @property
    def foreground_ids(self) -> np.ndarray:
        return np.flatnonzero(self.patch_foreground)

    @property
    def background_ids(self) -> np.ndarray:
        return np.flatnonzero(~self.patch_foreground)


def _two_means_split(values: np.ndarray) -> np.ndarray:
    """Scalar 2-means, centers seeded at min and max; True = high cluster.

    Zero-spread input degenerates to all-True (no color evidence; err toward
    foreground so matting can still correct).
    """
    lo = float(values.min())
    hi = float(values.max())
    if hi - lo == 0.0:
        return np.ones(values.shape, dtype=bool)
    high = np.abs(values - hi) <= np.abs(values - lo)
    for _ in range(100):
        c_lo = values[~high].mean() if (~high).any() else lo
        c_hi = values[high].mean() if high.any() else hi
        new_high = np.abs(values - c_hi) <= np.abs(values - c_lo)
        if np.array_equal(new_high, high):
            break
        high = new_high
    return high


def _patch_components(fg_ids: set[int], adjacency: set[tuple[int, int]]) -> list[set[int]]:
    """Connected components of the foreground patch set under adjacency."""
    nbrs: dict[int, set[int]] = {i: set() for i in fg_ids}
    for a, b in adjacency:
        if a in fg_ids and b in fg_ids:
            nbrs[a].add(b)
            nbrs[b].add(a)
    seen: set[int] = set()
    comps = []
    for start in sorted(fg_ids):
        if start in seen:
            continue
        stack = [start]
        comp = set()
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(nbrs[v] - comp)
        seen |= comp
        comps.append(comp)
    return comps


def classify_from_seeds(pm: PatchMap, seed: np.ndarray, cfg: FgConfig) -> FgLabeling:
    """Steps 2-5 of the classification rule, given background-seed flags."""
    if not seed.any():
        raise InvalidBoundingBox("cannot classify without background seeds")
    areas = pm.areas()
    means = pm.mean_labs()
    fg = np.zeros(pm.count, dtype=bool)
    rest = np.flatnonzero(~seed)
    if rest.size > 0:
        d_bg = cdist(means[rest], means[seed]).min(axis=1)
        fg[rest] = _two_means_split(d_bg)

    adjacency = adjacency_pairs(pm.labels)
    border = border_patch_ids(pm.labels)

    # components touching the image border go back to background
    fg_ids = set(int(i) for i in np.flatnonzero(fg))
    for comp in _patch_components(fg_ids, adjacency):
        if comp & border:
            for i in comp:
                fg[i] = False

    # small fragments relative to the dominant component go too
    fg_ids = set(int(i) for i in np.flatnonzero(fg))
    comps = _patch_components(fg_ids, adjacency)
    if comps:
        comp_areas = [int(sum(areas[i] for i in comp)) for comp in comps]
        largest = max(comp_areas)
        for comp, area in zip(comps, comp_areas):
            if area < cfg.fragment_area_fraction * largest:
                for i in comp:
                    fg[i] = False

    return FgLabeling(patch_foreground=fg, mask=fg[pm.labels])


def classify(pm: PatchMap, box: BoundingBox, cfg: FgConfig = FgConfig()) -> FgLabeling:
    """Label every patch foreground or background given the bounding box."""
    if pm.count < cfg.min_patches:
        raise TooFewPatches(pm.count, cfg.min_patches)
    box.validate(pm.width, pm.height)
    overlap = pm.bbox_overlaps(box)
    seed = overlap < cfg.seed_outside_fraction
    if not seed.any():
        raise InvalidBoundingBox(
            "no background seeds: box covers every patch beyond the seed fraction"
        )
    return classify_from_seeds(pm, seed, cfg)


def mcut_score(lab: FgLabeling, pm: PatchMap) -> float:
    """Minimum mean-Lab distance between the foreground and background groups."""
    fg_ids = lab.foreground_ids
    bg_ids = lab.background_ids
    if fg_ids.size == 0 or bg_ids.size == 0:
        raise DegenerateSegmentation(
            f"{fg_ids.size} foreground / {bg_ids.size} background patches"
        )
    means = pm.mean_labs()
    return float(cdist(means[fg_ids], means[bg_ids]).min())
