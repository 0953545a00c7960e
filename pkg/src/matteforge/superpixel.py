"""Mean-shift over-segmentation into color-coherent patches.

The segmentation runs in three deterministic stages:

1. joint spatial-range mean-shift filtering with a flat kernel
   (window = spatial disc of radius h_s intersected with the Lab ball of
   radius h_r around the current estimate),
2. mode clustering: modes within h_s/2 spatially AND h_r/2 in range are
   merged transitively; clusters are then split into 8-connected regions,
3. regions smaller than min_area are absorbed by the adjacent region with
   the nearest mean color, smallest region first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
from numba import njit, prange

from .errors import ImageTooSmall
from .imaging import BoundingBox, rgb_to_lab


@dataclass(frozen=True)
class MeanShiftConfig:
    """Bandwidths and stopping rules for the mean-shift stages."""

    h_s: float = 8.0
    h_r: float = 8.0
    min_area: int = 20
    max_iters: int = 50
    convergence_eps: float = 0.05

    def __post_init__(self):
        if min(self.h_s, self.h_r, self.min_area, self.max_iters, self.convergence_eps) <= 0:
            raise ValueError(f"all mean-shift parameters must be positive: {self}")


@dataclass(frozen=True)
class PatchStats:
    """Per-patch summary used by classification and scoring."""

    id: int
    area: int
    mean_lab: tuple[float, float, float]
    centroid: tuple[float, float]  # (x, y)
    bbox_overlap: float = 0.0


@dataclass(frozen=True)
class PatchMap:
    """Dense patch labeling of an image plus per-patch statistics.

    Patch ids are 0..count-1 in scan order of first occurrence; every patch
    is 8-connected and has at least min_area pixels (except when the whole
    image is a single patch).
    """

    labels: np.ndarray  # (H, W) int32
    patches: list[PatchStats] = field(default_factory=list)

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def count(self) -> int:
        return len(self.patches)

    def areas(self) -> np.ndarray:
        return np.array([p.area for p in self.patches], dtype=np.int64)

    def mean_labs(self) -> np.ndarray:
        return np.array([p.mean_lab for p in self.patches], dtype=np.float64)

    def bbox_overlaps(self, box: BoundingBox) -> np.ndarray:
        """Fraction of each patch's pixels falling inside the box."""
        window = self.labels[box.y : box.y + box.h, box.x : box.x + box.w]
        inside = np.bincount(window.ravel(), minlength=self.count)
        return inside / self.areas()

    def with_bbox_overlap(self, box: BoundingBox) -> "PatchMap":
        """Copy with PatchStats.bbox_overlap filled in for the given box."""
        fracs = self.bbox_overlaps(box)
        patches = [replace(p, bbox_overlap=float(fracs[p.id])) for p in self.patches]
        return PatchMap(self.labels, patches)


@njit(cache=True, nogil=True, parallel=True)
def _filter_modes(lab, h_s, h_r, max_iters, eps):
    """Per-pixel flat-kernel mean-shift in joint (row, col, L, a, b) space."""
    H, W = lab.shape[0], lab.shape[1]
    modes = np.empty((H, W, 5), np.float64)
    hs2 = h_s * h_s
    hr2 = h_r * h_r
    eps2 = eps * eps
    for r in prange(H):
        for c in range(W):
            py = float(r)
            px = float(c)
            mL = lab[r, c, 0]
            ma = lab[r, c, 1]
            mb = lab[r, c, 2]
            for _ in range(max_iters):
                r0 = max(int(np.floor(py - h_s)), 0)
                r1 = min(int(np.ceil(py + h_s)), H - 1)
                c0 = max(int(np.floor(px - h_s)), 0)
                c1 = min(int(np.ceil(px + h_s)), W - 1)
                sy = 0.0
                sx = 0.0
                sL = 0.0
                sa = 0.0
                sb = 0.0
                n = 0
                for rr in range(r0, r1 + 1):
                    dy = rr - py
                    for cc in range(c0, c1 + 1):
                        dx = cc - px
                        if dy * dy + dx * dx > hs2:
                            continue
                        dL = lab[rr, cc, 0] - mL
                        da = lab[rr, cc, 1] - ma
                        db = lab[rr, cc, 2] - mb
                        if dL * dL + da * da + db * db > hr2:
                            continue
                        sy += rr
                        sx += cc
                        sL += lab[rr, cc, 0]
                        sa += lab[rr, cc, 1]
                        sb += lab[rr, cc, 2]
                        n += 1
                if n == 0:
                    break
                ny = sy / n
                nx = sx / n
                nL = sL / n
                na = sa / n
                nb = sb / n
                shift = (
                    (ny - py) ** 2
                    + (nx - px) ** 2
                    + (nL - mL) ** 2
                    + (na - ma) ** 2
                    + (nb - mb) ** 2
                )
                py, px, mL, ma, mb = ny, nx, nL, na, nb
                if shift <= eps2:
                    break
            modes[r, c, 0] = py
            modes[r, c, 1] = px
            modes[r, c, 2] = mL
            modes[r, c, 3] = ma
            modes[r, c, 4] = mb
    return modes


@njit(cache=True, nogil=True)
def _uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def _uf_union(parent, a, b):
    ra = _uf_find(parent, a)
    rb = _uf_find(parent, b)
    if ra < rb:
        parent[rb] = ra
    elif rb < ra:
        parent[ra] = rb


@njit(cache=True, nogil=True)
def _cluster_modes(modes, h_s, h_r):
    """Transitive closure of the mode-merge relation, via spatial buckets."""
    H, W = modes.shape[0], modes.shape[1]
    n = H * W
    flat = modes.reshape(n, 5)
    cell = h_s / 2.0
    thr_s2 = (h_s / 2.0) ** 2
    thr_r2 = (h_r / 2.0) ** 2
    gy = int(H / cell) + 2
    gx = int(W / cell) + 2

    bucket_of = np.empty(n, np.int64)
    counts = np.zeros(gy * gx, np.int64)
    for i in range(n):
        by = int(flat[i, 0] / cell)
        bx = int(flat[i, 1] / cell)
        b = by * gx + bx
        bucket_of[i] = b
        counts[b] += 1
    starts = np.zeros(gy * gx + 1, np.int64)
    for b in range(gy * gx):
        starts[b + 1] = starts[b] + counts[b]
    members = np.empty(n, np.int64)
    fill = starts[:-1].copy()
    for i in range(n):
        b = bucket_of[i]
        members[fill[b]] = i
        fill[b] += 1

    parent = np.arange(n)
    for i in range(n):
        by = bucket_of[i] // gx
        bx = bucket_of[i] % gx
        for dy in range(-1, 2):
            ny = by + dy
            if ny < 0 or ny >= gy:
                continue
            for dx in range(-1, 2):
                nx = bx + dx
                if nx < 0 or nx >= gx:
                    continue
                b = ny * gx + nx
                for s in range(starts[b], starts[b + 1]):
                    j = members[s]
                    if j <= i:
                        continue
                    ds = (flat[i, 0] - flat[j, 0]) ** 2 + (flat[i, 1] - flat[j, 1]) ** 2
                    if ds > thr_s2:
                        continue
                    dr = (
                        (flat[i, 2] - flat[j, 2]) ** 2
                        + (flat[i, 3] - flat[j, 3]) ** 2
                        + (flat[i, 4] - flat[j, 4]) ** 2
                    )
                    if dr > thr_r2:
                        continue
                    _uf_union(parent, i, j)

    clusters = np.empty((H, W), np.int64)
    for r in range(H):
        for c in range(W):
            clusters[r, c] = _uf_find(parent, r * W + c)
    return clusters


@njit(cache=True, nogil=True)
def _split_components(clusters):
    """8-connected components of equal-cluster regions, scan-order ids."""
    H, W = clusters.shape
    n = H * W
    parent = np.arange(n)
    for r in range(H):
        for c in range(W):
            i = r * W + c
            v = clusters[r, c]
            if c + 1 < W and clusters[r, c + 1] == v:
                _uf_union(parent, i, i + 1)
            if r + 1 < H:
                if clusters[r + 1, c] == v:
                    _uf_union(parent, i, i + W)
                if c + 1 < W and clusters[r + 1, c + 1] == v:
                    _uf_union(parent, i, i + W + 1)
                if c - 1 >= 0 and clusters[r + 1, c - 1] == v:
                    _uf_union(parent, i, i + W - 1)
    labels = np.empty((H, W), np.int32)
    remap = np.full(n, -1, np.int64)
    nxt = 0
    for r in range(H):
        for c in range(W):
            root = _uf_find(parent, r * W + c)
            if remap[root] < 0:
                remap[root] = nxt
                nxt += 1
            labels[r, c] = remap[root]
    return labels, nxt


def adjacency_pairs(labels: np.ndarray) -> set[tuple[int, int]]:
    """Unordered pairs of distinct patch ids that touch 8-connectedly."""
    H, W = labels.shape
    stride = int(labels.max()) + 1
    pairs: set[tuple[int, int]] = set()
    for dy, dx in ((0, 1), (1, 0), (1, 1), (1, -1)):
        r0, r1 = max(0, -dy), H - max(0, dy)
        c0, c1 = max(0, -dx), W - max(0, dx)
        a = labels[r0:r1, c0:c1]
        b = labels[r0 + dy : r1 + dy, c0 + dx : c1 + dx]
        diff = a != b
        lo = np.minimum(a[diff], b[diff]).astype(np.int64)
        hi = np.maximum(a[diff], b[diff]).astype(np.int64)
        for key in np.unique(lo * stride + hi):
            pairs.add((int(key // stride), int(key % stride)))
    return pairs


def border_patch_ids(labels: np.ndarray) -> set[int]:
    """Ids of patches owning at least one image-border pixel."""
    edge = np.concatenate(
        [labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]]
    )
    return set(int(v) for v in np.unique(edge))


def _merge_small_regions(
    labels: np.ndarray, lab_img: np.ndarray, count: int, min_area: int
) -> tuple[np.ndarray, int]:
    """Absorb regions below min_area into the neighbor with closest mean Lab.

    Smallest region first (ties by id); adjacency and means update as merges
    proceed, so the rule matches a sequential hand trace.
    """
    import heapq

    flat = labels.ravel()
    areas = np.bincount(flat, minlength=count).astype(np.int64)
    sums = np.zeros((count, 3), dtype=np.float64)
    for ch in range(3):
        sums[:, ch] = np.bincount(flat, weights=lab_img[:, :, ch].ravel(), minlength=count)

    neighbors: list[set[int]] = [set() for _ in range(count)]
    for a, b in adjacency_pairs(labels):
        neighbors[a].add(b)
        neighbors[b].add(a)

    target = np.arange(count)

    def resolve(i: int) -> int:
        while target[i] != i:
            target[i] = target[target[i]]
            i = target[i]
        return int(i)

    heap = [(int(areas[i]), i) for i in range(count) if areas[i] < min_area]
    heapq.heapify(heap)
    while heap:
        a, u = heapq.heappop(heap)
        if resolve(u) != u or areas[u] != a or areas[u] >= min_area:
            continue
        nbrs = sorted({resolve(v) for v in neighbors[u]} - {u})
        if not nbrs:
            break  # single region left; nothing to merge into
        mean_u = sums[u] / areas[u]
        best = min(
            ((float(np.sum((sums[v] / areas[v] - mean_u) ** 2)), v) for v in nbrs)
        )[1]
        areas[best] += areas[u]
        sums[best] += sums[u]
        neighbors[best] |= neighbors[u]
        target[u] = best
        if areas[best] < min_area:
            heapq.heappush(heap, (int(areas[best]), best))

    remap = np.array([resolve(i) for i in range(count)], dtype=np.int64)
    merged = remap[labels]
    # dense relabel in scan order of first occurrence
    _, first_idx, inverse = np.unique(merged, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first_idx))
    dense = order[inverse].astype(np.int32).reshape(labels.shape)
    return dense, int(dense.max()) + 1


def _build_stats(labels: np.ndarray, lab_img: np.ndarray, count: int) -> list[PatchStats]:
    flat = labels.ravel()
    areas = np.bincount(flat, minlength=count)
    sums = np.stack(
        [np.bincount(flat, weights=lab_img[:, :, ch].ravel(), minlength=count) for ch in range(3)],
        axis=1,
    )
    ys, xs = np.mgrid[0 : labels.shape[0], 0 : labels.shape[1]]
    cx = np.bincount(flat, weights=xs.ravel(), minlength=count) / areas
    cy = np.bincount(flat, weights=ys.ravel(), minlength=count) / areas
    means = sums / areas[:, None]
    return [
        PatchStats(
            id=i,
            area=int(areas[i]),
            mean_lab=(float(means[i, 0]), float(means[i, 1]), float(means[i, 2])),
            centroid=(float(cx[i]), float(cy[i])),
        )
        for i in range(count)
    ]


def segment(img: np.ndarray, cfg: MeanShiftConfig = MeanShiftConfig()) -> PatchMap:
    """Over-segment an image into mean-shift patches.

    Deterministic: identical image and config always produce the identical
    PatchMap regardless of thread scheduling.
    """
    if img.shape[0] < 4 or img.shape[1] < 4:
        raise ImageTooSmall(f"segment needs >= 4x4, got {img.shape[1]}x{img.shape[0]}")
    lab = np.ascontiguousarray(rgb_to_lab(img))
    modes = _filter_modes(
        lab, float(cfg.h_s), float(cfg.h_r), int(cfg.max_iters), float(cfg.convergence_eps)
    )
    clusters = _cluster_modes(modes, float(cfg.h_s), float(cfg.h_r))
    labels, count = _split_components(clusters)
    labels, count = _merge_small_regions(labels, lab, count, cfg.min_area)
    return PatchMap(labels, _build_stats(labels, lab, count))


def count_patches_in_roi(pm: PatchMap, box: BoundingBox) -> int:
    """Distinct patch ids with at least one pixel inside the box."""
    box.validate(pm.width, pm.height)
    window = pm.labels[box.y : box.y + box.h, box.x : box.x + box.w]
    return int(np.unique(window).size)


def save_patchmap_debug(pm: PatchMap, png_path, json_path=None, seed: int = 0) -> None:
    """Dump a patch map as a seeded-random-color PNG plus a stats sidecar."""
    from .imaging import save_image_png

    rng = np.random.default_rng(seed)
    palette = rng.uniform(0.1, 1.0, size=(pm.count, 3))
    save_image_png(palette[pm.labels], png_path)
    if json_path is not None:
        payload = [
            {
                "id": p.id,
                "area": p.area,
                "mean_lab": list(p.mean_lab),
                "centroid": list(p.centroid),
                "bbox_overlap": p.bbox_overlap,
            }
            for p in pm.patches
        ]
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=2)
