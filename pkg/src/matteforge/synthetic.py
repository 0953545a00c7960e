"""Seeded synthetic scenes with analytic ground truth.

Two families cover the test and demo needs:

* tile mosaics: high-frequency cluttered textures whose patch count drops
  as the image is reduced (the behavior multi-resolution selection relies on),
* disk scenes: an antialiased red disk over a cluttered mosaic, with the
  disk membership function as exact ground truth and a loosened tight box.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .imaging import BoundingBox, save_image_png, save_mask_png


def tile_mosaic(
    height: int,
    width: int,
    rng: np.random.Generator,
    tile_min: int = 3,
    tile_max: int = 6,
    red_fraction: float = 0.04,
) -> np.ndarray:
    """Cluttered mosaic of small random tiles over a cool palette.

    A low-frequency luminance modulation rides on top of the tiles so that
    heavy reductions still see a handful of coherent regions instead of one
    flat average; occasional warm distractor tiles are sprinkled in.
    """
    fx = rng.uniform(1.2, 2.8)
    fy = rng.uniform(1.2, 2.8)
    p1, p2 = rng.uniform(0, 2 * np.pi, size=2)

    img = np.zeros((height, width, 3), dtype=np.float64)
    y = 0
    while y < height:
        th = int(rng.integers(tile_min, tile_max + 1))
        x = 0
        while x < width:
            tw = int(rng.integers(tile_min, tile_max + 1))
            if rng.random() < red_fraction:
                color = np.array(
                    [rng.uniform(0.55, 0.8), rng.uniform(0.05, 0.2), rng.uniform(0.05, 0.25)]
                )
            else:
                tint = 0.15 * (x / max(1, width - 1))
                color = np.array(
                    [
                        rng.uniform(0.0, 0.25) + tint,
                        rng.uniform(0.2, 0.8),
                        rng.uniform(0.45, 1.0) - tint,
                    ]
                )
            scale = 0.75 + 0.35 * np.sin(2 * np.pi * fx * x / width + p1) * np.cos(
                2 * np.pi * fy * y / height + p2
            )
            img[y : y + th, x : x + tw] = np.clip(color * scale, 0.0, 1.0)
            x += tw
        y += th
    return img


def cluttered_texture(size: int, seed: int) -> np.ndarray:
    """One mosaic image for the multi-resolution trend corpus."""
    rng = np.random.default_rng(seed)
    return tile_mosaic(size, size, rng)


def disk_scene(
    size: int, seed: int, box_looseness: float = 1.2
) -> tuple[np.ndarray, np.ndarray, BoundingBox]:
    """Red disk on a cluttered mosaic; returns (image, ground truth, box).

    The ground truth is the analytic disk membership (distance <= radius);
    the rendered edge is antialiased over one pixel. The box is the ground
    truth's tight box dilated by ``box_looseness``.
    """
    rng = np.random.default_rng(seed)
    img = tile_mosaic(size, size, rng)

    # modest radius and jitter keep even a 1.6x-dilated box well inside the
    # frame, so a background ring always exists at every resolution
    radius = size * rng.uniform(0.17, 0.22)
    cx = size / 2 + rng.uniform(-0.04, 0.04) * size
    cy = size / 2 + rng.uniform(-0.04, 0.04) * size
    disk_color = np.array(
        [rng.uniform(0.75, 0.92), rng.uniform(0.05, 0.18), rng.uniform(0.05, 0.18)]
    )

    ys, xs = np.mgrid[0:size, 0:size]
    dist = np.hypot(xs + 0.0 - cx, ys + 0.0 - cy)
    coverage = np.clip(radius + 0.5 - dist, 0.0, 1.0)
    img = coverage[..., None] * disk_color + (1.0 - coverage[..., None]) * img

    gt = dist <= radius
    box = tight_box(gt).dilate(box_looseness, size, size)
    return img, gt, box


def tight_box(mask: np.ndarray) -> BoundingBox:
    """Smallest box containing every foreground pixel (margin not enforced)."""
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    if rows.size == 0:
        raise ValueError("mask has no foreground")
    return BoundingBox(
        x=int(cols[0]),
        y=int(rows[0]),
        w=int(cols[-1] - cols[0] + 1),
        h=int(rows[-1] - rows[0] + 1),
    )


def patch_grid_image(
    rows: int,
    cols: int,
    cell: int = 4,
    border: int = 2,
) -> tuple[np.ndarray, BoundingBox]:
    """Grid of rows x cols color cells inside a uniform frame.

    Cell colors follow a 4-coloring with period 2 in each direction, so no
    two same-colored cells are 8-adjacent: segmenting with small bandwidths
    yields exactly one patch per cell plus one frame patch. The returned box
    covers exactly the grid, making the in-box patch count rows * cols.
    """
    palette = np.array(
        [
            [0.9, 0.1, 0.1],
            [0.1, 0.8, 0.1],
            [0.1, 0.2, 0.9],
            [0.9, 0.8, 0.1],
        ]
    )
    frame = np.array([0.5, 0.5, 0.5])
    h = rows * cell + 2 * border
    w = cols * cell + 2 * border
    img = np.tile(frame, (h, w, 1))
    for r in range(rows):
        for c in range(cols):
            color = palette[(r % 2) * 2 + (c % 2)]
            y = border + r * cell
            x = border + c * cell
            img[y : y + cell, x : x + cell] = color
    box = BoundingBox(border, border, cols * cell, rows * cell)
    return img, box


def build_disk_corpus(
    out_dir,
    count: int = 10,
    size: int = 200,
    seed: int = 7,
    box_looseness: float = 1.2,
) -> str:
    """Write a disk-scene corpus with a manifest; returns the manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    entries = []
    for i in range(count):
        img, gt, box = disk_scene(size, seed + i, box_looseness)
        img_name = f"disk_{i:02d}.png"
        gt_name = f"disk_{i:02d}_gt.png"
        save_image_png(img, os.path.join(out_dir, img_name))
        save_mask_png(gt, os.path.join(out_dir, gt_name))
        entries.append(
            {
                "image": img_name,
                "gt": gt_name,
                "box": [box.x, box.y, box.w, box.h],
            }
        )
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump({"entries": entries}, fh, indent=2)
    return manifest_path
