"""Trimap construction from a reduced-resolution segmentation.

A trimap is a uint8 raster using the same encoding in memory and on disk:
0 = background, 128 = unknown, 255 = foreground. The unknown region is the
Chebyshev band of radius r = band_scale * factor around the upsampled
foreground/background boundary, since one low-resolution pixel spans
``factor`` original pixels of boundary uncertainty.
"""

from __future__ import annotations

import numpy as np
from PIL import Image as PILImage

from .errors import InvalidTarget
from .imaging import band_around_boundary, upsample_mask

TRIMAP_BG = 0
TRIMAP_UNKNOWN = 128
TRIMAP_FG = 255


def build_trimap(
    mask: np.ndarray,
    orig_w: int,
    orig_h: int,
    k: int,
    band_scale: float = 1.0,
) -> np.ndarray:
    """Upsample a reduced binary mask and carve out the unknown band."""
    src_h, src_w = mask.shape
    if src_w != -(-orig_w // k) or src_h != -(-orig_h // k):
        raise InvalidTarget(
            f"mask {src_w}x{src_h} is not the 1/{k} reduction of {orig_w}x{orig_h}"
        )
    full = upsample_mask(mask, orig_w, orig_h)
    r = max(1, int(round(band_scale * k)))
    band = band_around_boundary(full, r)
    tri = np.where(full, TRIMAP_FG, TRIMAP_BG).astype(np.uint8)
    tri[band] = TRIMAP_UNKNOWN
    return tri


def save_trimap_png(tri: np.ndarray, path) -> None:
    PILImage.fromarray(tri, mode="L").save(path, format="PNG")


def encode_trimap_png(tri: np.ndarray) -> bytes:
    import io

    buf = io.BytesIO()
    PILImage.fromarray(tri, mode="L").save(buf, format="PNG")
    return buf.getvalue()
