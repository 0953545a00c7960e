"""Image carriers, color conversion, prefiltered resampling, boundary bands.

Conventions used everywhere in the package:

* an image is a float64 array of shape (H, W, 3) with channels in [0, 1]
* a binary mask is a bool array of shape (H, W), True = foreground
* pixel coordinates are (x, y) = (column, row); arrays index [row, col]
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image as PILImage
from scipy.ndimage import distance_transform_cdt, gaussian_filter, map_coordinates

from .errors import ImageTooSmall, InvalidBoundingBox, InvalidTarget

# sRGB <-> XYZ under D65, plus the CIE Lab transfer constants.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
_D65 = np.array([0.95047, 1.00000, 1.08883])
_LAB_DELTA = 6.0 / 29.0


@dataclass(frozen=True)
class BoundingBox:
    """User rectangle assumed to contain the object, background outside.

    Must sit fully inside the image with at least one row/column of pixels
    strictly outside it on every side.
    """

    x: int
    y: int
    w: int
    h: int

    def validate(self, img_w: int, img_h: int) -> None:
        if self.w < 1 or self.h < 1:
            raise InvalidBoundingBox(f"degenerate box {self}")
        if self.x < 1 or self.y < 1:
            raise InvalidBoundingBox(f"box {self} touches or crosses the top/left edge")
        if self.x + self.w > img_w - 1 or self.y + self.h > img_h - 1:
            raise InvalidBoundingBox(
                f"box {self} leaves no margin inside {img_w}x{img_h}"
            )

    def dilate(self, factor: float, img_w: int, img_h: int) -> "BoundingBox":
        """Scale the box about its center, clamped to keep the 1-pixel margin."""
        cx = self.x + self.w / 2.0
        cy = self.y + self.h / 2.0
        w = max(1, int(round(self.w * factor)))
        h = max(1, int(round(self.h * factor)))
        x = int(round(cx - w / 2.0))
        y = int(round(cy - h / 2.0))
        x = max(1, x)
        y = max(1, y)
        w = min(w, img_w - 1 - x)
        h = min(h, img_h - 1 - y)
        box = BoundingBox(x, y, w, h)
        box.validate(img_w, img_h)
        return box


def validate_image(img: np.ndarray) -> None:
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got shape {img.shape}")
    if img.shape[0] < 1 or img.shape[1] < 1:
        raise ImageTooSmall(f"image shape {img.shape}")


def downsample(img: np.ndarray, k: int) -> np.ndarray:
    """Reduce an image by integer factor k with Gaussian prefiltering.

    Output is ceil(H/k) x ceil(W/k). A Gaussian with sigma = k/2 runs before
    bilinear sampling at stride k so cluttered texture is smoothed rather
    than aliased. k = 1 returns the input unchanged.
    """
    validate_image(img)
    if k < 1:
        raise ValueError(f"factor must be >= 1, got {k}")
    if k == 1:
        return img
    h, w = img.shape[:2]
    out_h = -(-h // k)
    out_w = -(-w // k)
    if out_h < 2 or out_w < 2:
        raise ImageTooSmall(f"{w}x{h} / {k} would be {out_w}x{out_h}")
    sigma = k / 2.0
    blurred = gaussian_filter(img, sigma=(sigma, sigma, 0.0), mode="nearest")
    rows = np.arange(out_h) * k + (k - 1) / 2.0
    cols = np.arange(out_w) * k + (k - 1) / 2.0
    grid_r, grid_c = np.meshgrid(rows, cols, indexing="ij")
    out = np.empty((out_h, out_w, 3), dtype=np.float64)
    for c in range(3):
        out[:, :, c] = map_coordinates(
            blurred[:, :, c], [grid_r, grid_c], order=1, mode="nearest"
        )
    return np.clip(out, 0.0, 1.0)


def upsample_mask(mask: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Expand a binary mask to target size by nearest-neighbor lookup."""
    src_h, src_w = mask.shape
    if target_w < src_w or target_h < src_h:
        raise InvalidTarget(
            f"target {target_w}x{target_h} smaller than source {src_w}x{src_h}"
        )
    if (target_w, target_h) == (src_w, src_h):
        return mask
    rows = np.minimum((np.arange(target_h) + 0.5) * src_h / target_h, src_h - 1).astype(
        np.int64
    )
    cols = np.minimum((np.arange(target_w) + 0.5) * src_w / target_w, src_w - 1).astype(
        np.int64
    )
    return mask[np.ix_(rows, cols)]


def rgb_to_lab(img: np.ndarray) -> np.ndarray:
    """sRGB (D65) to CIE Lab. L in [0, 100]; a, b roughly in [-128, 127]."""
    srgb = np.asarray(img, dtype=np.float64)
    linear = np.where(
        srgb > 0.04045, ((srgb + 0.055) / 1.055) ** 2.4, srgb / 12.92
    )
    xyz = linear @ _RGB_TO_XYZ.T
    t = xyz / _D65
    f = np.where(
        t > _LAB_DELTA**3, np.cbrt(t), t / (3.0 * _LAB_DELTA**2) + 4.0 / 29.0
    )
    lab = np.empty_like(f)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def lab_to_rgb(lab: np.ndarray) -> np.ndarray:
    """Inverse of rgb_to_lab; output clipped to [0, 1]."""
    lab = np.asarray(lab, dtype=np.float64)
    fy = (lab[..., 0] + 16.0) / 116.0
    fx = lab[..., 1] / 500.0 + fy
    fz = fy - lab[..., 2] / 200.0
    f = np.stack([fx, fy, fz], axis=-1)
    t = np.where(f > _LAB_DELTA, f**3, 3.0 * _LAB_DELTA**2 * (f - 4.0 / 29.0))
    xyz = t * _D65
    linear = xyz @ _XYZ_TO_RGB.T
    srgb = np.where(
        linear > 0.0031308, 1.055 * np.maximum(linear, 0.0) ** (1 / 2.4) - 0.055,
        12.92 * linear,
    )
    return np.clip(srgb, 0.0, 1.0)


def band_around_boundary(mask: np.ndarray, r: int) -> np.ndarray:
    """Pixels within Chebyshev distance r of the opposite label.

    Returns a bool array marking the band; uniform masks have no boundary
    and yield an all-False result.
    """
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    fg = mask.astype(bool)
    if fg.all() or not fg.any():
        return np.zeros_like(fg)
    dist_to_fg = distance_transform_cdt(~fg, metric="chessboard")
    dist_to_bg = distance_transform_cdt(fg, metric="chessboard")
    return (fg & (dist_to_bg <= r)) | (~fg & (dist_to_fg <= r))


def load_image(path) -> np.ndarray:
    """Read a PNG/JPEG file into a float (H, W, 3) array in [0, 1]."""
    with PILImage.open(path) as im:
        rgb = im.convert("RGB")
        arr = np.asarray(rgb, dtype=np.float64) / 255.0
    validate_image(arr)
    return arr


def decode_image(data: bytes) -> np.ndarray:
    """Decode in-memory PNG/JPEG bytes; raises ValueError on junk input."""
    import io

    try:
        with PILImage.open(io.BytesIO(data)) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.float64) / 255.0
    except Exception as exc:
        raise ValueError(f"not a decodable image: {exc}") from exc
    validate_image(arr)
    return arr


def save_image_png(img: np.ndarray, path) -> None:
    data = np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)
    PILImage.fromarray(data, mode="RGB").save(path, format="PNG")


def encode_mask_png(mask: np.ndarray) -> bytes:
    import io

    buf = io.BytesIO()
    PILImage.fromarray(mask.astype(np.uint8) * 255, mode="L").save(buf, format="PNG")
    return buf.getvalue()


def save_mask_png(mask: np.ndarray, path) -> None:
    """Write a mask as 8-bit grayscale PNG, foreground=255, background=0."""
    PILImage.fromarray(mask.astype(np.uint8) * 255, mode="L").save(path, format="PNG")


def load_mask(path) -> np.ndarray:
    """Read an 8-bit grayscale mask PNG; values > 127 count as foreground."""
    with PILImage.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return arr > 127
