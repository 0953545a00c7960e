"""Closed-form matting: Laplacian assembly, constrained solve, binarization.

The matting cost penalizes, per 3x3 window, the residual of alpha against an
affine function of color plus a ridge penalty on the affine coefficients.
Eliminating the per-window coefficients leaves a quadratic form in alpha
whose matrix (the matting Laplacian) has the window-wise entries

    delta_ij - (1/9) * (1 + (I_i - mu)^T (Sigma + (eps/9) Id)^(-1) (I_j - mu))

with mu, Sigma the mean and biased covariance of the window's colors.
Trimap labels enter as soft constraints with weight ``constraint_weight``;
the resulting SPD system is solved by Jacobi-preconditioned conjugate
gradients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse
from numpy.lib.stride_tricks import as_strided
from scipy.sparse.linalg import LinearOperator, cg

from .errors import ImageTooSmall, SolverDidNotConverge
from .trimap import TRIMAP_FG, TRIMAP_UNKNOWN


@dataclass(frozen=True)
class MattingConfig:
    """Window, regularization, constraint and solver settings."""

    window: int = 3  # window side length; 3 keeps rows below 25 nonzeros
    epsilon: float = 1e-5
    constraint_weight: float = 100.0  # lambda on known-pixel constraints
    solver_tol: float = 1e-6
    solver_max_iters: int = 2000

    def __post_init__(self):
        if self.epsilon <= 0 or self.constraint_weight <= 0:
            raise ValueError(f"epsilon and constraint_weight must be positive: {self}")
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window side must be odd and >= 3: {self}")


def build_laplacian(
    img: np.ndarray, cfg: MattingConfig = MattingConfig()
) -> scipy.sparse.csr_matrix:
    """Assemble the sparse matting Laplacian over all interior windows."""
    h, w = img.shape[:2]
    side = cfg.window
    if h < side or w < side:
        raise ImageTooSmall(f"matting needs >= {side}x{side}, got {w}x{h}")
    win = side * side
    idx = np.arange(h * w).reshape(h, w)
    shape = (h - side + 1, w - side + 1, side, side)
    strides = (idx.strides[0], idx.strides[1]) + idx.strides
    win_idx = as_strided(idx, shape=shape, strides=strides).reshape(-1, win)

    colors = img.reshape(h * w, 3)
    win_colors = colors[win_idx]  # (m, win, 3)
    mu = win_colors.mean(axis=1, keepdims=True)
    cov = (
        np.einsum("mji,mjk->mik", win_colors, win_colors) / win
        - np.einsum("mji,mjk->mik", mu, mu)
    )
    inv = np.linalg.inv(cov + (cfg.epsilon / win) * np.eye(3))
    centered = win_colors - mu
    quad = np.einsum("mij,mjk,mlk->mil", centered, inv, centered)
    vals = np.eye(win) - (1.0 + quad) / win

    rows = np.repeat(win_idx, win).ravel()
    cols = np.tile(win_idx, win).ravel()
    coo = scipy.sparse.coo_matrix((vals.ravel(), (rows, cols)), shape=(h * w, h * w))
    L = coo.tocsr()
    # a + b == b + a bitwise, so this enforces exact symmetry
    return ((L + L.T) * 0.5).tocsr()


def solve_alpha_unclamped(
    L: scipy.sparse.csr_matrix,
    tri: np.ndarray,
    cfg: MattingConfig = MattingConfig(),
) -> np.ndarray:
    """Solve (L + lambda*D) alpha = lambda*d without the final clamp.

    D marks known (non-unknown) pixels, d carries 1 on known foreground.
    Degenerate trimaps (no foreground, or no background) short-circuit to
    the constant matte.
    """
    h, w = tri.shape
    is_fg = tri == TRIMAP_FG
    is_known = tri != TRIMAP_UNKNOWN
    if not is_fg.any():
        return np.zeros((h, w), dtype=np.float64)
    if not (is_known & ~is_fg).any():
        return np.ones((h, w), dtype=np.float64)

    lam = cfg.constraint_weight
    A = (L + scipy.sparse.diags(lam * is_known.ravel().astype(np.float64))).tocsr()
    b = lam * is_fg.ravel().astype(np.float64)

    diag = A.diagonal()
    diag = np.where(diag > 1e-12, diag, 1.0)
    M = LinearOperator(A.shape, matvec=lambda x: x / diag)

    x, info = cg(A, b, rtol=cfg.solver_tol, atol=0.0, maxiter=cfg.solver_max_iters, M=M)
    if info != 0:
        residual = float(np.linalg.norm(b - A @ x) / np.linalg.norm(b))
        raise SolverDidNotConverge(residual, cfg.solver_max_iters)
    return x.reshape(h, w)


def solve_alpha(
    L: scipy.sparse.csr_matrix,
    tri: np.ndarray,
    cfg: MattingConfig = MattingConfig(),
) -> np.ndarray:
    """Constrained matte solve, clamped to [0, 1]."""
    return np.clip(solve_alpha_unclamped(L, tri, cfg), 0.0, 1.0)


def binarize(matte: np.ndarray) -> np.ndarray:
    """Threshold a matte at 0.5; exactly 0.5 counts as foreground."""
    return matte >= 0.5


def save_matte_png(matte: np.ndarray, path) -> None:
    """Write a matte as 8-bit grayscale PNG, round(alpha * 255)."""
    from PIL import Image as PILImage

    data = np.clip(np.rint(matte * 255.0), 0, 255).astype(np.uint8)
    PILImage.fromarray(data, mode="L").save(path, format="PNG")


def encode_matte_png(matte: np.ndarray) -> bytes:
    import io

    from PIL import Image as PILImage

    buf = io.BytesIO()
    data = np.clip(np.rint(matte * 255.0), 0, 255).astype(np.uint8)
    PILImage.fromarray(data, mode="L").save(buf, format="PNG")
    return buf.getvalue()
