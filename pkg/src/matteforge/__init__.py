"""matteforge: foreground extraction from cluttered images.

Segment at five reduced resolutions, pick the candidate whose foreground
and background are farthest apart (maxmin-cut), refine the upsampled
boundary with closed-form matting, and clean residual fragments with a
final figure-ground pass.
"""

from .bench import (
    BenchConfig,
    DatasetEntry,
    EvalReport,
    f_measure,
    is_cluttered,
    load_manifest,
    run_benchmark,
    save_report,
)
from .errors import (
    DegenerateSegmentation,
    DimensionMismatch,
    ImageTooSmall,
    InvalidBoundingBox,
    InvalidOverride,
    InvalidTarget,
    MatteforgeError,
    NoViableCandidate,
    SolverDidNotConverge,
    TooFewPatches,
)
from .figureground import FgConfig, FgLabeling, classify, mcut_score
from .imaging import (
    BoundingBox,
    band_around_boundary,
    downsample,
    lab_to_rgb,
    load_image,
    load_mask,
    rgb_to_lab,
    save_image_png,
    save_mask_png,
    upsample_mask,
)
from .matting import (
    MattingConfig,
    binarize,
    build_laplacian,
    save_matte_png,
    solve_alpha,
)
from .multires import (
    Candidate,
    CandidateSet,
    generate_candidates,
    override_selection,
    save_candidate_gallery,
    select,
)
from .pipeline import PipelineConfig, PipelineResult, refine_mask, segment_image
from .superpixel import (
    MeanShiftConfig,
    PatchMap,
    PatchStats,
    count_patches_in_roi,
    segment,
)
from .trimap import TRIMAP_BG, TRIMAP_FG, TRIMAP_UNKNOWN, build_trimap, save_trimap_png

__version__ = "0.1.0"

__all__ = [
    "BenchConfig",
    "BoundingBox",
    "Candidate",
    "CandidateSet",
    "DatasetEntry",
    "DegenerateSegmentation",
    "DimensionMismatch",
    "EvalReport",
    "FgConfig",
    "FgLabeling",
    "ImageTooSmall",
    "InvalidBoundingBox",
    "InvalidOverride",
    "InvalidTarget",
    "MatteforgeError",
    "MattingConfig",
    "MeanShiftConfig",
    "NoViableCandidate",
    "PatchMap",
    "PatchStats",
    "PipelineConfig",
    "PipelineResult",
    "SolverDidNotConverge",
    "TooFewPatches",
    "TRIMAP_BG",
    "TRIMAP_FG",
    "TRIMAP_UNKNOWN",
    "band_around_boundary",
    "binarize",
    "build_laplacian",
    "build_trimap",
    "classify",
    "count_patches_in_roi",
    "downsample",
    "f_measure",
    "generate_candidates",
    "is_cluttered",
    "lab_to_rgb",
    "load_image",
    "load_manifest",
    "load_mask",
    "mcut_score",
    "override_selection",
    "refine_mask",
    "rgb_to_lab",
    "run_benchmark",
    "save_candidate_gallery",
    "save_image_png",
    "save_mask_png",
    "save_matte_png",
    "save_report",
    "save_trimap_png",
    "segment",
    "segment_image",
    "select",
    "solve_alpha",
    "upsample_mask",
]
