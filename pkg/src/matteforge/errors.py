"""Exception types shared across the toolkit."""


class MatteforgeError(Exception):
    """Base class for all toolkit errors.

    ``stage`` is filled in by the pipeline when an error propagates out of a
    named stage, so callers (CLI, HTTP service) can report where it happened.
    """

    stage: str | None = None


class ImageTooSmall(MatteforgeError):
    """Raster is below the minimum size an operation can work on."""


class InvalidTarget(MatteforgeError):
    """Target dimensions are incompatible with the source raster."""


class InvalidBoundingBox(MatteforgeError):
    """Bounding box violates the inside-the-image / margin rules."""


class TooFewPatches(MatteforgeError):
    """Patch map has fewer patches than classification needs."""

    def __init__(self, count: int, required: int):
        super().__init__(f"{count} patches, need at least {required}")
        self.count = count
        self.required = required


class DegenerateSegmentation(MatteforgeError):
    """Labeling has an empty foreground or background side."""


class NoViableCandidate(MatteforgeError):
    """Every resolution candidate was skipped."""


class InvalidOverride(MatteforgeError):
    """Manual selection points at a skipped or unknown candidate."""


class SolverDidNotConverge(MatteforgeError):
    """Iterative solve stopped above the requested residual."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"relative residual {residual:.3e} after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


class DimensionMismatch(MatteforgeError):
    """Two rasters that must share dimensions do not."""
