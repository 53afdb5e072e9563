"""Exception types raised by the sigvernet library.

Everything domain-specific derives from SigverError so callers can catch
one base class at the boundary (the CLI maps these to exit code 3).
Plain OSError is allowed to propagate from file I/O.
"""


class SigverError(Exception):
    """Base class for all sigvernet domain errors."""


# --- raster / PGM ---

class MalformedHeaderError(SigverError):
    """PGM header is not a valid P2/P5 header."""


class UnsupportedMaxvalError(SigverError):
    """PGM maxval is outside the supported 1..255 range."""


class TruncatedPixelDataError(SigverError):
    """PGM body holds fewer (or invalid) pixels than the header promises."""


# --- preprocessing ---

class EmptyImageError(SigverError):
    """Operation needs ink but the raster has none."""


class InsufficientInkError(SigverError):
    """Skew estimation needs at least two ink pixels."""


class BadTargetSizeError(SigverError):
    """Resize target is below the minimum 10x10."""


class IndivisibleDimensionsError(SigverError):
    """Raster dimensions are not divisible by the grid size."""


# --- features / network ---

class LayoutMismatchError(SigverError):
    """Feature vector layout or length does not match the consumer."""


class BadDimsError(SigverError):
    """Network layer dimensions are invalid."""


class EmptyBatchError(SigverError):
    """Training or loss evaluation got an empty batch."""


class NonFiniteLossError(SigverError):
    """Loss became NaN or infinite during training.

    Carries the last finite model and the history up to the failure so a
    caller can salvage the run.
    """

    def __init__(self, message, model=None, history=None):
        super().__init__(message)
        self.model = model
        self.history = history if history is not None else []


# --- model persistence ---

class VersionMismatchError(SigverError):
    """Model file declares a format version this reader does not speak."""


class CorruptModelError(SigverError):
    """Model file is structurally invalid."""


# --- dataset / evaluation ---

class MalformedManifestError(SigverError):
    """Dataset manifest text is invalid."""


class MissingFileError(SigverError):
    """Manifest lists an image file that does not exist."""


class DuplicatePathError(SigverError):
    """Manifest lists the same image file twice."""


class UnknownSignerError(SigverError):
    """Requested signer id is not present in the manifest."""


class InsufficientSamplesError(SigverError):
    """Signer does not have enough samples for the requested split."""


class EmptyTestSetError(SigverError):
    """Evaluation got no test samples."""


class SingleClassTestSetError(SigverError):
    """Evaluation test set lacks one of the two classes."""
