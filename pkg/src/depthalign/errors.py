"""Exception hierarchy. Every class carries a distinct CLI exit code."""


class DepthAlignError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class EmptySparse(DepthAlignError):
    """Global alignment was given no sparse points."""

    exit_code = 3


class AllZeroPrediction(DepthAlignError):
    """Scale-only fallback is undefined when every sampled prediction is zero."""

    exit_code = 4


class DuplicateAnchorPixel(DepthAlignError):
    """Two scale anchors landed on the same pixel."""

    exit_code = 5


class ShapeMismatch(DepthAlignError):
    """Grid dimensions disagree or violate a divisibility requirement."""

    exit_code = 6


class EmptyMask(DepthAlignError):
    """A masked reduction was asked for with zero valid pixels."""

    exit_code = 7


class NonFiniteLoss(DepthAlignError):
    """Training loss became NaN or infinite."""

    exit_code = 8


class ConfigMismatch(DepthAlignError):
    """Two reports being compared were produced under different configs."""

    exit_code = 9


class BadFormat(DepthAlignError):
    """File is not in the expected format."""

    exit_code = 10


class UnsupportedBitDepth(DepthAlignError):
    """Depth PNG is not 16-bit single-channel."""

    exit_code = 11


class ParseError(DepthAlignError):
    """A text record could not be parsed; message carries the line number."""

    exit_code = 12


class NonPositiveDepth(DepthAlignError):
    """A sparse point carries depth <= 0."""

    exit_code = 13


class BadMagic(DepthAlignError):
    """Checkpoint file does not start with the expected magic bytes."""

    exit_code = 14


class VersionMismatch(DepthAlignError):
    """Checkpoint format version is not supported."""

    exit_code = 15


class CorruptDirectory(DepthAlignError):
    """Checkpoint tensor directory is inconsistent with the payload."""

    exit_code = 16


class IoFailure(DepthAlignError):
    """Reading or writing a file failed."""

    exit_code = 17


class EmptyList(DepthAlignError):
    """Aggregation over an empty collection."""

    exit_code = 18
