"""Exception types shared across the toolkit.

Missing files raise the builtin FileNotFoundError; everything else derives
from MaskBenchError so callers can catch toolkit failures in one clause.
"""


class MaskBenchError(Exception):
    """Base class for all toolkit errors."""


class SizeMismatch(MaskBenchError):
    """Two rasters that must share dimensions do not."""


class DecodeError(MaskBenchError):
    """File is not a decodable raster image, or exceeds the dimension limit."""


class UnsupportedBitDepth(MaskBenchError):
    """Image decodes but is not 8-bit grayscale or RGB (alpha allowed)."""


class NegativeEpsilon(MaskBenchError):
    """Simplification tolerance must be >= 0."""


class EmptyGroundTruth(MaskBenchError):
    """Metric undefined for a ground truth with no foreground."""


class EmptyDataset(MaskBenchError):
    """Dataset statistics require at least one record."""


class InvalidK(MaskBenchError):
    """Split count must satisfy 1 <= k <= number of items."""


class EmptyDirectory(MaskBenchError):
    """Directory scan found no image files."""


class _PairingError(MaskBenchError):
    """Base for stem-pairing failures; carries the offending stems."""

    def __init__(self, stems, side):
        self.stems = tuple(stems)
        shown = ", ".join(self.stems[:20])
        more = "" if len(self.stems) <= 20 else f" (+{len(self.stems) - 20} more)"
        super().__init__(f"{len(self.stems)} stem(s) missing a {side}: {shown}{more}")


class MissingPrediction(_PairingError):
    """Ground-truth stems with no matching prediction file."""

    def __init__(self, stems):
        super().__init__(stems, "prediction")


class MissingGroundTruth(_PairingError):
    """Prediction stems with no matching ground-truth file."""

    def __init__(self, stems):
        super().__init__(stems, "ground truth")
