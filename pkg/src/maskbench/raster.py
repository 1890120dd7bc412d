"""Core raster types and pixelwise operations.

Everything downstream works on two value types: BinaryMask (bits) and GrayMap
(floats in [0, 1]), both immutable wrappers around read-only numpy arrays at
the image's native resolution. No resizing happens anywhere in the toolkit.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DecodeError, SizeMismatch, UnsupportedBitDepth

# Dimension guard is ours; PIL's decompression-bomb heuristic would otherwise
# reject large-but-legal masks before we see them.
Image.MAX_IMAGE_PIXELS = None

MAX_DIMENSION = 16384

_ACCEPTED_MODES = {"L", "LA", "RGB", "RGBA"}


@dataclass(frozen=True, order=True)
class Size:
    """Raster dimensions in pixels, height first."""

    height: int
    width: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError(f"size must be at least 1x1, got {self.height}x{self.width}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Fixed-size bit raster; ``data`` is a read-only 2D bool array.

    Equality is cellwise, which makes masks directly usable in assertions.
    """

    data: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.data)
        if a.ndim != 2:
            raise ValueError(f"mask data must be 2D, got shape {a.shape}")
        if a.dtype == np.bool_:
            a = a.copy()
        else:
            if not np.isin(a, (0, 1)).all():
                raise ValueError("mask cells must be 0 or 1")
            a = a.astype(bool)
        Size(*a.shape)
        object.__setattr__(self, "data", _frozen(a))

    @property
    def size(self) -> Size:
        return Size(*self.data.shape)

    def foreground_count(self) -> int:
        return int(self.data.sum())

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.data.shape == other.data.shape and bool((self.data == other.data).all())


@dataclass(frozen=True, eq=False)
class GrayMap:
    """Fixed-size map of reals in [0, 1]; ``values`` is read-only float64."""

    values: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.values, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError(f"gray map values must be 2D, got shape {a.shape}")
        if a.size and (np.isnan(a).any() or a.min() < 0.0 or a.max() > 1.0):
            raise ValueError("gray map values must lie in [0, 1]")
        Size(*a.shape)
        a = a.copy() if a is self.values else a
        object.__setattr__(self, "values", _frozen(a))

    @property
    def size(self) -> Size:
        return Size(*self.values.shape)

    def __eq__(self, other):
        if not isinstance(other, GrayMap):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            (self.values == other.values).all()
        )


@dataclass(frozen=True)
class ConfusionMaps:
    """Pixelwise TP/FP/FN/TN decomposition of a prediction against a truth.

    The four masks partition the canvas: every pixel is in exactly one, and
    tp|fn reconstructs the ground truth while tp|fp reconstructs the
    prediction.
    """

    tp: BinaryMask
    fp: BinaryMask
    fn: BinaryMask
    tn: BinaryMask

    def __post_init__(self):
        sizes = {self.tp.size, self.fp.size, self.fn.size, self.tn.size}
        if len(sizes) != 1:
            raise SizeMismatch(f"confusion maps disagree on size: {sorted(sizes)}")


def require_same_size(a, b) -> None:
    if a.size != b.size:
        raise SizeMismatch(f"operands differ in size: {a.size} vs {b.size}")


def _decode_luma(path) -> np.ndarray:
    """Decode an image file to an 8-bit luma plane (H, W) uint8."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(str(p))
    try:
        with Image.open(p) as im:
            mode = im.mode
            if mode not in _ACCEPTED_MODES:
                raise UnsupportedBitDepth(f"{p}: mode {mode!r} is not 8-bit grayscale/RGB")
            w, h = im.size
            if h > MAX_DIMENSION or w > MAX_DIMENSION:
                raise DecodeError(f"{p}: {h}x{w} exceeds the {MAX_DIMENSION}px limit")
            if h < 1 or w < 1:
                raise DecodeError(f"{p}: degenerate {h}x{w} image")
            im.load()
            arr = np.asarray(im, dtype=np.uint8)
    except (UnsupportedBitDepth, DecodeError):
        raise
    except Exception as exc:
        raise DecodeError(f"{p}: {exc}") from exc
    if arr.ndim == 2:
        return arr
    if mode == "LA":
        return np.ascontiguousarray(arr[:, :, 0])
    # Rec.601 luma, rounded half away from zero; alpha ignored.
    rgb = arr[:, :, :3].astype(np.float64)
    luma = rgb[:, :, 0] * 0.299 + rgb[:, :, 1] * 0.587 + rgb[:, :, 2] * 0.114
    return np.floor(luma + 0.5).astype(np.uint8)


def load_mask(path, threshold: int = 127) -> BinaryMask:
    """Load an image and binarize its luma with a strict > threshold."""
    t = int(threshold)
    if not 0 <= t <= 255:
        raise ValueError(f"threshold must be in 0..255, got {threshold}")
    return BinaryMask(_decode_luma(path) > t)


def load_probmap(path) -> GrayMap:
    """Load an image as a probability map: luma / 255, exactly."""
    return GrayMap(_decode_luma(path).astype(np.float64) / 255.0)


def binarize(p: GrayMap, tau: float) -> BinaryMask:
    """Threshold a gray map at tau (inclusive: value >= tau is foreground)."""
    return BinaryMask(p.values >= tau)


_LOGIC_OPS = {
    "and": np.logical_and,
    "or": np.logical_or,
    "xor": np.logical_xor,
    "diff": lambda a, b: a & ~b,
}


def logic(a: BinaryMask, b: BinaryMask, op: str) -> BinaryMask:
    """Pixelwise boolean combination of two same-size masks."""
    require_same_size(a, b)
    try:
        fn = _LOGIC_OPS[op]
    except KeyError:
        raise ValueError(f"op must be one of {sorted(_LOGIC_OPS)}, got {op!r}") from None
    return BinaryMask(fn(a.data, b.data))


def complement(a: BinaryMask) -> BinaryMask:
    return BinaryMask(~a.data)


def confusion(p: BinaryMask, g: BinaryMask) -> ConfusionMaps:
    """Decompose prediction p against ground truth g into TP/FP/FN/TN."""
    require_same_size(p, g)
    pd, gd = p.data, g.data
    return ConfusionMaps(
        tp=BinaryMask(pd & gd),
        fp=BinaryMask(pd & ~gd),
        fn=BinaryMask(gd & ~pd),
        tn=BinaryMask(~(pd | gd)),
    )
