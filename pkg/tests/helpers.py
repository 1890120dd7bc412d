"""Shared fixture builders for the test suite."""
import numpy as np
from PIL import Image

from maskbench.raster import BinaryMask, GrayMap


def mask_from_art(rows) -> BinaryMask:
    """Build a mask from strings; '#' is foreground, anything else is not."""
    return BinaryMask(np.array([[ch == "#" for ch in row] for row in rows], dtype=bool))


def random_mask(rng, shape=(48, 48), density=0.08, grow=2) -> BinaryMask:
    """Random blobby mask, guaranteed to be mixed (some fg, some bg)."""
    h, w = shape
    for _ in range(100):
        seeds = rng.random(shape) < density
        a = seeds.copy()
        for _ in range(grow):
            d = np.zeros_like(a)
            d[1:, :] |= a[:-1, :]
            d[:-1, :] |= a[1:, :]
            d[:, 1:] |= a[:, :-1]
            d[:, :-1] |= a[:, 1:]
            a |= d
        if a.any() and not a.all():
            return BinaryMask(a)
    raise AssertionError("could not build a mixed random mask")


def random_gray(rng, shape=(48, 48)) -> GrayMap:
    return GrayMap(rng.random(shape))


def crisp(m: BinaryMask) -> GrayMap:
    """The mask itself as a 0.0/1.0 gray map."""
    return GrayMap(m.data.astype(np.float64))


def rect_mask(shape, r0, r1, c0, c1) -> BinaryMask:
    a = np.zeros(shape, dtype=bool)
    a[r0:r1, c0:c1] = True
    return BinaryMask(a)


def save_mask_png(path, mask: BinaryMask) -> None:
    Image.fromarray(np.where(mask.data, 255, 0).astype(np.uint8), mode="L").save(path)


def save_gray_png(path, values01) -> None:
    if isinstance(values01, GrayMap):
        values01 = values01.values
    arr = np.asarray(values01, dtype=np.float64)
    Image.fromarray(np.floor(arr * 255.0 + 0.5).astype(np.uint8), mode="L").save(path)


def squares_mask(count, side=20, gap=6) -> BinaryMask:
    """count disjoint squares in a row; IPQ * P_num grows with count."""
    width = count * (side + gap) + gap
    a = np.zeros((side + 2 * gap, width), dtype=bool)
    for i in range(count):
        c0 = gap + i * (side + gap)
        a[gap : gap + side, c0 : c0 + side] = True
    return BinaryMask(a)
