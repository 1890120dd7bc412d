"""Binary morphology and raster topology.

Erosion/dilation treat out-of-bounds pixels as background. Skeletonization is
a two-subfield parallel thinning followed by a sequential cleanup pass that
removes every remaining pixel whose deletion keeps local 8-connectivity
intact, so the result is thin by construction and preserves both component
and hole counts.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import BinaryMask, Size


@dataclass(frozen=True)
class StructuringElement:
    """Neighborhood as (dy, dx) offsets; contains the origin, symmetric."""

    offsets: tuple[tuple[int, int], ...]

    def __post_init__(self):
        offs = tuple(sorted({(int(dy), int(dx)) for dy, dx in self.offsets}))
        if (0, 0) not in offs:
            raise ValueError("structuring element must contain the origin")
        if any((-dy, -dx) not in offs for dy, dx in offs):
            raise ValueError("structuring element must be symmetric under negation")
        object.__setattr__(self, "offsets", offs)

    @classmethod
    def disk(cls, radius: int) -> "StructuringElement":
        r = int(radius)
        if r < 0:
            raise ValueError("radius must be >= 0")
        return cls(
            tuple(
                (dy, dx)
                for dy in range(-r, r + 1)
                for dx in range(-r, r + 1)
                if dy * dy + dx * dx <= r * r
            )
        )

    @classmethod
    def square(cls, side: int) -> "StructuringElement":
        s = int(side)
        if s < 1 or s % 2 == 0:
            raise ValueError("side must be odd and >= 1")
        h = s // 2
        return cls(tuple((dy, dx) for dy in range(-h, h + 1) for dx in range(-h, h + 1)))


DISK1 = StructuringElement.disk(1)
SQUARE3 = StructuringElement.square(3)


@dataclass(frozen=True)
class LabelMap:
    """Connected-component labels: 0 background, 1..count in raster order of
    each component's first pixel."""

    labels: np.ndarray
    count: int

    def __post_init__(self):
        a = np.asarray(self.labels, dtype=np.int32)
        Size(*a.shape)
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "labels", a)

    @property
    def size(self) -> Size:
        return Size(*self.labels.shape)


def _shifted(a: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """out[y, x] = a[y + dy, x + dx], out-of-bounds reads as False."""
    h, w = a.shape
    out = np.zeros_like(a)
    y0, y1 = max(0, -dy), min(h, h - dy)
    x0, x1 = max(0, -dx), min(w, w - dx)
    if y0 < y1 and x0 < x1:
        out[y0:y1, x0:x1] = a[y0 + dy : y1 + dy, x0 + dx : x1 + dx]
    return out


def _erode(a: np.ndarray, offsets) -> np.ndarray:
    out = None
    for dy, dx in offsets:
        t = a if (dy == 0 and dx == 0) else _shifted(a, dy, dx)
        if out is None:
            out = t.copy() if t is a else t
        else:
            out &= t
    return out


def _dilate(a: np.ndarray, offsets) -> np.ndarray:
    out = None
    for dy, dx in offsets:
        t = a if (dy == 0 and dx == 0) else _shifted(a, dy, dx)
        if out is None:
            out = t.copy() if t is a else t
        else:
            out |= t
    return out


def erode(m: BinaryMask, se: StructuringElement = DISK1) -> BinaryMask:
    """Keep pixels whose whole (in-bounds) neighborhood is foreground."""
    return BinaryMask(_erode(m.data, se.offsets))


def dilate(m: BinaryMask, se: StructuringElement = DISK1) -> BinaryMask:
    """Grow the foreground by the structuring element."""
    return BinaryMask(_dilate(m.data, se.offsets))


def _neighbors(p: np.ndarray):
    """The 8 neighbor planes of the core of a 1-padded array.

    Order: x1=E, x2=NE, x3=N, x4=NW, x5=W, x6=SW, x7=S, x8=SE.
    """
    return (
        p[1:-1, 2:],
        p[:-2, 2:],
        p[:-2, 1:-1],
        p[:-2, :-2],
        p[1:-1, :-2],
        p[2:, :-2],
        p[2:, 1:-1],
        p[2:, 2:],
    )


def _thin_phase(pad: np.ndarray, second: bool) -> bool:
    """One parallel deletion phase on a 1-padded bool image, in place."""
    x1, x2, x3, x4, x5, x6, x7, x8 = _neighbors(pad)
    core = pad[1:-1, 1:-1]
    # Yokoi 8-connectivity number == 1
    xh = (
        (~x1 & (x2 | x3)).astype(np.uint8)
        + (~x3 & (x4 | x5))
        + (~x5 & (x6 | x7))
        + (~x7 & (x8 | x1))
    )
    n1 = (x1 | x2).astype(np.uint8) + (x3 | x4) + (x5 | x6) + (x7 | x8)
    n2 = (x2 | x3).astype(np.uint8) + (x4 | x5) + (x6 | x7) + (x8 | x1)
    nmin = np.minimum(n1, n2)
    if second:
        g3 = ~((x6 | x7 | ~x4) & x5)
    else:
        g3 = ~((x2 | x3 | ~x8) & x1)
    kill = core & (xh == 1) & (nmin >= 2) & (nmin <= 3) & g3
    if not kill.any():
        return False
    core[kill] = False
    return True


# Yokoi number lookup for a single pixel, indexed by the 8-neighbor bit code
# (bit k-1 = xk in the order above). Used by the sequential cleanup.
def _build_yokoi_tables():
    xh = np.zeros(256, np.uint8)
    bcnt = np.zeros(256, np.uint8)
    for code in range(256):
        x = [(code >> k) & 1 for k in range(8)]  # x[0]=x1 .. x[7]=x8
        s = 0
        for i in (0, 2, 4, 6):
            if not x[i] and (x[(i + 1) % 8] or x[(i + 2) % 8]):
                s += 1
        xh[code] = s
        bcnt[code] = sum(x)
    return xh, bcnt


_YOKOI, _NCOUNT = _build_yokoi_tables()


def _neighbor_code(pad: np.ndarray, y: int, x: int) -> int:
    """Bit code of the 8 neighbors of padded position (y, x)."""
    return (
        int(pad[y, x + 1])
        | int(pad[y - 1, x + 1]) << 1
        | int(pad[y - 1, x]) << 2
        | int(pad[y - 1, x - 1]) << 3
        | int(pad[y, x - 1]) << 4
        | int(pad[y + 1, x - 1]) << 5
        | int(pad[y + 1, x]) << 6
        | int(pad[y + 1, x + 1]) << 7
    )


def _cleanup(pad: np.ndarray) -> None:
    """Sequentially delete pixels that are 8-simple and not endpoints.

    Raster order, repeated until stable. A pixel is removed when its Yokoi
    8-connectivity number is 1 and it has at least two foreground neighbors;
    such deletions preserve component and hole counts one at a time.
    """
    while True:
        x1, x2, x3, x4, x5, x6, x7, x8 = _neighbors(pad)
        code = (
            x1.astype(np.uint8)
            | x2.astype(np.uint8) << 1
            | x3.astype(np.uint8) << 2
            | x4.astype(np.uint8) << 3
            | x5.astype(np.uint8) << 4
            | x6.astype(np.uint8) << 5
            | x7.astype(np.uint8) << 6
            | x8.astype(np.uint8) << 7
        )
        cand = pad[1:-1, 1:-1] & (_YOKOI[code] == 1) & (_NCOUNT[code] >= 2)
        if not cand.any():
            return
        deleted = False
        for cy, cx in np.argwhere(cand):
            y, x = cy + 1, cx + 1
            c = _neighbor_code(pad, y, x)
            if _YOKOI[c] == 1 and _NCOUNT[c] >= 2:
                pad[y, x] = False
                deleted = True
        if not deleted:
            return


def _skeleton(a: np.ndarray) -> np.ndarray:
    if not a.any():
        return np.zeros_like(a)
    rows = np.flatnonzero(a.any(axis=1))
    cols = np.flatnonzero(a.any(axis=0))
    r0, r1 = int(rows[0]), int(rows[-1]) + 1
    c0, c1 = int(cols[0]), int(cols[-1]) + 1
    pad = np.zeros((r1 - r0 + 2, c1 - c0 + 2), dtype=bool)
    pad[1:-1, 1:-1] = a[r0:r1, c0:c1]
    while True:
        changed = _thin_phase(pad, second=False)
        changed |= _thin_phase(pad, second=True)
        if not changed:
            break
    _cleanup(pad)
    out = np.zeros_like(a)
    out[r0:r1, c0:c1] = pad[1:-1, 1:-1]
    return out


def skeletonize(m: BinaryMask) -> BinaryMask:
    """Thin a mask to 1-pixel width, preserving 8-connectivity structure."""
    return BinaryMask(_skeleton(m.data))


_STRUCT = {
    4: np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool),
    8: np.ones((3, 3), dtype=bool),
}


def label_components(m: BinaryMask, connectivity: int = 8) -> LabelMap:
    """Label connected components, numbered by raster order of first pixel."""
    if connectivity not in _STRUCT:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    raw, n = ndimage.label(m.data, structure=_STRUCT[connectivity])
    if n == 0:
        return LabelMap(np.zeros(m.data.shape, np.int32), 0)
    # renumber by first occurrence so the numbering never depends on the
    # labeling library's internals
    flat = raw.ravel()
    values, first = np.unique(flat, return_index=True)
    nz = values != 0
    order = np.argsort(first[nz], kind="stable")
    remap = np.zeros(n + 1, dtype=np.int32)
    remap[values[nz][order]] = np.arange(1, n + 1, dtype=np.int32)
    return LabelMap(remap[raw], int(n))
