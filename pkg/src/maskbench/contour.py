"""Contour extraction, perimeter measurement, and polyline simplification.

Contours are closed 8-connected pixel loops on foreground pixels: one outer
loop per 8-connected component, one hole loop per enclosed 4-connected
background region. Loops are rotated to start at their raster-minimal pixel
and listed in raster order, so output never depends on extractor internals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import cv2
import numpy as np

from .errors import NegativeEpsilon
from .morphology import label_components
from .raster import BinaryMask

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Contour:
    """One closed border loop: (row, col) points, its kind, and the id of the
    foreground component it belongs to."""

    points: np.ndarray
    kind: str  # "outer" or "hole"
    component_id: int

    def __post_init__(self):
        a = np.asarray(self.points, dtype=np.int32)
        if a.ndim != 2 or a.shape[1] != 2 or a.shape[0] < 1:
            raise ValueError("contour points must be a non-empty (n, 2) array")
        if self.kind not in ("outer", "hole"):
            raise ValueError(f"kind must be 'outer' or 'hole', got {self.kind!r}")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "points", a)


@dataclass(frozen=True, eq=False)
class Polyline:
    """Ordered (row, col) float points, open or closed."""

    points: np.ndarray
    closed: bool

    def __post_init__(self):
        a = np.asarray(self.points, dtype=np.float64)
        if a.ndim != 2 or a.shape[1] != 2 or a.shape[0] < 1:
            raise ValueError("polyline points must be a non-empty (n, 2) array")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "points", a)


def find_contours(m: BinaryMask) -> list[Contour]:
    """Extract all border loops of a mask in deterministic raster order."""
    if not m.data.any():
        return []
    img = np.ascontiguousarray(m.data, dtype=np.uint8)
    found, hierarchy = cv2.findContours(img, cv2.RETR_CCOMP, cv2.CHAIN_APPROX_NONE)
    if hierarchy is None:
        return []
    hierarchy = hierarchy[0]
    labels = label_components(m, connectivity=8).labels
    w = m.data.shape[1]
    out = []
    for cnt, hier in zip(found, hierarchy):
        pts = cnt[:, 0, ::-1]  # cv2 gives (x, y); flip to (row, col)
        key = pts[:, 0].astype(np.int64) * w + pts[:, 1]
        start = int(np.argmin(key))
        if start:
            pts = np.roll(pts, -start, axis=0)
        kind = "hole" if hier[3] != -1 else "outer"
        cid = int(labels[pts[0, 0], pts[0, 1]])
        out.append(Contour(pts, kind, cid))
    out.sort(
        key=lambda c: (
            int(c.points[0, 0]) * w + int(c.points[0, 1]),
            c.kind != "outer",
            c.component_id,
            len(c.points),
            c.points.tobytes(),
        )
    )
    return out


def _loop_length(pts: np.ndarray) -> float:
    n = len(pts)
    if n < 2:
        return 0.0
    d = np.abs(pts - np.roll(pts, -1, axis=0))
    dy, dx = d[:, 0], d[:, 1]
    diag = int(((dy == 1) & (dx == 1)).sum())
    axial = int(((dy + dx) == 1).sum())
    return axial + diag * _SQRT2


def perimeter(contours, component_id: int | None = None) -> float:
    """Total closed-loop length: axis steps count 1, diagonal steps sqrt(2).

    A single-pixel loop has length 0; a two-pixel loop is walked out and back.
    Restricted to one component when component_id is given.
    """
    total = 0.0
    for c in contours:
        if component_id is None or c.component_id == component_id:
            total += _loop_length(c.points.astype(np.int64))
    return total


def _chord_dist(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance of each point to the segment a-b (to a when a == b).

    Segment distance, not infinite-line distance: the simplification promise
    is that dropped points stay within epsilon of the surviving polyline,
    and a point whose projection falls beyond a chord endpoint can be close
    to the line yet far from the polyline.
    """
    ab = b - a
    norm2 = float(ab[0] * ab[0] + ab[1] * ab[1])
    rel0 = pts[:, 0] - a[0]
    rel1 = pts[:, 1] - a[1]
    if norm2 == 0.0:
        return np.hypot(rel0, rel1)
    t = np.clip((rel0 * ab[0] + rel1 * ab[1]) / norm2, 0.0, 1.0)
    return np.hypot(rel0 - t * ab[0], rel1 - t * ab[1])


def _rdp_keep(pts: np.ndarray, epsilon: float) -> np.ndarray:
    """Keep-mask for an open polyline; endpoints always survive."""
    n = len(pts)
    keep = np.zeros(n, dtype=bool)
    keep[0] = keep[-1] = True
    if n <= 2:
        return keep
    stack = [(0, n - 1)]
    while stack:
        i, j = stack.pop()
        if j - i < 2:
            continue
        d = _chord_dist(pts[i + 1 : j], pts[i], pts[j])
        k = int(np.argmax(d))
        if d[k] > epsilon:
            mid = i + 1 + k
            keep[mid] = True
            stack.append((i, mid))
            stack.append((mid, j))
    return keep


def _dedup_consecutive(pts: np.ndarray, closed: bool) -> np.ndarray:
    if len(pts) < 2:
        return pts
    same = (pts[1:] == pts[:-1]).all(axis=1)
    keep = np.concatenate(([True], ~same))
    pts = pts[keep]
    if closed and len(pts) > 1 and (pts[0] == pts[-1]).all():
        pts = pts[:-1]
    return pts


def rdp(p: Polyline, epsilon: float) -> Polyline:
    """Ramer-Douglas-Peucker simplification.

    Open polylines keep both endpoints and recursively keep the farthest
    point from the current chord whenever its distance exceeds epsilon.
    Closed polylines are anchored at point 0 and the point farthest from it,
    then simplified as two open arcs. Every removed point stays within
    epsilon of the simplified polyline.
    """
    if epsilon < 0:
        raise NegativeEpsilon(f"epsilon must be >= 0, got {epsilon}")
    pts = p.points
    n = len(pts)
    if not p.closed:
        if n <= 2:
            return Polyline(pts, closed=False)
        return Polyline(pts[_rdp_keep(pts, epsilon)], closed=False)
    if n <= 2:
        return Polyline(_dedup_consecutive(pts, closed=True), closed=True)
    d0 = np.hypot(pts[:, 0] - pts[0, 0], pts[:, 1] - pts[0, 1])
    j = int(np.argmax(d0))
    if d0[j] == 0.0:
        return Polyline(pts[:1], closed=True)
    arc1 = pts[: j + 1]
    arc2 = np.concatenate([pts[j:], pts[:1]], axis=0)
    kept1 = arc1[_rdp_keep(arc1, epsilon)]
    kept2 = arc2[_rdp_keep(arc2, epsilon)]
    out = np.concatenate([kept1, kept2[1:-1]], axis=0)
    return Polyline(_dedup_consecutive(out, closed=True), closed=True)


def _dominant_points(contours, epsilon: float) -> int:
    total = 0
    for c in contours:
        simplified = rdp(Polyline(c.points.astype(np.float64), closed=True), epsilon)
        total += len(simplified.points)
    return total


def dominant_point_count(m: BinaryMask, epsilon: float) -> int:
    """Total vertex count after closed-loop RDP over every contour."""
    if epsilon < 0:
        raise NegativeEpsilon(f"epsilon must be >= 0, got {epsilon}")
    return _dominant_points(find_contours(m), epsilon)
