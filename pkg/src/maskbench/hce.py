"""Correction-effort estimation for predicted masks.

The score approximates how many mouse actions a human needs to fix a
prediction: dominant boundary points they would click while re-tracing wrong
boundary stretches, plus whole-region selections for faulty areas that never
touch the relevant background/foreground. Small, epsilon-level errors are
forgiven first by a morphological relaxation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import Polyline, find_contours, rdp
from .morphology import DISK1, _dilate, _erode, _skeleton
from .raster import BinaryMask, ConfusionMaps, GrayMap, binarize, confusion, require_same_size


@dataclass(frozen=True)
class RelaxedMasks:
    """Relaxed false-negative/false-positive regions plus the unrelaxed
    confusion maps and the parameters they were produced with."""

    fn_relaxed: BinaryMask
    fp_relaxed: BinaryMask
    confusion: ConfusionMaps
    gamma: int
    epsilon: float


@dataclass(frozen=True)
class HceReport:
    """Click tally: boundary dominant points and region selections, per side."""

    fn_boundary_points: int
    fn_region_clicks: int
    fp_boundary_points: int
    fp_region_clicks: int
    total: int

    def __post_init__(self):
        parts = (
            self.fn_boundary_points
            + self.fn_region_clicks
            + self.fp_boundary_points
            + self.fp_region_clicks
        )
        if self.total != parts:
            raise ValueError(f"total {self.total} != sum of parts {parts}")

    @classmethod
    def tally(cls, fn_pts: int, fn_regions: int, fp_pts: int, fp_regions: int) -> "HceReport":
        return cls(fn_pts, fn_regions, fp_pts, fp_regions, fn_pts + fn_regions + fp_pts + fp_regions)


def _bbox_window(a: np.ndarray, margin: int) -> tuple[slice, slice]:
    rows = np.flatnonzero(a.any(axis=1))
    cols = np.flatnonzero(a.any(axis=0))
    h, w = a.shape
    r0 = max(0, int(rows[0]) - margin)
    r1 = min(h, int(rows[-1]) + 1 + margin)
    c0 = max(0, int(cols[0]) - margin)
    c1 = min(w, int(cols[-1]) + 1 + margin)
    return slice(r0, r1), slice(c0, c1)


def relax(p: BinaryMask, g: BinaryMask, gamma: int, epsilon: float = 2.0) -> RelaxedMasks:
    """Forgive boundary errors within gamma pixels of a correct explanation.

    The union P|G is eroded gamma times (disk(1)); FN/FP are restricted to the
    eroded core, grown back gamma times while staying inside not-P (resp.
    not-G), and re-clipped to the originals. The ground truth's skeleton,
    minus whatever the prediction already covers, is always reinstated as FN
    so a prediction can never erase thin structure for free.

    gamma = 0 is the identity relaxation: FN' = FN | (skeleton(G) minus TP),
    FP' = FP.
    """
    require_same_size(p, g)
    gamma = int(gamma)
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    conf = confusion(p, g)
    P, G = p.data, g.data
    union = P | G
    fn_full = np.zeros_like(P)
    fp_full = np.zeros_like(P)
    if union.any():
        # all intermediate masks live inside bbox(P|G) grown by gamma, and
        # every operation reads out-of-window pixels as 0, so cropping is
        # exact, not approximate
        win = _bbox_window(union, gamma + 1)
        Pw, Gw = P[win], G[win]
        fn = Gw & ~Pw
        fp = Pw & ~Gw
        core = Pw | Gw
        for _ in range(gamma):
            core = _erode(core, DISK1.offsets)
        fnr = fn & core
        fpr = fp & core
        not_p, not_g = ~Pw, ~Gw
        for _ in range(gamma):
            fnr = _dilate(fnr, DISK1.offsets) & not_p
            fpr = _dilate(fpr, DISK1.offsets) & not_g
        fnr &= fn
        fpr &= fp
        if fn.any():
            # skeleton(G) & ~TP == skeleton XOR (TP & skeleton); empty when
            # FN is empty since the skeleton is a subset of G
            fnr |= _skeleton(Gw) & ~(Pw & Gw)
        fn_full[win] = fnr
        fp_full[win] = fpr
    return RelaxedMasks(
        fn_relaxed=BinaryMask(fn_full),
        fp_relaxed=BinaryMask(fp_full),
        confusion=conf,
        gamma=gamma,
        epsilon=float(epsilon),
    )


def _adjacency(target: np.ndarray, border_counts: bool) -> np.ndarray:
    """adj[y, x] = some 8-neighbor of (y, x) is in target; out-of-canvas
    neighbors count as target iff border_counts."""
    pad = np.pad(target, 1, constant_values=border_counts)
    return (
        pad[:-2, :-2]
        | pad[:-2, 1:-1]
        | pad[:-2, 2:]
        | pad[1:-1, :-2]
        | pad[1:-1, 2:]
        | pad[2:, :-2]
        | pad[2:, 1:-1]
        | pad[2:, 2:]
    )


def _run_points(pts: np.ndarray, flags: np.ndarray, epsilon: float) -> int:
    """Dominant points over maximal circular runs of flagged contour pixels."""
    if not flags.any():
        return 0
    if flags.all():
        loop = Polyline(pts.astype(np.float64), closed=True)
        return len(rdp(loop, epsilon).points)
    # rotate so index 0 is unflagged, making every run non-wrapping
    first_off = int(np.argmin(flags))
    f = np.roll(flags, -first_off)
    pp = np.roll(pts, -first_off, axis=0)
    edges = np.diff(f.astype(np.int8))
    starts = np.flatnonzero(edges == 1) + 1
    ends = np.flatnonzero(edges == -1) + 1
    if f[-1]:
        ends = np.append(ends, len(f))
    total = 0
    for s, e in zip(starts, ends):
        seg = Polyline(pp[s:e].astype(np.float64), closed=False)
        total += len(rdp(seg, epsilon).points)
    return total


def _side_counts(mask: BinaryMask, target: np.ndarray, border_counts: bool, epsilon: float):
    """(boundary_points, region_clicks) for one side of the correction."""
    if not mask.data.any():
        return 0, 0
    adj = _adjacency(target, border_counts)
    by_component: dict[int, list] = {}
    for c in find_contours(mask):
        by_component.setdefault(c.component_id, []).append(c)
    points = 0
    regions = 0
    for cid in sorted(by_component):
        contours = by_component[cid]
        flag_sets = [adj[c.points[:, 0], c.points[:, 1]] for c in contours]
        if not any(f.any() for f in flag_sets):
            regions += 1
            continue
        for c, flags in zip(contours, flag_sets):
            points += _run_points(c.points, flags, epsilon)
    return points, regions


def count_clicks(r: RelaxedMasks) -> HceReport:
    """Count corrective clicks for relaxed FN/FP regions.

    Per 8-connected FN component: contour pixels whose 8-neighborhood touches
    true negatives (canvas border counts as TN) are re-traced via RDP over
    each maximal circular run; a component with no such pixel costs one
    region selection. FP components are scored the same way against true
    positives (canvas border does not count as TP).
    """
    fn_pts, fn_regions = _side_counts(r.fn_relaxed, r.confusion.tn.data, True, r.epsilon)
    fp_pts, fp_regions = _side_counts(r.fp_relaxed, r.confusion.tp.data, False, r.epsilon)
    return HceReport.tally(fn_pts, fn_regions, fp_pts, fp_regions)


def hce(
    p_prob: GrayMap,
    g: BinaryMask,
    gamma: int = 5,
    epsilon: float = 2.0,
    tau: float = 0.5,
) -> HceReport:
    """Human correction effort of a probability map against a truth mask."""
    require_same_size(p_prob, g)
    p = binarize(p_prob, tau)
    return count_clicks(relax(p, g, gamma, epsilon))
