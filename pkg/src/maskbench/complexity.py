"""Object complexity measures and complexity-ranked dataset splitting.

A mask's difficulty is summarized by the isoperimetric inequality quotient
(IPQ = L^2 / 4*pi*A), its contour count, and its dominant point count after
RDP simplification. Datasets are ranked by IPQ * P_num and split into k
contiguous bins of near-equal size.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

from .contour import _dominant_points, find_contours, perimeter
from .errors import EmptyDataset, InvalidK
from .raster import BinaryMask


@dataclass(frozen=True)
class ComplexityStats:
    """Per-mask complexity record."""

    ipq: float
    c_num: int
    p_num: int
    perimeter_l: float
    area_a: float
    height_h: int
    width_w: int
    diagonal_d: float


@dataclass(frozen=True)
class DatasetStats:
    """Dataset-level mean/sigma summary (population sigma)."""

    i_num: int
    mean_h: float
    std_h: float
    mean_w: float
    std_w: float
    mean_d: float
    std_d: float
    mean_ipq: float
    std_ipq: float
    mean_c: float
    std_c: float
    mean_p: float
    std_p: float


@dataclass(frozen=True)
class SplitPlan:
    """Items in ascending score order plus their contiguous bin assignment."""

    ids: tuple[str, ...]
    scores: tuple[float, ...]
    bins: tuple[tuple[str, ...], ...]


def complexity(g: BinaryMask, epsilon: float = 2.0) -> ComplexityStats:
    """Measure one mask. An empty mask scores 0 everywhere."""
    h, w = g.data.shape
    area = float(g.data.sum())
    if area == 0.0:
        return ComplexityStats(
            ipq=0.0,
            c_num=0,
            p_num=0,
            perimeter_l=0.0,
            area_a=0.0,
            height_h=0,
            width_w=0,
            diagonal_d=0.0,
        )
    contours = find_contours(g)
    length = perimeter(contours)
    ipq = (length * length) / (4.0 * math.pi * area) if area > 0 else 0.0
    p_num = _dominant_points(contours, epsilon)
    return ComplexityStats(
        ipq=ipq,
        c_num=len(contours),
        p_num=p_num,
        perimeter_l=length,
        area_a=area,
        height_h=h,
        width_w=w,
        diagonal_d=math.hypot(h, w),
    )


def _mean_std(values) -> tuple[float, float]:
    # fsum keeps means permutation-invariant bit for bit
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def dataset_stats(records) -> DatasetStats:
    """Aggregate per-mask stats; raises EmptyDataset on an empty sequence."""
    records = list(records)
    if not records:
        raise EmptyDataset("no records to aggregate")
    mh, sh = _mean_std([r.height_h for r in records])
    mw, sw = _mean_std([r.width_w for r in records])
    md, sd = _mean_std([r.diagonal_d for r in records])
    mq, sq = _mean_std([r.ipq for r in records])
    mc, sc = _mean_std([r.c_num for r in records])
    mp, sp = _mean_std([r.p_num for r in records])
    return DatasetStats(len(records), mh, sh, mw, sw, md, sd, mq, sq, mc, sc, mp, sp)


TABLE_COLUMNS = (
    "I_num",
    "H±σ_H",
    "W±σ_W",
    "D±σ_D",
    "IPQ±σ_IPQ",
    "C_num±σ_C",
    "P_num±σ_P",
)


def _table_cells(stats: DatasetStats) -> list[str]:
    pairs = (
        (stats.mean_h, stats.std_h),
        (stats.mean_w, stats.std_w),
        (stats.mean_d, stats.std_d),
        (stats.mean_ipq, stats.std_ipq),
        (stats.mean_c, stats.std_c),
        (stats.mean_p, stats.std_p),
    )
    return [str(stats.i_num)] + [f"{m:.2f} ± {s:.2f}" for m, s in pairs]


def stats_table(stats: DatasetStats, fmt: str = "csv") -> str:
    """Render dataset statistics as a one-row CSV or Markdown table."""
    cells = _table_cells(stats)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TABLE_COLUMNS)
        writer.writerow(cells)
        return buf.getvalue()
    if fmt == "md":
        head = "| " + " | ".join(TABLE_COLUMNS) + " |"
        sep = "|" + "|".join(" --- " for _ in TABLE_COLUMNS) + "|"
        row = "| " + " | ".join(cells) + " |"
        return "\n".join((head, sep, row)) + "\n"
    raise ValueError(f"fmt must be 'csv' or 'md', got {fmt!r}")


def rank_and_split(items, k: int) -> SplitPlan:
    """Sort (id, ComplexityStats) pairs by IPQ * P_num and cut into k bins.

    Ties break on id; earlier bins absorb the remainder when the item count
    is not divisible by k.
    """
    items = list(items)
    k = int(k)
    if not 1 <= k <= len(items):
        raise InvalidK(f"k must be in 1..{len(items)}, got {k}")
    seen = set()
    scored = []
    for item_id, stats in items:
        sid = str(item_id)
        if sid in seen:
            raise ValueError(f"duplicate item id {sid!r}")
        seen.add(sid)
        scored.append((stats.ipq * stats.p_num, sid))
    scored.sort(key=lambda t: (t[0], t[1]))
    ids = tuple(sid for _, sid in scored)
    scores = tuple(score for score, _ in scored)
    base, rem = divmod(len(ids), k)
    bins = []
    at = 0
    for i in range(k):
        size = base + (1 if i < rem else 0)
        bins.append(ids[at : at + size])
        at += size
    return SplitPlan(ids=ids, scores=scores, bins=tuple(bins))
