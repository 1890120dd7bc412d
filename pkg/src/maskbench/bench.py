"""Batch evaluation harness.

Scans prediction/ground-truth trees (or ingests a JSON manifest), evaluates
every pair with the full metric battery plus correction effort and GT
complexity, aggregates means per subset and per group, and renders reports.

Reports are deterministic: records are collected in id order, aggregate sums
use math.fsum, and per-record wall times are kept out of the rendered
output, so the same inputs produce byte-identical bytes for any worker
count.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from csv import writer as _csv_writer
from dataclasses import dataclass
from io import StringIO
from pathlib import Path, PurePosixPath

from .complexity import ComplexityStats, complexity, rank_and_split, SplitPlan
from .errors import EmptyDirectory, MissingGroundTruth, MissingPrediction
from .hce import HceReport
from .metrics import MetricScores, evaluate_pair
from .raster import load_mask, load_probmap

SCHEMA_VERSION = 1

_IMAGE_EXTS = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"}

_FORMATS = ("json", "csv", "md")

# markdown row labels, one per metric, arrows giving the better direction
_MD_ROWS = (
    ("maxFβ↑", "max_f", "%.4f"),
    ("F^w_β↑", "weighted_f", "%.4f"),
    ("M↓", "mae", "%.4f"),
    ("S_α↑", "s_measure", "%.4f"),
    ("E^m_φ↑", "e_measure_mean", "%.4f"),
    ("HCE_γ↓", "hce", "%.2f"),
)


@dataclass(frozen=True)
class ManifestEntry:
    """One prediction/ground-truth pair, optionally tagged for aggregation."""

    id: str
    pred_path: str
    gt_path: str
    group: str | None = None
    subset: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("entry id must be non-empty")
        if not self.pred_path or not self.gt_path:
            raise ValueError(f"entry {self.id!r} has an empty path")


@dataclass(frozen=True)
class Manifest:
    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        seen = set()
        for e in self.entries:
            if e.id in seen:
                raise ValueError(f"duplicate manifest id {e.id!r}")
            seen.add(e.id)

    def __len__(self):
        return len(self.entries)


@dataclass(frozen=True)
class BenchConfig:
    gamma: int = 5
    epsilon: float = 2.0
    tau: float = 0.5
    beta_sq: float = 0.3
    workers: int = 1


@dataclass(frozen=True)
class EvalRecord:
    """Outcome for one pair: either the three result blocks or an error."""

    id: str
    group: str | None
    subset: str | None
    scores: MetricScores | None
    hce: HceReport | None
    complexity: ComplexityStats | None
    wall_time_ms: float
    error: str | None = None

    def __post_init__(self):
        if self.wall_time_ms < 0:
            raise ValueError("wall_time_ms must be >= 0")
        have_all = (
            self.scores is not None and self.hce is not None and self.complexity is not None
        )
        have_none = self.scores is None and self.hce is None and self.complexity is None
        if self.error is None:
            if not have_all:
                raise ValueError(f"record {self.id!r} lacks results but carries no error")
        elif not have_none:
            raise ValueError(f"record {self.id!r} carries both results and an error")


@dataclass(frozen=True)
class MeanScores:
    """Image-weighted arithmetic means over a set of evaluated records."""

    count: int
    max_f: float
    weighted_f: float
    mae: float
    s_measure: float
    e_measure_mean: float
    hce: float


@dataclass(frozen=True)
class AggregateReport:
    total: int
    evaluated: int
    failed: int
    overall: MeanScores | None
    subsets: dict[str, MeanScores]
    groups: dict[str, MeanScores]


def _scan_images(root) -> dict[str, Path]:
    """Map posix relative stem -> file path for every image under root."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    found: dict[str, Path] = {}
    for path in sorted(root.rglob("*")):
        if not (path.is_file() and path.suffix.lower() in _IMAGE_EXTS):
            continue
        stem = str(PurePosixPath(path.relative_to(root).with_suffix("")))
        if stem in found:
            raise ValueError(
                f"stem {stem!r} is ambiguous under {root}: "
                f"{found[stem].name} vs {path.name}"
            )
        found[stem] = path
    if not found:
        raise EmptyDirectory(f"no image files under {root}")
    return found


def scan_and_pair(pred_dir, gt_dir) -> Manifest:
    """Pair predictions with ground truths by relative filename stem.

    Stems present on only one side are an error, reported all at once. A
    first-level subdirectory name becomes the entry's group.
    """
    preds = _scan_images(pred_dir)
    gts = _scan_images(gt_dir)
    only_gt = sorted(set(gts) - set(preds))
    if only_gt:
        raise MissingPrediction(only_gt)
    only_pred = sorted(set(preds) - set(gts))
    if only_pred:
        raise MissingGroundTruth(only_pred)
    entries = []
    for stem in sorted(gts):
        group = stem.split("/", 1)[0] if "/" in stem else None
        entries.append(
            ManifestEntry(
                id=stem,
                pred_path=str(preds[stem]),
                gt_path=str(gts[stem]),
                group=group,
            )
        )
    return Manifest(tuple(entries))


def load_manifest(path) -> Manifest:
    """Read a JSON manifest: {"entries": [{id, pred, gt, group?, subset?}]}."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or not isinstance(doc.get("entries"), list):
        raise ValueError(f"{path}: manifest must be an object with an 'entries' list")
    entries = []
    for i, raw in enumerate(doc["entries"]):
        if not isinstance(raw, dict) or "id" not in raw or "pred" not in raw or "gt" not in raw:
            raise ValueError(f"{path}: entry {i} needs 'id', 'pred' and 'gt'")
        group = raw.get("group")
        subset = raw.get("subset")
        entries.append(
            ManifestEntry(
                id=str(raw["id"]),
                pred_path=str(raw["pred"]),
                gt_path=str(raw["gt"]),
                group=None if group is None else str(group),
                subset=None if subset is None else str(subset),
            )
        )
    return Manifest(tuple(entries))


def _eval_entry(entry: ManifestEntry, config: BenchConfig) -> EvalRecord:
    """Evaluate one pair; any per-pair failure becomes an error record."""
    t0 = time.perf_counter()
    try:
        g = load_mask(entry.gt_path)
        p = load_probmap(entry.pred_path)
        stats = complexity(g, epsilon=config.epsilon)
        scores, clicks = evaluate_pair(
            p,
            g,
            gamma=config.gamma,
            epsilon=config.epsilon,
            tau=config.tau,
            beta_sq=config.beta_sq,
        )
        err = None
    except Exception as exc:
        stats = scores = clicks = None
        err = f"{type(exc).__name__}: {exc}"
    ms = (time.perf_counter() - t0) * 1000.0
    return EvalRecord(
        id=entry.id,
        group=entry.group,
        subset=entry.subset,
        scores=scores,
        hce=clicks,
        complexity=stats,
        wall_time_ms=ms,
        error=err,
    )


def _means(records) -> MeanScores:
    n = len(records)
    return MeanScores(
        count=n,
        max_f=math.fsum(r.scores.max_f for r in records) / n,
        weighted_f=math.fsum(r.scores.weighted_f for r in records) / n,
        mae=math.fsum(r.scores.mae for r in records) / n,
        s_measure=math.fsum(r.scores.s_measure for r in records) / n,
        e_measure_mean=math.fsum(r.scores.e_measure_mean for r in records) / n,
        hce=math.fsum(r.hce.total for r in records) / n,
    )


def _bucket_means(records, attr: str) -> dict[str, MeanScores]:
    """Means keyed by a tag attribute; empty when no record is tagged."""
    if not records or all(getattr(r, attr) is None for r in records):
        return {}
    buckets: dict[str, list] = {}
    for r in records:
        name = getattr(r, attr)
        buckets.setdefault("(unassigned)" if name is None else name, []).append(r)
    return {name: _means(buckets[name]) for name in sorted(buckets)}


def aggregate(records) -> AggregateReport:
    recs = sorted(records, key=lambda r: r.id)
    ok = [r for r in recs if r.error is None]
    return AggregateReport(
        total=len(recs),
        evaluated=len(ok),
        failed=len(recs) - len(ok),
        overall=_means(ok) if ok else None,
        subsets=_bucket_means(ok, "subset"),
        groups=_bucket_means(ok, "group"),
    )


def run_benchmark(manifest: Manifest, config: BenchConfig = BenchConfig()):
    """Evaluate every manifest entry; returns (records, AggregateReport).

    Records come back sorted by id and identical for any worker count; a
    failed entry yields an error record instead of aborting the batch.
    """
    entries = manifest.entries
    workers = max(1, int(config.workers))
    if workers == 1 or len(entries) < 2:
        records = [_eval_entry(e, config) for e in entries]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(
                pool.map(_eval_entry, entries, itertools.repeat(config), chunksize=1)
            )
    records.sort(key=lambda r: r.id)
    return tuple(records), aggregate(records)


def _scores_doc(s: MetricScores) -> dict:
    return {
        "max_f": s.max_f,
        "weighted_f": s.weighted_f,
        "mae": s.mae,
        "s_measure": s.s_measure,
        "e_measure_mean": s.e_measure_mean,
    }


def _hce_doc(h: HceReport) -> dict:
    return {
        "fn_boundary_points": h.fn_boundary_points,
        "fn_region_clicks": h.fn_region_clicks,
        "fp_boundary_points": h.fp_boundary_points,
        "fp_region_clicks": h.fp_region_clicks,
        "total": h.total,
    }


def _complexity_doc(c: ComplexityStats) -> dict:
    return {
        "ipq": c.ipq,
        "c_num": c.c_num,
        "p_num": c.p_num,
        "perimeter_l": c.perimeter_l,
        "area_a": c.area_a,
        "height_h": c.height_h,
        "width_w": c.width_w,
        "diagonal_d": c.diagonal_d,
    }


def _mean_doc(m: MeanScores) -> dict:
    return {
        "count": m.count,
        "max_f": m.max_f,
        "weighted_f": m.weighted_f,
        "mae": m.mae,
        "s_measure": m.s_measure,
        "e_measure_mean": m.e_measure_mean,
        "hce": m.hce,
    }


def _record_doc(r: EvalRecord) -> dict:
    return {
        "id": r.id,
        "group": r.group,
        "subset": r.subset,
        "error": r.error,
        "scores": None if r.scores is None else _scores_doc(r.scores),
        "hce": None if r.hce is None else _hce_doc(r.hce),
        "complexity": None if r.complexity is None else _complexity_doc(r.complexity),
    }


def _emit_json(records, agg: AggregateReport) -> bytes:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "total": agg.total,
        "evaluated": agg.evaluated,
        "failed": agg.failed,
        "records": [_record_doc(r) for r in records],
        "aggregate": {
            "overall": None if agg.overall is None else _mean_doc(agg.overall),
            "subsets": {k: _mean_doc(v) for k, v in agg.subsets.items()},
            "groups": {k: _mean_doc(v) for k, v in agg.groups.items()},
        },
    }
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


_CSV_HEADER = (
    "id",
    "group",
    "subset",
    "status",
    "count",
    "max_f",
    "weighted_f",
    "mae",
    "s_measure",
    "e_measure_mean",
    "hce",
    "ipq",
    "c_num",
    "p_num",
    "error",
)


def _emit_csv(records, agg: AggregateReport) -> bytes:
    buf = StringIO()
    w = _csv_writer(buf, lineterminator="\n")
    w.writerow(_CSV_HEADER)
    for r in records:
        if r.error is not None:
            w.writerow([r.id, r.group or "", r.subset or "", "error"] + [""] * 10 + [r.error])
            continue
        s, h, c = r.scores, r.hce, r.complexity
        w.writerow(
            [
                r.id,
                r.group or "",
                r.subset or "",
                "ok",
                "",
                repr(s.max_f),
                repr(s.weighted_f),
                repr(s.mae),
                repr(s.s_measure),
                repr(s.e_measure_mean),
                h.total,
                repr(c.ipq),
                c.c_num,
                c.p_num,
                "",
            ]
        )

    def agg_row(row_id: str, m: MeanScores):
        w.writerow(
            [
                row_id,
                "",
                "",
                "aggregate",
                m.count,
                repr(m.max_f),
                repr(m.weighted_f),
                repr(m.mae),
                repr(m.s_measure),
                repr(m.e_measure_mean),
                repr(m.hce),
                "",
                "",
                "",
                "",
            ]
        )

    if agg.overall is not None:
        agg_row("aggregate:overall", agg.overall)
    for name, m in agg.subsets.items():
        agg_row(f"aggregate:subset:{name}", m)
    for name, m in agg.groups.items():
        agg_row(f"aggregate:group:{name}", m)
    return buf.getvalue().encode("utf-8")


def _render_md_table(overall: MeanScores | None, columns: dict[str, MeanScores]) -> list[str]:
    headers = ["Overall"] + list(columns)
    cols = [overall] + list(columns.values())
    lines = ["| Metric | " + " | ".join(headers) + " |"]
    lines.append("|" + " --- |" * (len(headers) + 1))
    for label, attr, fmt in _MD_ROWS:
        cells = ["-" if m is None else fmt % getattr(m, attr) for m in cols]
        lines.append(f"| {label} | " + " | ".join(cells) + " |")
    counts = ["0" if m is None else str(m.count) for m in cols]
    lines.append("| images | " + " | ".join(counts) + " |")
    return lines


def _emit_md(records, agg: AggregateReport) -> bytes:
    lines = ["# Benchmark report", ""]
    lines.append(
        f"{agg.evaluated} evaluated, {agg.failed} failed, {agg.total} total."
    )
    lines.append("")
    lines.extend(_render_md_table(agg.overall, agg.subsets))
    if agg.groups:
        lines.append("")
        lines.append("## Groups")
        lines.append("")
        lines.extend(_render_md_table(agg.overall, agg.groups))
    failures = [r for r in records if r.error is not None]
    if failures:
        lines.append("")
        lines.append("## Errors")
        lines.append("")
        lines.extend(f"- `{r.id}`: {r.error}" for r in failures)
    lines.append("")
    return "\n".join(lines).encode("utf-8")


def emit_report(records, agg: AggregateReport, fmt: str = "json") -> bytes:
    """Render records + aggregate as UTF-8 bytes in json, csv or md form."""
    if fmt not in _FORMATS:
        raise ValueError(f"unknown report format {fmt!r}; expected one of {_FORMATS}")
    if fmt == "json":
        return _emit_json(records, agg)
    if fmt == "csv":
        return _emit_csv(records, agg)
    return _emit_md(records, agg)


def split_command(gt_dir, k: int, epsilon: float = 2.0, out_dir=None) -> SplitPlan:
    """Rank every GT mask under gt_dir by complexity and split into k bins.

    When out_dir is given, bin i is written to split_<i>.txt (1-based, one
    id per line).
    """
    gts = _scan_images(gt_dir)
    items = []
    for stem in sorted(gts):
        items.append((stem, complexity(load_mask(gts[stem]), epsilon=epsilon)))
    plan = rank_and_split(items, k)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, ids in enumerate(plan.bins, start=1):
            text = "".join(f"{x}\n" for x in ids)
            (out / f"split_{i}.txt").write_text(text, encoding="utf-8")
    return plan
