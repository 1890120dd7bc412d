"""Command line entry point.

Subcommands:

- metrics: score one prediction/ground-truth pair (all six numbers)
- hce: correction-effort breakdown for one pair
- complexity: per-mask or dataset-level complexity statistics
- split: rank a ground-truth directory by complexity and write k id lists
- report: batch evaluation of directory trees or a JSON manifest

Exit codes: 0 success, 1 report finished but some pairs failed, 2 invalid
invocation or unusable input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .bench import (
    SCHEMA_VERSION,
    BenchConfig,
    _hce_doc,
    _scan_images,
    _scores_doc,
    emit_report,
    load_manifest,
    run_benchmark,
    scan_and_pair,
    split_command,
)
from .complexity import complexity, dataset_stats, stats_table
from .errors import MaskBenchError
from .hce import hce
from .metrics import evaluate_pair
from .raster import load_mask, load_probmap


def _write(payload: bytes, out: str | None) -> None:
    if out:
        Path(out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()


def _json_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _require_format(args, allowed) -> bool:
    if args.format in allowed:
        return True
    print(
        f"error: {args.command} supports --format {'/'.join(allowed)}, got {args.format}",
        file=sys.stderr,
    )
    return False


def _cmd_metrics(args) -> int:
    if not _require_format(args, ("json",)):
        return 2
    g = load_mask(args.gt)
    p = load_probmap(args.pred)
    scores, clicks = evaluate_pair(
        p, g, gamma=args.gamma, epsilon=args.epsilon, tau=args.tau, beta_sq=args.beta_sq
    )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "pred": args.pred,
        "gt": args.gt,
        "config": {
            "gamma": args.gamma,
            "epsilon": args.epsilon,
            "tau": args.tau,
            "beta_sq": args.beta_sq,
        },
        "scores": _scores_doc(scores),
        "hce": _hce_doc(clicks),
    }
    _write(_json_bytes(doc), args.out)
    return 0


def _cmd_hce(args) -> int:
    if not _require_format(args, ("json",)):
        return 2
    pred = Path(args.pred)
    gt = Path(args.gt)
    if pred.is_dir() != gt.is_dir():
        print("error: --pred and --gt must both be files or both be directories", file=sys.stderr)
        return 2
    config = {"gamma": args.gamma, "epsilon": args.epsilon, "tau": args.tau}
    if gt.is_dir():
        records = []
        for entry in scan_and_pair(pred, gt).entries:
            report = hce(
                load_probmap(entry.pred_path),
                load_mask(entry.gt_path),
                gamma=args.gamma,
                epsilon=args.epsilon,
                tau=args.tau,
            )
            records.append({"id": entry.id, **_hce_doc(report)})
        doc = {
            "schema_version": SCHEMA_VERSION,
            "config": config,
            "records": records,
        }
    else:
        report = hce(
            load_probmap(args.pred),
            load_mask(args.gt),
            gamma=args.gamma,
            epsilon=args.epsilon,
            tau=args.tau,
        )
        doc = {
            "schema_version": SCHEMA_VERSION,
            "pred": args.pred,
            "gt": args.gt,
            "config": config,
            "hce": _hce_doc(report),
        }
    _write(_json_bytes(doc), args.out)
    return 0


def _cmd_complexity(args) -> int:
    path = Path(args.gt)
    if path.is_dir():
        files = _scan_images(path)
        per_mask = [
            (stem, complexity(load_mask(files[stem]), epsilon=args.epsilon))
            for stem in sorted(files)
        ]
        ds = dataset_stats([st for _, st in per_mask])
        if args.format == "json":
            doc = {
                "schema_version": SCHEMA_VERSION,
                "dataset": asdict(ds),
                "masks": [{"id": stem, **asdict(st)} for stem, st in per_mask],
            }
            payload = _json_bytes(doc)
        else:
            payload = stats_table(ds, fmt=args.format).encode("utf-8")
    else:
        st = complexity(load_mask(path), epsilon=args.epsilon)
        if args.format == "json":
            payload = _json_bytes({"schema_version": SCHEMA_VERSION, **asdict(st)})
        else:
            payload = stats_table(dataset_stats([st]), fmt=args.format).encode("utf-8")
    _write(payload, args.out)
    return 0


def _cmd_split(args) -> int:
    if not _require_format(args, ("json",)):
        return 2
    if not args.out:
        print("error: split requires --out (directory for the id lists)", file=sys.stderr)
        return 2
    plan = split_command(args.gt, args.k, epsilon=args.epsilon, out_dir=args.out)
    bins = []
    at = 0
    for i, ids in enumerate(plan.bins, start=1):
        scores = plan.scores[at : at + len(ids)]
        at += len(ids)
        bins.append(
            {
                "file": f"split_{i}.txt",
                "count": len(ids),
                "min_score": scores[0],
                "max_score": scores[-1],
            }
        )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "k": args.k,
        "total": len(plan.ids),
        "out_dir": args.out,
        "bins": bins,
    }
    sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    return 0


def _cmd_report(args) -> int:
    if args.manifest:
        if args.pred or args.gt:
            print("error: give either --manifest or --pred/--gt, not both", file=sys.stderr)
            return 2
        manifest = load_manifest(args.manifest)
    else:
        if not (args.pred and args.gt):
            print("error: report needs --manifest, or --pred and --gt", file=sys.stderr)
            return 2
        manifest = scan_and_pair(args.pred, args.gt)
    config = BenchConfig(
        gamma=args.gamma,
        epsilon=args.epsilon,
        tau=args.tau,
        beta_sq=args.beta_sq,
        workers=args.workers,
    )
    records, agg = run_benchmark(manifest, config)
    _write(emit_report(records, agg, args.format), args.out)
    return 1 if agg.failed else 0


def _add_shared(sp) -> None:
    sp.add_argument("--gamma", type=int, default=5, help="relaxation radius in pixels (default 5)")
    sp.add_argument("--epsilon", type=float, default=2.0, help="RDP tolerance in pixels (default 2.0)")
    sp.add_argument("--tau", type=float, default=0.5, help="prediction binarization threshold (default 0.5)")
    sp.add_argument(
        "--beta-sq", dest="beta_sq", type=float, default=0.3, help="beta^2 for the F-measure (default 0.3)"
    )
    sp.add_argument("--format", choices=("json", "csv", "md"), default="json", help="output format")
    sp.add_argument("--out", help="write output to this path instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="maskbench",
        description="Evaluate binary segmentation masks: metric battery, "
        "correction effort, complexity statistics and dataset splitting.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    m = sub.add_parser("metrics", help="score one prediction/ground-truth pair")
    m.add_argument("--pred", required=True, help="prediction image (gray map)")
    m.add_argument("--gt", required=True, help="ground-truth image (binary mask)")
    _add_shared(m)
    m.set_defaults(func=_cmd_metrics)

    h = sub.add_parser("hce", help="correction-effort breakdown for one pair")
    h.add_argument("--pred", required=True, help="prediction image (gray map)")
    h.add_argument("--gt", required=True, help="ground-truth image (binary mask)")
    _add_shared(h)
    h.set_defaults(func=_cmd_hce)

    c = sub.add_parser("complexity", help="complexity statistics for a mask or a directory")
    c.add_argument("--gt", required=True, help="ground-truth image or directory")
    _add_shared(c)
    c.set_defaults(func=_cmd_complexity)

    s = sub.add_parser("split", help="rank GT masks by complexity and write k id lists")
    s.add_argument("--gt", required=True, help="ground-truth directory")
    s.add_argument("-k", "--bins", dest="k", type=int, required=True, help="number of bins")
    _add_shared(s)
    s.set_defaults(func=_cmd_split)

    r = sub.add_parser("report", help="batch-evaluate a dataset and render a report")
    r.add_argument("--pred", help="prediction directory")
    r.add_argument("--gt", help="ground-truth directory")
    r.add_argument("--manifest", help="JSON manifest instead of directory scanning")
    r.add_argument("--workers", type=int, default=1, help="parallel worker processes (default 1)")
    _add_shared(r)
    r.set_defaults(func=_cmd_report)

    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MaskBenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
