"""maskbench: native-resolution evaluation of binary segmentation masks.

Library + CLI for scoring predicted masks against ground truth: correction
effort estimation (boundary dominant points + region selections), shape
complexity statistics, complexity-ranked dataset splitting, and a six-metric
benchmark battery with deterministic parallel batch reports.
"""
from .bench import (
    AggregateReport,
    BenchConfig,
    EvalRecord,
    Manifest,
    ManifestEntry,
    MeanScores,
    emit_report,
    run_benchmark,
    scan_and_pair,
    split_command,
)
from .complexity import (
    ComplexityStats,
    DatasetStats,
    SplitPlan,
    complexity,
    dataset_stats,
    rank_and_split,
    stats_table,
)
from .contour import Contour, Polyline, dominant_point_count, find_contours, perimeter, rdp
from .errors import (
    DecodeError,
    EmptyDataset,
    EmptyDirectory,
    EmptyGroundTruth,
    InvalidK,
    MaskBenchError,
    MissingGroundTruth,
    MissingPrediction,
    NegativeEpsilon,
    SizeMismatch,
    UnsupportedBitDepth,
)
from .hce import HceReport, RelaxedMasks, count_clicks, hce, relax
from .metrics import (
    MetricScores,
    e_measure_mean,
    evaluate_pair,
    mae,
    max_f_beta,
    s_measure,
    weighted_f_beta,
)
from .morphology import (
    DISK1,
    SQUARE3,
    LabelMap,
    StructuringElement,
    dilate,
    erode,
    label_components,
    skeletonize,
)
from .raster import (
    BinaryMask,
    ConfusionMaps,
    GrayMap,
    Size,
    binarize,
    complement,
    confusion,
    load_mask,
    load_probmap,
    logic,
)

__version__ = "0.1.0"
