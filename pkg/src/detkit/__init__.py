"""Box coding, anchor clustering, and detection evaluation for single-stage detectors."""

from .anchors import (
    ClusteringResult,
    DimensionSample,
    InsufficientSamplesError,
    NotDivisibleError,
    kmeans_anchors,
    split_scales,
)
from .dataio import (
    ParseError,
    SpeedAccuracyRow,
    SpeedAccuracyTable,
    ValidationError,
    dump_results,
    fixture_path,
    load_dataset,
    load_dimension_samples,
    load_results,
    load_speed_table,
    results_document,
    write_results,
)
from .geometry import Box, ScoredBox, iou, nms
from .metrics import (
    AREA_BANDS,
    COCO_IOU_THRESHOLDS,
    INTERPOLATION_MODES,
    CocoAPResult,
    Detection,
    DetectionResultSet,
    GroundTruth,
    GroundTruthSet,
    ImageInfo,
    MatchTable,
    MetricReport,
    NoGroundTruthError,
    PathologyReports,
    PRCurve,
    UnknownImageError,
    ap_by_area,
    area_band,
    average_precision,
    coco_ap,
    demo_map_pathology,
    evaluate,
    global_ap,
    map_voc,
    match,
    pathology_fixture,
    per_class_ap,
    per_image_ap,
    pr_curve,
)
from .yolo import (
    CHANNEL_CLASS_START,
    CHANNEL_H,
    CHANNEL_OBJECTNESS,
    CHANNEL_W,
    CHANNEL_X,
    CHANNEL_Y,
    IGNORED,
    NEGATIVE,
    AnchorPrior,
    AssignmentKind,
    AssignmentLabel,
    CellMismatchError,
    GridCell,
    GridSpec,
    OutOfBoundsError,
    PlacedPrior,
    RawPrediction,
    assign_dual_threshold,
    assign_dual_threshold_from_ious,
    assign_yolo,
    assign_yolo_from_ious,
    bce_gradient_wrt_logit,
    bce_loss,
    coord_gradient,
    decode,
    encode,
    inverse_sigmoid,
    objectness_target,
    prior_loss,
    sigmoid,
    tensor_index,
    tensor_unindex,
)

__version__ = "0.1.0"
