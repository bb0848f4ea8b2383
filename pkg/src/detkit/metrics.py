"""Detection evaluation: greedy matching, PR curves, and the AP metric family.

Alongside the usual per-class AP means (VOC-style mAP at IOU 0.5 and the
COCO-style threshold sweep), this module provides two rank-sensitive
alternatives: a class-pooled AP over one global ranking, and the mean of
class-pooled APs taken per image.  demo_map_pathology builds a fixture where
the per-class mean is blind to ranking defects that both alternatives expose.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .geometry import Box, ScoredBox, iou

SMALL_AREA_MAX = 32.0 * 32.0
MEDIUM_AREA_MAX = 96.0 * 96.0
AREA_BANDS = ("small", "medium", "large")

# The standard threshold sweep 0.50, 0.55, ..., 0.95.
COCO_IOU_THRESHOLDS = tuple(t / 100.0 for t in range(50, 100, 5))

_RECALL_SAMPLES = tuple(i / 100.0 for i in range(101))

INTERPOLATION_MODES = ("continuous", "101-point")


class UnknownImageError(KeyError):
    """An image id does not resolve against the ground-truth registry."""


class NoGroundTruthError(ValueError):
    """No ground truth exists for the requested class."""


@dataclass(frozen=True)
class ImageInfo:
    image_id: int
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"image {self.image_id}: size must be positive")


@dataclass(frozen=True)
class GroundTruth:
    image_id: int
    class_id: int
    box: Box


class GroundTruthSet:
    """Ground-truth boxes grouped by image, with the declared category set."""

    def __init__(
        self,
        images: Iterable[ImageInfo],
        categories: Mapping[int, str] | Iterable[int],
        ground_truths: Iterable[GroundTruth] = (),
    ) -> None:
        self._images: dict[int, ImageInfo] = {}
        for info in images:
            if info.image_id in self._images:
                raise ValueError(f"duplicate image id {info.image_id}")
            self._images[info.image_id] = info
        if isinstance(categories, Mapping):
            self._categories = dict(categories)
        else:
            self._categories = {int(c): str(c) for c in categories}
        if len(self._categories) == 0:
            raise ValueError("at least one category must be declared")
        self._by_image: dict[int, list[GroundTruth]] = {i: [] for i in self._images}
        self._class_totals: dict[int, int] = {}
        self._total = 0
        for gt in ground_truths:
            if gt.image_id not in self._images:
                raise ValueError(f"ground truth references unknown image {gt.image_id}")
            if gt.class_id not in self._categories:
                raise ValueError(f"ground truth references unknown category {gt.class_id}")
            self._by_image[gt.image_id].append(gt)
            self._class_totals[gt.class_id] = self._class_totals.get(gt.class_id, 0) + 1
            self._total += 1

    @property
    def images(self) -> Mapping[int, ImageInfo]:
        return self._images

    @property
    def categories(self) -> Mapping[int, str]:
        return self._categories

    @property
    def image_ids(self) -> tuple[int, ...]:
        return tuple(self._images)

    def for_image(self, image_id: int) -> tuple[GroundTruth, ...]:
        if image_id not in self._images:
            raise UnknownImageError(image_id)
        return tuple(self._by_image[image_id])

    def class_count(self, class_id: int) -> int:
        return self._class_totals.get(class_id, 0)

    @property
    def total_count(self) -> int:
        return self._total

    def classes_with_truth(self) -> tuple[int, ...]:
        return tuple(sorted(self._class_totals))

    def filter_boxes(self, keep: Callable[[GroundTruth], bool]) -> "GroundTruthSet":
        """Same registry and categories, only the ground truths passing the predicate."""
        kept = [gt for img in self._images for gt in self._by_image[img] if keep(gt)]
        return GroundTruthSet(self._images.values(), self._categories, kept)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroundTruthSet):
            return NotImplemented
        return (
            self._images == other._images
            and self._categories == other._categories
            and self._by_image == other._by_image
        )


@dataclass(frozen=True)
class Detection:
    """One detection plus its position in the original input order."""

    image_id: int
    scored: ScoredBox
    index: int

    @property
    def score(self) -> float:
        return self.scored.score

    @property
    def class_id(self) -> int:
        return self.scored.class_id

    @property
    def box(self) -> Box:
        return self.scored.box


class DetectionResultSet:
    """Detections across images, preserving input order for score tie-breaks."""

    def __init__(self, detections: Iterable[tuple[int, ScoredBox]]) -> None:
        self._detections = tuple(
            Detection(image_id, scored, i) for i, (image_id, scored) in enumerate(detections)
        )
        self._by_image: dict[int, list[Detection]] = {}
        for det in self._detections:
            self._by_image.setdefault(det.image_id, []).append(det)

    @property
    def detections(self) -> tuple[Detection, ...]:
        return self._detections

    def for_image(self, image_id: int) -> tuple[Detection, ...]:
        return tuple(self._by_image.get(image_id, ()))

    def filter(self, keep: Callable[[Detection], bool]) -> "DetectionResultSet":
        """Subset preserving relative order (and therefore tie-break behaviour)."""
        return DetectionResultSet(
            (d.image_id, d.scored) for d in self._detections if keep(d)
        )

    def __len__(self) -> int:
        return len(self._detections)

    def __iter__(self):
        return iter(self._detections)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DetectionResultSet):
            return NotImplemented
        return self._detections == other._detections


@dataclass(frozen=True)
class MatchTable:
    """Greedy matching outcome for one (image, class) pair.

    detections holds the evaluated detections in sweep order;
    detection_matches[i] is the matched ground-truth position (into the
    image's class-filtered truth list) or None; gt_matches[g] is the matching
    detection position or None.  Both directions are injective.
    """

    detections: tuple[Detection, ...]
    detection_matches: tuple[int | None, ...]
    gt_matches: tuple[int | None, ...]


def _sweep_order(detections: Iterable[Detection]) -> list[Detection]:
    return sorted(detections, key=lambda d: (-d.score, d.index))


def match(
    detections: DetectionResultSet,
    ground_truths: GroundTruthSet,
    iou_threshold: float,
    class_id: int,
    image_id: int,
) -> MatchTable:
    """Greedily match one image's detections of one class against its truths.

    Detections are visited by descending score (ties by input order); each
    takes the highest-IOU still-unmatched ground truth of the class provided
    the IOU reaches iou_threshold (IOU ties toward the lower truth index).
    Raises UnknownImageError for an unregistered image id.
    """
    if not (0.0 <= iou_threshold <= 1.0):
        raise ValueError(f"iou_threshold must lie in [0, 1], got {iou_threshold!r}")
    truths = [gt for gt in ground_truths.for_image(image_id) if gt.class_id == class_id]
    cands = _sweep_order(d for d in detections.for_image(image_id) if d.class_id == class_id)
    taken = [False] * len(truths)
    det_matches: list[int | None] = []
    gt_matches: list[int | None] = [None] * len(truths)
    for pos, det in enumerate(cands):
        best = None
        best_value = -1.0
        for g, gt in enumerate(truths):
            if taken[g]:
                continue
            value = iou(det.box, gt.box)
            if value >= iou_threshold and value > best_value:
                best_value = value
                best = g
        det_matches.append(best)
        if best is not None:
            taken[best] = True
            gt_matches[best] = pos
    return MatchTable(tuple(cands), tuple(det_matches), tuple(gt_matches))


@dataclass(frozen=True)
class PRCurve:
    """Cumulative (recall, precision) points from a score-ordered sweep."""

    points: tuple[tuple[float, float], ...]
    num_gt: int

    @property
    def ap(self) -> float:
        return average_precision(self, "continuous")


def _require_known_images(detections: DetectionResultSet, ground_truths: GroundTruthSet) -> None:
    for det in detections:
        if det.image_id not in ground_truths.images:
            raise UnknownImageError(det.image_id)


def _tp_flags(
    detections: DetectionResultSet,
    ground_truths: GroundTruthSet,
    iou_threshold: float,
    class_id: int,
    image_ids: Sequence[int],
) -> dict[int, bool]:
    """Map detection input index -> matched?, for one class over the given images."""
    flags: dict[int, bool] = {}
    for image_id in image_ids:
        table = match(detections, ground_truths, iou_threshold, class_id, image_id)
        for pos, det in enumerate(table.detections):
            flags[det.index] = table.detection_matches[pos] is not None
    return flags


def _curve_from_flags(swept: Sequence[Detection], flags: Mapping[int, bool], num_gt: int) -> PRCurve:
    points: list[tuple[float, float]] = []
    tp = 0
    fp = 0
    for det in swept:
        if flags[det.index]:
            tp += 1
        else:
            fp += 1
        points.append((tp / num_gt, tp / (tp + fp)))
    return PRCurve(tuple(points), num_gt)


def pr_curve(
    detections: DetectionResultSet,
    ground_truths: GroundTruthSet,
    iou_threshold: float,
    class_id: int,
) -> PRCurve:
    """Precision/recall sweep for one class across all images.

    The recall denominator is the total ground-truth count of the class;
    raises NoGroundTruthError when that count is zero (callers exclude such
    classes from any mean).
    """
    _require_known_images(detections, ground_truths)
    num_gt = ground_truths.class_count(class_id)
    if num_gt == 0:
        raise NoGroundTruthError(f"no ground truth for class {class_id}")
    flags = _tp_flags(detections, ground_truths, iou_threshold, class_id, ground_truths.image_ids)
    swept = _sweep_order(d for d in detections if d.class_id == class_id)
    return _curve_from_flags(swept, flags, num_gt)


def _envelope(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Per point, the maximum precision at any recall >= that point's recall."""
    env: list[tuple[float, float]] = []
    best = 0.0
    for recall, precision in reversed(points):
        best = max(best, precision)
        env.append((recall, best))
    env.reverse()
    return env


def average_precision(curve: PRCurve, interpolation: str = "continuous") -> float:
    """Area under the precision envelope of a PR curve.

    "continuous" integrates the envelope exactly over recall.  "101-point"
    averages the envelope at the 101 recall samples 0.00, 0.01, ..., 1.00,
    taking 0 beyond the highest achieved recall.  An empty curve scores 0.
    """
    if interpolation not in INTERPOLATION_MODES:
        raise ValueError(f"interpolation must be one of {INTERPOLATION_MODES}, got {interpolation!r}")
    env = _envelope(curve.points)
    if interpolation == "continuous":
        total = 0.0
        prev_recall = 0.0
        for recall, precision in env:
            if recall > prev_recall:
                total += (recall - prev_recall) * precision
                prev_recall = recall
        return total
    recalls = [r for r, _ in env]
    total = 0.0
    position = 0
    for sample in _RECALL_SAMPLES:
        while position < len(recalls) and recalls[position] < sample:
            position += 1
        if position < len(env):
            total += env[position][1]
    return total / len(_RECALL_SAMPLES)


def per_class_ap(
    detections: DetectionResultSet,
    ground_truths: GroundTruthSet,
    iou_threshold: float = 0.5,
    interpolation: str = "continuous",
) -> dict[int, float]:
    """AP per class, for every class with at least one ground truth."""
    out: dict[int, float] = {}
    for class_id in ground_truths.classes_with_truth():
        curve = pr_curve(detections, ground_truths, iou_threshold, class_id)
        out[class_id] = average_precision(curve, interpolation)
    return out


def _mean(values: Sequence[float]) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


def map_voc(detections: DetectionResultSet, ground_truths: GroundTruthSet) -> float | None:
    """Mean over classes of continuous AP at IOU 0.5; classes without truth are skipped.

    None when no class has any ground truth.
    """
    aps = per_class_ap(detections, ground_truths, 0.5, "continuous")
    return _mean([aps[c] for c in sorted(aps)])


@dataclass(frozen=True)
class CocoAPResult:
    """Threshold-averaged AP plus the two standard single-threshold values."""

    ap: float | None
    ap50: float | None
    ap75: float | None
    by_threshold: Mapping[float, float | None] = field(default_factory=dict)


def coco_ap(detections: DetectionResultSet, ground_truths: GroundTruthSet) -> CocoAPResult:
    """101-point mAP averaged over IOU thresholds 0.50 to 0.95 in steps of 0.05.

    ap is exactly the arithmetic mean of the ten per-threshold values; ap50
    and ap75 are the 0.50 and 0.75 entries.  All values are None when no
    class has ground truth.
    """
    classes = ground_truths.classes_with_truth()
    by_threshold: dict[float, float | None] = {}
    for threshold in COCO_IOU_THRESHOLDS:
        aps = [
            average_precision(pr_curve(detections, ground_truths, threshold, c), "101-point")
            for c in classes
        ]
        by_threshold[threshold] = _mean(aps)
    values = [by_threshold[t] for t in COCO_IOU_THRESHOLDS]
    ap = None if any(v is None for v in values) else sum(values) / len(values)
    return CocoAPResult(ap, by_threshold[0.5], by_threshold[0.75], by_threshold)


def area_band(box: Box) -> str:
    """Which size band a box falls in: small (< 32^2), medium, or large (>= 96^2)."""
    area = box.area
    if area < SMALL_AREA_MAX:
        return "small"
    if area < MEDIUM_AREA_MAX:
        return "medium"
    return "large"


def _band_restricted_sets(
    detections: DetectionResultSet, ground_truths: GroundTruthSet, band: str
) -> tuple[DetectionResultSet, GroundTruthSet]:
    """Drop detections owned by other bands; keep only the band's ground truths.

    A detection whose greedy match over the full truth set at IOU 0.5 lands on
    an out-of-band truth belongs to that truth's band, so it is removed from
    this band's sweep instead of counting as a false positive here.
    """
    band_truths = ground_truths.filter_boxes(lambda gt: area_band(gt.box) == band)
    dropped: set[int] = set()
    det_classes = sorted({d.class_id for d in detections})
    for image_id in ground_truths.image_ids:
        truths = ground_truths.for_image(image_id)
        for class_id in det_classes:
            table = match(detections, ground_truths, 0.5, class_id, image_id)
            class_truths = [gt for gt in truths if gt.class_id == class_id]
            for pos, det in enumerate(table.detections):
                matched = table.detection_matches[pos]
                if matched is not None and area_band(class_truths[matched].box) != band:
                    dropped.add(det.index)
    return detections.filter(lambda d: d.index not in dropped), band_truths


def ap_by_area(
    detections: DetectionResultSet, ground_truths: GroundTruthSet, band: str
) -> float | None:
    """COCO-style threshold-averaged AP restricted to truths of one size band.

    None when the band contains no ground truth.
    """
    if band not in AREA_BANDS:
        raise ValueError(f"band must be one of {AREA_BANDS}, got {band!r}")
    _require_known_images(detections, ground_truths)
    kept, band_truths = _band_restricted_sets(detections, ground_truths, band)
    if band_truths.total_count == 0:
        return None
    return coco_ap(kept, band_truths).ap


def _pooled_curve(
    detections: DetectionResultSet,
    ground_truths: GroundTruthSet,
    iou_threshold: float,
    image_ids: Sequence[int],
    num_gt: int,
) -> PRCurve:
    """All classes pooled into one ranking; matching stays class-correct."""
    image_set = set(image_ids)
    pool = [d for d in detections if d.image_id in image_set]
    flags: dict[int, bool] = {}
    for class_id in sorted({d.class_id for d in pool}):
        flags.update(_tp_flags(detections, ground_truths, iou_threshold, class_id, image_ids))
    swept = _sweep_order(pool)
    return _curve_from_flags(swept, flags, num_gt)


def global_ap(
    detections: DetectionResultSet, ground_truths: GroundTruthSet, iou_threshold: float = 0.5
) -> float | None:
    """Continuous AP over a single all-class ranking.

    Detections of every class are pooled by descending score (ties by input
    order); each may only match a still-unmatched truth of its own class.
    The recall denominator is the total truth count over all classes, so
    cross-class score calibration affects the result.  None when there is no
    ground truth at all.
    """
    if not (0.0 <= iou_threshold <= 1.0):
        raise ValueError(f"iou_threshold must lie in [0, 1], got {iou_threshold!r}")
    _require_known_images(detections, ground_truths)
    total = ground_truths.total_count
    if total == 0:
        return None
    curve = _pooled_curve(detections, ground_truths, iou_threshold, ground_truths.image_ids, total)
    return average_precision(curve, "continuous")


def per_image_ap(
    detections: DetectionResultSet, ground_truths: GroundTruthSet, iou_threshold: float = 0.5
) -> float | None:
    """Unweighted mean over images of the class-pooled continuous AP on that image.

    Images without any ground truth are skipped (detections there go unjudged);
    None when no image has ground truth.
    """
    if not (0.0 <= iou_threshold <= 1.0):
        raise ValueError(f"iou_threshold must lie in [0, 1], got {iou_threshold!r}")
    _require_known_images(detections, ground_truths)
    values: list[float] = []
    for image_id in sorted(ground_truths.image_ids):
        num_gt = len(ground_truths.for_image(image_id))
        if num_gt == 0:
            continue
        curve = _pooled_curve(detections, ground_truths, iou_threshold, (image_id,), num_gt)
        values.append(average_precision(curve, "continuous"))
    return _mean(values)


@dataclass(frozen=True)
class MetricReport:
    """Full evaluation summary; None marks a value whose denominator is empty."""

    voc50: float | None
    ap: float | None
    ap50: float | None
    ap75: float | None
    ap_small: float | None
    ap_medium: float | None
    ap_large: float | None
    per_class_ap: Mapping[int, float]
    global_ap: float | None
    per_image_ap: float | None


def evaluate(
    detections: DetectionResultSet,
    ground_truths: GroundTruthSet,
    iou_threshold: float = 0.5,
    shards: int = 1,
) -> MetricReport:
    """Compute every report field, optionally spreading work over shards.

    Work is cut into pure units keyed by (metric, class, threshold); with
    shards > 1 the units run on a thread pool of that size.  Results are
    reduced in sorted key order, so the report is identical for any shard
    count.  iou_threshold applies to the two pooled metrics only; the
    per-class families use their own fixed thresholds.
    """
    if shards <= 0:
        raise ValueError(f"shards must be positive, got {shards!r}")
    _require_known_images(detections, ground_truths)
    classes = ground_truths.classes_with_truth()

    units: dict[tuple, Callable[[], float | None]] = {}

    def voc_unit(c: int) -> Callable[[], float]:
        return lambda: average_precision(pr_curve(detections, ground_truths, 0.5, c), "continuous")

    def coco_unit(c: int, t: float) -> Callable[[], float]:
        return lambda: average_precision(pr_curve(detections, ground_truths, t, c), "101-point")

    for c in classes:
        units[("voc", c)] = voc_unit(c)
        for t in COCO_IOU_THRESHOLDS:
            units[("coco", c, t)] = coco_unit(c, t)

    band_inputs = {band: _band_restricted_sets(detections, ground_truths, band) for band in AREA_BANDS}

    def band_unit(band: str, c: int, t: float) -> Callable[[], float]:
        kept, band_truths = band_inputs[band]
        return lambda: average_precision(pr_curve(kept, band_truths, t, c), "101-point")

    for band in AREA_BANDS:
        _, band_truths = band_inputs[band]
        for c in band_truths.classes_with_truth():
            for t in COCO_IOU_THRESHOLDS:
                units[("area", band, c, t)] = band_unit(band, c, t)

    units[("global",)] = lambda: global_ap(detections, ground_truths, iou_threshold)
    units[("per_image",)] = lambda: per_image_ap(detections, ground_truths, iou_threshold)

    keys = sorted(units, key=str)
    if shards == 1:
        results = {key: units[key]() for key in keys}
    else:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            futures = {key: pool.submit(units[key]) for key in keys}
            results = {key: futures[key].result() for key in keys}

    per_class = {c: results[("voc", c)] for c in classes}
    voc50 = _mean([per_class[c] for c in classes])

    coco_by_threshold = [
        _mean([results[("coco", c, t)] for c in classes]) for t in COCO_IOU_THRESHOLDS
    ]
    ap = None if any(v is None for v in coco_by_threshold) else sum(coco_by_threshold) / len(coco_by_threshold)
    ap50 = coco_by_threshold[COCO_IOU_THRESHOLDS.index(0.5)]
    ap75 = coco_by_threshold[COCO_IOU_THRESHOLDS.index(0.75)]

    band_values: dict[str, float | None] = {}
    for band in AREA_BANDS:
        _, band_truths = band_inputs[band]
        band_classes = band_truths.classes_with_truth()
        if not band_classes:
            band_values[band] = None
            continue
        per_threshold = [
            _mean([results[("area", band, c, t)] for c in band_classes])
            for t in COCO_IOU_THRESHOLDS
        ]
        band_values[band] = sum(per_threshold) / len(per_threshold)

    return MetricReport(
        voc50=voc50,
        ap=ap,
        ap50=ap50,
        ap75=ap75,
        ap_small=band_values["small"],
        ap_medium=band_values["medium"],
        ap_large=band_values["large"],
        per_class_ap=per_class,
        global_ap=results[("global",)],
        per_image_ap=results[("per_image",)],
    )


# --- ranking-pathology fixture -------------------------------------------------

_PATHOLOGY_IMAGES = (ImageInfo(1, 640, 480), ImageInfo(2, 640, 480))
_PATHOLOGY_CATEGORIES = {1: "person", 2: "dog"}

# (image_id, class_id, corner-form bbox)
_PATHOLOGY_TRUTHS = (
    (1, 1, (50.0, 50.0, 100.0, 200.0)),
    (1, 2, (300.0, 200.0, 150.0, 100.0)),
    (2, 1, (200.0, 100.0, 80.0, 160.0)),
)

# Detector A: every truth found with a tight box and a confident, consistently
# ranked score.  (image_id, class_id, bbox, score)
_PATHOLOGY_DETS_A = (
    (1, 1, (50.0, 50.0, 100.0, 200.0), 0.95),
    (1, 2, (300.0, 200.0, 150.0, 100.0), 0.9),
    (2, 1, (200.0, 100.0, 80.0, 160.0), 0.88),
)

# Detector B: the same true boxes, but the cross-image score ordering is
# swapped and a pile of low-scoring spurious boxes lands between the weakest
# true detection of one class and the strongest of another.  Within each class
# every true box still outranks every spurious one, so per-class AP is blind
# to the damage.
_PATHOLOGY_DETS_B = (
    (1, 1, (50.0, 50.0, 100.0, 200.0), 0.35),
    (1, 1, (500.0, 20.0, 60.0, 60.0), 0.34),
    (1, 1, (500.0, 100.0, 60.0, 60.0), 0.33),
    (1, 1, (500.0, 180.0, 60.0, 60.0), 0.32),
    (1, 1, (500.0, 260.0, 60.0, 60.0), 0.31),
    (1, 2, (300.0, 200.0, 150.0, 100.0), 0.3),
    (1, 2, (10.0, 400.0, 50.0, 50.0), 0.1),
    (2, 1, (200.0, 100.0, 80.0, 160.0), 0.92),
    (2, 2, (500.0, 300.0, 40.0, 40.0), 0.05),
)


def _detections_from_rows(rows) -> DetectionResultSet:
    return DetectionResultSet(
        (image_id, ScoredBox(Box.from_corner_size(*bbox), score, class_id))
        for image_id, class_id, bbox, score in rows
    )


def pathology_fixture() -> tuple[GroundTruthSet, DetectionResultSet, DetectionResultSet]:
    """The two-detector fixture behind demo_map_pathology: (truths, detector_a, detector_b)."""
    truths = GroundTruthSet(
        _PATHOLOGY_IMAGES,
        _PATHOLOGY_CATEGORIES,
        (
            GroundTruth(image_id, class_id, Box.from_corner_size(*bbox))
            for image_id, class_id, bbox in _PATHOLOGY_TRUTHS
        ),
    )
    return truths, _detections_from_rows(_PATHOLOGY_DETS_A), _detections_from_rows(_PATHOLOGY_DETS_B)


@dataclass(frozen=True)
class PathologyReports:
    detector_a: MetricReport
    detector_b: MetricReport


def demo_map_pathology() -> PathologyReports:
    """Evaluate the built-in fixture where mAP cannot separate two detectors.

    Both detectors score a perfect class-averaged mAP at IOU 0.5, yet detector
    B buries one class's true detections under another class's spurious ones:
    the class-pooled global AP and the per-image AP both drop for B while
    staying at 1.0 for A.
    """
    truths, dets_a, dets_b = pathology_fixture()
    return PathologyReports(evaluate(dets_a, truths), evaluate(dets_b, truths))
