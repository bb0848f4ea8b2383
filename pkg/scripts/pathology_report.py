#!/usr/bin/env python3
"""Side-by-side metric report for the two built-in pathology detectors.

Detector A emits three confident, correct boxes.  Detector B keeps every true
box but adds low-scoring spurious ones whose scores still beat another class's
true detections.  The per-class mean cannot tell the two apart; the pooled
rankings can.
"""

from __future__ import annotations

import argparse
import json
import sys

sys.path.insert(0, "src")

from detkit import evaluate, pathology_fixture, per_class_ap

FIELDS = (
    "voc50", "ap", "ap50", "ap75",
    "ap_small", "ap_medium", "ap_large",
    "global_ap", "per_image_ap",
)


def fmt(value: float | None) -> str:
    return "NA" if value is None else f"{value:.6f}"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--format", choices=("tsv", "json"), default="tsv")
    args = parser.parse_args()

    truths, dets_a, dets_b = pathology_fixture()
    reports = {"detector_a": evaluate(dets_a, truths), "detector_b": evaluate(dets_b, truths)}

    if args.format == "json":
        doc = {
            name: {field: getattr(report, field) for field in FIELDS}
            for name, report in reports.items()
        }
        for name, dets in (("detector_a", dets_a), ("detector_b", dets_b)):
            doc[name]["per_class_ap"] = {
                str(c): ap for c, ap in sorted(per_class_ap(dets, truths).items())
            }
        print(json.dumps(doc, indent=2))
        return 0

    print("metric\tdetector_a\tdetector_b")
    for field in FIELDS:
        a = fmt(getattr(reports["detector_a"], field))
        b = fmt(getattr(reports["detector_b"], field))
        print(f"{field}\t{a}\t{b}")
    names = dict(truths.categories)
    for c in sorted(truths.classes_with_truth()):
        a = fmt(per_class_ap(dets_a, truths)[c])
        b = fmt(per_class_ap(dets_b, truths)[c])
        print(f"ap50[{names[c]}]\t{a}\t{b}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
