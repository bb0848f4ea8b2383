"""Box arithmetic, IOU, and greedy non-maximum suppression."""

from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import assert_boxes_close, boxes, canvas_boxes, scored_boxes
from detkit import Box, ScoredBox, iou, nms


class TestBox:
    def test_corner_properties(self):
        b = Box(center_x=25.0, center_y=40.0, width=30.0, height=40.0)
        assert b.left == 10.0
        assert b.top == 20.0
        assert b.right == 40.0
        assert b.bottom == 60.0
        assert b.area == 1200.0
        assert b.corners() == (10.0, 20.0, 40.0, 60.0)

    def test_from_corners(self):
        b = Box.from_corners(10.0, 20.0, 40.0, 60.0)
        assert b == Box(center_x=25.0, center_y=40.0, width=30.0, height=40.0)

    def test_from_corner_size(self):
        b = Box.from_corner_size(10.0, 20.0, 30.0, 40.0)
        assert b == Box(center_x=25.0, center_y=40.0, width=30.0, height=40.0)

    @pytest.mark.parametrize("width,height", [(0.0, 1.0), (1.0, 0.0), (-2.0, 1.0), (1.0, -0.5)])
    def test_rejects_non_positive_sizes(self, width, height):
        with pytest.raises(ValueError):
            Box(center_x=0.0, center_y=0.0, width=width, height=height)

    def test_from_corners_rejects_inverted(self):
        with pytest.raises(ValueError):
            Box.from_corners(5.0, 0.0, 4.0, 1.0)

    @given(boxes)
    def test_corner_round_trip(self, b):
        again = Box.from_corners(*b.corners())
        assert_boxes_close(again, b, rel=8 * 2.3e-16)


class TestScoredBox:
    def test_fields(self):
        sb = ScoredBox(box=Box(0.0, 0.0, 1.0, 1.0), score=0.75, class_id=3)
        assert sb.score == 0.75
        assert sb.class_id == 3

    @pytest.mark.parametrize("score", [-0.1, 1.1, math.nan])
    def test_rejects_bad_score(self, score):
        with pytest.raises(ValueError):
            ScoredBox(box=Box(0.0, 0.0, 1.0, 1.0), score=score, class_id=0)

    def test_rejects_negative_class(self):
        with pytest.raises(ValueError):
            ScoredBox(box=Box(0.0, 0.0, 1.0, 1.0), score=0.5, class_id=-1)


class TestIou:
    def test_known_quarter_overlap(self):
        a = Box.from_corners(0.0, 0.0, 2.0, 2.0)
        b = Box.from_corners(1.0, 1.0, 3.0, 3.0)
        # intersection 1, union 4 + 4 - 1 = 7
        assert iou(a, b) == 1.0 / 7.0

    def test_contained_box(self):
        outer = Box.from_corners(0.0, 0.0, 2.0, 1.0)
        inner = Box.from_corners(0.0, 0.0, 1.0, 1.0)
        assert iou(outer, inner) == 0.5

    def test_disjoint_is_zero(self):
        a = Box(center_x=0.0, center_y=0.0, width=1.0, height=1.0)
        b = Box(center_x=10.0, center_y=0.0, width=1.0, height=1.0)
        assert iou(a, b) == 0.0

    def test_touching_edges_is_zero(self):
        a = Box.from_corners(0.0, 0.0, 1.0, 1.0)
        b = Box.from_corners(1.0, 0.0, 2.0, 1.0)
        assert iou(a, b) == 0.0

    @given(boxes)
    def test_self_iou_is_exactly_one(self, b):
        assert iou(b, b) == 1.0

    @given(canvas_boxes, canvas_boxes)
    def test_symmetric_and_bounded(self, a, b):
        v = iou(a, b)
        assert v == iou(b, a)
        assert 0.0 <= v <= 1.0


def _chain() -> list[ScoredBox]:
    # Three unit-height boxes sliding right by 0.25 each: adjacent pairs
    # overlap at IOU 0.75/1.25 = 0.6, the outer pair at only 1/3.
    a = Box.from_corners(0.0, 0.0, 1.0, 1.0)
    b = Box.from_corners(0.25, 0.0, 1.25, 1.0)
    c = Box.from_corners(0.5, 0.0, 1.5, 1.0)
    return [
        ScoredBox(box=a, score=0.9, class_id=0),
        ScoredBox(box=b, score=0.8, class_id=0),
        ScoredBox(box=c, score=0.7, class_id=0),
    ]


class TestNms:
    def test_empty(self):
        assert nms([], iou_threshold=0.5) == []

    def test_single(self):
        dets = [ScoredBox(box=Box(0.0, 0.0, 1.0, 1.0), score=0.5, class_id=0)]
        assert nms(dets, iou_threshold=0.5) == dets

    def test_chain_keeps_first_and_third(self):
        dets = _chain()
        kept = nms(dets, iou_threshold=0.5)
        assert kept == [dets[0], dets[2]]

    def test_chain_geometry(self):
        dets = _chain()
        assert iou(dets[0].box, dets[1].box) == 0.6
        assert iou(dets[1].box, dets[2].box) == 0.6
        assert iou(dets[0].box, dets[2].box) == pytest.approx(1.0 / 3.0)

    def test_classes_do_not_suppress_each_other(self):
        box = Box(center_x=5.0, center_y=5.0, width=2.0, height=2.0)
        dets = [
            ScoredBox(box=box, score=0.9, class_id=0),
            ScoredBox(box=box, score=0.8, class_id=1),
        ]
        assert nms(dets, iou_threshold=0.5) == dets

    def test_score_tie_resolved_by_input_order(self):
        box = Box(center_x=5.0, center_y=5.0, width=2.0, height=2.0)
        first = ScoredBox(box=box, score=0.8, class_id=0)
        second = ScoredBox(box=box, score=0.8, class_id=0)
        assert nms([first, second], iou_threshold=0.5) == [first]

    def test_threshold_is_inclusive_keep(self):
        # IOU exactly at the threshold does not suppress.
        a = Box.from_corners(0.0, 0.0, 2.0, 1.0)
        b = Box.from_corners(0.0, 0.0, 1.0, 1.0)
        assert iou(a, b) == 0.5
        dets = [
            ScoredBox(box=a, score=0.9, class_id=0),
            ScoredBox(box=b, score=0.8, class_id=0),
        ]
        assert nms(dets, iou_threshold=0.5) == dets
        assert nms(dets, iou_threshold=0.49) == dets[:1]

    @pytest.mark.parametrize("threshold", [-0.1, 1.5, math.nan])
    def test_rejects_bad_threshold(self, threshold):
        with pytest.raises(ValueError):
            nms([], iou_threshold=threshold)

    @given(st.lists(scored_boxes, max_size=12), st.floats(0.0, 1.0))
    @settings(max_examples=60)
    def test_survivors_pairwise_separated(self, dets, threshold):
        kept = nms(dets, iou_threshold=threshold)
        for i, first in enumerate(kept):
            for second in kept[i + 1:]:
                if first.class_id == second.class_id:
                    assert iou(first.box, second.box) <= threshold

    @given(st.lists(scored_boxes, max_size=12), st.floats(0.0, 1.0))
    @settings(max_examples=60)
    def test_output_is_subset_sorted_by_score(self, dets, threshold):
        kept = nms(dets, iou_threshold=threshold)
        remaining = list(dets)
        for sb in kept:
            assert sb in remaining
            remaining.remove(sb)
        scores = [sb.score for sb in kept]
        assert scores == sorted(scores, reverse=True)

    @given(st.lists(scored_boxes, max_size=12), st.floats(0.0, 1.0))
    @settings(max_examples=60)
    def test_idempotent(self, dets, threshold):
        kept = nms(dets, iou_threshold=threshold)
        assert nms(kept, iou_threshold=threshold) == kept
