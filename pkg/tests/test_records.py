"""Data model invariants: object/image/index validation and clamping."""

from pathlib import Path

import pytest

from aerialsynth.errors import DatasetError, GeometryError
from aerialsynth.geometry import HBox, QuadBox
from aerialsynth.records import (
    DatasetIndex,
    ImageRecord,
    ObjectRecord,
    clamp_object_to_image,
)


def obj(xmin, ymin, xmax, ymax, class_name="plane", difficult=False):
    return ObjectRecord.from_hbox(HBox(xmin, ymin, xmax, ymax), class_name, difficult)


class TestObjectRecord:
    def test_from_quad_derives_hull(self):
        record = ObjectRecord.from_quad(QuadBox(5, 0, 10, 5, 5, 10, 0, 5), "ship")
        assert record.hbox == HBox(0, 0, 10, 10)

    def test_empty_class_rejected(self):
        with pytest.raises(GeometryError):
            obj(0, 0, 1, 1, class_name="")

    def test_mismatched_hbox_rejected(self):
        quad = QuadBox(0, 0, 10, 0, 10, 10, 0, 10)
        with pytest.raises(GeometryError):
            ObjectRecord(geometry=quad, hbox=HBox(0, 0, 5, 5), class_name="plane")

    def test_difficult_preserved(self):
        assert obj(0, 0, 1, 1, difficult=True).difficult is True


class TestClamping:
    def test_inside_unchanged(self):
        record = obj(10, 10, 20, 20)
        assert clamp_object_to_image(record, 100, 100) == record

    def test_overshoot_clamped(self):
        record = ObjectRecord.from_quad(QuadBox(90, 90, 105, 90, 105, 103, 90, 103), "plane")
        clamped = clamp_object_to_image(record, 100, 100)
        assert clamped is not None
        assert clamped.hbox == HBox(90, 90, 100, 100)

    def test_fully_outside_dropped(self):
        record = obj(150, 150, 160, 160)
        assert clamp_object_to_image(record, 100, 100) is None


class TestImageRecord:
    def test_bounds_enforced(self):
        with pytest.raises(GeometryError):
            ImageRecord("img", Path("x.png"), 50, 50, (obj(10, 10, 60, 20),))

    def test_negative_flag(self):
        assert ImageRecord("img", Path("x.png"), 10, 10).is_negative
        assert not ImageRecord("img", Path("x.png"), 100, 100, (obj(0, 0, 5, 5),)).is_negative

    def test_positive_extent_required(self):
        with pytest.raises(DatasetError):
            ImageRecord("img", Path("x.png"), 0, 10)


class TestDatasetIndex:
    def test_duplicate_ids_rejected(self):
        a = ImageRecord("same", Path("a.png"), 10, 10)
        b = ImageRecord("same", Path("b.png"), 10, 10)
        with pytest.raises(DatasetError):
            DatasetIndex(Path("."), (a, b), ())

    def test_undeclared_class_rejected(self):
        img = ImageRecord("a", Path("a.png"), 10, 10, (obj(0, 0, 5, 5, "plane"),))
        with pytest.raises(DatasetError):
            DatasetIndex(Path("."), (img,), ())

    def test_build_orders_declared_then_first_seen(self):
        images = [
            ImageRecord("a", Path("a.png"), 10, 10, (obj(0, 0, 5, 5, "ship"),)),
            ImageRecord("b", Path("b.png"), 10, 10, (obj(0, 0, 5, 5, "plane"),)),
        ]
        index = DatasetIndex.build(".", images, declared_classes=["helipad"])
        assert index.class_names == ("helipad", "ship", "plane")

    def test_negatives_and_totals(self):
        images = [
            ImageRecord("a", Path("a.png"), 10, 10, (obj(0, 0, 5, 5),)),
            ImageRecord("b", Path("b.png"), 10, 10),
        ]
        index = DatasetIndex.build(".", images)
        assert index.total_objects == 1
        assert [im.image_id for im in index.negatives()] == ["b"]
