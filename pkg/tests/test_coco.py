"""COCO export: structure, id density, area preservation, determinism."""

import json
from pathlib import Path

import pytest

from aerialsynth.formats.coco import coco_document, write_coco_dataset
from aerialsynth.formats.dota import discover_dataset
from aerialsynth.geometry import HBox
from aerialsynth.records import DatasetIndex, ImageRecord, ObjectRecord


def index_with(objects_by_image, declared=()):
    images = []
    for i, objs in enumerate(objects_by_image):
        records = tuple(ObjectRecord.from_hbox(HBox(*r), c) for r, c in objs)
        images.append(ImageRecord(f"img_{i}", Path(f"img_{i}.png"), 512, 512, records))
    return DatasetIndex.build(".", images, declared_classes=declared)


def test_bbox_and_area_conversion():
    ds = index_with([[((10, 10, 20, 20), "plane")]])
    doc = coco_document(ds)
    ann = doc["annotations"][0]
    assert ann["bbox"] == [10, 10, 10, 10]
    assert ann["area"] == 100
    assert ann["iscrowd"] == 0
    assert ann["image_id"] == 1
    assert ann["category_id"] == 1


def test_empty_index():
    doc = coco_document(DatasetIndex.build(".", []))
    assert doc == {"images": [], "categories": [], "annotations": []}


def test_unused_declared_class_in_categories():
    ds = index_with([[((0, 0, 5, 5), "plane")]], declared=["plane", "bridge"])
    doc = coco_document(ds)
    assert [c["name"] for c in doc["categories"]] == ["plane", "bridge"]
    assert [c["id"] for c in doc["categories"]] == [1, 2]


def test_ids_dense_and_index_ordered():
    ds = index_with(
        [
            [((0, 0, 5, 5), "plane"), ((6, 6, 9, 9), "ship")],
            [((1, 1, 2, 2), "plane")],
        ]
    )
    doc = coco_document(ds)
    assert [im["id"] for im in doc["images"]] == [1, 2]
    assert [a["id"] for a in doc["annotations"]] == [1, 2, 3]
    assert [a["image_id"] for a in doc["annotations"]] == [1, 1, 2]


def test_fractional_bbox_rounded_to_six_decimals():
    ds = index_with([[((0.1234567, 0, 10.5, 3), "plane")]])
    ann = coco_document(ds)["annotations"][0]
    assert ann["bbox"][0] == 0.123457
    assert ann["bbox"][2] == pytest.approx(10.376543)


def test_total_area_preserved(small_dataset):
    ds = discover_dataset(small_dataset)
    doc = coco_document(ds)
    total_json = sum(a["area"] for a in doc["annotations"])
    total_index = sum(o.hbox.area for im in ds.images for o in im.objects)
    assert total_json == pytest.approx(total_index, rel=1e-6)
    assert len(doc["annotations"]) == ds.total_objects


def test_write_deterministic(tmp_path, small_dataset):
    ds = discover_dataset(small_dataset)
    write_coco_dataset(ds, tmp_path / "a.json")
    write_coco_dataset(ds, tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    # And the file is valid JSON with the documented keys.
    doc = json.loads((tmp_path / "a.json").read_text())
    assert set(doc) == {"images", "categories", "annotations"}
