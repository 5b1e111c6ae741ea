"""DOTA annotation parsing, writing, round-trips, and dataset discovery."""

from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from aerialsynth.errors import AnnotationParseError, DatasetError
from aerialsynth.formats.dota import (
    discover_dataset,
    format_coordinate,
    parse_dota_annotation,
    write_dota_annotation,
)
from aerialsynth.geometry import HBox, QuadBox
from aerialsynth.records import ObjectRecord

from conftest import quad_line, write_dota_dataset


class TestParse:
    def test_headers_skipped(self):
        text = "imagesource:GoogleEarth\ngsd:0.1\n10 10 20 10 20 20 10 20 plane 0\n"
        records = parse_dota_annotation(text, "img")
        assert len(records) == 1
        assert records[0].class_name == "plane"
        assert records[0].hbox == HBox(10, 10, 20, 20)
        assert records[0].difficult is False

    def test_empty_text(self):
        assert parse_dota_annotation("", "img") == []

    def test_blank_lines_skipped(self):
        text = "\n\n10 10 20 10 20 20 10 20 plane 0\n\n"
        assert len(parse_dota_annotation(text, "img")) == 1

    def test_wrong_arity(self):
        with pytest.raises(AnnotationParseError) as info:
            parse_dota_annotation("1 2 3 plane 0", "img")
        assert info.value.line_number == 1

    def test_line_number_reported(self):
        text = "10 10 20 10 20 20 10 20 plane 0\n1 2 3 plane 0\n"
        with pytest.raises(AnnotationParseError) as info:
            parse_dota_annotation(text, "img")
        assert info.value.line_number == 2

    def test_unparseable_number(self):
        with pytest.raises(AnnotationParseError):
            parse_dota_annotation("a 10 20 10 20 20 10 20 plane 0", "img")

    def test_bad_difficult_flag(self):
        with pytest.raises(AnnotationParseError):
            parse_dota_annotation("10 10 20 10 20 20 10 20 plane 2", "img")

    def test_negative_coordinates_clamped_to_zero(self):
        records = parse_dota_annotation("-3 -1 20 -1 20 20 -3 20 plane 0", "img")
        assert records[0].hbox == HBox(0, 0, 20, 20)

    def test_degenerate_quad_is_parse_error(self):
        with pytest.raises(AnnotationParseError) as info:
            parse_dota_annotation("5 5 5 5 5 5 5 5 plane 0", "img")
        assert info.value.line_number == 1

    def test_difficult_one(self):
        records = parse_dota_annotation("10 10 20 10 20 20 10 20 plane 1", "img")
        assert records[0].difficult is True


class TestWrite:
    def test_empty(self):
        assert write_dota_annotation([]) == ""

    def test_integer_formatting(self):
        rec = ObjectRecord.from_hbox(HBox(10, 10, 20, 20), "plane")
        line = write_dota_annotation([rec])
        assert line == "10 10 20 10 20 20 10 20 plane 0\n"

    def test_fractional_formatting(self):
        rec = ObjectRecord.from_hbox(HBox(10.5, 10, 20, 20), "plane")
        assert "10.5" in write_dota_annotation([rec])

    def test_format_coordinate(self):
        assert format_coordinate(10.0) == "10"
        assert format_coordinate(10.5) == "10.5"
        assert format_coordinate(0.25) == "0.25"

    def test_round_trip_single(self):
        text = "10 10 20 10 20 20 10 20 plane 0\n"
        records = parse_dota_annotation(text, "img")
        assert write_dota_annotation(records) == text


coordinates = st.one_of(
    st.integers(0, 4096).map(float),
    st.integers(0, 8191).map(lambda n: n / 2.0),
)


@st.composite
def object_records(draw):
    xs = sorted(draw(st.lists(coordinates, min_size=2, max_size=2, unique=True)))
    ys = sorted(draw(st.lists(coordinates, min_size=2, max_size=2, unique=True)))
    quad = QuadBox(xs[0], ys[0], xs[1], ys[0], xs[1], ys[1], xs[0], ys[1])
    class_name = draw(st.sampled_from(["plane", "ship", "helipad", "small-vehicle"]))
    difficult = draw(st.booleans())
    return ObjectRecord.from_quad(quad, class_name, difficult)


@given(st.lists(object_records(), max_size=12))
def test_write_parse_round_trip(records):
    text = write_dota_annotation(records)
    parsed = parse_dota_annotation(text, "img")
    assert parsed == records
    assert write_dota_annotation(parsed) == text


class TestDiscover:
    def test_pairs_and_negatives(self, small_dataset):
        ds = discover_dataset(small_dataset)
        assert len(ds.images) == 5
        by_id = {im.image_id: im for im in ds.images}
        assert len(by_id["scene_a"].objects) == 3
        assert len(by_id["scene_b"].objects) == 2
        assert by_id["scene_c"].objects == ()  # empty annotation file
        assert by_id["neg_1"].objects == ()  # no annotation file
        assert by_id["neg_1"].width == 256

    def test_sorted_by_stem(self, small_dataset):
        ds = discover_dataset(small_dataset)
        ids = [im.image_id for im in ds.images]
        assert ids == sorted(ids)

    def test_class_universe(self, small_dataset):
        ds = discover_dataset(small_dataset)
        assert set(ds.class_names) == {"plane", "ship", "helipad"}

    def test_declared_classes_pin_order(self, small_dataset):
        ds = discover_dataset(small_dataset, declared_classes=["helipad", "plane", "ship", "bridge"])
        assert ds.class_names == ("helipad", "plane", "ship", "bridge")

    def test_empty_directory(self, tmp_path):
        (tmp_path / "images").mkdir()
        ds = discover_dataset(tmp_path)
        assert ds.images == ()

    def test_missing_images_dir(self, tmp_path):
        with pytest.raises(DatasetError):
            discover_dataset(tmp_path)

    def test_duplicate_stems(self, tmp_path):
        write_dota_dataset(tmp_path, [("same", 10, 10, [])])
        # Same stem, different suffix.
        from conftest import gradient_image

        gradient_image(10, 10).save(tmp_path / "images" / "same.jpg")
        with pytest.raises(DatasetError):
            discover_dataset(tmp_path)

    def test_unreadable_image(self, tmp_path):
        (tmp_path / "images").mkdir()
        (tmp_path / "images" / "junk.png").write_bytes(b"not a png")
        with pytest.raises(DatasetError):
            discover_dataset(tmp_path)

    def test_out_of_bounds_boxes_clamped(self, tmp_path):
        root = write_dota_dataset(
            tmp_path, [("img", 100, 80, [quad_line(90, 70, 105, 85, "plane")])]
        )
        ds = discover_dataset(root)
        assert ds.images[0].objects[0].hbox == HBox(90, 70, 100, 80)
