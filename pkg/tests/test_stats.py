"""Class statistics: counts, empirical lists, long-tail policy, JSON export."""

import random
from pathlib import Path

import pytest

from aerialsynth.errors import ConfigError
from aerialsynth.geometry import HBox
from aerialsynth.records import DatasetIndex, ImageRecord, ObjectRecord
from aerialsynth.stats import (
    ClassStats,
    LongTailPolicy,
    compute_class_stats,
    load_stats,
    long_tail_classes,
    save_stats,
    stats_to_dict,
)


def image(image_id, objs, size=512):
    records = tuple(ObjectRecord.from_hbox(HBox(*rect), cls) for rect, cls in objs)
    return ImageRecord(image_id, Path(f"{image_id}.png"), size, size, records)


def test_hand_example():
    # One image: plane boxes 10x10 (area 100, aspect 1) and 20x5 (area 100, aspect 4).
    ds = DatasetIndex.build(
        ".",
        [image("a", [((0, 0, 10, 10), "plane"), ((20, 20, 40, 25), "plane")])],
    )
    stats = compute_class_stats(ds)["plane"]
    assert stats.instance_count == 2
    assert stats.image_count == 1
    assert stats.areas == (100.0, 100.0)
    assert stats.aspect_ratios == (1.0, 4.0)
    assert stats.area_range == (100.0, 100.0)
    assert stats.aspect_range == (1.0, 4.0)


def test_declared_absent_class_gets_zeros():
    ds = DatasetIndex.build(".", [image("a", [((0, 0, 10, 10), "plane")])], ["plane", "bridge"])
    stats = compute_class_stats(ds)
    assert stats["bridge"].instance_count == 0
    assert stats["bridge"].areas == ()
    assert stats["bridge"].area_range is None


def test_empty_dataset():
    assert compute_class_stats(DatasetIndex.build(".", [])) == {}


def test_instance_sum_equals_total_objects(small_dataset):
    from aerialsynth.formats.dota import discover_dataset

    ds = discover_dataset(small_dataset)
    stats = compute_class_stats(ds)
    assert sum(s.instance_count for s in stats.values()) == ds.total_objects


def test_ranges_bracket_lists(small_dataset):
    from aerialsynth.formats.dota import discover_dataset

    stats = compute_class_stats(discover_dataset(small_dataset))
    for s in stats.values():
        if not s.areas:
            continue
        assert s.area_range == (min(s.areas), max(s.areas))
        assert s.aspect_range == (min(s.aspect_ratios), max(s.aspect_ratios))
        assert all(s.area_range[0] <= a <= s.area_range[1] for a in s.areas)


def test_image_order_invariance():
    images = [
        image("a", [((0, 0, 10, 10), "plane")]),
        image("b", [((0, 0, 4, 8), "plane"), ((1, 1, 21, 6), "ship")]),
        image("c", [((2, 2, 32, 17), "plane")]),
    ]
    base = compute_class_stats(DatasetIndex.build(".", images, ["plane", "ship"]))
    rng = random.Random(5)
    for _ in range(5):
        shuffled = images[:]
        rng.shuffle(shuffled)
        permuted = compute_class_stats(DatasetIndex.build(".", shuffled, ["plane", "ship"]))
        assert permuted == base


class TestLongTail:
    def make_stats(self, counts):
        return {
            name: ClassStats.from_pairs(name, [(100.0, 1.0)] * max(count, 0), count)
            for name, count in counts.items()
        }

    def test_threshold_and_order(self):
        stats = self.make_stats({"small-vehicle": 24341, "roundabout": 200, "helipad": 91})
        # instance lists must be at least image_count long; rebuild with counts
        stats = {
            name: ClassStats.from_pairs(name, [(100.0, 1.0)] * count, count)
            for name, count in [("small-vehicle", 24341), ("roundabout", 200), ("helipad", 91)]
        }
        flagged = long_tail_classes(stats, LongTailPolicy())
        assert flagged == ["helipad", "roundabout"]

    def test_zero_count_excluded(self):
        stats = {"ghost": ClassStats.from_pairs("ghost", [], 0)}
        assert long_tail_classes(stats, LongTailPolicy()) == []

    def test_ties_sorted_by_name(self):
        stats = {
            name: ClassStats.from_pairs(name, [(10.0, 1.0)] * 5, 5) for name in ("b", "a", "c")
        }
        assert long_tail_classes(stats, LongTailPolicy()) == ["a", "b", "c"]

    def test_policy_validation(self):
        with pytest.raises(ConfigError):
            LongTailPolicy(max_images=0)


class TestStatsJson:
    def test_round_trip(self, tmp_path, small_dataset):
        from aerialsynth.formats.dota import discover_dataset

        stats = compute_class_stats(discover_dataset(small_dataset))
        save_stats(stats, tmp_path / "stats.json")
        loaded = load_stats(tmp_path / "stats.json")
        assert loaded == stats

    def test_deciles_present(self):
        ds = DatasetIndex.build(
            ".", [image("a", [((0, 0, 10, 10 + i), "plane") for i in range(10)])]
        )
        doc = stats_to_dict(compute_class_stats(ds))
        deciles = doc["classes"]["plane"]["area_deciles"]
        assert len(deciles) == 11
        assert deciles[0] == min(d[0] for d in doc["classes"]["plane"]["instances"])
        assert deciles[-1] == max(d[0] for d in doc["classes"]["plane"]["instances"])

    def test_pairs_preserved_for_compositor(self, tmp_path):
        ds = DatasetIndex.build(
            ".", [image("a", [((0, 0, 10, 10), "plane"), ((0, 0, 20, 5), "plane")])]
        )
        stats = compute_class_stats(ds)
        save_stats(stats, tmp_path / "s.json")
        loaded = load_stats(tmp_path / "s.json")
        assert loaded["plane"].pairs == ((100.0, 1.0), (100.0, 4.0))
