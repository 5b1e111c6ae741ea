"""Dataset analyses: class frequency table, long-tail flags, and diffs.

Rows are sorted by descending image count (ties by name), the ordering used
for the class frequency table, with a long-tail flag per the policy. The
report renders both as a human-readable text table and as JSON that
round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .records import DatasetIndex
from .stats import ClassStats, LongTailPolicy, compute_class_stats, long_tail_classes

BASES = ("original", "tiled", "augmented")


@dataclass(frozen=True)
class ReportRow:
    class_name: str
    image_count: int
    instance_count: int
    area_range: tuple[float, float] | None
    aspect_range: tuple[float, float] | None
    long_tail: bool


@dataclass(frozen=True)
class DatasetReport:
    basis: str
    policy_max_images: int
    rows: tuple[ReportRow, ...]
    total_images: int
    total_instances: int


def build_report(
    ds: DatasetIndex, policy: LongTailPolicy, basis: str = "original"
) -> DatasetReport:
    """Report rows for every class in the index universe, zero-count included."""
    stats = compute_class_stats(ds)
    return report_from_stats(stats, policy, basis, total_images=len(ds.images))


def report_from_stats(
    stats: dict[str, ClassStats],
    policy: LongTailPolicy,
    basis: str,
    total_images: int,
) -> DatasetReport:
    flagged = set(long_tail_classes(stats, policy))
    rows = [
        ReportRow(
            class_name=s.class_name,
            image_count=s.image_count,
            instance_count=s.instance_count,
            area_range=s.area_range,
            aspect_range=s.aspect_range,
            long_tail=s.class_name in flagged,
        )
        for s in stats.values()
    ]
    rows.sort(key=lambda r: (-r.image_count, r.class_name))
    return DatasetReport(
        basis=basis,
        policy_max_images=policy.max_images,
        rows=tuple(rows),
        total_images=total_images,
        total_instances=sum(r.instance_count for r in rows),
    )


def _fmt_range(rng: tuple[float, float] | None) -> str:
    if rng is None:
        return "-"
    return f"{rng[0]:.1f}..{rng[1]:.1f}"


def render_text(report: DatasetReport) -> str:
    """Fixed-width table, one row per class."""
    header = f"{'class':<24} {'images':>8} {'instances':>10} {'area range':>22} {'aspect range':>16} {'long-tail':>10}"
    lines = [
        f"dataset report (basis: {report.basis}, long-tail threshold: {report.policy_max_images} images)",
        header,
        "-" * len(header),
    ]
    for r in report.rows:
        lines.append(
            f"{r.class_name:<24} {r.image_count:>8} {r.instance_count:>10} "
            f"{_fmt_range(r.area_range):>22} {_fmt_range(r.aspect_range):>16} "
            f"{'yes' if r.long_tail else 'no':>10}"
        )
    lines.append("-" * len(header))
    lines.append(
        f"{'total':<24} {report.total_images:>8} {report.total_instances:>10}"
    )
    return "\n".join(lines) + "\n"


def report_to_dict(report: DatasetReport) -> dict:
    return {
        "basis": report.basis,
        "policy_max_images": report.policy_max_images,
        "total_images": report.total_images,
        "total_instances": report.total_instances,
        "rows": [
            {
                "class": r.class_name,
                "image_count": r.image_count,
                "instance_count": r.instance_count,
                "area_range": list(r.area_range) if r.area_range else None,
                "aspect_range": list(r.aspect_range) if r.aspect_range else None,
                "long_tail": r.long_tail,
            }
            for r in report.rows
        ],
    }


def report_from_dict(doc: dict) -> DatasetReport:
    rows = tuple(
        ReportRow(
            class_name=r["class"],
            image_count=int(r["image_count"]),
            instance_count=int(r["instance_count"]),
            area_range=tuple(r["area_range"]) if r["area_range"] else None,
            aspect_range=tuple(r["aspect_range"]) if r["aspect_range"] else None,
            long_tail=bool(r["long_tail"]),
        )
        for r in doc["rows"]
    )
    return DatasetReport(
        basis=doc["basis"],
        policy_max_images=int(doc["policy_max_images"]),
        rows=rows,
        total_images=int(doc["total_images"]),
        total_instances=int(doc["total_instances"]),
    )


def save_report(report: DatasetReport, out_dir: Path | str, stem: str = "report") -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{stem}.json").write_text(
        json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8"
    )
    (out_dir / f"{stem}.txt").write_text(render_text(report), encoding="utf-8")


def load_report(path: Path | str) -> DatasetReport:
    return report_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass(frozen=True)
class DiffRow:
    class_name: str
    image_count_a: int
    image_count_b: int
    instance_count_a: int
    instance_count_b: int

    @property
    def image_delta(self) -> int:
        return self.image_count_b - self.image_count_a

    @property
    def instance_delta(self) -> int:
        return self.instance_count_b - self.instance_count_a


def diff_reports(a: DatasetReport, b: DatasetReport) -> list[DiffRow]:
    """Per-class deltas over the union of both class sets (absent side = 0)."""
    rows_a = {r.class_name: r for r in a.rows}
    rows_b = {r.class_name: r for r in b.rows}
    diff = []
    for name in sorted(set(rows_a) | set(rows_b)):
        ra = rows_a.get(name)
        rb = rows_b.get(name)
        diff.append(
            DiffRow(
                class_name=name,
                image_count_a=ra.image_count if ra else 0,
                image_count_b=rb.image_count if rb else 0,
                instance_count_a=ra.instance_count if ra else 0,
                instance_count_b=rb.instance_count if rb else 0,
            )
        )
    return diff


def diff_to_dict(diff: list[DiffRow]) -> dict:
    return {
        "classes": [
            {
                "class": d.class_name,
                "image_count_a": d.image_count_a,
                "image_count_b": d.image_count_b,
                "image_delta": d.image_delta,
                "instance_count_a": d.instance_count_a,
                "instance_count_b": d.instance_count_b,
                "instance_delta": d.instance_delta,
            }
            for d in diff
        ]
    }


def render_diff_text(diff: list[DiffRow]) -> str:
    header = (
        f"{'class':<24} {'images a':>9} {'images b':>9} {'d images':>9} "
        f"{'inst a':>8} {'inst b':>8} {'d inst':>8}"
    )
    lines = [header, "-" * len(header)]
    for d in diff:
        lines.append(
            f"{d.class_name:<24} {d.image_count_a:>9} {d.image_count_b:>9} {d.image_delta:>+9} "
            f"{d.instance_count_a:>8} {d.instance_count_b:>8} {d.instance_delta:>+8}"
        )
    return "\n".join(lines) + "\n"
