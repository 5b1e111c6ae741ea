"""COCO-style JSON export for downstream detectors.

Schema (documented contract, see README):
  images:      [{id, file_name, width, height}]           ids dense from 1, index order
  categories:  [{id, name}]                               ids dense from 1, class_names order
  annotations: [{id, image_id, category_id, bbox, area, iscrowd}]
               bbox is [x, y, w, h]; area = w * h; iscrowd always 0

Output bytes are deterministic: fixed key order, fixed array order, floats
rounded to 6 decimals.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..records import DatasetIndex


def _num(value: float) -> float | int:
    rounded = round(value, 6)
    return int(rounded) if rounded == int(rounded) else rounded


def coco_document(index: DatasetIndex) -> dict:
    """Build the COCO dictionary for a dataset index."""
    images = []
    for image_number, img in enumerate(index.images, start=1):
        images.append(
            {
                "id": image_number,
                "file_name": img.path.name,
                "width": img.width,
                "height": img.height,
            }
        )
    categories = [
        {"id": class_number, "name": name}
        for class_number, name in enumerate(index.class_names, start=1)
    ]
    category_ids = {name: i for i, name in enumerate(index.class_names, start=1)}

    annotations = []
    annotation_id = 1
    for image_number, img in enumerate(index.images, start=1):
        for obj in img.objects:
            b = obj.hbox
            annotations.append(
                {
                    "id": annotation_id,
                    "image_id": image_number,
                    "category_id": category_ids[obj.class_name],
                    "bbox": [_num(b.xmin), _num(b.ymin), _num(b.width), _num(b.height)],
                    "area": _num(b.area),
                    "iscrowd": 0,
                }
            )
            annotation_id += 1
    return {"images": images, "categories": categories, "annotations": annotations}


def write_coco_dataset(index: DatasetIndex, out: Path | str) -> None:
    """Write the COCO JSON document; identical bytes for identical indexes."""
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(coco_document(index), ensure_ascii=False, indent=2)
    out.write_text(text + "\n", encoding="utf-8")
