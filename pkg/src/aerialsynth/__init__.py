"""Synthetic Copy-Paste augmentation pipeline for aerial object detection.

Three stages: crop ground-truth ROIs with margin and attach text prompts,
assemble a balanced size-constrained finetune set for a text-to-image model,
and paste synthesized instances onto real background tiles with exact
annotation emission. See the CLI (`aerialsynth --help`) for the stage
subcommands.
"""

__version__ = "0.1.0"

from .geometry import HBox, QuadBox, clip_box, iou, quad_to_hbox
from .records import DatasetIndex, ImageRecord, ObjectRecord

__all__ = [
    "__version__",
    "HBox",
    "QuadBox",
    "clip_box",
    "iou",
    "quad_to_hbox",
    "DatasetIndex",
    "ImageRecord",
    "ObjectRecord",
]
