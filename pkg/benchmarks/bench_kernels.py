"""Benchmark the compiled box kernels against the pure-Python fallback.

Workloads mirror the pipeline's hot paths: the placement rejection scan
(candidate positions x occupied-box IoU checks) and batch box clipping during
tile assignment.

Run from the repository root after building the extension:

    python setup.py build_ext --inplace
    PYTHONPATH=src python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from aerialsynth.kernels import _box_ops_py

try:
    from aerialsynth.kernels import _box_ops
except ImportError:
    _box_ops = None


def _random_boxes(rng: np.random.Generator, n: int, extent: float) -> np.ndarray:
    xy = rng.uniform(0, extent * 0.8, (n, 2))
    wh = rng.uniform(4, extent * 0.2, (n, 2))
    return np.hstack([xy, xy + wh])


def bench_find_placement(impl, rounds: int = 2000) -> float:
    rng = np.random.default_rng(42)
    occupied = _random_boxes(rng, 24, 512.0)
    xs = rng.integers(0, 480, size=50).astype(np.float64)
    ys = rng.integers(0, 480, size=50).astype(np.float64)
    start = time.perf_counter()
    for _ in range(rounds):
        impl.find_placement(xs, ys, 32.0, 32.0, occupied, 0.0)
    return (time.perf_counter() - start) / rounds


def bench_clip_boxes(impl, rounds: int = 500) -> float:
    rng = np.random.default_rng(7)
    boxes = _random_boxes(rng, 5000, 4096.0)
    window = np.array([512.0, 512.0, 1024.0, 1024.0])
    start = time.perf_counter()
    for _ in range(rounds):
        impl.clip_boxes(boxes, window)
    return (time.perf_counter() - start) / rounds


def bench_iou(impl, rounds: int = 2000) -> float:
    rng = np.random.default_rng(3)
    box = np.array([100.0, 100.0, 200.0, 180.0])
    others = _random_boxes(rng, 2000, 1024.0)
    start = time.perf_counter()
    for _ in range(rounds):
        impl.iou_one_to_many(box, others)
    return (time.perf_counter() - start) / rounds


def main() -> None:
    benches = [
        ("find_placement (50 attempts x 24 occupied)", bench_find_placement),
        ("clip_boxes (5000 boxes)", bench_clip_boxes),
        ("iou_one_to_many (2000 boxes)", bench_iou),
    ]
    print(f"{'workload':<45} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for name, bench in benches:
        py_time = bench(_box_ops_py)
        if _box_ops is None:
            print(f"{name:<45} {py_time * 1e6:>10.1f}us {'(not built)':>12} {'-':>9}")
            continue
        c_time = bench(_box_ops)
        print(
            f"{name:<45} {py_time * 1e6:>10.1f}us {c_time * 1e6:>10.1f}us "
            f"{py_time / c_time:>8.1f}x"
        )


if __name__ == "__main__":
    main()
