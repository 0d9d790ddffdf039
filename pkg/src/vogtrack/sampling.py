"""Zigzag extraction of iris-sclera border points at full resolution.

From the centre column of the iris window a vertical scan finds the iris
pixel just inside the upper and lower borders. Each chain is then extended
one column at a time to the left and right; at horizontal offset ``k`` the
search slab is ``slab0 + k`` rows tall and centred on the previous hit, so
only a narrow band around the border is ever examined.

A border pixel only counts as a sample when the pixels beyond it are
sclera-bright. Iris pixels bordering eyelid skin are followed (to keep the
chain going) but not reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import INSUFFICIENT_SAMPLES, DetectionFailure
from .image import BBox, GrayImage

UPPER = 0
LOWER = 1


@dataclass(frozen=True)
class SamplePointSet:
    points: np.ndarray  # (n, 2) integer pixel coordinates (x, y)
    sides: np.ndarray  # UPPER or LOWER per point
    visited: int = 0

    def __len__(self) -> int:
        return len(self.points)


def sclera_threshold(img_lowres: GrayImage, margin: float = 20.0) -> float:
    """Skin dominates the frame, so its level is the frame median."""
    return float(np.median(img_lowres.pixels)) + margin


def start_row(img: GrayImage, x: int, y0: int, y1: int, threshold: float):
    """Midpoint of the longest dark run in column ``x`` between rows y0..y1."""
    col = img.pixels[y0 : y1 + 1, x] <= threshold
    if not col.any():
        return None
    padded = np.concatenate(([False], col, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    starts, ends = edges[::2], edges[1::2]
    i = int(np.argmax(ends - starts))
    return y0 + int((starts[i] + ends[i] - 1) // 2)


def zigzag_sample(
    img: GrayImage,
    iris_window: BBox,
    eye_bbox: BBox,
    threshold: float,
    sclera_level: float,
    min_samples: int = 8,
    slab0: int = 3,
) -> SamplePointSet:
    """Collect upper and lower iris border points inside ``eye_bbox``."""
    wx0, _, wx1, _ = iris_window
    x0, y0, x1, y1 = eye_bbox
    xc = min(max((wx0 + wx1) // 2, x0), x1)
    yc = start_row(img, xc, y0, y1, threshold)
    if yc is None:
        raise DetectionFailure(INSUFFICIENT_SAMPLES, "insufficient samples")
    xs, ys, sides, visited = kernels.zigzag(
        img.pixels, float(threshold), float(sclera_level), xc, yc, eye_bbox, slab0
    )
    if len(xs) < min_samples:
        raise DetectionFailure(
            INSUFFICIENT_SAMPLES, f"insufficient samples ({len(xs)} < {min_samples})"
        )
    return SamplePointSet(np.column_stack((xs, ys)), sides, visited)
