"""Coarse eye localisation on the downscaled frame.

The two largest dark regions are taken to be the eyebrow and the eye; a
window 0.15 eye-widths wide is slid across the eye to find the iris column,
the eye area is narrowed around it, and the threshold is recomputed there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import EYE_AREA_NOT_FOUND, IRIS_NOT_FOUND, DetectionFailure
from .image import BBox, GrayImage, LabelMap, RegionStats, isodata_threshold


@dataclass(frozen=True)
class EyeRegionEstimate:
    bbox_lowres: BBox
    bbox_fullres: BBox
    threshold: float
    eyebrow_bbox: BBox
    factor: int = 1

    @property
    def width(self) -> int:
        return self.bbox_lowres[2] - self.bbox_lowres[0] + 1

    @property
    def height(self) -> int:
        return self.bbox_lowres[3] - self.bbox_lowres[1] + 1


@dataclass(frozen=True)
class IrisColumnEstimate:
    window_x: int
    window_width: int
    window_height: int
    score: int
    window_y: int = 0

    @property
    def center_x(self) -> float:
        return self.window_x + (self.window_width - 1) / 2

    @property
    def bbox(self) -> BBox:
        return (
            self.window_x,
            self.window_y,
            self.window_x + self.window_width - 1,
            self.window_y + self.window_height - 1,
        )


def _scale_bbox(bbox: BBox, factor: int, size: Optional[tuple[int, int]]) -> BBox:
    x0, y0, x1, y1 = (v * factor for v in bbox)
    if size is not None:
        w, h = size
        x0, x1 = min(max(x0, 0), w - 1), min(max(x1, 0), w - 1)
        y0, y1 = min(max(y0, 0), h - 1), min(max(y1, 0), h - 1)
    return (x0, y0, x1, y1)


def extract_eye_region(
    labelmap: LabelMap,
    regions: list[RegionStats],
    threshold: float,
    factor: int = 1,
    full_size: Optional[tuple[int, int]] = None,
) -> EyeRegionEstimate:
    """Pick eyebrow and eye from the two largest regions; the lower one is the eye."""
    if len(regions) < 2:
        raise DetectionFailure(EYE_AREA_NOT_FOUND, "eye area not found")
    first, second = regions[0], regions[1]
    if first.centroid[1] > second.centroid[1]:
        eye, brow = first, second
    else:
        eye, brow = second, first
    if full_size is None:
        full_size = (labelmap.width * factor, labelmap.height * factor)
    return EyeRegionEstimate(
        bbox_lowres=eye.bbox,
        bbox_fullres=_scale_bbox(eye.bbox, factor, full_size),
        threshold=threshold,
        eyebrow_bbox=brow.bbox,
        factor=factor,
    )


def window_width_for(eye_width: int, ratio: float = 0.15) -> int:
    return max(1, int(math.floor(ratio * eye_width + 0.5)))


def locate_iris(
    img_lowres: GrayImage, eye: EyeRegionEstimate, threshold: float, ratio: float = 0.15
) -> IrisColumnEstimate:
    """Slide the iris window across the eye area; score is the dark-pixel count."""
    x0, y0, x1, y1 = eye.bbox_lowres
    if x1 < x0 or y1 < y0:
        raise DetectionFailure(IRIS_NOT_FOUND, "iris not found")
    width = x1 - x0 + 1
    win = window_width_for(width, ratio)
    cols = (img_lowres.crop(eye.bbox_lowres) <= threshold).sum(axis=0)
    csum = np.concatenate(([0], np.cumsum(cols)))
    scores = csum[win:] - csum[:-win]
    best = int(np.argmax(scores))
    if scores[best] == 0:
        raise DetectionFailure(IRIS_NOT_FOUND, "iris not found")
    return IrisColumnEstimate(
        window_x=x0 + best,
        window_width=win,
        window_height=y1 - y0 + 1,
        score=int(scores[best]),
        window_y=y0,
    )


def refine(
    img_lowres: GrayImage,
    eye: EyeRegionEstimate,
    iris: IrisColumnEstimate,
    n_windows: int = 3,
) -> EyeRegionEstimate:
    """Narrow the eye area to ``n_windows`` iris widths around the iris window
    and recompute the threshold inside it."""
    x0, y0, x1, y1 = eye.bbox_lowres
    w = iris.window_width
    half = (n_windows - 1) * w // 2
    nx0 = max(x0, iris.window_x - half)
    nx1 = min(x1, iris.window_x + w - 1 + ((n_windows - 1) * w - half))
    bbox = (nx0, y0, nx1, y1)
    threshold = isodata_threshold(img_lowres, bbox)
    return replace(
        eye,
        bbox_lowres=bbox,
        bbox_fullres=_scale_bbox(bbox, eye.factor, None),
        threshold=threshold,
    )


def rescale_to_full(
    eye: EyeRegionEstimate,
    iris: IrisColumnEstimate,
    factor: int,
    full_size: Optional[tuple[int, int]] = None,
) -> tuple[EyeRegionEstimate, IrisColumnEstimate]:
    """Multiply every coordinate and extent by ``factor``; threshold unchanged."""
    eye_full = replace(eye, bbox_fullres=_scale_bbox(eye.bbox_lowres, factor, full_size))
    iris_full = IrisColumnEstimate(
        window_x=iris.window_x * factor,
        window_width=iris.window_width * factor,
        window_height=iris.window_height * factor,
        score=iris.score,
        window_y=iris.window_y * factor,
    )
    return eye_full, iris_full
