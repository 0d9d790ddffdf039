"""Eye-corner localisation with the vertical variance projection function.

The corner column is where the per-column intensity variance drops most
sharply; the corner row is where that column meets the eyelid edge found
with a Sobel operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import Circle
from .errors import CORNER_NOT_FOUND, DetectionFailure
from .image import BBox, GrayImage

TEMPORAL = "temporal"
NASAL = "nasal"

# image-x direction of each corner relative to the pupil
SIDE_DIRECTION = {TEMPORAL: 1, NASAL: -1}


@dataclass(frozen=True)
class CornerSearchArea:
    bbox: BBox
    side: str = TEMPORAL

    @property
    def pupil_direction(self) -> int:
        """-1 if the pupil lies toward smaller x, +1 otherwise."""
        return -SIDE_DIRECTION[self.side]


@dataclass(frozen=True)
class VpfProfile:
    x_range: tuple[int, int]
    y1: int
    y2: int
    values: np.ndarray
    means: np.ndarray
    pupil_direction: int = -1

    @property
    def columns(self) -> np.ndarray:
        return np.arange(self.x_range[0], self.x_range[1] + 1)


@dataclass(frozen=True)
class EyelidCurve:
    columns: np.ndarray
    rows: np.ndarray
    strength: np.ndarray  # max |d/dy| response per column; 0 means no edge

    def row_at(self, x: int) -> int:
        return int(self.rows[x - self.columns[0]])


@dataclass(frozen=True)
class CornerPoint:
    x: float
    y: float
    vpf_peak_strength: float

    def translated(self, dx: float, dy: float) -> "CornerPoint":
        return CornerPoint(self.x + dx, self.y + dy, self.vpf_peak_strength)


def corner_search_area(pupil: Circle, eye_bbox: BBox, side: str = TEMPORAL) -> CornerSearchArea:
    """Rectangle 1.5R..3.5R beside the pupil, +-R vertically, clipped to ``eye_bbox``."""
    d = SIDE_DIRECTION[side]
    a, b, R = pupil.a, pupil.b, pupil.R
    if d > 0:
        x0, x1 = math.ceil(a + 1.5 * R), math.floor(a + 3.5 * R)
    else:
        x0, x1 = math.ceil(a - 3.5 * R), math.floor(a - 1.5 * R)
    y0, y1 = math.ceil(b - R), math.floor(b + R)
    ex0, ey0, ex1, ey1 = eye_bbox
    x0, x1 = max(x0, ex0), min(x1, ex1)
    y0, y1 = max(y0, ey0), min(y1, ey1)
    if x1 - x0 + 1 < 4 or y1 - y0 + 1 < 3:
        raise DetectionFailure(CORNER_NOT_FOUND, "corner area out of frame")
    return CornerSearchArea((int(x0), int(y0), int(x1), int(y1)), side)


def vpf_vertical(img: GrayImage, area: CornerSearchArea) -> VpfProfile:
    """Per-column mean and variance over the area's rows.

    Uses integer moment sums, so each value is the correctly rounded
    variance ``(n*sum(I^2) - sum(I)^2) / n^2``.
    """
    x0, y1, x1, y2 = area.bbox
    if y2 - y1 + 1 < 2:
        raise ValueError("area must span at least two rows")
    block = img.crop(area.bbox).astype(np.int64)
    n = block.shape[0]
    s = block.sum(axis=0)
    q = (block * block).sum(axis=0)
    means = s / n
    values = (n * q - s * s) / (n * n)
    return VpfProfile((x0, x1), y1, y2, values, means, area.pupil_direction)


def corner_column(profile: VpfProfile) -> int:
    """Column of the steepest variance change; ties go toward the pupil."""
    v = profile.values
    if len(v) < 4:
        raise ValueError("profile needs at least four columns")
    d = np.abs(np.gradient(v))
    peak = d.max()
    if peak == 0:
        raise DetectionFailure(CORNER_NOT_FOUND, "no corner contrast")
    hits = np.flatnonzero(d == peak)
    i = hits[0] if profile.pupil_direction < 0 else hits[-1]
    return profile.x_range[0] + int(i)


def _padded_block(img: GrayImage, bbox: BBox) -> np.ndarray:
    x0, y0, x1, y1 = bbox
    ys = np.clip(np.arange(y0 - 1, y1 + 2), 0, img.height - 1)
    xs = np.clip(np.arange(x0 - 1, x1 + 2), 0, img.width - 1)
    return img.pixels[np.ix_(ys, xs)].astype(np.int32)


def sobel_eyelid(img: GrayImage, area: CornerSearchArea) -> EyelidCurve:
    """Row of strongest horizontal edge per column, 3-column median smoothed.

    The response is the magnitude of the vertical Sobel derivative: eyelids
    are near-horizontal edges, and the horizontal derivative would lock onto
    the vertical end of the eyelid fold at the corner itself.
    """
    x0, y0, x1, y1 = area.bbox
    if x1 - x0 + 1 < 3 or y1 - y0 + 1 < 3:
        raise ValueError("area must be at least 3x3")
    p = _padded_block(img, area.bbox)
    # vertical derivative: smoothing [1, 2, 1] across columns, difference across rows
    sm = p[:, :-2] + 2 * p[:, 1:-1] + p[:, 2:]
    gy = np.abs(sm[2:, :] - sm[:-2, :])
    rows = np.argmax(gy, axis=0)
    strength = gy[rows, np.arange(gy.shape[1])].astype(np.float64)
    rows = rows + y0
    smooth = rows.copy()
    if len(rows) >= 3:
        stacked = np.vstack((rows[:-2], rows[1:-1], rows[2:]))
        smooth[1:-1] = np.median(stacked, axis=0).astype(rows.dtype)
    return EyelidCurve(np.arange(x0, x1 + 1), smooth, strength)


def detect_corner(
    img: GrayImage, pupil: Circle, eye_bbox: BBox, side: str = TEMPORAL
) -> CornerPoint:
    try:
        area = corner_search_area(pupil, eye_bbox, side)
        profile = vpf_vertical(img, area)
        x = corner_column(profile)
        lid = sobel_eyelid(img, area)
    except DetectionFailure as exc:
        raise DetectionFailure(CORNER_NOT_FOUND, f"corner not found: {exc}") from exc
    i = x - profile.x_range[0]
    grad = np.abs(np.gradient(profile.values))
    # the derivative peak can sit on either side of the variance step; read
    # the lid from whichever of x and its pupil-side neighbour has the edge
    xl = x
    xn = x + profile.pupil_direction
    if lid.columns[0] <= xn <= lid.columns[-1] and lid.strength[xn - lid.columns[0]] > lid.strength[x - lid.columns[0]]:
        xl = xn
    return CornerPoint(float(x), float(lid.row_at(xl)), float(grad[i]))
