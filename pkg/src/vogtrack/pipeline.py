"""Per-frame detection: pupil circle and eye corner from one grayscale frame."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .circle import Circle, FitReport, double_fit
from .config import RunConfig
from .corner import CornerPoint, detect_corner
from .errors import INSUFFICIENT_SAMPLES, DegenerateConfiguration, DetectionFailure, InsufficientPoints
from .image import GrayImage, downscale, isodata_threshold, segment
from .pupil import EyeRegionEstimate, IrisColumnEstimate, extract_eye_region, locate_iris, refine, rescale_to_full
from .sampling import SamplePointSet, sclera_threshold, zigzag_sample

# smallest arc of the fitted circle the retained samples must span (degrees)
MIN_ARC_DEG = 150.0

STAGES = ("downscale", "segment", "locate", "sample", "fit", "corner")


@dataclass
class FrameResult:
    pupil: Circle
    corner: CornerPoint
    fit: FitReport
    samples: SamplePointSet
    eye: EyeRegionEstimate
    iris: IrisColumnEstimate
    timings: dict = field(default_factory=dict)

    @property
    def offset(self) -> tuple[float, float]:
        return (self.pupil.a - self.corner.x, self.pupil.b - self.corner.y)


def arc_coverage(points, circle: Circle) -> float:
    """Degrees of the circle spanned by ``points``: 360 minus the widest
    angular gap between neighbouring points as seen from the centre."""
    p = np.asarray(points, dtype=float)
    if len(p) < 2:
        return 0.0
    ang = np.sort(np.degrees(np.arctan2(p[:, 1] - circle.b, p[:, 0] - circle.a)))
    gaps = np.diff(np.append(ang, ang[0] + 360.0))
    return float(360.0 - gaps.max())


def _pad(bbox, pad, width, height):
    x0, y0, x1, y1 = bbox
    return (max(x0 - pad, 0), max(y0 - pad, 0), min(x1 + pad, width - 1), min(y1 + pad, height - 1))


def detect_frame(img: GrayImage, config: RunConfig = RunConfig(), timings: Optional[dict] = None) -> FrameResult:
    """Run the full detector on one frame.

    Raises DetectionFailure when the eye, iris, border samples or corner
    cannot be found. ``timings`` (if given) receives seconds per stage.
    """
    clock = time.perf_counter
    tm = {} if timings is None else timings
    f = config.downscale_factor

    t0 = clock()
    small = downscale(img, f)
    t1 = clock()
    tm["downscale"] = t1 - t0

    threshold = isodata_threshold(small)
    labels, regions = segment(small, threshold)
    t2 = clock()
    tm["segment"] = t2 - t1

    eye = extract_eye_region(labels, regions, threshold, f, (img.width, img.height))
    iris = locate_iris(small, eye, threshold, config.window_width_ratio)
    refined = refine(small, eye, iris, config.refine_windows)
    eye_full, iris_full = rescale_to_full(refined, iris, f, (img.width, img.height))
    sclera = sclera_threshold(small, config.sclera_margin)
    t3 = clock()
    tm["locate"] = t3 - t2

    # the refined area only sets the threshold; chains may run to the edge of
    # the whole eye region, so block quantisation of the narrow refined box
    # never clips the iris border
    samples = zigzag_sample(
        img,
        iris_full.bbox,
        eye.bbox_fullres,
        eye_full.threshold,
        sclera,
        config.min_samples,
        config.slab0,
    )
    t4 = clock()
    tm["sample"] = t4 - t3

    try:
        fit = double_fit(samples.points, config.outlier_k, config.min_samples)
    except (DegenerateConfiguration, InsufficientPoints) as exc:
        raise DetectionFailure(INSUFFICIENT_SAMPLES, f"insufficient samples: {exc}") from exc
    t5 = clock()
    tm["fit"] = t5 - t4

    pupil = fit.circle
    _, ey0, _, ey1 = eye_full.bbox_fullres
    if abs(pupil.a - iris_full.center_x) > iris_full.window_width or not ey0 <= pupil.b <= ey1:
        # a fit through a handful of lid-edge points can land anywhere
        raise DetectionFailure(INSUFFICIENT_SAMPLES, "insufficient samples: fit outside eye region")
    if arc_coverage(fit.inliers, pupil) < MIN_ARC_DEG:
        # a short arc pins the circle down poorly; refuse rather than guess
        raise DetectionFailure(INSUFFICIENT_SAMPLES, "insufficient samples: arc too short")
    corner_bbox = _pad(eye.bbox_fullres, int(round(pupil.R)), img.width, img.height)
    corner = detect_corner(img, pupil, corner_bbox, config.corner_side)
    t6 = clock()
    tm["corner"] = t6 - t5
    tm["total"] = t6 - t0

    return FrameResult(pupil, corner, fit, samples, eye_full, iris_full, tm)
