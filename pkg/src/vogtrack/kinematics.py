"""Head-compensated gaze offsets, velocities and trace statistics.

The gaze offset of a frame is pupil centre minus eye corner, so a head
translation that moves both landmarks together cancels out of every
velocity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .circle import Circle
from .corner import CornerPoint

OK = "ok"


@dataclass(frozen=True)
class Calibration:
    deg_per_px_x: float = 0.05
    deg_per_px_y: float = 0.05
    viewing_distance: float = 70.0  # cm, informational

    def __post_init__(self):
        if self.deg_per_px_x <= 0 or self.deg_per_px_y <= 0:
            raise ValueError("calibration scales must be positive")


@dataclass(frozen=True)
class GazeObservation:
    t: float
    pupil: Optional[Circle] = None
    corner: Optional[CornerPoint] = None
    status: str = OK

    def __post_init__(self):
        if self.t < 0:
            raise ValueError("timestamps must be non-negative")
        if self.status == OK and (self.pupil is None or self.corner is None):
            raise ValueError("an ok observation needs both pupil and corner")

    @property
    def ok(self) -> bool:
        return self.status == OK

    @property
    def offset(self) -> Optional[tuple[float, float]]:
        if not self.ok:
            return None
        return (self.pupil.a - self.corner.x, self.pupil.b - self.corner.y)

    @classmethod
    def failed(cls, t: float, reason: str) -> "GazeObservation":
        return cls(t=t, status=reason)


def velocity(o1: GazeObservation, o2: GazeObservation) -> Optional[tuple[float, float]]:
    """Offset change per second between two observations, in px/s.

    Returns None when either observation failed. ``o2`` must be later than
    ``o1``.
    """
    if not o2.t > o1.t:
        raise ValueError(f"timestamps must increase ({o1.t} -> {o2.t})")
    if not (o1.ok and o2.ok):
        return None
    (x1, y1), (x2, y2) = o1.offset, o2.offset
    dt = o2.t - o1.t
    return ((x2 - x1) / dt, (y2 - y1) / dt)


def to_degrees(v_px: tuple[float, float], calib: Calibration) -> tuple[float, float]:
    return (v_px[0] * calib.deg_per_px_x, v_px[1] * calib.deg_per_px_y)


def check_trace(trace: Sequence[GazeObservation]) -> None:
    for a, b in zip(trace, trace[1:]):
        if not b.t > a.t:
            raise ValueError(f"timestamps must increase strictly ({a.t} -> {b.t})")


def pair_velocities(trace: Sequence[GazeObservation]):
    """Velocities between consecutive ok observations; failed frames are skipped."""
    check_trace(trace)
    ok = [o for o in trace if o.ok]
    return [(a, b, velocity(a, b)) for a, b in zip(ok, ok[1:])]


@dataclass
class TraceStats:
    mean_speed_x: float = 0.0
    mean_speed_y: float = 0.0
    linear_range_x: float = 0.0
    linear_range_y: float = 0.0
    r_squared: float = 0.0
    pairs: int = 0
    skipped_windows: list = field(default_factory=list)


def fixation_stats(
    trace: Sequence[GazeObservation],
    dwell_windows: Sequence[tuple[float, float]],
    calib: Calibration = Calibration(),
) -> TraceStats:
    """Mean absolute angular speed over consecutive ok pairs inside dwell windows.

    A pair counts only when both observations fall inside the same window, so
    saccades between targets are excluded. Windows with fewer than two usable
    observations are listed in ``skipped_windows``.
    """
    check_trace(trace)
    sx = sy = 0.0
    pairs = 0
    skipped = []
    for w, (t0, t1) in enumerate(dwell_windows):
        inside = [o for o in trace if t0 <= o.t <= t1 and o.ok]
        if len(inside) < 2:
            skipped.append(w)
            continue
        for a, b in zip(inside, inside[1:]):
            vx, vy = to_degrees(velocity(a, b), calib)
            sx += abs(vx)
            sy += abs(vy)
            pairs += 1
    if pairs == 0:
        return TraceStats(skipped_windows=skipped)
    return TraceStats(mean_speed_x=sx / pairs, mean_speed_y=sy / pairs, pairs=pairs, skipped_windows=skipped)


class InsufficientRangeData(ValueError):
    pass


@dataclass(frozen=True)
class RangeFit:
    half_range: float  # widest symmetric |angle| bound where the line holds
    r_squared: float
    slope: float  # px per degree
    intercept: float
    angles: np.ndarray
    offsets: np.ndarray
    residuals_deg: np.ndarray


def _line_fit(x, y):
    A = np.column_stack((x, np.ones_like(x)))
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return float(slope), float(intercept), min(max(r2, 0.0), 1.0)


def linear_range(
    trace: Sequence[GazeObservation],
    dwells: Sequence[tuple[float, float, float]],
    axis: str = "x",
    max_residual_deg: float = 0.5,
) -> RangeFit:
    """Linearity of recovered offset against true gaze angle.

    ``dwells`` holds ``(t_start, t_end, true_angle_deg)``. The median offset
    of each dwell is regressed on its angle; the range is the widest interval
    ``[-h, h]`` over which every dwell's angle, read back through the fitted
    line, is within ``max_residual_deg`` of the truth.
    """
    check_trace(trace)
    k = 0 if axis == "x" else 1
    by_angle: dict[float, list[float]] = {}
    for t0, t1, angle in dwells:
        offs = [o.offset[k] for o in trace if t0 <= o.t <= t1 and o.ok]
        if offs:
            by_angle.setdefault(float(angle), []).extend(offs)
    if len(by_angle) < 3:
        raise InsufficientRangeData("insufficient range data")
    angles = np.array(sorted(by_angle))
    offsets = np.array([float(np.median(by_angle[a])) for a in angles])
    if np.ptp(offsets) == 0:
        raise InsufficientRangeData("insufficient range data")

    best = None
    for h in sorted(set(np.abs(angles)), reverse=True):
        sel = np.abs(angles) <= h + 1e-12
        if sel.sum() < 3:
            break
        slope, icpt, r2 = _line_fit(angles[sel], offsets[sel])
        if slope == 0:
            continue
        resid = (offsets[sel] - icpt) / slope - angles[sel]
        if np.all(np.abs(resid) <= max_residual_deg):
            best = RangeFit(float(h), r2, slope, icpt, angles[sel], offsets[sel], resid)
            break
    if best is None:
        slope, icpt, r2 = _line_fit(angles, offsets)
        resid = (offsets - icpt) / slope if slope else np.full_like(offsets, math.inf)
        best = RangeFit(0.0, r2, slope, icpt, angles, offsets, resid - angles)
    return best
