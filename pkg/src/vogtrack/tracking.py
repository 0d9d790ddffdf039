"""Sequence tracking: per-frame detection plus velocities, as CSV rows."""

from __future__ import annotations

import csv
import io
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

from .config import RunConfig
from .errors import DetectionFailure
from .image import GrayImage, read_pgm
from .kinematics import Calibration, GazeObservation, to_degrees, velocity
from .pipeline import FrameResult, detect_frame


@dataclass(frozen=True)
class TraceRecord:
    frame_index: int
    t: float
    pupil_x: Optional[float] = None
    pupil_y: Optional[float] = None
    radius: Optional[float] = None
    corner_x: Optional[float] = None
    corner_y: Optional[float] = None
    offset_x: Optional[float] = None
    offset_y: Optional[float] = None
    vel_x: Optional[float] = None
    vel_y: Optional[float] = None
    status: str = "ok"

    def row(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                out.append("")
            elif isinstance(v, float):
                out.append(f"{v:.6f}")
            else:
                out.append(str(v))
        return out


TRACE_FIELDS = tuple(f.name for f in fields(TraceRecord))


def observe(img: GrayImage, t: float, config: RunConfig) -> tuple[GazeObservation, Optional[FrameResult]]:
    try:
        r = detect_frame(img, config)
    except DetectionFailure as exc:
        return GazeObservation.failed(t, exc.code), None
    return GazeObservation(t, r.pupil, r.corner), r


def records_from(indices: Sequence[int], observations: Sequence[GazeObservation], config: RunConfig):
    """TraceRecords with velocity (deg/s) against the previous ok frame."""
    calib = Calibration(config.deg_per_px_x, config.deg_per_px_y)
    out = []
    prev = None
    for i, o in zip(indices, observations):
        if not o.ok:
            out.append(TraceRecord(i, o.t, status=o.status))
            continue
        vx = vy = None
        if prev is not None:
            vx, vy = to_degrees(velocity(prev, o), calib)
        ox, oy = o.offset
        out.append(TraceRecord(
            i, o.t, o.pupil.a, o.pupil.b, o.pupil.R, o.corner.x, o.corner.y, ox, oy, vx, vy,
        ))
        prev = o
    return out


def track_images(
    images: Sequence[GrayImage],
    times: Sequence[float],
    config: RunConfig = RunConfig(),
    indices: Optional[Sequence[int]] = None,
    jobs: int = 1,
):
    """Detect every frame (optionally in parallel) and return records in frame order."""
    if len(images) != len(times):
        raise ValueError("one timestamp per frame is required")
    indices = list(range(len(images))) if indices is None else list(indices)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            obs = list(pool.map(lambda it: observe(it[0], it[1], config)[0], zip(images, times)))
    else:
        obs = [observe(img, t, config)[0] for img, t in zip(images, times)]
    return records_from(indices, obs, config)


_NUM = re.compile(r"(\d+)")


def numbered_frames(directory) -> list[tuple[int, Path]]:
    """PGM files in ``directory`` keyed by the last number in their name."""
    out = []
    for p in Path(directory).iterdir():
        if p.suffix.lower() != ".pgm":
            continue
        nums = _NUM.findall(p.stem)
        if nums:
            out.append((int(nums[-1]), p))
    out.sort()
    return out


def track_directory(directory, config: RunConfig = RunConfig(), jobs: int = 1):
    frames = numbered_frames(directory)
    if not frames:
        raise FileNotFoundError(f"no numbered PGM frames in {directory}")
    times = {i: i / config.fps for i, _ in frames}
    manifest = Path(directory) / "manifest.csv"
    if manifest.exists():
        with open(manifest, newline="", encoding="utf-8") as fh:
            for r in csv.DictReader(fh):
                if r.get("t") not in (None, ""):
                    times[int(r["frame_index"])] = float(r["t"])
    idx = [i for i, _ in frames]
    images = [read_pgm(p) for _, p in frames]
    return track_images(images, [times[i] for i in idx], config, idx, jobs)


def trace_csv(records: Sequence[TraceRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_FIELDS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()
