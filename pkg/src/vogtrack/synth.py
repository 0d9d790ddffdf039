"""Deterministic synthetic eye images with exact ground truth.

A scene is skin with an eyebrow band above an almond-shaped eye opening
bounded by two eyelid curves ``ey -+ h * (1 - u^2)^p`` that meet
tangentially at the corners. The upper lid carries a dark lash band that
fades into the skin, the lower lid a lighter one; both end in a vertical
cut at the lid junction. Toward each corner the opening darkens into a
canthus wedge. Inside the opening sit the sclera, the iris disc and the
concentric pupil disc.

Edges are anti-aliased by analytic pixel coverage, so gaze changes smaller
than a pixel still change the image.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional

import numpy as np

from .image import GrayImage
from .kinematics import Calibration

# Gaze-to-pixel scale of the synthetic eye: 2 px per degree.
SYNTH_CALIBRATION = Calibration(deg_per_px_x=0.5, deg_per_px_y=0.5)

MANIFEST_FIELDS = (
    "frame_index",
    "t",
    "true_pupil_x",
    "true_pupil_y",
    "true_corner_x",
    "true_corner_y",
    "gaze_deg_x",
    "gaze_deg_y",
)


@dataclass(frozen=True)
class EyeScene:
    width: int = 640
    height: int = 480
    skin_level: float = 180.0
    sclera_level: float = 220.0
    iris_level: float = 60.0
    pupil_level: float = 20.0
    eyebrow_level: float = 40.0
    upper_lash_level: float = 20.0
    lower_lash_level: float = 90.0
    eye_center: tuple[float, float] = (320.0, 290.0)
    # lid junctions sit on pixel boundaries so the corner column is sharp
    eye_half_width: float = 180.5
    iris_center: tuple[float, float] = (320.0, 290.0)
    iris_radius: float = 72.0
    pupil_radius: float = 26.0
    eyelid_aperture: float = 232.0
    upper_lash: tuple[float, float] = (20.0, 30.0)  # solid, fade (px)
    lower_lash: tuple[float, float] = (18.0, 24.0)
    eyebrow_band: tuple[float, float, float, float] = (140.0, 70.0, 500.0, 120.0)
    wedge_length: float = 24.0
    lid_power: float = 1.5  # >1 makes the lids meet tangentially at the corners
    wedge_level: float = 60.0
    noise_sigma: float = 0.0
    seed: int = 0
    antialias: bool = True

    def __post_init__(self):
        if not self.pupil_radius < self.iris_radius:
            raise ValueError("pupil radius must be smaller than iris radius")
        if self.pupil_radius <= 0:
            raise ValueError("pupil radius must be positive")
        if not self.sclera_level > self.iris_level > self.pupil_level:
            raise ValueError("need sclera_level > iris_level > pupil_level")
        if self.eyelid_aperture < 0:
            raise ValueError("eyelid aperture must be non-negative")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        if self.eye_half_width <= 0:
            raise ValueError("eye_half_width must be positive")

    @property
    def corners(self) -> dict[str, tuple[float, float]]:
        ex, ey = self.eye_center
        return {"temporal": (ex + self.eye_half_width, ey), "nasal": (ex - self.eye_half_width, ey)}

    def translated(self, dx: float, dy: float) -> "EyeScene":
        x0, y0, x1, y1 = self.eyebrow_band
        return replace(
            self,
            eye_center=(self.eye_center[0] + dx, self.eye_center[1] + dy),
            iris_center=(self.iris_center[0] + dx, self.iris_center[1] + dy),
            eyebrow_band=(x0 + dx, y0 + dy, x1 + dx, y1 + dy),
        )


@dataclass(frozen=True)
class GroundTruth:
    pupil_center: tuple[float, float]
    iris_radius: float
    corner: tuple[float, float]
    visible_iris_fraction: float
    gaze_angle: tuple[float, float] = (0.0, 0.0)
    corners: dict = field(default_factory=dict, compare=False)


def _overlap(c, lo, hi):
    """Length of [c-0.5, c+0.5] intersected with [lo, hi]."""
    return np.clip(np.minimum(c + 0.5, hi) - np.maximum(c - 0.5, lo), 0.0, 1.0)


def _step(v, aa):
    # coverage of a pixel by the half-space "signed distance > 0"
    if aa:
        return np.clip(v + 0.5, 0.0, 1.0)
    return (v > 0).astype(np.float64)


def _lids(scene: EyeScene, X):
    ex, ey = scene.eye_center
    u = (X - ex) / scene.eye_half_width
    lift = np.where(np.abs(u) <= 1, (scene.eyelid_aperture / 2) * np.abs(1 - u * u) ** scene.lid_power, 0.0)
    return ey - lift, ey + lift


def _render_clean(scene: EyeScene) -> np.ndarray:
    aa = scene.antialias
    img = np.full((scene.height, scene.width), scene.skin_level, dtype=np.float64)

    bx0, by0, bx1, by1 = scene.eyebrow_band
    xs = np.arange(scene.width, dtype=np.float64)
    ys = np.arange(scene.height, dtype=np.float64)
    if aa:
        cov = _overlap(ys, by0, by1)[:, None] * _overlap(xs, bx0, bx1)[None, :]
    else:
        cov = ((ys >= by0) & (ys <= by1))[:, None] & ((xs >= bx0) & (xs <= bx1))[None, :]
    img = img * (1 - cov) + scene.eyebrow_level * cov

    # everything else lives in a window around the eye
    ex, ey = scene.eye_center
    hw = scene.eye_half_width
    half = scene.eyelid_aperture / 2
    ls, lf = scene.upper_lash
    ws, wf = scene.lower_lash
    x0 = max(int(math.floor(ex - hw)) - 2, 0)
    x1 = min(int(math.ceil(ex + hw)) + 2, scene.width - 1)
    y0 = max(int(math.floor(ey - half - ls - lf)) - 2, 0)
    y1 = min(int(math.ceil(ey + half + ws + wf)) + 2, scene.height - 1)
    icx, icy = scene.iris_center
    r_out = scene.iris_radius + 1
    y0 = max(min(y0, int(icy - r_out)), 0)
    y1 = min(max(y1, int(icy + r_out) + 1), scene.height - 1)
    x0 = max(min(x0, int(icx - r_out)), 0)
    x1 = min(max(x1, int(icx + r_out) + 1), scene.width - 1)
    if x1 < x0 or y1 < y0:
        return img
    X, Y = np.meshgrid(xs[x0 : x1 + 1], ys[y0 : y1 + 1])
    sub = img[y0 : y1 + 1, x0 : x1 + 1]

    inside_x = _overlap(X, ex - hw, ex + hw) if aa else (np.abs(X - ex) <= hw).astype(np.float64)
    y_up, y_lo = _lids(scene, X)

    # lash bands: solid next to the lid, then a linear fade into skin
    # (each pixel takes the lash of the nearer lid; partial lid coverage is
    # handled by the opening blend below, so no step is applied here)
    upper = Y < 0.5 * (y_up + y_lo)
    d_up = np.maximum(y_up - Y, 0.0)
    w_up = np.clip((ls + lf - d_up) / lf, 0.0, 1.0) * inside_x * upper
    sub = sub * (1 - w_up) + scene.upper_lash_level * w_up
    d_lo = np.maximum(Y - y_lo, 0.0)
    w_lo = np.clip((ws + wf - d_lo) / wf, 0.0, 1.0) * inside_x * ~upper
    sub = sub * (1 - w_lo) + scene.lower_lash_level * w_lo

    if aa:
        opening = np.clip(np.minimum(Y + 0.5, y_lo) - np.maximum(Y - 0.5, y_up), 0.0, 1.0) * inside_x
    else:
        opening = ((Y > y_up) & (Y < y_lo)).astype(np.float64) * inside_x
    # corner wedges: the opening darkens linearly toward each corner (canthus)
    reach = np.abs(X - ex) - (hw - scene.wedge_length)
    w = np.clip(reach / scene.wedge_length, 0.0, 1.0)
    inner = scene.sclera_level * (1 - w) + scene.wedge_level * w
    sub = sub * (1 - opening) + inner * opening

    dist = np.hypot(X - icx, Y - icy)
    c_iris = _step(scene.iris_radius - dist, aa) * opening
    sub = sub * (1 - c_iris) + scene.iris_level * c_iris
    c_pupil = _step(scene.pupil_radius - dist, aa) * opening
    sub = sub * (1 - c_pupil) + scene.pupil_level * c_pupil

    img[y0 : y1 + 1, x0 : x1 + 1] = sub
    return img


@lru_cache(maxsize=256)
def _clean_cached(scene: EyeScene) -> np.ndarray:
    out = _render_clean(scene)
    out.flags.writeable = False
    return out


def visible_iris_fraction(scene: EyeScene, step: float = 0.5) -> float:
    """Share of the iris disc that lies inside the eye opening."""
    R = scene.iris_radius
    g = np.arange(-R + step / 2, R, step)
    gx, gy = np.meshgrid(g, g)
    disc = gx * gx + gy * gy <= R * R
    X = gx[disc] + scene.iris_center[0]
    Y = gy[disc] + scene.iris_center[1]
    y_up, y_lo = _lids(scene, X)
    inside = (np.abs(X - scene.eye_center[0]) < scene.eye_half_width) & (Y > y_up) & (Y < y_lo)
    return float(inside.mean())


def ground_truth(scene: EyeScene, side: str = "temporal", gaze=(0.0, 0.0)) -> GroundTruth:
    return GroundTruth(
        pupil_center=tuple(scene.iris_center),
        iris_radius=scene.iris_radius,
        corner=scene.corners[side],
        visible_iris_fraction=visible_iris_fraction(scene),
        gaze_angle=tuple(gaze),
        corners=scene.corners,
    )


def render(scene: EyeScene, side: str = "temporal", gaze=(0.0, 0.0)) -> tuple[GrayImage, GroundTruth]:
    """Render ``scene``; identical scenes (including seed) give identical bytes."""
    clean_scene = replace(scene, noise_sigma=0.0, seed=0)
    img = _clean_cached(clean_scene)
    if scene.noise_sigma > 0:
        rng = np.random.default_rng(scene.seed)
        img = img + rng.normal(0.0, scene.noise_sigma, size=img.shape)
    pixels = np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8)
    return GrayImage(pixels), ground_truth(scene, side, gaze)


# ----------------------------------------------------------------- protocols


@dataclass(frozen=True)
class SynthFrame:
    index: int
    t: float
    scene: EyeScene
    truth: GroundTruth
    dwell: int = 0

    def render(self) -> GrayImage:
        return render(self.scene)[0]


def gaze_scene(
    base: EyeScene, angle_x: float, angle_y: float, calib: Calibration = SYNTH_CALIBRATION
) -> EyeScene:
    """Base scene with the iris moved to the given gaze angle (degrees)."""
    ex, ey = base.eye_center
    return replace(
        base,
        iris_center=(ex + angle_x / calib.deg_per_px_x, ey + angle_y / calib.deg_per_px_y),
    )


def _frame(base, calib, index, fps, ax, ay, dwell, side):
    scene = replace(gaze_scene(base, ax, ay, calib), seed=base.seed + index)
    return SynthFrame(index, index / fps, scene, ground_truth(scene, side, (ax, ay)), dwell)


def _axis_angles(axis, angle):
    if axis not in ("x", "y", "horizontal", "vertical"):
        raise ValueError(f"unknown axis {axis!r}")
    return (angle, 0.0) if axis in ("x", "horizontal") else (0.0, angle)


def fixation_protocol(
    base: EyeScene = EyeScene(),
    calib: Calibration = SYNTH_CALIBRATION,
    amplitude: float = 16.0,
    dwell: float = 2.0,
    fps: float = 30.0,
    n_dwells: int = 2,
    axis: str = "x",
    side: str = "temporal",
) -> list[SynthFrame]:
    """Gaze alternates between +amplitude and -amplitude, holding each for ``dwell`` s."""
    if fps <= 0:
        raise ValueError("fps must be positive")
    per = int(round(dwell * fps))
    frames = []
    for d in range(n_dwells):
        angle = amplitude if d % 2 == 0 else -amplitude
        ax, ay = _axis_angles(axis, angle)
        for _ in range(per):
            frames.append(_frame(base, calib, len(frames), fps, ax, ay, d, side))
    return frames


def pursuit_angle(t: float, v_max: float = 20.0, period: float = 2.0) -> float:
    return v_max * period / (2 * math.pi) * math.sin(2 * math.pi * t / period)


def pursuit_protocol(
    base: EyeScene = EyeScene(),
    calib: Calibration = SYNTH_CALIBRATION,
    v_max: float = 20.0,
    period: float = 2.0,
    axis: str = "x",
    fps: float = 30.0,
    cycles: float = 1.0,
    side: str = "temporal",
) -> list[SynthFrame]:
    """Sinusoidal gaze whose angular speed peaks at ``v_max``."""
    if fps <= 0:
        raise ValueError("fps must be positive")
    n = int(round(cycles * period * fps))
    frames = []
    for i in range(n):
        ax, ay = _axis_angles(axis, pursuit_angle(i / fps, v_max, period))
        frames.append(_frame(base, calib, i, fps, ax, ay, 0, side))
    return frames


def range_angles(step: float = 3.0, extent: float = 18.0) -> list[float]:
    """0, +step, -step, +2 step, -2 step, ... out to +-extent."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor(extent / step + 1e-9))
    out = [0.0]
    for k in range(1, n + 1):
        out += [k * step, -k * step]
    return out


def range_protocol(
    base: EyeScene = EyeScene(),
    calib: Calibration = SYNTH_CALIBRATION,
    step: float = 3.0,
    extent: float = 18.0,
    dwell: float = 3.0,
    axis: str = "x",
    fps: float = 30.0,
    side: str = "temporal",
) -> list[SynthFrame]:
    per = int(round(dwell * fps))
    frames = []
    for d, angle in enumerate(range_angles(step, extent)):
        ax, ay = _axis_angles(axis, angle)
        for _ in range(per):
            frames.append(_frame(base, calib, len(frames), fps, ax, ay, d, side))
    return frames


def static_protocol(
    base: EyeScene = EyeScene(), n_frames: int = 30, fps: float = 30.0, side: str = "temporal"
) -> list[SynthFrame]:
    return [_frame(base, SYNTH_CALIBRATION, i, fps, 0.0, 0.0, 0, side) for i in range(n_frames)]


def dwell_windows(frames: list[SynthFrame]) -> list[tuple[float, float, float, float]]:
    """``(t_start, t_end, angle_x, angle_y)`` per dwell, in protocol order."""
    out = {}
    for f in frames:
        t0, t1, ax, ay = out.get(f.dwell, (f.t, f.t, *f.truth.gaze_angle))
        out[f.dwell] = (min(t0, f.t), max(t1, f.t), ax, ay)
    return [out[k] for k in sorted(out)]


def manifest_rows(frames: list[SynthFrame]):
    for f in frames:
        yield {
            "frame_index": f.index,
            "t": f"{f.t:.6f}",
            "true_pupil_x": f"{f.truth.pupil_center[0]:.6f}",
            "true_pupil_y": f"{f.truth.pupil_center[1]:.6f}",
            "true_corner_x": f"{f.truth.corner[0]:.6f}",
            "true_corner_y": f"{f.truth.corner[1]:.6f}",
            "gaze_deg_x": f"{f.truth.gaze_angle[0]:.6f}",
            "gaze_deg_y": f"{f.truth.gaze_angle[1]:.6f}",
        }


def manifest_csv(frames: list[SynthFrame]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=MANIFEST_FIELDS, lineterminator="\n")
    w.writeheader()
    w.writerows(manifest_rows(frames))
    return buf.getvalue()


def read_manifest(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["frame_index"] = int(r["frame_index"])
        for k in MANIFEST_FIELDS[1:]:
            r[k] = float(r[k])
    return rows


def occluded_scene(base: Optional[EyeScene] = None, aperture: float = 160.0) -> EyeScene:
    """Scene with a narrow opening: the lids cover the iris once gaze moves vertically."""
    return replace(base or EyeScene(), eyelid_aperture=aperture)
