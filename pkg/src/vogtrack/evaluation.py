"""Evaluation suites: synthesize, track, and compare against budgets.

Every suite renders its frames once, keeps the encoded PGM bytes, and
checks their digests again after tracking so a stage that scribbles on
its input is caught.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .config import RunConfig
from .image import load_pgm, save_pgm
from .kinematics import Calibration, GazeObservation, fixation_stats, linear_range, InsufficientRangeData
from .synth import (
    EyeScene,
    SynthFrame,
    dwell_windows,
    fixation_protocol,
    occluded_scene,
    pursuit_protocol,
    range_protocol,
    render,
)
from .tracking import observe

FIXATION_BUDGET = (1.12, 2.48)  # deg/s, x and y
RANGE_HALF = 16.0  # deg
RANGE_R2 = 0.999
PURSUIT_ERROR_PX = 2.0
PROTOCOLS = ("fixation", "pursuit", "range")


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    budget: str
    passed: bool

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.value:.4f} ({self.budget})"


@dataclass
class Report:
    protocol: str
    checks: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def text(self) -> str:
        lines = [f"[{self.protocol}]"] + [c.line() for c in self.checks]
        lines += [f"      {k}: {v}" for k, v in self.info.items()]
        return "\n".join(lines)

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("protocol", "criterion", "value", "budget", "passed"))
        for c in self.checks:
            w.writerow((self.protocol, c.name, f"{c.value:.6f}", c.budget, int(c.passed)))
        return buf.getvalue()


@dataclass
class SuiteRun:
    frames: list
    observations: list
    digests_match: bool

    @property
    def failures(self) -> int:
        return sum(not o.ok for o in self.observations)


def _digest(blob: bytes) -> str:
    return hashlib.sha256(blob).hexdigest()


def run_suite(frames: Sequence[SynthFrame], config: RunConfig = RunConfig()) -> SuiteRun:
    """Render, encode, track, and verify the encoded frames were not changed."""
    blobs = [bytearray(save_pgm(f.render())) for f in frames]
    before = [_digest(b) for b in blobs]
    obs = [observe(load_pgm(bytes(b)), f.t, config)[0] for f, b in zip(frames, blobs)]
    after = [_digest(b) for b in blobs]
    return SuiteRun(list(frames), obs, before == after)


def _calib(config: RunConfig) -> Calibration:
    return Calibration(config.deg_per_px_x, config.deg_per_px_y)


def _windows(frames):
    return [(t0, t1) for t0, t1, _, _ in dwell_windows(frames)]


def _integrity(report: Report, runs: Sequence[SuiteRun]) -> None:
    ok = all(r.digests_match for r in runs)
    report.checks.append(Check("synthetic data unchanged", float(ok), "content hash", ok))


def evaluate_fixation(
    config: RunConfig = RunConfig(), sigma: float = 8.0, seed: int = 0, occluded_aperture: float = 160.0
) -> Report:
    """Mean fixation speeds on the open eye, and the y >= x asymmetry under occlusion."""
    base = EyeScene(noise_sigma=sigma, seed=seed)
    occ = occluded_scene(base, occluded_aperture)
    calib = _calib(config)
    rep = Report("fixation")
    runs = []
    stats = {}
    for name, scene in (("open", base), ("occluded", occ)):
        obs, windows = [], []
        t_shift = 0.0
        for axis in ("x", "y"):
            frames = fixation_protocol(scene, axis=axis, fps=config.fps)
            run = run_suite(frames, config)
            runs.append(run)
            # concatenate both axes into one trace with a time gap between them
            obs += [replace(o, t=o.t + t_shift) for o in run.observations]
            windows += [(a + t_shift, b + t_shift) for a, b in _windows(frames)]
            t_shift += frames[-1].t + 1.0
        stats[name] = (fixation_stats(obs, windows, calib), sum(not o.ok for o in obs), len(obs))

    s, fails, n = stats["open"]
    bx, by = FIXATION_BUDGET
    rep.checks.append(Check("mean speed x (deg/s)", s.mean_speed_x, f"<= {bx}", s.mean_speed_x <= bx))
    rep.checks.append(Check("mean speed y (deg/s)", s.mean_speed_y, f"<= {by}", s.mean_speed_y <= by))
    so, ofails, on = stats["occluded"]
    rep.checks.append(Check(
        "occluded speed y - x (deg/s)", so.mean_speed_y - so.mean_speed_x, ">= 0",
        so.mean_speed_y >= so.mean_speed_x,
    ))
    _integrity(rep, runs)
    rep.info.update({
        "open failures": f"{fails}/{n}",
        "occluded speeds x, y": f"{so.mean_speed_x:.4f}, {so.mean_speed_y:.4f}",
        "occluded failures": f"{ofails}/{on}",
        "sigma": sigma,
    })
    return rep


def evaluate_pursuit(config: RunConfig = RunConfig(), sigma: float = 8.0, seed: int = 0) -> Report:
    """Per-frame pupil error against the manifest, plus velocity error in deg/s."""
    calib = _calib(config)
    rep = Report("pursuit")
    runs = []
    errs, verr = [], []
    for axis in ("x", "y"):
        frames = pursuit_protocol(EyeScene(noise_sigma=sigma, seed=seed), axis=axis, fps=config.fps)
        run = run_suite(frames, config)
        runs.append(run)
        prev = None
        for f, o in zip(frames, run.observations):
            if not o.ok:
                errs.append(math.inf)
                prev = None
                continue
            errs.append(math.dist((o.pupil.a, o.pupil.b), f.truth.pupil_center))
            if prev is not None:
                pf, po = prev
                dt = o.t - po.t
                est = ((o.offset[0] - po.offset[0]) / dt, (o.offset[1] - po.offset[1]) / dt)
                tru = tuple(
                    ((f.truth.pupil_center[k] - f.truth.corner[k]) - (pf.truth.pupil_center[k] - pf.truth.corner[k])) / dt
                    for k in (0, 1)
                )
                verr.append(math.hypot((est[0] - tru[0]) * calib.deg_per_px_x, (est[1] - tru[1]) * calib.deg_per_px_y))
            prev = (f, o)
    worst = max(errs)
    rep.checks.append(Check("max pupil error (px)", worst, f"<= {PURSUIT_ERROR_PX}", worst <= PURSUIT_ERROR_PX))
    _integrity(rep, runs)
    rep.info.update({
        "mean velocity error (deg/s)": f"{float(np.mean(verr)):.4f}" if verr else "n/a",
        "failures": f"{sum(r.failures for r in runs)}/{len(errs)}",
        "sigma": sigma,
    })
    return rep


def _range_fit(scene, axis, config, dwell):
    frames = range_protocol(scene, axis=axis, fps=config.fps, dwell=dwell)
    run = run_suite(frames, config)
    k = 0 if axis == "x" else 1
    dwells = [(t0, t1, (ax, ay)[k]) for t0, t1, ax, ay in dwell_windows(frames)]
    try:
        fit = linear_range(run.observations, dwells, axis)
    except InsufficientRangeData:
        fit = None
    return fit, run


def evaluate_range(
    config: RunConfig = RunConfig(),
    sigma: float = 8.0,
    seed: int = 0,
    dwell: float = 1.0,
    occluded_aperture: float = 160.0,
) -> Report:
    """Linearity of offset vs angle; occlusion must shrink the vertical range."""
    base = EyeScene(noise_sigma=sigma, seed=seed)
    occ = occluded_scene(base, occluded_aperture)
    rep = Report("range")
    hx, run_x = _range_fit(base, "x", config, dwell)
    ox, run_ox = _range_fit(occ, "x", config, dwell)
    oy, run_oy = _range_fit(occ, "y", config, dwell)

    half = hx.half_range if hx else 0.0
    rep.checks.append(Check("linear range x (deg)", half, f">= {RANGE_HALF}", half >= RANGE_HALF))
    r2 = _r2_within(hx, RANGE_HALF)
    rep.checks.append(Check(f"r^2 over +-{RANGE_HALF:g} deg", r2, f">= {RANGE_R2}", r2 >= RANGE_R2))
    ohx = ox.half_range if ox else 0.0
    ohy = oy.half_range if oy else 0.0
    rep.checks.append(Check("occluded range x - y (deg)", ohx - ohy, ">= 0", ohy <= ohx))
    _integrity(rep, [run_x, run_ox, run_oy])
    rep.info.update({
        "occluded range x, y": f"{ohx:g}, {ohy:g}",
        "slope x (px/deg)": f"{hx.slope:.4f}" if hx else "n/a",
        "sigma": sigma,
    })
    return rep


def _r2_within(fit, half: float) -> float:
    """r^2 of a line refitted to the dwells with |angle| <= half."""
    if fit is None:
        return 0.0
    sel = np.abs(fit.angles) <= half + 1e-9
    x, y = fit.angles[sel], fit.offsets[sel]
    if len(x) < 3:
        return 0.0
    p = np.polyfit(x, y, 1)
    ss_res = float(((y - np.polyval(p, x)) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0


def evaluate(protocol: str, config: RunConfig = RunConfig(), sigma: float = 8.0, seed: int = 0) -> Report:
    if protocol == "fixation":
        return evaluate_fixation(config, sigma, seed)
    if protocol == "pursuit":
        return evaluate_pursuit(config, sigma, seed)
    if protocol == "range":
        return evaluate_range(config, sigma, seed)
    raise ValueError(f"unknown protocol {protocol!r}")
