"""Per-stage latency of the full detector on one representative frame."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import RunConfig
from .pipeline import STAGES, detect_frame
from .synth import EyeScene, render

BUDGET_MS = 1000.0 / 300.0  # one run per frame at 300 Hz


@dataclass(frozen=True)
class StageTiming:
    name: str
    mean_ms: float
    median_ms: float
    p95_ms: float


@dataclass(frozen=True)
class BenchReport:
    iterations: int
    backend: str
    stages: tuple  # StageTiming per stage, then "total"

    @property
    def total(self) -> StageTiming:
        return self.stages[-1]

    @property
    def budget_ratio(self) -> float:
        return self.total.median_ms / BUDGET_MS

    @property
    def stage_sum_ms(self) -> float:
        return sum(s.mean_ms for s in self.stages[:-1])

    def text(self) -> str:
        lines = [f"backend: {self.backend}   iterations: {self.iterations}",
                 f"{'stage':<10} {'mean':>8} {'median':>8} {'p95':>8}  (ms)"]
        for s in self.stages:
            lines.append(f"{s.name:<10} {s.mean_ms:8.3f} {s.median_ms:8.3f} {s.p95_ms:8.3f}")
        lines.append(f"stage sum {self.stage_sum_ms:.3f} ms vs total mean {self.total.mean_ms:.3f} ms")
        verdict = "within" if self.budget_ratio <= 1 else "over"
        lines.append(
            f"median {self.total.median_ms:.3f} ms / budget {BUDGET_MS:.3f} ms = {self.budget_ratio:.3f} ({verdict} budget)"
        )
        return "\n".join(lines)


def run_bench(iterations: int = 100, config: RunConfig = RunConfig(), scene: EyeScene = None) -> BenchReport:
    if iterations < 10:
        raise ValueError("at least 10 iterations are required")
    img, _ = render(scene or EyeScene(noise_sigma=8.0))
    detect_frame(img, config)  # warm-up
    samples = {k: [] for k in STAGES + ("total",)}
    for _ in range(iterations):
        tm = {}
        detect_frame(img, config, tm)
        for k in samples:
            samples[k].append(tm[k] * 1e3)
    stages = tuple(
        StageTiming(k, float(np.mean(v)), float(np.median(v)), float(np.percentile(v, 95)))
        for k, v in samples.items()
    )
    return BenchReport(iterations, kernels.BACKEND, stages)
