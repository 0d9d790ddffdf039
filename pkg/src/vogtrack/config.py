"""Run configuration: defaults, ``key=value`` config files and overrides."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace

CONFIG_ENV = "VOGTRACK_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    downscale_factor: int = 8
    window_width_ratio: float = 0.15
    outlier_k: float = 2.0
    min_samples: int = 8
    corner_side: str = "temporal"
    deg_per_px_x: float = 0.05
    deg_per_px_y: float = 0.05
    fps: float = 30.0
    # refined eye area width, in iris-window widths
    refine_windows: int = 3
    # zigzag slab height at the start column
    slab0: int = 3
    # a border neighbour counts as sclera when brighter than skin by this much
    sclera_margin: float = 20.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (int, float)) and not isinstance(v, bool) and v <= 0:
                raise ValueError(f"{f.name} must be positive, got {v}")
        if not 0 < self.window_width_ratio < 1:
            raise ValueError("window_width_ratio must lie in (0, 1)")
        if self.corner_side not in ("temporal", "nasal"):
            raise ValueError("corner_side must be 'temporal' or 'nasal'")

    def to_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **overrides) -> "RunConfig":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **_coerce(clean))


def _coerce(values: dict) -> dict:
    types = {f.name: f.type for f in fields(RunConfig)}
    out = {}
    for key, raw in values.items():
        if key not in types:
            raise KeyError(f"unknown config key {key!r}")
        kind = types[key]
        if kind in (int, "int"):
            out[key] = int(raw)
        elif kind in (float, "float"):
            out[key] = float(raw)
        else:
            out[key] = str(raw)
    return out


def parse_config_text(text: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key] = value
    return values


def load_config(path=None, **overrides) -> RunConfig:
    """Defaults, then the config file (argument or env var), then overrides."""
    cfg = RunConfig()
    path = path or os.environ.get(CONFIG_ENV)
    if path:
        with open(path, encoding="utf-8") as fh:
            cfg = replace(cfg, **_coerce(parse_config_text(fh.read())))
    return cfg.with_overrides(**overrides)
