"""Single-camera video-oculography: pupil centre, eye corner, gaze velocity."""

from .circle import Circle, FitReport, algebraic_fit, double_fit, geometric_rss
from .corner import CornerPoint, detect_corner
from .errors import DetectionFailure, PgmFormatError
from .image import GrayImage, downscale, isodata_threshold, load_pgm, save_pgm, segment
from .kinematics import Calibration, GazeObservation, velocity
from .pipeline import FrameResult, detect_frame
from .config import RunConfig

__version__ = "0.1.0"

__all__ = [
    "Calibration",
    "Circle",
    "CornerPoint",
    "DetectionFailure",
    "FitReport",
    "FrameResult",
    "GazeObservation",
    "GrayImage",
    "PgmFormatError",
    "RunConfig",
    "algebraic_fit",
    "detect_corner",
    "detect_frame",
    "double_fit",
    "downscale",
    "geometric_rss",
    "isodata_threshold",
    "load_pgm",
    "save_pgm",
    "segment",
    "velocity",
]
